#include <fstream>
#include <sstream>

#include "doctest.h"
#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/machine_spec.hpp"

using namespace llmsim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string corpus_file(const std::string& name) { return slurp(std::string(LLMSIM_SOURCE_DIR) + "/corpus/" + name + ".machine"); }

ErrorCode code_of(const std::string& text) {
  try {
    parse_machine_spec(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

std::string message_of(const std::string& text) {
  try {
    parse_machine_spec(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("running parity file parses to the expected table") {
  const Dfst m = parse_fst_spec(corpus_file("running-parity-fst"));
  CHECK(m.states().names() == std::vector<std::string>{"even", "odd", "h"});
  CHECK(m.is_halting(2));
  const auto& a = m.input_alphabet();
  CHECK(m.action(0, 1) == FstAction{Move::Right, 1, {1}});
  CHECK(m.action(1, 1) == FstAction{Move::Right, 0, {0}});
  CHECK(m.action(1, right_end(a)) == FstAction{Move::Stay, 2, {}});
  CHECK(m.transitions().size() == 8);
}

TEST_CASE("every corpus file is the canonical form of its machine") {
  for (const auto& e : corpus::entries()) {
    CAPTURE(e.name);
    const std::string file = corpus_file(e.name);
    const Machine parsed = parse_machine_spec(file);
    CHECK(parsed == parse_machine_spec(e.spec));
    CHECK(serialize_machine(parsed) == file);
  }
}

TEST_CASE("duplicate transitions violate determinism") {
  const std::string text =
      "machine fst\nstates q h\nalphabet a\ninitial q\nhalt h\n"
      "trans q < -> q R\ntrans q a -> q R a\ntrans q a -> h S\ntrans q > -> h S\n";
  CHECK(code_of(text) == ErrorCode::ValidationError);
  CHECK(message_of(text).find("determinism") != std::string::npos);
}

TEST_CASE("wildcards yield to specific rules") {
  const Dfst m = parse_fst_spec(
      "machine fst\nstates q h\nalphabet a b\ninitial q\nhalt h\n"
      "trans q * -> q R a\ntrans q < -> q R\ntrans q b -> q R b\ntrans q > -> h S\n");
  const auto r = fst_run(m, m.input_alphabet().parse_string("abba"));
  CHECK(m.output_alphabet().render(r.output) == "abba");
}

TEST_CASE("syntax errors carry a position") {
  CHECK(code_of("") == ErrorCode::SyntaxError);
  CHECK(message_of("").find("line 1, column 1") != std::string::npos);
  CHECK(code_of("machine pda\n") == ErrorCode::SyntaxError);
  const std::string bad_move = "machine fst\nstates q h\nalphabet a\ninitial q\nhalt h\ntrans q a -> q X\n";
  CHECK(code_of(bad_move) == ErrorCode::SyntaxError);
  CHECK(message_of(bad_move).find("line 6") != std::string::npos);
  CHECK(message_of("machine fst\nstates q h\nalphabet a\ninitial z\nhalt h\n").find("line 4") != std::string::npos);
  // Well-formed text describing a partial transducer is a validation failure.
  CHECK(code_of("machine fst\nstates q h\nalphabet a\ninitial q\nhalt h\ntrans q a -> h S\n") ==
        ErrorCode::ValidationError);
}

TEST_CASE("comment lines are skipped but '#' remains a symbol") {
  const auto m = corpus::tm("binary-counter-itm");
  CHECK(m.work_alphabet().contains("#"));
  CHECK_NOTHROW(parse_machine_spec("# leading comment\n" + corpus_file("parity-tm")));
}

TEST_CASE("serialization is idempotent") {
  for (const auto& e : corpus::entries()) {
    const std::string once = serialize_machine(parse_machine_spec(e.spec));
    CHECK(serialize_machine(parse_machine_spec(once)) == once);
  }
}

TEST_CASE("advice tables and streams") {
  const auto m = corpus::tm("length-parity-tma");
  const auto f = parse_advice_table(m, "0 E\n1 O\n2 -\n");
  CHECK(f.at(0) == SymbolString{0});
  CHECK(f.at(1) == SymbolString{1});
  CHECK(f.at(2).empty());
  CHECK(parse_advice_table(m, serialize_advice_table(m, f)) == f);
  CHECK_THROWS_AS(parse_advice_table(m, "0 Z\n"), Error);

  const Alphabet b({"0", "1"});
  CHECK(parse_stream(b, "1\n\n# note\n0\n1\n") == SymbolString{1, 0, 1});
}
