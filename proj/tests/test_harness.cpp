#include <set>

#include "doctest.h"
#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/harness.hpp"

using namespace llmsim;

namespace {

const Alphabet kBin({"0", "1"});

ErrorCode error_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

SuiteConfig small() {
  SuiteConfig c;
  c.max_n = 4;
  c.stream_length = 40;
  c.streams = 4;
  return c;
}

}  // namespace

TEST_CASE("behavioural oracles") {
  CHECK(expected_fst_output("running-parity-fst", kBin.parse_string("1101")) == kBin.parse_string("1011"));
  CHECK(expected_fst_output("reverse-fst", kBin.parse_string("001")) == kBin.parse_string("100"));
  CHECK(expected_tm_answer("parity-tm", kBin.parse_string("0110")).kind == Answer::Kind::Accept);
  CHECK(expected_tm_answer("palindrome-tm", kBin.parse_string("011")).kind == Answer::Kind::Reject);
  CHECK(expected_tm_answer("increment-tm", kBin.parse_string("011")).output == kBin.parse_string("100"));
  CHECK(expected_tm_answer("increment-tm", kBin.parse_string("111")).output == kBin.parse_string("1000"));
  CHECK(expected_tm_answer("length-parity-tma", kBin.parse_string("10")).kind == Answer::Kind::Accept);
  CHECK(expected_stream_chunks("xor-itm", {}, kBin.parse_string("1101")) ==
        std::vector<SymbolString>{{1}, {0}, {0}, {1}});
  CHECK(error_of([] { expected_fst_output("parity-tm", {}); }) == ErrorCode::ConfigError);
}

TEST_CASE("every corpus machine passes its self-test") {
  for (const auto& e : corpus::entries()) {
    CAPTURE(e.name);
    CHECK(!corpus_self_test(e.name, 5));
  }
}

TEST_CASE("seeded streams") {
  CHECK(seeded_stream(7, 50) == seeded_stream(7, 50));
  CHECK(seeded_stream(7, 50) != seeded_stream(8, 50));
  const SymbolString s = seeded_stream(1, 1000, 3);
  const auto ones = std::count(s.begin(), s.end(), 1);
  CHECK(ones > 200);
  CHECK(ones < 400);
  const AdviceFunction a = counter_advice(10, 4);
  CHECK(a.at(1) == SymbolString{0});
  CHECK(a.at(4) == SymbolString{1});
  CHECK(a.at(2).empty());
}

TEST_CASE("report formats") {
  EquivalenceReport r;
  r.suite = "demo";
  r.tag = "T2";
  r.seed = 3;
  r.cases.push_back({"case a", 2, 5, 4, {{"k", "3"}}});
  r.inputs_checked = 2;
  r.tokens_generated = 5;
  r.min_margin = 4;
  r.elapsed_ms = 12.5;
  const std::string text = format_report(r, ReportFormat::Text);
  CHECK(text.find("case case a: inputs 2, tokens 5, min margin 4, k 3") != std::string::npos);
  CHECK(text.find("ms") == std::string::npos);
  CHECK(format_report(r, ReportFormat::Text, true).find("12 ms") != std::string::npos);
  CHECK(text.substr(text.size() - 5) == "PASS\n");

  const std::string json = format_report(r, ReportFormat::JsonLines);
  CHECK(json.rfind(R"({"type":"suite","suite":"demo","tag":"T2","seed":3})", 0) == 0);
  CHECK(json.find(R"("passed":true)") != std::string::npos);

  r.divergences.push_back({"case a", "01", 2, "x", "y"});
  CHECK(!r.passed());
  CHECK(format_report(r, ReportFormat::JsonLines).find(R"("type":"divergence")") != std::string::npos);
  r.divergences.clear();
  r.min_margin = 0;
  CHECK(!r.passed());

  CHECK(parse_report_format("json-lines") == ReportFormat::JsonLines);
  CHECK(error_of([] { parse_report_format("xml"); }) == ErrorCode::ConfigError);
}

TEST_CASE("suites") {
  SUBCASE("registry") {
    const auto names = suite_names();
    CHECK(std::set<std::string>(names.begin(), names.end()).count("T7-roundtrip") == 1);
    CHECK(error_of([] { run_suite("T9-nothing"); }) == ErrorCode::UnknownSuite);
    SuiteConfig bad;
    bad.schedule = {4, 2};
    CHECK(error_of([&] { run_suite("T2-fst", bad); }) == ErrorCode::ConfigError);
  }

  SUBCASE("transducer suite covers every corpus transducer") {
    const auto r = run_suite("T2-fst");
    CHECK(r.passed());
    CHECK(r.tag == "T2");
    CHECK(r.cases.size() == 3);
    CHECK(r.inputs_checked == 3 * 126);
    CHECK(r.min_margin >= 1);
  }

  SUBCASE("acceptor suite counts and step bounds") {
    const auto r = run_suite("T4-tm", small());
    CHECK(r.passed());
    // parity and palindrome, lengths 1..4
    CHECK(r.inputs_checked == 2 * (2 + 4 + 8 + 16));
    CHECK(r.step_bound_runs == r.inputs_checked);
  }

  SUBCASE("every suite passes at desk scale") {
    for (const auto& name : suite_names()) {
      if (name == "all" || name == "determinism" || name == "step-bound" || name == "margin") continue;
      CAPTURE(name);
      const auto r = run_suite(name, small());
      CHECK(r.passed());
      for (const auto& d : r.divergences) MESSAGE(d.case_name << ": " << d.expected << " vs " << d.actual);
    }
  }

  SUBCASE("roundtrip suite lists reconstructions per stream") {
    const auto r = run_suite("T7-roundtrip", small());
    CHECK(r.passed());
    REQUIRE(r.cases.size() == 4);
    for (const auto& c : r.cases) {
      bool has = false;
      for (const auto& [k, v] : c.details) has = has || k == "reconstructions";
      CHECK(has);
    }
  }

  SUBCASE("lineage suite fires every trigger") {
    const auto r = run_suite("T5-lineage", small());
    CHECK(r.passed());
    CHECK(r.cases.back().details.front().second == "space-exceeded,advice-changed,both");
  }

  SUBCASE("same seed, same bytes") {
    SuiteConfig c = small();
    c.seed = 9;
    CHECK(format_report(run_suite("T5-lineage", c), ReportFormat::JsonLines) ==
          format_report(run_suite("T5-lineage", c), ReportFormat::JsonLines));
    CHECK(format_report(run_suite("T5-lineage", c), ReportFormat::Text) !=
          format_report(run_suite("T5-lineage", small()), ReportFormat::Text));
  }
}
