#include <algorithm>

#include "doctest.h"
#include "llmsim/corpus.hpp"
#include "llmsim/dfst.hpp"
#include "llmsim/error.hpp"

using namespace llmsim;

namespace {

SymbolString bin(const std::string& s) {
  static const Alphabet a({"0", "1"});
  return a.parse_string(s);
}

std::string bin_str(const SymbolString& s) {
  static const Alphabet a({"0", "1"});
  return a.render(s);
}

}  // namespace

TEST_CASE("identity transducer copies its input") {
  const Dfst id = parse_fst_spec(corpus::identity_fst_spec({"a", "b", "c"}));
  const auto r = fst_run(id, id.input_alphabet().parse_string("abc"));
  CHECK(r.verdict == Verdict::Accept);
  CHECK(id.output_alphabet().render(r.output) == "abc");
  CHECK(r.steps_used == 5);
  CHECK(r.trace.size() == 6);
}

TEST_CASE("running parity transducer: hand-simulated golden value") {
  // even -1/1-> odd -1/0-> even -0/1-> even -1/1-> odd
  const Dfst p = corpus::fst("running-parity-fst");
  const auto r = fst_run(p, bin("1101"));
  CHECK(r.verdict == Verdict::Accept);
  CHECK(bin_str(r.output) == "1011");
}

TEST_CASE("reverse transducer walks both ways") {
  const Dfst rev = parse_fst_spec(corpus::reverse_fst_spec({"a", "b", "c"}));
  const auto r = fst_run(rev, rev.input_alphabet().parse_string("abc"));
  CHECK(r.verdict == Verdict::Accept);
  CHECK(rev.output_alphabet().render(r.output) == "cba");

  const Dfst revb = corpus::fst("reverse-fst");
  for (const auto& w : all_strings_up_to(2, 0, 6)) {
    SymbolString expected(w.rbegin(), w.rend());
    CHECK(fst_run(revb, w).output == expected);
  }
}

TEST_CASE("a stay-loop on the left endmarker diverges") {
  Dfst::Table t;
  t[{0, 1}] = FstAction{Move::Stay, 0, {}};  // (q0, <) -> Stay, q0
  t[{0, 2}] = FstAction{Move::Stay, 0, {}};
  t[{0, 0}] = FstAction{Move::Stay, 0, {}};
  const Dfst loop(Alphabet({"q0"}), Alphabet({"a"}), Alphabet({"a"}), 0, {}, t);
  const auto r = fst_run(loop, {});
  CHECK(r.verdict == Verdict::Diverges);
  CHECK(r.steps_used == 1);
}

TEST_CASE("fst_run rejects symbols outside the alphabet") {
  const Dfst id = corpus::fst("identity-fst");
  try {
    fst_run(id, {0, 7});
    FAIL("expected UnknownSymbol");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownSymbol);
  }
}

TEST_CASE("construction rejects non-total tables and endmarker escapes") {
  Dfst::Table t;
  t[{0, 0}] = FstAction{Move::Right, 1, {}};
  t[{0, 1}] = FstAction{Move::Right, 0, {}};
  CHECK_THROWS_AS(Dfst(Alphabet({"q", "h"}), Alphabet({"a"}), Alphabet({"a"}), 0, {1}, t), Error);
  t[{0, 2}] = FstAction{Move::Right, 1, {}};  // moves right off >
  try {
    Dfst(Alphabet({"q", "h"}), Alphabet({"a"}), Alphabet({"a"}), 0, {1}, t);
    FAIL("expected InvalidMachine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidMachine);
  }
  t[{0, 2}] = FstAction{Move::Stay, 1, {}};
  t[{0, 1}] = FstAction{Move::Left, 0, {}};  // moves left off <
  CHECK_THROWS_AS(Dfst(Alphabet({"q", "h"}), Alphabet({"a"}), Alphabet({"a"}), 0, {1}, t), Error);
}

TEST_CASE("fst runs are deterministic and head stays on the endmarked tape") {
  for (const char* name : {"identity-fst", "running-parity-fst", "reverse-fst"}) {
    const Dfst m = corpus::fst(name);
    for (const auto& w : all_strings_up_to(2, 0, 5)) {
      const auto a = fst_run(m, w);
      CHECK(a == fst_run(m, w));
      for (const auto& c : a.trace) CHECK(c.head <= w.size() + 1);
    }
  }
}
