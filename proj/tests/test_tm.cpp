#include <algorithm>
#include <tuple>

#include "doctest.h"
#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/tm.hpp"

using namespace llmsim;

namespace {

const Alphabet kBin({"0", "1"});

bool is_palindrome(const SymbolString& w) { return std::equal(w.begin(), w.end(), w.rbegin()); }

// Hand-written transition function of the parity machine, independent of the
// spec parser: (state, scanned input, scanned work) -> (next, input move,
// written symbol, work move). States: 0 scan, 1 acc, 2 rej. Input: 0, 1, < = 2,
// > = 3. Work: 0 blank, 1 one.
std::tuple<StateId, int, SymbolId, int> parity_oracle(StateId q, SymbolId in, SymbolId work) {
  REQUIRE(q == 0);
  switch (in) {
    case 2:
    case 0: return {0, 1, work, 0};
    case 1: return {0, 1, work == 0 ? 1u : 0u, 0};
    default: return {work == 0 ? 1u : 2u, 0, work, 0};
  }
}

}  // namespace

TEST_CASE("tm_step writes one cell on the unary counter") {
  const MultiTapeTm m = parse_tm_spec(
      "machine tm\n"
      "states s acc rej\n"
      "alphabet 1\n"
      "work _ 1\n"
      "tapes 1\n"
      "initial s\n"
      "accept acc\n"
      "reject rej\n"
      "trans s < _ -> s R _ S\n"
      "trans s 1 _ -> s R 1 R\n"
      "trans s > _ -> acc S _ S\n");
  const SymbolString input = m.input_alphabet().parse_string("11");
  const auto c0 = initial_config(m);
  CHECK(space(c0) == 0);
  const auto c1 = tm_step(m, c0, input);
  CHECK(c1.input_head == 1);
  CHECK(space(c1) == 0);
  const auto c2 = tm_step(m, c1, input);
  CHECK(c2.tapes[0].cells == SymbolString{1});
  CHECK(c2.tapes[0].head == 1);
  CHECK(c2.input_head == 2);
  CHECK(space(c2) == 2);
}

TEST_CASE("tm_step on the parity machine agrees with a hand-built table") {
  const MultiTapeTm m = corpus::tm("parity-tm");
  std::size_t checked = 0;
  for (const auto& w : all_strings_up_to(2, 0, 4)) {
    const auto run = tm_run(m, w, 1);
    REQUIRE(run.verdict != Verdict::SpaceExceeded);
    for (std::size_t i = 0; i + 1 < run.trace.size(); ++i) {
      const auto& c = run.trace[i];
      const SymbolId work = c.tapes[0].cells.empty() ? 0 : c.tapes[0].cells[0];
      const auto [next, in_move, write, work_move] = parity_oracle(c.state, c.scanned_input, work);
      const auto& s = run.trace[i + 1];
      CHECK(s.state == next);
      CHECK(s.input_head == c.input_head + in_move);
      CHECK(scanned_work(m, s.tapes[0]) == write);
      CHECK(s.tapes[0].head == c.tapes[0].head + work_move);
      ++checked;
    }
    const bool even = std::count(w.begin(), w.end(), 1u) % 2 == 0;
    CHECK(run.verdict == (even ? Verdict::Accept : Verdict::Reject));
  }
  CHECK(checked > 100);
}

TEST_CASE("tm_step refuses terminal configurations") {
  const MultiTapeTm m = corpus::tm("parity-tm");
  const auto run = tm_run(m, {}, 1);
  REQUIRE(run.verdict == Verdict::Accept);
  try {
    tm_step(m, run.trace.back(), {});
    FAIL("expected TerminalConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TerminalConfig);
  }
}

TEST_CASE("palindrome machine") {
  const MultiTapeTm m = parse_tm_spec(corpus::palindrome_tm_spec({"a", "b"}));
  const auto& a = m.input_alphabet();
  CHECK(tm_run(m, a.parse_string("aba"), 5).verdict == Verdict::Accept);
  CHECK(tm_run(m, a.parse_string("ab"), 5).verdict == Verdict::Reject);

  SUBCASE("zero space fails on the first write") {
    const auto r = tm_run(m, a.parse_string("aba"), 0);
    CHECK(r.verdict == Verdict::SpaceExceeded);
    CHECK(space(r.trace.back()) == 1);
    for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) CHECK(space(r.trace[i]) == 0);
  }

  SUBCASE("agrees with string reversal on every input up to length 6") {
    const MultiTapeTm mb = corpus::tm("palindrome-tm");
    for (const auto& w : all_strings_up_to(2, 0, 6)) {
      const auto r = tm_run(mb, w, w.size());
      CHECK(r.verdict == (is_palindrome(w) ? Verdict::Accept : Verdict::Reject));
      CHECK(r.space_used <= w.size());
    }
  }
}

TEST_CASE("increment machine computes w + 1") {
  const MultiTapeTm m = corpus::tm("increment-tm");
  for (const auto& w : all_strings_up_to(2, 1, 6)) {
    std::uint64_t v = 0;
    for (SymbolId b : w) v = v * 2 + b;
    // Digits are stored most significant first; a carry out lands in cell 0.
    std::uint64_t r = v + 1;
    SymbolString expected;
    for (std::size_t i = 0; i < w.size() + 1; ++i, r >>= 1) expected.insert(expected.begin(), r & 1);
    if (expected.front() == 0) expected.erase(expected.begin());
    const auto run = tm_run(m, w, w.size() + 1);
    REQUIRE(run.verdict == Verdict::Accept);
    CHECK(m.work_alphabet().render(run.output) == kBin.render(expected));
  }
}

TEST_CASE("step bound is sound for halting corpus acceptors") {
  for (const char* name : {"parity-tm", "palindrome-tm", "increment-tm"}) {
    const MultiTapeTm m = corpus::tm(name);
    const auto c = default_step_constant(m);
    for (const auto& w : all_strings_up_to(2, 0, 6)) {
      const std::size_t k = w.size() + 1;
      const auto r = tm_run(m, w, k);
      CHECK(r.verdict != Verdict::StepBoundExceeded);
      CHECK(r.steps_used <= step_bound(w.size(), k, c));
    }
  }
  CHECK(step_bound(0, 0, 3) == 3);
  CHECK(step_bound(8, 2, 2) == 32);
  CHECK(step_bound(1'000'000, 200, 7) == UINT64_MAX);
}

TEST_CASE("a looping machine hits the step bound") {
  const MultiTapeTm m = parse_tm_spec(
      "machine tm\n"
      "states s acc rej\n"
      "alphabet 0\n"
      "work _\n"
      "tapes 1\n"
      "initial s\n"
      "accept acc\n"
      "reject rej\n"
      "trans s * _ -> s S _ S\n");
  const auto r = tm_run(m, {0, 0}, 3);
  CHECK(r.verdict == Verdict::StepBoundExceeded);
  CHECK(r.steps_used == step_bound(2, 3, default_step_constant(m)) + 1);
}

TEST_CASE("space is monotone along every trace") {
  const MultiTapeTm m = corpus::tm("palindrome-tm");
  for (const auto& w : all_strings_up_to(2, 0, 5)) {
    const auto r = tm_run(m, w, w.size());
    for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) CHECK(space(r.trace[i]) <= space(r.trace[i + 1]));
    CHECK(r.space_used == space(r.trace.back()));
  }
}

TEST_CASE("runs are deterministic") {
  const MultiTapeTm m = corpus::tm("increment-tm");
  for (const auto& w : all_strings_up_to(2, 0, 4)) CHECK(tm_run(m, w, 5) == tm_run(m, w, 5));
}

TEST_CASE("advice machines") {
  SUBCASE("empty advice is an ordinary run") {
    const MultiTapeTm m = corpus::tm("parity-tm");
    const auto advice = corpus::empty_advice(6);
    for (const auto& w : all_strings_up_to(2, 0, 4)) CHECK(tma_run(m, advice, w, 1) == tm_run(m, w, 1));
  }

  SUBCASE("length parity decided by advice alone, exhaustively to length 8") {
    const MultiTapeTm m = corpus::tm("length-parity-tma");
    const auto advice = corpus::length_parity_advice(8);
    for (const auto& w : all_strings_up_to(2, 0, 8)) {
      const auto r = tma_run(m, advice, w, 1);
      CHECK(r.verdict == (w.size() % 2 == 0 ? Verdict::Accept : Verdict::Reject));
      CHECK(r.space_used == 0);
    }
  }

  SUBCASE("missing advice") {
    const MultiTapeTm m = corpus::tm("length-parity-tma");
    try {
      tma_run(m, corpus::length_parity_advice(3), {0, 0, 0, 0}, 0);
      FAIL("expected MissingAdvice");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingAdvice);
    }
  }

  SUBCASE("only the advice for the input's own length matters") {
    const MultiTapeTm m = corpus::tm("length-parity-tma");
    const auto base = corpus::length_parity_advice(6);
    for (const auto& w : all_strings_up_to(2, 0, 6)) {
      AdviceFunction scrambled = base;
      for (std::size_t n = 0; n <= 6; ++n)
        if (n != w.size()) scrambled.set(n, {static_cast<SymbolId>((n + 1) % 2)});
      CHECK(tma_run(m, scrambled, w, 1) == tma_run(m, base, w, 1));
    }
  }
}

TEST_CASE("interactive runs") {
  SUBCASE("echo") {
    const MultiTapeTm m = corpus::tm("echo-itm");
    const auto r = itma_run_stream(m, {}, {0, 1}, {});
    CHECK(!r.failure);
    CHECK(r.chunks() == std::vector<SymbolString>{{0}, {1}});
  }

  SUBCASE("running xor 1101") {
    const MultiTapeTm m = corpus::tm("xor-itm");
    const auto r = itma_run_stream(m, {}, kBin.parse_string("1101"), {});
    CHECK(r.chunks() == std::vector<SymbolString>{{1}, {0}, {0}, {1}});
  }

  SUBCASE("unary counter overflows a fixed bound at the right epoch") {
    const MultiTapeTm m = corpus::tm("unary-counter-itm");
    const auto r = itma_run_stream(m, {}, kBin.parse_string("10110"), KSchedule{{3}});
    REQUIRE(r.failure);
    CHECK(*r.failure == Verdict::SpaceExceeded);
    CHECK(r.failed_epoch == 4);
    CHECK(r.chunks().size() == 3);
  }

  SUBCASE("binary counter emits the parity of the ones seen so far") {
    const MultiTapeTm m = corpus::tm("binary-counter-itm");
    const SymbolString stream = kBin.parse_string("1101110011");
    const auto r = itma_run_stream(m, {}, stream, {});
    REQUIRE(!r.failure);
    std::size_t ones = 0;
    const auto chunks = r.chunks();
    REQUIRE(chunks.size() == stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
      ones += stream[i];
      CHECK(chunks[i] == SymbolString{static_cast<SymbolId>(ones % 2)});
    }
  }

  SUBCASE("a stream split in two resumes where it stopped") {
    const MultiTapeTm m = corpus::tm("binary-counter-itm");
    const SymbolString stream = kBin.parse_string("111011010111");
    const auto whole = itma_run_stream(m, {}, stream, {});
    const SymbolString head(stream.begin(), stream.begin() + 5), tail(stream.begin() + 5, stream.end());
    const auto first = itma_run_stream(m, {}, head, {});
    const auto second = itma_run_stream(m, {}, tail, {}, std::nullopt, first.final_state);
    auto joined = first.chunks();
    for (const auto& c : second.chunks()) joined.push_back(c);
    CHECK(joined == whole.chunks());
    CHECK(second.final_state == whole.final_state);
  }

  SUBCASE("advice appended per epoch changes the xor mask") {
    const MultiTapeTm m = corpus::tm("advice-xor-itma");
    const auto advice = corpus::advice_xor_advice(8, 5);
    const auto r = itma_run_stream(m, advice, kBin.parse_string("0000000"), {});
    REQUIRE(!r.failure);
    CHECK(r.chunks() == std::vector<SymbolString>{{0}, {0}, {0}, {0}, {1}, {1}, {1}});
  }

  SUBCASE("each epoch ends at a boundary with an empty port") {
    const MultiTapeTm m = corpus::tm("xor-itm");
    const auto r = itma_run_stream(m, {}, kBin.parse_string("0110"), {});
    for (const auto& epoch : r.epoch_traces) {
      REQUIRE(epoch.size() >= 2);
      CHECK(is_boundary(m, epoch.back()));
      CHECK(!is_boundary(m, epoch.front()));
    }
  }
}

TEST_CASE("configuration words round-trip") {
  for (const char* name : {"palindrome-tm", "increment-tm", "length-parity-tma"}) {
    const MultiTapeTm m = corpus::tm(name);
    const auto advice = corpus::length_parity_advice(4);
    for (const auto& w : all_strings_up_to(2, 0, 4)) {
      const auto r = m.uses_advice() ? tma_run(m, advice, w, 6) : tm_run(m, w, 6);
      for (const auto& c : r.trace) {
        const std::string word = config_word(m, c);
        CHECK(parse_config_word(m, word) == c);
      }
    }
  }
  const MultiTapeTm m = corpus::tm("parity-tm");
  CHECK_THROWS_AS(parse_config_word(m, "T0[:0:0]Q[scan]"), Error);
  CHECK(config_word(m, initial_config(m)) == "T0[:0:0]I[<@0]Q[scan]");
}
