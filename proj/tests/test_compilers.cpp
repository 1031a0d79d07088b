#include <algorithm>

#include "doctest.h"
#include "llmsim/compilers.hpp"
#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"

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

TmCompileParams tm_params(std::size_t n, std::size_t k) {
  TmCompileParams p;
  p.input_length = n;
  p.space_bound = k;
  return p;
}

Answer run_model(const FixedLlm& m, const SymbolString& w) {
  return decode_answer(m, generate(m, input_prompt(m, w), 100000));
}

}  // namespace

TEST_CASE("rule words") {
  const Dfst fst = corpus::fst("running-parity-fst");
  const StateId even = fst.states().id("even");
  CHECK(rule_word(fst, even, 1, 1) == "R(even,1;R,odd,1;@1)");
  CHECK(rule_word(fst, even, left_end(kBin), 0) == "R(even,<;R,even,;@0)");
}

TEST_CASE("compile_fst") {
  SUBCASE("identity copies its input") {
    const Dfst fst = corpus::fst("identity-fst");
    const auto cm = compile_fst(fst, {4});
    const Answer a = run_model(cm.model, kBin.parse_string("01"));
    CHECK(a == Answer{Answer::Kind::Output, kBin.parse_string("01")});
    CHECK(cm.report.dimension <= cm.report.dimension_bound);
    CHECK(cm.report.dimension_bound == fst_dimension_bound(fst, 4));
  }

  SUBCASE("running parity agrees on every input up to length 6") {
    const Dfst fst = corpus::fst("running-parity-fst");
    const auto cm = compile_fst(fst, {6});
    const auto inputs = all_strings_up_to(2, 0, 6);
    const auto r = verify_equivalence(fst_oracle(fst), cm.model, inputs);
    CHECK(r.passed());
    CHECK(r.inputs_checked == 127);
    CHECK(r.min_margin >= 1);
    CHECK(run_model(cm.model, kBin.parse_string("1101")).output == kBin.parse_string("1011"));
  }

  SUBCASE("reversal over three letters") {
    const Dfst fst = parse_fst_spec(corpus::reverse_fst_spec({"a", "b", "c"}));
    const auto cm = compile_fst(fst, {3});
    const Alphabet& s = fst.input_alphabet();
    CHECK(run_model(cm.model, s.parse_string("abc")).output == s.parse_string("cba"));
    CHECK(verify_equivalence(fst_oracle(fst), cm.model, all_strings_up_to(3, 0, 3)).passed());
  }

  SUBCASE("non-halting transducers are rejected") {
    const Dfst loop = parse_fst_spec(
        "machine fst\nstates q h\nalphabet 0 1\noutput 0 1\ninitial q\nhalt h\n"
        "trans q < -> q R\ntrans q 0 -> q S\ntrans q 1 -> q R\ntrans q > -> h S\n");
    CHECK(error_of([&] { compile_fst(loop, {2}); }) == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("compile_tm") {
  SUBCASE("parity acceptor at n = 4") {
    const MultiTapeTm tm = corpus::tm("parity-tm");
    const auto p = tm_params(4, 2);
    const auto cm = compile_tm(tm, p);
    for (const auto& w : all_strings(2, 4)) {
      const Verdict v = tm_run(tm, w, 2).verdict;
      CHECK(run_model(cm.model, w).kind == (v == Verdict::Accept ? Answer::Kind::Accept : Answer::Kind::Reject));
    }
    CHECK(verify_equivalence(tm_oracle(tm, p), cm.model, all_strings(2, 4)).passed());
  }

  SUBCASE("palindrome sentences match traces on all 32 inputs of length 5") {
    const MultiTapeTm tm = corpus::tm("palindrome-tm");
    const auto p = tm_params(5, 7);
    const auto cm = compile_tm(tm, p);
    const auto r = verify_equivalence(tm_oracle(tm, p), cm.model, all_strings(2, 5));
    CHECK(r.passed());
    CHECK(r.inputs_checked == 32);
    CHECK(cm.report.dimension <= cm.report.dimension_bound);
  }

  SUBCASE("parity suite over lengths 1 to 6") {
    const MultiTapeTm tm = corpus::tm("parity-tm");
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto p = tm_params(n, n + 1);
      const auto r = verify_equivalence(tm_oracle(tm, p), compile_tm(tm, p).model, all_strings(2, n));
      CHECK(r.passed());
      checked += r.inputs_checked;
    }
    CHECK(checked == 126);
  }

  SUBCASE("function mode") {
    const MultiTapeTm tm = corpus::tm("increment-tm");
    auto p = tm_params(4, 5);
    p.mode = TmMode::Function;
    const auto cm = compile_tm(tm, p);
    CHECK(verify_equivalence(tm_oracle(tm, p), cm.model, all_strings(2, 4)).passed());
  }

  SUBCASE("advice adds exactly one field") {
    const MultiTapeTm tm = corpus::tm("length-parity-tma");
    const AdviceFunction advice = corpus::length_parity_advice(3);
    auto p = tm_params(3, 2);
    p.advice = advice;
    const auto cm = compile_tm(tm, p);
    CHECK(verify_equivalence(tm_oracle(tm, p), cm.model, all_strings(2, 3)).passed());
    CHECK(std::count_if(cm.layout.fields.begin(), cm.layout.fields.end(),
                        [](const FieldSpan& f) { return f.name.find("advice") != std::string::npos; }) == 1);
    const std::size_t width = cm.layout.field("advice").width;
    CHECK(width == tm.advice_alphabet().size() + 1 + bits_for(advice.at(3).size()));

    TmEncodingOptions plain;
    plain.input_length = 3;
    plain.space_bound = 2;
    plain.posbits = cm.model.parts().posbits;
    CHECK(cm.report.dimension - TmEncoding(tm, plain).layout().dimension == width);

    CHECK(error_of([&] { compile_tm(tm, tm_params(3, 2)); }) == ErrorCode::MissingAdvice);
  }

  SUBCASE("exhaustive vocabulary") {
    const MultiTapeTm tm = corpus::tm("parity-tm");
    auto p = tm_params(4, 2);
    const std::size_t reachable = compile_tm(tm, p).report.vocabulary_size;
    p.policy = VocabularyPolicy::ExhaustiveUpToK;
    const auto cm = compile_tm(tm, p);
    CHECK(cm.report.vocabulary_size >= reachable);
    CHECK(verify_equivalence(tm_oracle(tm, p), cm.model, all_strings(2, 4)).passed());
    const std::uint64_t c = default_step_constant(tm);
    CHECK(cm.report.exhaustive_bound == c * c);
  }

  SUBCASE("errors") {
    const MultiTapeTm pal = corpus::tm("palindrome-tm");
    CHECK(error_of([&] { compile_tm(pal, tm_params(5, 3)); }) == ErrorCode::SpaceBoundViolated);
    auto p = tm_params(6, 7);
    p.policy = VocabularyPolicy::ExhaustiveUpToK;
    p.vocabulary_cap = 1000;
    CHECK(error_of([&] { compile_tm(pal, p); }) == ErrorCode::VocabularyBudgetExceeded);
    CHECK(error_of([] { compile_tm(corpus::tm("echo-itm"), tm_params(1, 1)); }) == ErrorCode::PreconditionViolated);
    CHECK(parse_vocabulary_policy("exhaustive") == VocabularyPolicy::ExhaustiveUpToK);
    CHECK(error_of([] { parse_vocabulary_policy("all"); }) == ErrorCode::ConfigError);
  }
}

TEST_CASE("extract_fst") {
  auto agrees = [](const Dfst& original, const Dfst& extracted, std::size_t min_len, std::size_t n) {
    std::size_t count = 0;
    for (const auto& w : all_strings_up_to(2, min_len, n)) {
      const auto a = fst_run(original, w);
      const auto b = fst_run(extracted, w);
      CHECK(b.verdict == Verdict::Accept);
      CHECK(a.output == b.output);
      ++count;
    }
    return count;
  };

  const Dfst identity = corpus::fst("identity-fst");
  CHECK(agrees(identity, extract_fst(compile_fst(identity, {3}).model, 3), 0, 3) == 15);

  const Dfst parity = corpus::fst("running-parity-fst");
  const auto cm = compile_fst(parity, {5});
  CHECK(agrees(parity, extract_fst(cm.model, 5), 1, 5) == 62);
  CHECK(error_of([&] { extract_fst(cm.model, 5, 100); }) == ErrorCode::StateBudgetExceeded);
}

TEST_CASE("verify_equivalence pinpoints a corrupted rule") {
  const Dfst fst = corpus::fst("running-parity-fst");
  const auto cm = compile_fst(fst, {3});
  const auto sentence = fst_sentence(fst, fst_run(fst, kBin.parse_string("11")), kBin.parse_string("11"));
  const std::string& from = sentence[1];
  const std::string& to = sentence[2];

  ModelParts p = cm.model.parts();
  const IntVector residual = p.attention.residual.apply(cm.model.embed(cm.model.id(from)));
  std::size_t changed = 0;
  for (auto& [key, value] : p.successor) {
    if (value == cm.model.id(to) && std::equal(residual.begin(), residual.end(), key.begin())) {
      value = p.fixpoint;
      ++changed;
    }
  }
  REQUIRE(changed == 1);
  const FixedLlm broken(p);

  // Oracle for the expected report: first input, in enumeration order, whose
  // sentence contains the corrupted succession.
  const auto inputs = all_strings_up_to(2, 0, 3);
  std::optional<Divergence> expected;
  for (const auto& w : inputs) {
    const auto words = fst_sentence(fst, fst_run(fst, w), w);
    for (std::size_t i = 0; i + 1 < words.size() && !expected; ++i)
      if (words[i] == from && words[i + 1] == to) expected = Divergence{w, i + 1, to, std::string(kHaltWord)};
    if (expected) break;
  }
  REQUIRE(expected);

  const auto r = verify_equivalence(fst_oracle(fst), broken, inputs);
  REQUIRE(!r.passed());
  CHECK(*r.divergence == *expected);
  CHECK(verify_equivalence(fst_oracle(fst), cm.model, inputs).passed());
}
