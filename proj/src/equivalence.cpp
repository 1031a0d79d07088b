#include <algorithm>

#include "llmsim/compilers.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

OracleRunner fst_oracle(const Dfst& machine) {
  return [&machine](const SymbolString& w) {
    const auto run = fst_run(machine, w);
    OracleRun o;
    o.words = fst_sentence(machine, run, w);
    o.answer = run.verdict == Verdict::Accept ? Answer{Answer::Kind::Output, run.output} : Answer{};
    return o;
  };
}

OracleRunner tm_oracle(const MultiTapeTm& machine, const TmCompileParams& params) {
  return [&machine, params](const SymbolString& w) {
    const std::uint64_t c = params.step_constant.value_or(default_step_constant(machine));
    const TmRunResult run = params.advice ? tma_run(machine, *params.advice, w, params.space_bound, c)
                                          : tm_run(machine, w, params.space_bound, c);
    OracleRun o;
    for (const auto& cfg : run.trace) o.words.push_back(config_word(machine, cfg));
    if (run.verdict == Verdict::Accept)
      o.answer = params.mode == TmMode::Function ? Answer{Answer::Kind::Output, run.output} : Answer{Answer::Kind::Accept, {}};
    else if (run.verdict == Verdict::Reject)
      o.answer = Answer{Answer::Kind::Reject, {}};
    return o;
  };
}

EquivalenceResult verify_equivalence(const OracleRunner& oracle, const FixedLlm& model,
                                     const std::vector<SymbolString>& inputs) {
  EquivalenceResult result;
  for (const auto& w : inputs) {
    ++result.inputs_checked;
    const OracleRun expected = oracle(w);
    GenerationTrace trace;
    auto diverge = [&](std::size_t step, std::string want, std::string got) {
      result.divergence = Divergence{w, step, std::move(want), std::move(got)};
    };
    try {
      trace.prompt = input_prompt(model, w);
      std::vector<TokenId> context = trace.prompt;
      // One token past the oracle sentence is enough to expose overruns.
      for (std::size_t step = 0; step <= expected.words.size(); ++step) {
        const NextToken next = model.next_token(context);
        ++result.tokens_generated;
        if (next.score.margin != kNoCompetitor) result.min_margin = std::min(result.min_margin, next.score.margin);
        const std::string& word = model.token(next.token).word;
        if (step == expected.words.size() || word != expected.words[step]) {
          diverge(step, step < expected.words.size() ? expected.words[step] : "<end>", word);
          break;
        }
        trace.generated.push_back(next.token);
        trace.scores.push_back(next.score);
        context.push_back(next.token);
        if (model.is_stop(next.token)) {
          trace.stopped = true;
          if (step + 1 != expected.words.size()) diverge(step + 1, expected.words[step + 1], "<end>");
          break;
        }
      }
    } catch (const Error& e) {
      diverge(trace.generated.size(),
              trace.generated.size() < expected.words.size() ? expected.words[trace.generated.size()] : "<end>",
              std::string("error ") + e.what());
    }
    if (!result.divergence) {
      const Answer got = decode_answer(model, trace);
      if (got != expected.answer)
        diverge(trace.generated.size(), to_string(expected.answer, model.parts().output_alphabet),
                to_string(got, model.parts().output_alphabet));
    }
    if (result.divergence) break;
  }
  return result;
}

}  // namespace llmsim
