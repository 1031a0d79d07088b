#include <algorithm>
#include <map>
#include <tuple>

#include "llmsim/compilers.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

namespace {

using RuleKey = std::tuple<StateId, SymbolId, std::size_t>;  // state, scanned, head

std::size_t ceil_log2(std::size_t x) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < x) ++b;
  return b;
}

}  // namespace

std::size_t fst_dimension_bound(const Dfst& machine, std::size_t n) {
  return kFstDimensionConstant *
         (machine.states().size() + machine.input_alphabet().size() + std::max<std::size_t>(ceil_log2(n + 1), 1));
}

std::string rule_word(const Dfst& machine, StateId state, SymbolId scanned, std::size_t head) {
  const FstAction& a = machine.action(state, scanned);
  std::string out;
  for (std::size_t i = 0; i < a.output.size(); ++i) {
    if (i) out += '.';
    out += machine.output_alphabet().name(a.output[i]);
  }
  return "R(" + machine.states().name(state) + "," + extended_name(machine.input_alphabet(), scanned) + ";" +
         move_char(a.move) + "," + machine.states().name(a.next) + "," + out + ";@" + std::to_string(head) + ")";
}

std::vector<std::string> fst_sentence(const Dfst& machine, const FstRunResult& run, const SymbolString& input) {
  const SymbolString tape = endmarked(machine.input_alphabet(), input);
  std::vector<std::string> words;
  for (std::size_t i = 0; i + 1 < run.trace.size(); ++i) {
    const auto& c = run.trace[i];
    words.push_back(rule_word(machine, c.state, tape[c.head], c.head));
  }
  return words;
}

CompiledModel compile_fst(const Dfst& machine, const FstCompileParams& params) {
  const std::size_t n = params.max_input_length;
  if (n < 1) throw Error(ErrorCode::PreconditionViolated, "max_input_length must be at least 1");
  const Alphabet& sigma = machine.input_alphabet();

  // Pre-pass: every rule consulted on some input of length <= n, and every
  // observed (rule, next scanned symbol) succession.
  std::map<RuleKey, std::size_t> rules;  // -> target head
  std::map<std::pair<RuleKey, SymbolId>, RuleKey> succession;
  std::size_t window = 0;
  for (const auto& w : all_strings_up_to(sigma.size(), 0, n)) {
    const auto run = fst_run(machine, w);
    if (run.verdict != Verdict::Accept)
      throw Error(ErrorCode::PreconditionViolated, "transducer does not halt on input '" + sigma.render(w) + "'");
    const SymbolString tape = endmarked(sigma, w);
    window = std::max(window, w.size() + 3 + run.trace.size() - 1);
    for (std::size_t i = 0; i + 1 < run.trace.size(); ++i) {
      const auto& c = run.trace[i];
      const RuleKey r{c.state, tape[c.head], c.head};
      const std::size_t target = run.trace[i + 1].head;
      rules[r] = target;
      if (i + 2 < run.trace.size()) succession[{r, tape[target]}] = RuleKey{run.trace[i + 1].state, tape[target], target};
    }
  }

  const std::size_t posbits = posbits_for_window(window);
  FieldLayout layout;
  layout.add("kind", kTokenKindCount);
  layout.add("bias", 1);
  layout.add("prompt", sigma.size() + 2);
  layout.add("target", posbits);
  layout.add("state", machine.states().size());
  layout.add("scanned", sigma.size() + 2);

  auto blank = [&](TokenKind kind) {
    IntVector v(layout.dimension, 0);
    v[layout.field("kind").offset + static_cast<std::size_t>(kind)] = 1;
    v[layout.field("bias").offset] = 1;
    return v;
  };
  auto set_target = [&](IntVector& v, std::size_t target) {
    const IntVector code = positional_code(target, posbits);
    std::copy(code.begin(), code.end(), v.begin() + static_cast<std::ptrdiff_t>(layout.field("target").offset));
  };

  ModelParts p;
  p.mode = ModelMode::Transducer;
  p.window = window;
  p.posbits = posbits;
  p.input_alphabet = sigma.names();
  p.output_alphabet = machine.output_alphabet().names();
  p.embeddings.dimension = layout.dimension;
  auto add = [&](Token t, IntVector e) {
    p.tokens.push_back(std::move(t));
    p.embeddings.vectors.push_back(std::move(e));
    return static_cast<TokenId>(p.tokens.size() - 1);
  };

  for (SymbolId s = 0; s < sigma.size() + 2; ++s) {
    IntVector e = blank(TokenKind::Prompt);
    e[layout.field("prompt").offset + s] = 1;
    add(Token{extended_name(sigma, s), TokenKind::Prompt, TokenVerdict::None, {}, {}}, std::move(e));
  }
  IntVector begin_vec = blank(TokenKind::Begin);
  set_target(begin_vec, 0);
  const TokenId begin = add(Token{std::string(kBeginWord), TokenKind::Begin, {}, {}, {}}, begin_vec);
  const TokenId halt = add(Token{std::string(kHaltWord), TokenKind::Halt, {}, {}, {}}, blank(TokenKind::Halt));
  p.stop_tokens.push_back(halt);

  std::map<RuleKey, TokenId> rule_ids;
  for (const auto& [r, target] : rules) {
    const auto [q, s, head] = r;
    IntVector e = blank(TokenKind::Word);
    e[layout.field("state").offset + q] = 1;
    e[layout.field("scanned").offset + s] = 1;
    set_target(e, target);
    const FstAction& a = machine.action(q, s);
    const TokenId id = add(Token{rule_word(machine, q, s, head), TokenKind::Word, TokenVerdict::None, a.output, {}}, e);
    rule_ids[r] = id;
    if (machine.is_halting(a.next)) p.stop_tokens.push_back(id);
  }

  p.attention = lookahead_attention(layout, posbits);
  auto key_for = [&](TokenId current, SymbolId next_scanned) {
    IntVector key = p.attention.residual.apply(p.embeddings.vectors[current]);
    // Prompt token ids equal extended symbol ids. The value map ignores the
    // position part, so any code will do there.
    IntVector x = p.embeddings.vectors[next_scanned];
    x.resize(layout.dimension + posbits, 0);
    const IntVector v = p.attention.value.apply(x);
    key.insert(key.end(), v.begin(), v.end());
    return key;
  };

  p.successor[key_for(begin, left_end(sigma))] = rule_ids.at(RuleKey{machine.initial(), left_end(sigma), 0});
  for (const auto& [from, to] : succession) p.successor[key_for(rule_ids.at(from.first), from.second)] = rule_ids.at(to);
  std::sort(p.stop_tokens.begin(), p.stop_tokens.end());
  p.fixpoint = halt;

  CompileReport report;
  report.vocabulary_size = p.tokens.size();
  report.machine_words = rules.size();
  report.successor_rules = p.successor.size();
  report.dimension = layout.dimension;
  report.dimension_bound = fst_dimension_bound(machine, n);
  report.window = window;
  if (report.dimension > report.dimension_bound)
    throw Error(ErrorCode::DimensionBoundViolated, "dimension " + std::to_string(report.dimension) + " exceeds " +
                                                       std::to_string(report.dimension_bound));
  return CompiledModel{FixedLlm(std::move(p)), std::move(layout), report};
}

}  // namespace llmsim
