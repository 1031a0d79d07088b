#include <algorithm>
#include <map>
#include <set>

#include "llmsim/compilers.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

namespace {

std::size_t ceil_log2(std::uint64_t x) {
  std::size_t b = 0;
  while (b < 64 && (std::uint64_t{1} << b) < x) ++b;
  return b;
}

std::uint64_t saturating_power(std::uint64_t c, std::size_t k) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (c != 0 && r > UINT64_MAX / c) return UINT64_MAX;
    r *= c;
  }
  return r;
}

// Every work tape content with touched extent <= k, in a fixed order.
std::vector<TapeConfig> all_tapes(const MultiTapeTm& m, std::size_t k) {
  std::vector<TapeConfig> out;
  const std::size_t g = m.work_alphabet().size();
  for (std::size_t extent = 0; extent <= k; ++extent) {
    for (const auto& cells : all_strings(g, extent)) {
      SymbolString trimmed = cells;
      while (!trimmed.empty() && trimmed.back() == m.blank()) trimmed.pop_back();
      for (std::size_t head = 0; head < std::max<std::size_t>(extent, 1); ++head)
        out.push_back(TapeConfig{trimmed, head, extent});
    }
  }
  return out;
}

SymbolId scanned_advice_at(const MultiTapeTm& m, const SymbolString& tape, std::size_t head) {
  return head < tape.size() ? tape[head] : m.advice_blank();
}

}  // namespace

std::string_view to_string(VocabularyPolicy p) {
  return p == VocabularyPolicy::ReachableOnly ? "reachable" : "exhaustive";
}

VocabularyPolicy parse_vocabulary_policy(std::string_view s) {
  if (s == "reachable") return VocabularyPolicy::ReachableOnly;
  if (s == "exhaustive") return VocabularyPolicy::ExhaustiveUpToK;
  throw Error(ErrorCode::ConfigError, "vocabulary policy must be 'reachable' or 'exhaustive'");
}

std::size_t tm_dimension_constant(const MultiTapeTm& m, std::uint64_t c) {
  return 8 + 2 * (m.input_alphabet().size() + 2) + m.states().size() +
         m.tape_count() * (m.work_alphabet().size() + 2) + 2 * (ceil_log2(c) + 1);
}

CompiledModel compile_tm(const MultiTapeTm& m, const TmCompileParams& params) {
  if (m.interactive()) throw Error(ErrorCode::PreconditionViolated, "interactive machines compile as lineage members");
  if (params.space_bound < 1) throw Error(ErrorCode::PreconditionViolated, "space bound must be at least 1");
  if (params.advice && !m.uses_advice())
    throw Error(ErrorCode::PreconditionViolated, "advice given for a machine without an advice tape");
  if (m.uses_advice() && !params.advice) throw Error(ErrorCode::MissingAdvice, "machine reads advice; none given");

  const std::size_t n = params.input_length;
  const std::size_t k = params.space_bound;
  const std::uint64_t c = params.step_constant.value_or(default_step_constant(m));
  const Alphabet& sigma = m.input_alphabet();
  const SymbolString advice_tape = params.advice ? params.advice->at(n) : SymbolString{};

  // Pre-pass over every input of length n: checks S(n) <= k and halting, and
  // records the reachable configurations with their successors.
  // Successors differ only in the input symbol read at the new head.
  std::map<TmConfiguration, std::set<TmConfiguration>> successor;
  std::size_t window = 0;
  std::size_t max_space = 0;
  for (const auto& w : all_strings(sigma.size(), n)) {
    const TmRunResult run = params.advice ? tma_run(m, *params.advice, w, k, c) : tm_run(m, w, k, c);
    if (run.verdict == Verdict::SpaceExceeded)
      throw Error(ErrorCode::SpaceBoundViolated, "input '" + sigma.render(w) + "' needs more than " +
                                                     std::to_string(k) + " cells");
    if (run.verdict == Verdict::StepBoundExceeded)
      throw Error(ErrorCode::PreconditionViolated, "no halt within the step bound on '" + sigma.render(w) + "'");
    max_space = std::max(max_space, run.space_used);
    window = std::max(window, n + 3 + run.trace.size());
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
      auto& next = successor[run.trace[i]];
      if (i + 1 < run.trace.size()) next.insert(run.trace[i + 1]);
    }
  }

  CompileReport report;
  report.max_space = max_space;
  if (params.policy == VocabularyPolicy::ExhaustiveUpToK) {
    report.exhaustive_bound = saturating_power(c, k);
    const std::vector<TapeConfig> tapes = all_tapes(m, k);
    std::size_t tape_combos = 1;
    for (std::size_t t = 0; t < m.tape_count(); ++t) tape_combos *= tapes.size();
    const std::size_t advice_positions = m.uses_advice() ? advice_tape.size() + 1 : 1;
    const std::size_t total = m.states().size() * (n + 2) * tape_combos * advice_positions;
    if (total > params.vocabulary_cap)
      throw Error(ErrorCode::VocabularyBudgetExceeded, std::to_string(total) + " configurations exceed the cap of " +
                                                           std::to_string(params.vocabulary_cap));
    // Enumerate states x input head x tape contents x advice head; the
    // scanned input symbol ranges over what can sit at that head position.
    for (StateId q = 0; q < m.states().size(); ++q)
      for (std::size_t h = 0; h <= n + 1; ++h) {
        std::vector<SymbolId> symbols;
        if (h == 0) symbols = {left_end(sigma)};
        else if (h == n + 1) symbols = {right_end(sigma)};
        else
          for (SymbolId s = 0; s < sigma.size(); ++s) symbols.push_back(s);
        for (SymbolId s : symbols)
          for (std::size_t combo = 0; combo < tape_combos; ++combo)
            for (std::size_t a = 0; a < advice_positions; ++a) {
              TmConfiguration cfg;
              cfg.state = q;
              cfg.input_head = h;
              cfg.scanned_input = s;
              std::size_t rest = combo;
              for (std::size_t t = 0; t < m.tape_count(); ++t) {
                cfg.tapes.push_back(tapes[rest % tapes.size()]);
                rest /= tapes.size();
              }
              if (m.uses_advice()) {
                cfg.advice_head = a;
                cfg.scanned_advice = scanned_advice_at(m, advice_tape, a);
              }
              successor.try_emplace(cfg);
            }
      }
    // Fill in successors for non-terminal configurations whose next step
    // stays within k; the next input symbol is whatever the prompt holds, so
    // one rule per possible symbol at the new head.
    for (auto& [cfg, next] : successor) {
      if (m.is_terminal(cfg.state)) continue;
      const TmConfiguration base = tm_step(m, cfg, SymbolString(n, 0), advice_tape);
      if (space(base) > k) continue;
      const std::size_t h = base.input_head;
      for (SymbolId s = 0; s < sigma.size() + 2; ++s) {
        const bool fits = h == 0 ? s == left_end(sigma) : h == n + 1 ? s == right_end(sigma) : s < sigma.size();
        if (!fits) continue;
        TmConfiguration succ = base;
        succ.scanned_input = s;
        next.insert(succ);
      }
    }
  }

  const std::size_t posbits = posbits_for_window(window);
  TmEncodingOptions opt;
  opt.input_length = n;
  opt.space_bound = k;
  opt.with_advice = m.uses_advice();
  opt.advice_length = advice_tape.size();
  opt.posbits = posbits;
  const TmEncoding enc(m, opt);

  ModelParts p;
  p.mode = params.mode == TmMode::Function ? ModelMode::Function : ModelMode::Acceptor;
  p.window = window;
  p.posbits = posbits;
  p.input_alphabet = sigma.names();
  if (params.mode == TmMode::Function) p.output_alphabet = m.work_alphabet().names();
  p.embeddings.dimension = enc.layout().dimension;
  auto add = [&](Token t, IntVector e) {
    p.tokens.push_back(std::move(t));
    p.embeddings.vectors.push_back(std::move(e));
    return static_cast<TokenId>(p.tokens.size() - 1);
  };
  for (SymbolId s = 0; s < sigma.size() + 2; ++s)
    add(Token{extended_name(sigma, s), TokenKind::Prompt, TokenVerdict::None, {}, {}}, enc.prompt(s));
  const TokenId begin = add(Token{std::string(kBeginWord), TokenKind::Begin, {}, {}, {}}, enc.control(TokenKind::Begin, 0));
  const TokenId halt = add(Token{std::string(kHaltWord), TokenKind::Halt, {}, {}, {}}, enc.control(TokenKind::Halt));
  p.stop_tokens.push_back(halt);

  // The position a configuration's successor reads: the new input head.
  auto target_of = [&](const TmConfiguration& cfg, const std::set<TmConfiguration>& next) -> std::size_t {
    if (!next.empty()) return next.begin()->input_head;
    if (m.is_terminal(cfg.state)) return cfg.input_head;
    const TmAction a = m.action(key_of(m, cfg));
    const std::int64_t pos = static_cast<std::int64_t>(cfg.input_head) + static_cast<int>(a.input_move);
    return static_cast<std::size_t>(std::clamp<std::int64_t>(pos, 0, static_cast<std::int64_t>(n + 1)));
  };

  std::map<TmConfiguration, TokenId> ids;
  for (const auto& [cfg, next] : successor) {
    Token t{config_word(m, cfg), TokenKind::Word, TokenVerdict::None, {}, {}};
    if (cfg.state == m.accept()) {
      t.verdict = TokenVerdict::Accept;
      if (params.mode == TmMode::Function) t.output = output_tape(m, cfg);
    } else if (cfg.state == m.reject()) {
      t.verdict = TokenVerdict::Reject;
    }
    const TokenId id = add(std::move(t), enc.config(cfg, target_of(cfg, next)));
    ids[cfg] = id;
    if (m.is_terminal(cfg.state)) p.stop_tokens.push_back(id);
  }

  p.attention = lookahead_attention(enc.layout(), posbits);
  auto key_for = [&](TokenId current, SymbolId next_scanned) {
    IntVector key = p.attention.residual.apply(p.embeddings.vectors[current]);
    IntVector x = enc.prompt(next_scanned);  // value ignores the position part
    x.resize(enc.layout().dimension + posbits, 0);
    const IntVector v = p.attention.value.apply(x);
    key.insert(key.end(), v.begin(), v.end());
    return key;
  };

  const TmConfiguration start = initial_config(m, advice_tape);
  if (!ids.count(start)) throw Error(ErrorCode::PreconditionViolated, "initial configuration does not fit");
  p.successor[key_for(begin, left_end(sigma))] = ids.at(start);
  for (const auto& [cfg, next] : successor)
    for (const auto& succ : next) p.successor[key_for(ids.at(cfg), succ.scanned_input)] = ids.at(succ);
  std::sort(p.stop_tokens.begin(), p.stop_tokens.end());
  p.fixpoint = halt;

  report.vocabulary_size = p.tokens.size();
  report.machine_words = ids.size();
  report.successor_rules = p.successor.size();
  report.dimension = enc.layout().dimension;
  const std::size_t advice_width = enc.layout().has("advice") ? enc.layout().field("advice").width : 0;
  report.dimension_bound = tm_dimension_constant(m, c) * (k + ceil_log2(n + 2) + 1) + advice_width;
  report.window = window;
  if (report.dimension > report.dimension_bound)
    throw Error(ErrorCode::DimensionBoundViolated, "dimension " + std::to_string(report.dimension) + " exceeds " +
                                                       std::to_string(report.dimension_bound));
  return CompiledModel{FixedLlm(std::move(p)), enc.layout(), report};
}

}  // namespace llmsim
