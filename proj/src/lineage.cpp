#include "llmsim/lineage.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "llmsim/error.hpp"

namespace llmsim {

namespace {

std::size_t ceil_log2(std::uint64_t x) {
  std::size_t b = 0;
  while (b < 64 && (std::uint64_t{1} << b) < x) ++b;
  return b;
}

enum class Next { None, Grow, Config };

}  // namespace

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::SpaceExceeded: return "space-exceeded";
    case Trigger::AdviceChanged: return "advice-changed";
    case Trigger::Both: return "both";
  }
  return "?";
}

Trigger parse_trigger(std::string_view s) {
  for (Trigger t : {Trigger::SpaceExceeded, Trigger::AdviceChanged, Trigger::Both})
    if (to_string(t) == s) return t;
  throw Error(ErrorCode::ParseError, "unknown trigger '" + std::string(s) + "'");
}

std::vector<std::size_t> doubling_schedule(std::size_t first, std::size_t count) {
  if (first < 1) throw Error(ErrorCode::ConfigError, "schedule must start at 1 or more");
  std::vector<std::size_t> s;
  for (std::size_t i = 0, k = first; i < count; ++i, k *= 2) s.push_back(k);
  return s;
}

LineageMember compile_stream_member(const MultiTapeTm& m, const TmConfiguration& root, std::size_t k,
                                    const SymbolString& advice_tape, std::size_t vocabulary_cap,
                                    std::optional<std::uint64_t> step_constant) {
  if (!m.interactive()) throw Error(ErrorCode::PreconditionViolated, "stream members need an interactive machine");
  if (space(root) > k)
    throw Error(ErrorCode::SpaceBoundViolated, "root configuration needs more than " + std::to_string(k) + " cells");
  if (!is_boundary(m, root) && !m.is_terminal(root.state) && space(tm_step(m, root, {}, advice_tape)) > k)
    throw Error(ErrorCode::SpaceBoundViolated, "successor of the root needs more than " + std::to_string(k) + " cells");
  const Alphabet& sigma = m.input_alphabet();

  // Descendant closure of the root: boundaries branch over every port symbol,
  // other configurations take their single step unless it leaves k cells.
  std::map<TmConfiguration, Next> closure{{root, Next::None}};
  std::deque<TmConfiguration> queue{root};
  std::size_t max_space = 0;
  auto visit = [&](const TmConfiguration& c) {
    if (closure.try_emplace(c, Next::None).second) {
      if (closure.size() > vocabulary_cap)
        throw Error(ErrorCode::VocabularyBudgetExceeded, "descendant closure exceeds " + std::to_string(vocabulary_cap) +
                                                             " configurations");
      queue.push_back(c);
    }
  };
  while (!queue.empty()) {
    const TmConfiguration c = queue.front();
    queue.pop_front();
    max_space = std::max(max_space, space(c));
    if (m.is_terminal(c.state)) continue;
    if (is_boundary(m, c)) {
      for (SymbolId x = 0; x < sigma.size(); ++x) visit(with_port_symbol(m, c, x, advice_tape));
      continue;
    }
    const TmConfiguration s = tm_step(m, c, {}, advice_tape);
    if (space(s) > k) {
      closure[c] = Next::Grow;
    } else {
      closure[c] = Next::Config;
      visit(s);
    }
  }

  const std::size_t posbits = posbits_for_window(kStreamWindow);
  TmEncodingOptions opt;
  opt.stream = true;
  opt.space_bound = k;
  opt.with_advice = m.uses_advice();
  opt.advice_length = advice_tape.size();
  opt.posbits = posbits;
  const TmEncoding enc(m, opt);

  ModelParts p;
  p.mode = ModelMode::Stream;
  p.window = kStreamWindow;
  p.posbits = posbits;
  p.input_alphabet = sigma.names();
  p.output_alphabet = sigma.names();
  p.embeddings.dimension = enc.layout().dimension;
  auto add = [&](Token t, IntVector e) {
    p.tokens.push_back(std::move(t));
    p.embeddings.vectors.push_back(std::move(e));
    return static_cast<TokenId>(p.tokens.size() - 1);
  };
  for (SymbolId x = 0; x < sigma.size(); ++x)
    add(Token{sigma.name(x), TokenKind::Prompt, TokenVerdict::None, {}, {}}, enc.prompt(x));
  const TokenId halt = add(Token{std::string(kHaltWord), TokenKind::Halt, {}, {}, {}}, enc.control(TokenKind::Halt));
  const TokenId grow = add(Token{std::string(kGrowWord), TokenKind::Grow, {}, {}, {}}, enc.control(TokenKind::Grow));
  p.stop_tokens = {halt, grow};

  std::map<TmConfiguration, TokenId> ids;
  for (const auto& [c, next] : closure) {
    Token t{config_word(m, c), TokenKind::Word, TokenVerdict::None, emission(m, c), {}};
    if (c.state == m.accept()) t.verdict = TokenVerdict::Accept;
    if (c.state == m.reject()) t.verdict = TokenVerdict::Reject;
    const TokenId id = add(std::move(t), enc.config(c, 0));
    ids[c] = id;
    if (m.is_terminal(c.state) || is_boundary(m, c)) p.stop_tokens.push_back(id);
  }

  p.attention = stream_attention(enc.layout(), posbits, kStreamWindow);
  auto key_for = [&](TokenId current, TokenId attended) {
    IntVector key = p.attention.residual.apply(p.embeddings.vectors[current]);
    IntVector x = p.embeddings.vectors[attended];  // value ignores the position part
    x.resize(enc.layout().dimension + posbits, 0);
    const IntVector v = p.attention.value.apply(x);
    key.insert(key.end(), v.begin(), v.end());
    return key;
  };
  for (const auto& [c, next] : closure) {
    const TokenId id = ids.at(c);
    if (is_boundary(m, c)) {
      for (SymbolId x = 0; x < sigma.size(); ++x)
        p.successor[key_for(static_cast<TokenId>(x), id)] = ids.at(with_port_symbol(m, c, x, advice_tape));
    } else if (next == Next::Grow) {
      p.successor[key_for(id, id)] = grow;
    } else if (next == Next::Config) {
      p.successor[key_for(id, id)] = ids.at(tm_step(m, c, {}, advice_tape));
    }
  }
  std::sort(p.stop_tokens.begin(), p.stop_tokens.end());
  p.fixpoint = halt;

  CompileReport report;
  report.vocabulary_size = p.tokens.size();
  report.machine_words = ids.size();
  report.successor_rules = p.successor.size();
  report.dimension = enc.layout().dimension;
  const std::size_t advice_width = enc.layout().has("advice") ? enc.layout().field("advice").width : 0;
  const std::uint64_t c = step_constant.value_or(default_step_constant(m));
  report.dimension_bound = tm_dimension_constant(m, c) * (k + ceil_log2(2) + 1) + advice_width;
  report.window = kStreamWindow;
  report.max_space = max_space;
  if (report.dimension > report.dimension_bound)
    throw Error(ErrorCode::DimensionBoundViolated, "dimension " + std::to_string(report.dimension) + " exceeds " +
                                                       std::to_string(report.dimension_bound));
  return LineageMember{FixedLlm(std::move(p)), k, advice_tape, config_word(m, root), report};
}

LineageMember reconstruct(const MultiTapeTm& m, const LineageMember& current, const TmConfiguration& rho,
                          std::size_t new_k, const SymbolString& advice_tape, std::size_t vocabulary_cap) {
  if (new_k <= current.space_bound)
    throw Error(ErrorCode::PreconditionViolated, "new space bound " + std::to_string(new_k) + " does not exceed " +
                                                     std::to_string(current.space_bound));
  return compile_stream_member(m, rho, new_k, advice_tape, vocabulary_cap);
}

LineageRunReport process_stream(const MultiTapeTm& m, const AdviceFunction& advice, const SymbolString& stream,
                                const std::vector<std::size_t>& schedule, const LineageOptions& options) {
  if (schedule.empty()) throw Error(ErrorCode::ConfigError, "empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1]) throw Error(ErrorCode::ConfigError, "schedule must be strictly increasing");
  const std::uint64_t cc = options.step_constant.value_or(default_step_constant(m));

  LineageRunReport report;
  Lineage& lin = report.lineage;
  lin.schedule = schedule;
  SymbolString tape;
  if (m.uses_advice() && !stream.empty()) tape = advice.at(1);
  lin.members.push_back(compile_stream_member(m, initial_config(m), schedule[0], tape, options.vocabulary_cap, cc));

  const FixedLlm* model = &lin.members.back().model;
  std::vector<TokenId> context{model->id(lin.members.back().root)};

  auto switch_member = [&](Trigger trigger, std::size_t position, const TmConfiguration& rho) {
    const std::size_t next = lin.members.size();
    if (next >= schedule.size())
      throw Error(ErrorCode::ScheduleExhausted, std::string(to_string(trigger)) + " at position " +
                                                    std::to_string(position) + " after the last bound " +
                                                    std::to_string(schedule.back()));
    lin.members.push_back(
        reconstruct(m, lin.members.back(), rho, schedule[next], tape, options.vocabulary_cap));
    lin.log.push_back(ReconstructionEvent{trigger, position, schedule[next - 1], schedule[next], config_word(m, rho), {}});
    model = &lin.members.back().model;
    context = {model->id(config_word(m, rho))};
  };

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const SymbolId x = stream[i];
    if (x >= m.input_alphabet().size())
      throw Error(ErrorCode::UnknownSymbol, "stream symbol id " + std::to_string(x) + " not in alphabet");
    const std::size_t epoch = i + 1;
    report.chunks.emplace_back();
    report.epoch_words.emplace_back();
    if (report.halted) continue;

    if (m.uses_advice() && epoch >= 2 && !advice.at(epoch).empty()) {
      // Switch at the boundary, before the new advice is appended.
      const TmConfiguration rho = parse_config_word(m, model->token(context.back()).word);
      tape.insert(tape.end(), advice.at(epoch).begin(), advice.at(epoch).end());
      const TmConfiguration start = with_port_symbol(m, rho, x, tape);
      const bool grows = space(tm_step(m, start, {}, tape)) > lin.members.back().space_bound;
      switch_member(grows ? Trigger::Both : Trigger::AdviceChanged, epoch, rho);
    }
    context.push_back(model->id(m.input_alphabet().name(x)));

    const std::uint64_t bound = step_bound(epoch, lin.members.back().space_bound, cc);
    std::uint64_t steps = 0;
    while (true) {
      const NextToken nt = model->next_token(context);
      ++report.tokens_generated;
      if (nt.score.margin != kNoCompetitor) report.min_margin = std::min(report.min_margin, nt.score.margin);
      const Token& t = model->token(nt.token);
      if (t.kind == TokenKind::Grow) {
        switch_member(Trigger::SpaceExceeded, epoch, parse_config_word(m, model->token(context.back()).word));
        continue;
      }
      if (!lin.log.empty() && lin.log.back().first_word.empty()) lin.log.back().first_word = t.word;
      report.epoch_words.back().push_back(t.word);
      report.chunks.back().insert(report.chunks.back().end(), t.emit.begin(), t.emit.end());
      context.push_back(nt.token);
      if (context.size() > kStreamWindow) context.erase(context.begin());
      if (t.verdict != TokenVerdict::None) {
        report.halted = true;
        break;
      }
      if (model->is_stop(nt.token)) break;
      if (++steps > bound)
        throw Error(ErrorCode::Diverges, "epoch " + std::to_string(epoch) + " runs past " + std::to_string(bound) +
                                             " steps");
    }
  }
  report.final_member = lin.members.size() - 1;
  return report;
}

}  // namespace llmsim
