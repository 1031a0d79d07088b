#include "llmsim/tm.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "llmsim/error.hpp"

namespace llmsim {

namespace {

void invalid(const std::string& what) { throw Error(ErrorCode::InvalidMachine, what); }

SymbolString trimmed(SymbolString cells, SymbolId blank) {
  while (!cells.empty() && cells.back() == blank) cells.pop_back();
  return cells;
}

std::size_t ceil_log2(std::size_t x) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < x) ++bits;
  return bits;
}

SymbolId advice_scan(const MultiTapeTm& m, const SymbolString& tape, std::size_t head) {
  return head < tape.size() ? tape[head] : m.advice_blank();
}

}  // namespace

MultiTapeTm::MultiTapeTm(TmDefinition def) : def_(std::move(def)) {
  const auto nq = def_.states.size();
  if (nq == 0) invalid("machine has no states");
  if (def_.tape_count == 0) invalid("at least one work tape is required");
  if (def_.blank >= def_.work.size()) invalid("blank symbol not in work alphabet");
  if (def_.initial >= nq || def_.accept >= nq || def_.reject >= nq) invalid("designated state out of range");
  if (def_.accept == def_.reject) invalid("accept and reject states must differ");
  if (def_.await) {
    if (*def_.await >= nq) invalid("await state out of range");
    if (is_terminal(*def_.await)) invalid("await state must not be terminal");
  }
  for (const auto& [key, act] : def_.transitions) {
    if (key.state >= nq) invalid("transition state out of range");
    if (is_terminal(key.state)) invalid("transition out of terminal state " + def_.states.name(key.state));
    const SymbolId in_limit = static_cast<SymbolId>(interactive() ? def_.input.size() : def_.input.size() + 2);
    if (key.input >= in_limit) invalid("transition input symbol out of range");
    if (key.work.size() != def_.tape_count || act.tapes.size() != def_.tape_count)
      invalid("transition tape arity does not match tape count");
    for (SymbolId w : key.work)
      if (w >= def_.work.size()) invalid("transition work symbol out of range");
    for (const auto& ta : act.tapes)
      if (ta.write >= def_.work.size()) invalid("transition writes a symbol outside the work alphabet");
    if (uses_advice() ? key.advice > advice_blank() : key.advice != 0)
      invalid("transition advice symbol out of range");
    if (!uses_advice() && act.advice_move != Move::Stay) invalid("advice move on a machine without advice");
    if (act.next >= nq) invalid("transition target out of range");
    for (SymbolId e : act.emit)
      if (e >= def_.input.size()) invalid("emitted symbol outside the port alphabet");
    if (interactive()) {
      if (act.input_move != Move::Stay) invalid("interactive machines cannot move the input head");
    } else {
      if (key.input == left_end(def_.input) && act.input_move == Move::Left)
        invalid("input head moves left of the left endmarker");
      if (key.input == right_end(def_.input) && act.input_move == Move::Right)
        invalid("input head moves right of the right endmarker");
    }
  }
}

std::string MultiTapeTm::advice_symbol_name(SymbolId id) const {
  if (id == advice_blank()) return std::string(kAdviceBlankName);
  return def_.advice.name(id);
}

SymbolId MultiTapeTm::advice_symbol_id(std::string_view name) const {
  if (name == kAdviceBlankName) return advice_blank();
  return def_.advice.id(name);
}

TmAction MultiTapeTm::action(const TmKey& key) const {
  auto it = def_.transitions.find(key);
  if (it != def_.transitions.end()) return it->second;
  TmAction rej;
  rej.next = def_.reject;
  for (SymbolId w : key.work) rej.tapes.push_back({w, Move::Stay});
  return rej;
}

std::size_t space(const TmConfiguration& config) {
  std::size_t s = 0;
  for (const auto& t : config.tapes) s = std::max(s, t.extent);
  return s;
}

SymbolId scanned_work(const MultiTapeTm& m, const TapeConfig& t) {
  return t.head < t.cells.size() ? t.cells[t.head] : m.blank();
}

TmKey key_of(const MultiTapeTm& m, const TmConfiguration& config) {
  TmKey key;
  key.state = config.state;
  key.input = config.scanned_input;
  for (const auto& t : config.tapes) key.work.push_back(scanned_work(m, t));
  key.advice = m.uses_advice() ? config.scanned_advice : 0;
  return key;
}

TmConfiguration initial_config(const MultiTapeTm& m, const SymbolString& advice_tape) {
  TmConfiguration c;
  c.state = m.initial();
  c.tapes.assign(m.tape_count(), TapeConfig{});
  c.input_head = 0;
  c.scanned_input = m.interactive() ? empty_port(m.input_alphabet()) : left_end(m.input_alphabet());
  c.advice_head = 0;
  c.scanned_advice = m.uses_advice() ? advice_scan(m, advice_tape, 0) : 0;
  return c;
}

TmConfiguration tm_step(const MultiTapeTm& m, const TmConfiguration& config, const SymbolString& input,
                        const SymbolString& advice_tape) {
  if (m.is_terminal(config.state))
    throw Error(ErrorCode::TerminalConfig, "configuration in state " + m.states().name(config.state));
  if (m.interactive() && config.scanned_input == empty_port(m.input_alphabet()))
    throw Error(ErrorCode::PreconditionViolated, "interactive machine is awaiting input");

  const TmAction act = m.action(key_of(m, config));
  TmConfiguration next = config;
  next.state = act.next;
  for (std::size_t i = 0; i < next.tapes.size(); ++i) {
    TapeConfig& t = next.tapes[i];
    const SymbolId scanned = scanned_work(m, t);
    const TapeAction& ta = act.tapes[i];
    if (ta.write != scanned) {
      if (t.cells.size() <= t.head) t.cells.resize(t.head + 1, m.blank());
      t.cells[t.head] = ta.write;
      t.cells = trimmed(std::move(t.cells), m.blank());
      t.extent = std::max(t.extent, t.head + 1);
    }
    if (ta.move == Move::Left) {
      if (t.head > 0) --t.head;
    } else if (ta.move == Move::Right) {
      ++t.head;
      t.extent = std::max(t.extent, t.head + 1);
    }
  }

  if (m.interactive()) {
    if (m.await_state() && next.state == *m.await_state()) next.scanned_input = empty_port(m.input_alphabet());
  } else {
    const std::int64_t pos = static_cast<std::int64_t>(next.input_head) + static_cast<int>(act.input_move);
    const std::int64_t last = static_cast<std::int64_t>(input.size()) + 1;
    next.input_head = static_cast<std::size_t>(std::clamp<std::int64_t>(pos, 0, last));
    if (next.input_head == 0) {
      next.scanned_input = left_end(m.input_alphabet());
    } else if (next.input_head == input.size() + 1) {
      next.scanned_input = right_end(m.input_alphabet());
    } else {
      next.scanned_input = input[next.input_head - 1];
    }
  }

  if (m.uses_advice()) {
    const std::int64_t pos = static_cast<std::int64_t>(next.advice_head) + static_cast<int>(act.advice_move);
    next.advice_head = static_cast<std::size_t>(
        std::clamp<std::int64_t>(pos, 0, static_cast<std::int64_t>(advice_tape.size())));
    next.scanned_advice = advice_scan(m, advice_tape, next.advice_head);
  }
  return next;
}

SymbolString emission(const MultiTapeTm& m, const TmConfiguration& config) {
  if (m.is_terminal(config.state)) return {};
  if (m.interactive() && config.scanned_input == empty_port(m.input_alphabet())) return {};
  return m.action(key_of(m, config)).emit;
}

std::uint64_t step_bound(std::size_t n, std::size_t k, std::uint64_t c) {
  const std::size_t log_n = ceil_log2(std::max<std::size_t>(n, 2));
  if (k > std::numeric_limits<std::size_t>::max() - log_n) return std::numeric_limits<std::uint64_t>::max();
  const std::size_t exponent = log_n + k;
  if (c <= 1) return 1;
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::uint64_t>::max() / c) return std::numeric_limits<std::uint64_t>::max();
    result *= c;
  }
  return result;
}

std::uint64_t default_step_constant(const MultiTapeTm& m) {
  return std::max<std::uint64_t>({m.work_alphabet().size(), m.states().size(), 2});
}

SymbolString output_tape(const MultiTapeTm& m, const TmConfiguration& config) {
  const SymbolString& cells = config.tapes.at(0).cells;
  auto first = std::find_if(cells.begin(), cells.end(), [&](SymbolId s) { return s != m.blank(); });
  return trimmed(SymbolString(first, cells.end()), m.blank());
}

namespace {

TmRunResult run_with_advice(const MultiTapeTm& m, const SymbolString& input, const SymbolString& advice_tape,
                            std::size_t k, std::optional<std::uint64_t> c) {
  if (m.interactive()) throw Error(ErrorCode::PreconditionViolated, "interactive machines run on streams");
  for (SymbolId s : input)
    if (s >= m.input_alphabet().size())
      throw Error(ErrorCode::UnknownSymbol, "input symbol id " + std::to_string(s) + " not in alphabet");
  const std::uint64_t bound = step_bound(input.size(), k, c.value_or(default_step_constant(m)));

  TmRunResult result;
  TmConfiguration cur = initial_config(m, advice_tape);
  result.trace.push_back(cur);
  result.space_used = space(cur);
  while (true) {
    if (cur.state == m.accept()) {
      result.verdict = Verdict::Accept;
      result.output = output_tape(m, cur);
      return result;
    }
    if (cur.state == m.reject()) {
      result.verdict = Verdict::Reject;
      return result;
    }
    cur = tm_step(m, cur, input, advice_tape);
    ++result.steps_used;
    result.trace.push_back(cur);
    result.space_used = std::max(result.space_used, space(cur));
    if (space(cur) > k) {
      result.verdict = Verdict::SpaceExceeded;
      return result;
    }
    if (result.steps_used > bound) {
      result.verdict = Verdict::StepBoundExceeded;
      return result;
    }
  }
}

}  // namespace

TmRunResult tm_run(const MultiTapeTm& m, const SymbolString& input, std::size_t space_bound,
                   std::optional<std::uint64_t> c) {
  return run_with_advice(m, input, {}, space_bound, c);
}

AdviceFunction AdviceFunction::constant(const SymbolString& advice, std::size_t max_length) {
  AdviceFunction f;
  for (std::size_t n = 0; n <= max_length; ++n) f.set(n, advice);
  return f;
}

const SymbolString& AdviceFunction::at(std::size_t length) const {
  auto it = table_.find(length);
  if (it == table_.end()) throw Error(ErrorCode::MissingAdvice, "no advice for length " + std::to_string(length));
  return it->second;
}

TmRunResult tma_run(const MultiTapeTm& m, const AdviceFunction& advice, const SymbolString& input,
                    std::size_t space_bound, std::optional<std::uint64_t> c) {
  const SymbolString& tape = advice.at(input.size());
  if (!m.uses_advice() && !tape.empty())
    throw Error(ErrorCode::PreconditionViolated, "machine has no advice tape but advice is non-empty");
  return run_with_advice(m, input, tape, space_bound, c);
}

std::size_t KSchedule::at(std::size_t epoch) const {
  if (bounds.empty()) return std::numeric_limits<std::size_t>::max();
  return bounds[std::min(epoch == 0 ? 0 : epoch - 1, bounds.size() - 1)];
}

ItmaState itma_initial_state(const MultiTapeTm& m) {
  ItmaState s;
  s.config = initial_config(m);
  return s;
}

std::vector<SymbolString> ItmaRunResult::chunks() const {
  std::vector<SymbolString> out;
  for (const auto& e : events)
    if (e.kind != StreamEvent::Kind::InputSymbol) out.push_back(e.chunk);
  return out;
}

bool is_boundary(const MultiTapeTm& m, const TmConfiguration& config) {
  return m.interactive() && !m.is_terminal(config.state) && config.scanned_input == empty_port(m.input_alphabet());
}

TmConfiguration with_port_symbol(const MultiTapeTm& m, TmConfiguration boundary, SymbolId symbol,
                                 const SymbolString& advice_tape) {
  boundary.scanned_input = symbol;
  if (m.uses_advice()) {
    boundary.advice_head = std::min(boundary.advice_head, advice_tape.size());
    boundary.scanned_advice = advice_scan(m, advice_tape, boundary.advice_head);
  }
  return boundary;
}

ItmaRunResult itma_run_stream(const MultiTapeTm& m, const AdviceFunction& advice, const SymbolString& stream,
                              const KSchedule& k_schedule, std::optional<std::uint64_t> c,
                              std::optional<ItmaState> resume) {
  if (!m.interactive()) throw Error(ErrorCode::PreconditionViolated, "machine has no await state");
  const std::uint64_t cc = c.value_or(default_step_constant(m));
  ItmaRunResult result;
  ItmaState st = resume ? *resume : itma_initial_state(m);

  for (SymbolId x : stream) {
    if (x >= m.input_alphabet().size())
      throw Error(ErrorCode::UnknownSymbol, "stream symbol id " + std::to_string(x) + " not in alphabet");
    const std::size_t epoch = ++st.inputs_consumed;
    result.events.push_back({StreamEvent::Kind::InputSymbol, x, {}});
    if (st.halted) {
      result.events.push_back({StreamEvent::Kind::Silence, 0, {}});
      result.epoch_traces.emplace_back();
      continue;
    }
    // Machines without an advice tape never consult the advice function.
    if (m.uses_advice()) {
      const SymbolString& appended = advice.at(epoch);
      st.advice_tape.insert(st.advice_tape.end(), appended.begin(), appended.end());
    }

    const std::size_t k = k_schedule.at(epoch);
    const std::uint64_t bound = step_bound(epoch, k, cc);
    std::vector<TmConfiguration> trace{with_port_symbol(m, st.config, x, st.advice_tape)};
    SymbolString chunk;
    std::uint64_t steps = 0;
    while (true) {
      const TmConfiguration& cur = trace.back();
      const SymbolString e = emission(m, cur);
      chunk.insert(chunk.end(), e.begin(), e.end());
      TmConfiguration next = tm_step(m, cur, {}, st.advice_tape);
      ++steps;
      trace.push_back(next);
      if (space(next) > k) {
        result.failure = Verdict::SpaceExceeded;
        result.failed_epoch = epoch;
        result.epoch_traces.push_back(std::move(trace));
        result.final_state = st;
        return result;
      }
      if (steps > bound) {
        result.failure = Verdict::Diverges;
        result.failed_epoch = epoch;
        result.epoch_traces.push_back(std::move(trace));
        result.final_state = st;
        return result;
      }
      if (is_boundary(m, next)) break;
      if (m.is_terminal(next.state)) {
        st.halted = true;
        break;
      }
    }
    st.config = trace.back();
    result.events.push_back({StreamEvent::Kind::OutputChunk, 0, chunk});
    result.epoch_traces.push_back(std::move(trace));
  }
  result.final_state = st;
  return result;
}

// ---------------------------------------------------------------------------
// Configuration words

std::string config_word(const MultiTapeTm& m, const TmConfiguration& config) {
  std::ostringstream out;
  for (std::size_t i = 0; i < config.tapes.size(); ++i) {
    const TapeConfig& t = config.tapes[i];
    out << 'T' << i << '[';
    for (std::size_t cell = 0; cell < t.extent; ++cell) {
      if (cell) out << ',';
      out << m.work_alphabet().name(cell < t.cells.size() ? t.cells[cell] : m.blank());
    }
    out << ':' << t.head << ':' << t.extent << ']';
  }
  out << "I[" << extended_name(m.input_alphabet(), config.scanned_input) << '@' << config.input_head << ']';
  out << "Q[" << m.states().name(config.state) << ']';
  if (m.uses_advice())
    out << "A[" << m.advice_symbol_name(config.scanned_advice) << '@' << config.advice_head << ']';
  return out.str();
}

namespace {

struct WordCursor {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "config word '" + std::string(text) + "' at " + std::to_string(pos) + ": " + what);
  }
  void expect(char ch) {
    if (pos >= text.size() || text[pos] != ch) fail(std::string("expected '") + ch + "'");
    ++pos;
  }
  std::string_view until(std::string_view stops) {
    const std::size_t start = pos;
    while (pos < text.size() && stops.find(text[pos]) == std::string_view::npos) ++pos;
    return text.substr(start, pos - start);
  }
  std::size_t number(std::string_view stops) {
    auto digits = until(stops);
    if (digits.empty() || digits.size() > 9) fail("expected a number");
    std::size_t v = 0;
    for (char ch : digits) {
      if (ch < '0' || ch > '9') fail("expected a number");
      v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    return v;
  }
};

}  // namespace

TmConfiguration parse_config_word(const MultiTapeTm& m, std::string_view word) {
  WordCursor cur{word};
  TmConfiguration c;
  try {
    for (std::size_t i = 0; i < m.tape_count(); ++i) {
      cur.expect('T');
      if (cur.number("[") != i) cur.fail("tape index out of order");
      cur.expect('[');
      std::vector<std::string_view> names;
      auto cells = cur.until(":");
      cur.expect(':');
      TapeConfig t;
      t.head = cur.number(":");
      cur.expect(':');
      t.extent = cur.number("]");
      cur.expect(']');
      if (!cells.empty()) {
        std::size_t start = 0;
        while (true) {
          auto comma = cells.find(',', start);
          names.push_back(cells.substr(start, comma == std::string_view::npos ? comma : comma - start));
          if (comma == std::string_view::npos) break;
          start = comma + 1;
        }
      }
      if (names.size() != t.extent) cur.fail("cell count does not match extent");
      for (auto n : names) t.cells.push_back(m.work_alphabet().id(n));
      t.cells = trimmed(std::move(t.cells), m.blank());
      c.tapes.push_back(std::move(t));
    }
    cur.expect('I');
    cur.expect('[');
    c.scanned_input = extended_id(m.input_alphabet(), cur.until("@"));
    cur.expect('@');
    c.input_head = cur.number("]");
    cur.expect(']');
    cur.expect('Q');
    cur.expect('[');
    c.state = m.states().id(cur.until("]"));
    cur.expect(']');
    if (m.uses_advice()) {
      cur.expect('A');
      cur.expect('[');
      c.scanned_advice = m.advice_symbol_id(cur.until("@"));
      cur.expect('@');
      c.advice_head = cur.number("]");
      cur.expect(']');
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string(e.what()));
  }
  if (cur.pos != word.size()) cur.fail("trailing characters");
  return c;
}

}  // namespace llmsim
