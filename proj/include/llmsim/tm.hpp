#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llmsim/dfst.hpp"
#include "llmsim/run_result.hpp"
#include "llmsim/symbols.hpp"

namespace llmsim {

/// Name of the blank cell beyond the end of the advice tape.
inline constexpr std::string_view kAdviceBlankName = ".";

struct TapeAction {
  SymbolId write = 0;
  Move move = Move::Stay;

  friend bool operator==(const TapeAction&, const TapeAction&) = default;
};

struct TmAction {
  StateId next = 0;
  Move input_move = Move::Stay;
  std::vector<TapeAction> tapes;
  Move advice_move = Move::Stay;
  SymbolString emit;  // port output; interactive machines only

  friend bool operator==(const TmAction&, const TmAction&) = default;
};

/// Transition key: state, scanned (extended) input symbol, one scanned symbol
/// per work tape and, when the machine reads advice, the scanned advice symbol.
struct TmKey {
  StateId state = 0;
  SymbolId input = 0;
  std::vector<SymbolId> work;
  SymbolId advice = 0;

  auto operator<=>(const TmKey&) const = default;
  bool operator==(const TmKey&) const = default;
};

struct TmDefinition {
  Alphabet states;
  Alphabet input;
  Alphabet work;                    // contains the blank
  SymbolId blank = 0;
  Alphabet advice;                  // empty: no advice tape
  std::size_t tape_count = 1;
  StateId initial = 0;
  StateId accept = 0;
  StateId reject = 0;
  std::optional<StateId> await;     // set for interactive machines
  std::map<TmKey, TmAction> transitions;

  friend bool operator==(const TmDefinition&, const TmDefinition&) = default;
};

/// Deterministic multi-tape machine: read-only endmarked input tape (or an
/// input port when interactive), `tape_count` one-way-infinite work tapes, and
/// an optional read-only advice tape. Missing transitions go to the reject
/// state without writing or moving.
class MultiTapeTm {
 public:
  explicit MultiTapeTm(TmDefinition def);  // throws InvalidMachine

  const Alphabet& states() const { return def_.states; }
  const Alphabet& input_alphabet() const { return def_.input; }
  const Alphabet& work_alphabet() const { return def_.work; }
  const Alphabet& advice_alphabet() const { return def_.advice; }
  SymbolId blank() const { return def_.blank; }
  SymbolId advice_blank() const { return static_cast<SymbolId>(def_.advice.size()); }
  std::size_t tape_count() const { return def_.tape_count; }
  StateId initial() const { return def_.initial; }
  StateId accept() const { return def_.accept; }
  StateId reject() const { return def_.reject; }
  std::optional<StateId> await_state() const { return def_.await; }
  bool interactive() const { return def_.await.has_value(); }
  bool uses_advice() const { return def_.advice.size() > 0; }
  bool is_terminal(StateId q) const { return q == def_.accept || q == def_.reject; }
  const std::map<TmKey, TmAction>& transitions() const { return def_.transitions; }
  const TmDefinition& definition() const { return def_; }

  std::string advice_symbol_name(SymbolId id) const;
  SymbolId advice_symbol_id(std::string_view name) const;

  /// Action for a key; the implicit reject action when no rule is listed.
  TmAction action(const TmKey& key) const;

  friend bool operator==(const MultiTapeTm&, const MultiTapeTm&) = default;

 private:
  TmDefinition def_;
};

struct TapeConfig {
  SymbolString cells;       // trimmed of trailing blanks
  std::size_t head = 0;
  std::size_t extent = 0;   // high-water mark of touched cells

  auto operator<=>(const TapeConfig&) const = default;
  bool operator==(const TapeConfig&) const = default;
};

struct TmConfiguration {
  StateId state = 0;
  std::vector<TapeConfig> tapes;
  std::size_t input_head = 0;
  SymbolId scanned_input = 0;
  std::size_t advice_head = 0;
  SymbolId scanned_advice = 0;

  auto operator<=>(const TmConfiguration&) const = default;
  bool operator==(const TmConfiguration&) const = default;
};

/// Space of a configuration: the largest number of cells touched on any work
/// tape. A cell is touched when the head moves onto it or when a transition
/// writes a symbol different from the one scanned there.
std::size_t space(const TmConfiguration& config);

SymbolId scanned_work(const MultiTapeTm& m, const TapeConfig& t);
TmKey key_of(const MultiTapeTm& m, const TmConfiguration& config);

TmConfiguration initial_config(const MultiTapeTm& m, const SymbolString& advice_tape = {});

/// Successor of a non-terminal configuration (TerminalConfig otherwise).
/// `input` is the raw input word for acceptors (the tape is endmarked here);
/// interactive machines ignore it and keep the port symbol until they enter
/// the await state, which empties the port.
TmConfiguration tm_step(const MultiTapeTm& m, const TmConfiguration& config, const SymbolString& input,
                        const SymbolString& advice_tape = {});

/// Symbols written to the output port by the transition leaving `config`.
SymbolString emission(const MultiTapeTm& m, const TmConfiguration& config);

/// c^(ceil(log2(max(n,2))) + k), saturating at UINT64_MAX.
std::uint64_t step_bound(std::size_t n, std::size_t k, std::uint64_t c);
std::uint64_t default_step_constant(const MultiTapeTm& m);

/// Contents of work tape 0 with leading and trailing blanks stripped: the
/// value computed by a function-mode machine.
SymbolString output_tape(const MultiTapeTm& m, const TmConfiguration& config);

using TmRunResult = RunResult<TmConfiguration>;

TmRunResult tm_run(const MultiTapeTm& m, const SymbolString& input, std::size_t space_bound,
                   std::optional<std::uint64_t> c = std::nullopt);

/// Maps an input length to an advice string. Lengths missing from the table
/// have no advice (MissingAdvice when consulted).
class AdviceFunction {
 public:
  AdviceFunction() = default;
  explicit AdviceFunction(std::map<std::size_t, SymbolString> table) : table_(std::move(table)) {}

  /// The same advice string for every length 0..max_length.
  static AdviceFunction constant(const SymbolString& advice, std::size_t max_length);

  const SymbolString& at(std::size_t length) const;  // throws MissingAdvice
  bool has(std::size_t length) const { return table_.count(length) > 0; }
  void set(std::size_t length, SymbolString advice) { table_[length] = std::move(advice); }
  const std::map<std::size_t, SymbolString>& table() const { return table_; }

  friend bool operator==(const AdviceFunction&, const AdviceFunction&) = default;

 private:
  std::map<std::size_t, SymbolString> table_;
};

TmRunResult tma_run(const MultiTapeTm& m, const AdviceFunction& advice, const SymbolString& input,
                    std::size_t space_bound, std::optional<std::uint64_t> c = std::nullopt);

/// Space bound per epoch: entry m-1 applies to epoch m, the last entry repeats.
/// An empty schedule means unbounded.
struct KSchedule {
  std::vector<std::size_t> bounds;

  std::size_t at(std::size_t epoch) const;
  static KSchedule unbounded() { return {}; }
};

struct StreamEvent {
  enum class Kind { InputSymbol, OutputChunk, Silence };
  Kind kind = Kind::Silence;
  SymbolId symbol = 0;  // InputSymbol
  SymbolString chunk;   // OutputChunk

  friend bool operator==(const StreamEvent&, const StreamEvent&) = default;
};

/// Everything needed to resume an interactive run: the configuration the
/// previous stream left behind plus the accumulated advice tape.
struct ItmaState {
  TmConfiguration config;
  SymbolString advice_tape;
  std::size_t inputs_consumed = 0;
  bool halted = false;

  friend bool operator==(const ItmaState&, const ItmaState&) = default;
};

ItmaState itma_initial_state(const MultiTapeTm& m);

struct ItmaRunResult {
  std::vector<StreamEvent> events;
  std::vector<std::vector<TmConfiguration>> epoch_traces;  // epoch start .. boundary
  std::optional<Verdict> failure;                          // SpaceExceeded / Diverges
  std::size_t failed_epoch = 0;                            // 1-based, when failure set
  ItmaState final_state;

  std::vector<SymbolString> chunks() const;
  friend bool operator==(const ItmaRunResult&, const ItmaRunResult&) = default;
};

/// Epoch protocol: each input symbol is placed on the port, advice(m) is
/// appended to the advice tape, and the machine runs (at least one step)
/// until it re-enters the await state, emitting exactly one output chunk.
ItmaRunResult itma_run_stream(const MultiTapeTm& m, const AdviceFunction& advice, const SymbolString& stream,
                              const KSchedule& k_schedule, std::optional<std::uint64_t> c = std::nullopt,
                              std::optional<ItmaState> resume = std::nullopt);

/// Epoch start: the boundary configuration with the new port symbol and the
/// advice scan refreshed against a (possibly longer) advice tape.
TmConfiguration with_port_symbol(const MultiTapeTm& m, TmConfiguration boundary, SymbolId symbol,
                                 const SymbolString& advice_tape);

/// True for configurations at which a stream epoch ends (empty port in a
/// non-terminal state).
bool is_boundary(const MultiTapeTm& m, const TmConfiguration& config);

/// Canonical configuration word, e.g. `T0[1,0,_:1:3]I[a@2]Q[q1]A[E@0]`:
/// work tapes in order (cells up to the touched extent, head, extent), then the
/// scanned input symbol with the input head, then the state, then the advice
/// field when the machine reads advice.
std::string config_word(const MultiTapeTm& m, const TmConfiguration& config);
TmConfiguration parse_config_word(const MultiTapeTm& m, std::string_view word);  // ParseError

}  // namespace llmsim
