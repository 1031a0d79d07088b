#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "llmsim/run_result.hpp"
#include "llmsim/symbols.hpp"

namespace llmsim {

using StateId = std::uint32_t;

struct FstAction {
  Move move = Move::Stay;
  StateId next = 0;
  SymbolString output;  // possibly empty; a single symbol is the common case

  friend bool operator==(const FstAction&, const FstAction&) = default;
};

/// Deterministic two-way transducer over an endmarked input tape
/// (<w>, positions 0..n+1) with a write-only output tape.
class Dfst {
 public:
  using Table = std::map<std::pair<StateId, SymbolId>, FstAction>;

  /// Validates determinism/totality and the endmarker discipline; throws
  /// InvalidMachine on violation.
  Dfst(Alphabet states, Alphabet input, Alphabet output, StateId initial,
       std::vector<StateId> halting, Table transitions);

  const Alphabet& states() const { return states_; }
  const Alphabet& input_alphabet() const { return input_; }
  const Alphabet& output_alphabet() const { return output_; }
  StateId initial() const { return initial_; }
  const std::vector<StateId>& halting() const { return halting_; }
  bool is_halting(StateId q) const;
  const Table& transitions() const { return table_; }

  /// Transition for a non-halting state and an extended input symbol.
  const FstAction& action(StateId q, SymbolId scanned) const;

  friend bool operator==(const Dfst&, const Dfst&) = default;

 private:
  Alphabet states_;
  Alphabet input_;
  Alphabet output_;
  StateId initial_;
  std::vector<StateId> halting_;
  Table table_;
};

struct FstConfiguration {
  StateId state = 0;
  std::size_t head = 0;
  SymbolString output;

  friend bool operator==(const FstConfiguration&, const FstConfiguration&) = default;
};

using FstRunResult = RunResult<FstConfiguration>;

/// Runs to a halting state (verdict Accept) or reports Diverges as soon as a
/// (state, head position) pair repeats.
FstRunResult fst_run(const Dfst& machine, const SymbolString& input);

/// The endmarked tape: <, input..., >.
SymbolString endmarked(const Alphabet& input_alphabet, const SymbolString& input);

}  // namespace llmsim
