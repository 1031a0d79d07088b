#include "llmsim/dfst.hpp"

#include <algorithm>
#include <set>

#include "llmsim/error.hpp"

namespace llmsim {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "Accept";
    case Verdict::Reject: return "Reject";
    case Verdict::SpaceExceeded: return "SpaceExceeded";
    case Verdict::StepBoundExceeded: return "StepBoundExceeded";
    case Verdict::Diverges: return "Diverges";
  }
  return "?";
}

Dfst::Dfst(Alphabet states, Alphabet input, Alphabet output, StateId initial,
           std::vector<StateId> halting, Table transitions)
    : states_(std::move(states)),
      input_(std::move(input)),
      output_(std::move(output)),
      initial_(initial),
      halting_(std::move(halting)),
      table_(std::move(transitions)) {
  if (states_.size() == 0) throw Error(ErrorCode::InvalidMachine, "FST has no states");
  if (initial_ >= states_.size()) throw Error(ErrorCode::InvalidMachine, "initial state out of range");
  std::sort(halting_.begin(), halting_.end());
  halting_.erase(std::unique(halting_.begin(), halting_.end()), halting_.end());
  for (StateId h : halting_)
    if (h >= states_.size()) throw Error(ErrorCode::InvalidMachine, "halting state out of range");

  const SymbolId ext = static_cast<SymbolId>(input_.size() + 2);
  for (const auto& [key, act] : table_) {
    const auto [q, s] = key;
    if (q >= states_.size() || s >= ext)
      throw Error(ErrorCode::InvalidMachine, "transition key out of range");
    if (act.next >= states_.size()) throw Error(ErrorCode::InvalidMachine, "transition target out of range");
    for (SymbolId o : act.output)
      if (o >= output_.size()) throw Error(ErrorCode::InvalidMachine, "output symbol out of range");
    if (s == left_end(input_) && act.move == Move::Left)
      throw Error(ErrorCode::InvalidMachine,
                  "transition (" + states_.name(q) + ", <) moves left of the left endmarker");
    if (s == right_end(input_) && act.move == Move::Right)
      throw Error(ErrorCode::InvalidMachine,
                  "transition (" + states_.name(q) + ", >) moves right of the right endmarker");
  }
  for (StateId q = 0; q < states_.size(); ++q) {
    if (is_halting(q)) continue;
    for (SymbolId s = 0; s < ext; ++s)
      if (!table_.count({q, s}))
        throw Error(ErrorCode::InvalidMachine, "transition table not total: missing (" + states_.name(q) +
                                                   ", " + extended_name(input_, s) + ")");
  }
}

bool Dfst::is_halting(StateId q) const { return std::binary_search(halting_.begin(), halting_.end(), q); }

const FstAction& Dfst::action(StateId q, SymbolId scanned) const {
  auto it = table_.find({q, scanned});
  if (it == table_.end())
    throw Error(ErrorCode::InvalidMachine, "no transition for state " + std::to_string(q));
  return it->second;
}

SymbolString endmarked(const Alphabet& input_alphabet, const SymbolString& input) {
  SymbolString tape;
  tape.reserve(input.size() + 2);
  tape.push_back(left_end(input_alphabet));
  tape.insert(tape.end(), input.begin(), input.end());
  tape.push_back(right_end(input_alphabet));
  return tape;
}

FstRunResult fst_run(const Dfst& machine, const SymbolString& input) {
  for (SymbolId s : input)
    if (s >= machine.input_alphabet().size())
      throw Error(ErrorCode::UnknownSymbol, "input symbol id " + std::to_string(s) + " not in alphabet");

  const SymbolString tape = endmarked(machine.input_alphabet(), input);
  FstRunResult result;
  FstConfiguration cur{machine.initial(), 0, {}};
  std::set<std::pair<StateId, std::size_t>> seen;
  result.trace.push_back(cur);
  while (!machine.is_halting(cur.state)) {
    if (!seen.emplace(cur.state, cur.head).second) {
      result.verdict = Verdict::Diverges;
      result.output = cur.output;
      return result;
    }
    const FstAction& act = machine.action(cur.state, tape[cur.head]);
    cur.output.insert(cur.output.end(), act.output.begin(), act.output.end());
    cur.head = static_cast<std::size_t>(static_cast<std::int64_t>(cur.head) + static_cast<int>(act.move));
    cur.state = act.next;
    ++result.steps_used;
    result.trace.push_back(cur);
  }
  result.verdict = Verdict::Accept;
  result.output = cur.output;
  return result;
}

}  // namespace llmsim
