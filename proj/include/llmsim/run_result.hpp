#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "llmsim/symbols.hpp"

namespace llmsim {

enum class Verdict { Accept, Reject, SpaceExceeded, StepBoundExceeded, Diverges };

std::string_view to_string(Verdict v);

template <class Config>
struct RunResult {
  Verdict verdict = Verdict::Reject;
  std::vector<Config> trace;  // trace[i + 1] is the unique successor of trace[i]
  SymbolString output;
  std::uint64_t steps_used = 0;
  std::size_t space_used = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

}  // namespace llmsim
