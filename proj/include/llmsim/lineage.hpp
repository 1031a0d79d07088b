#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llmsim/compilers.hpp"
#include "llmsim/llm.hpp"
#include "llmsim/tm.hpp"

namespace llmsim {

/// Window of every stream member: the latest boundary configuration and the
/// port token placed after it.
inline constexpr std::size_t kStreamWindow = 2;

/// One member of a lineage: a stream-mode model whose vocabulary is the
/// descendant closure of its root configuration within `space_bound` cells,
/// under a fixed advice tape. A configuration whose successor would not fit
/// is followed by the GROW token.
struct LineageMember {
  FixedLlm model;
  std::size_t space_bound = 0;
  SymbolString advice_tape;
  std::string root;  // configuration word the closure starts from
  CompileReport report;
  friend bool operator==(const LineageMember&, const LineageMember&) = default;
};

/// SpaceBoundViolated when the root itself, or the root's successor when it
/// is neither a boundary nor terminal, needs more than k cells;
/// VocabularyBudgetExceeded beyond the cap.
LineageMember compile_stream_member(const MultiTapeTm& machine, const TmConfiguration& root, std::size_t space_bound,
                                    const SymbolString& advice_tape, std::size_t vocabulary_cap = 200000,
                                    std::optional<std::uint64_t> step_constant = std::nullopt);

/// Next member, rooted at the switch configuration rho. PreconditionViolated
/// unless new_k > current.space_bound.
LineageMember reconstruct(const MultiTapeTm& machine, const LineageMember& current, const TmConfiguration& rho,
                          std::size_t new_k, const SymbolString& advice_tape, std::size_t vocabulary_cap = 200000);

enum class Trigger { SpaceExceeded, AdviceChanged, Both };
std::string_view to_string(Trigger t);
Trigger parse_trigger(std::string_view s);  // ParseError

struct ReconstructionEvent {
  Trigger trigger = Trigger::SpaceExceeded;
  std::size_t position = 0;  // 1-based epoch in which the switch happens
  std::size_t old_k = 0;
  std::size_t new_k = 0;
  std::string rho;         // last configuration generated by the old member
  std::string first_word;  // first configuration generated by the new member
  friend bool operator==(const ReconstructionEvent&, const ReconstructionEvent&) = default;
};

struct Lineage {
  std::vector<std::size_t> schedule;  // strictly increasing space bounds
  std::vector<LineageMember> members;
  std::vector<ReconstructionEvent> log;  // log[i] switches members[i] -> members[i+1]
};

struct LineageOptions {
  std::size_t vocabulary_cap = 200000;
  std::optional<std::uint64_t> step_constant;
};

struct LineageRunReport {
  std::vector<SymbolString> chunks;                   // one per input symbol
  std::vector<std::vector<std::string>> epoch_words;  // configuration words per epoch
  Lineage lineage;
  std::size_t final_member = 0;
  std::size_t tokens_generated = 0;
  std::int64_t min_margin = kNoCompetitor;
  bool halted = false;
};

/// Feeds the stream through members built on demand. Errors: ScheduleExhausted
/// when a trigger fires after the last schedule entry, Diverges when an epoch
/// runs past the step bound, ConfigError for a schedule that is empty or not
/// strictly increasing.
LineageRunReport process_stream(const MultiTapeTm& machine, const AdviceFunction& advice, const SymbolString& stream,
                                const std::vector<std::size_t>& schedule, const LineageOptions& options = {});

/// first, 2*first, 4*first, ... (count entries).
std::vector<std::size_t> doubling_schedule(std::size_t first, std::size_t count);

}  // namespace llmsim
