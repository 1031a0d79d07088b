#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llmsim/compilers.hpp"
#include "llmsim/itma_bridge.hpp"
#include "llmsim/lineage.hpp"

namespace llmsim {

// ---------------------------------------------------------------------------
// Behavioural oracles for the corpus, written from each machine's documented
// behaviour rather than from its transition table.

/// Expected output of a corpus transducer on `w`.
SymbolString expected_fst_output(const std::string& machine, const SymbolString& w);
/// Expected verdict (acceptors) or output (function mode) of a corpus TM.
Answer expected_tm_answer(const std::string& machine, const SymbolString& w);
/// Expected chunk sequence of a corpus stream machine.
std::vector<SymbolString> expected_stream_chunks(const std::string& machine, const AdviceFunction& advice,
                                                 const SymbolString& stream);

/// Runs a corpus machine against its behavioural oracle on all inputs up to
/// `max_n` (or one stream for interactive machines). Returns the first
/// mismatch, if any.
std::optional<std::string> corpus_self_test(const std::string& machine, std::size_t max_n = 6);

// ---------------------------------------------------------------------------
// Seeded streams

/// Deterministic binary stream: symbol 1 with probability ones_per_ten / 10.
SymbolString seeded_stream(std::uint64_t seed, std::size_t length, unsigned ones_per_ten = 5);
/// Advice for the advice-unary-counter machine: "0" at 1, "1" at `change_at`.
AdviceFunction counter_advice(std::size_t max_length, std::size_t change_at);

/// Checks a lineage run against the direct run: chunks, per-epoch sentences,
/// seams (rho immediately followed by the new member's first word in the
/// direct trace), strictly increasing k, and trigger minimality.
std::optional<std::string> check_lineage(const MultiTapeTm& machine, const AdviceFunction& advice,
                                         const SymbolString& stream, const ItmaRunResult& direct,
                                         const LineageRunReport& lineage);

// ---------------------------------------------------------------------------
// Reports

struct CaseResult {
  std::string name;
  std::size_t inputs = 0;
  std::size_t tokens = 0;
  std::int64_t min_margin = kNoCompetitor;
  std::vector<std::pair<std::string, std::string>> details;  // ordered key/value extras
};

struct DivergenceRecord {
  std::string case_name;
  std::string input;
  std::size_t step = 0;
  std::string expected;
  std::string actual;
};

struct EquivalenceReport {
  std::string suite;
  std::string tag;
  std::uint64_t seed = 0;
  std::vector<CaseResult> cases;
  std::vector<DivergenceRecord> divergences;
  std::size_t inputs_checked = 0;
  std::size_t tokens_generated = 0;
  std::int64_t min_margin = kNoCompetitor;
  std::size_t step_bound_runs = 0;
  std::size_t step_bound_violations = 0;
  double elapsed_ms = 0;
  bool passed() const;
};

enum class ReportFormat { Text, JsonLines };
ReportFormat parse_report_format(std::string_view s);  // ConfigError

/// Timing is left out unless asked for, so reports under a fixed seed are
/// byte-identical.
std::string format_report(const EquivalenceReport& report, ReportFormat format, bool include_timing = false);

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::size_t max_n = 6;
  std::size_t stream_length = 200;
  std::size_t streams = 10;
  std::vector<std::size_t> schedule{2, 4, 8, 16, 32};
  VocabularyPolicy policy = VocabularyPolicy::ReachableOnly;
};

/// Registered suite names, in run order.
std::vector<std::string> suite_names();
/// UnknownSuite for unregistered names.
EquivalenceReport run_suite(const std::string& name, const SuiteConfig& config = {});

}  // namespace llmsim
