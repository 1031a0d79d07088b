#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "llmsim/lineage.hpp"

namespace llmsim {

/// Canonical text of a model (see `describe`), tagged with its format version.
struct ModelDescription {
  std::string bytes;
  std::string version() const;  // first line, e.g. "llmsim-model v1"
  friend bool operator==(const ModelDescription&, const ModelDescription&) = default;
};

ModelDescription describe_model(const FixedLlm& model);

/// Advice for the interpreter: member index -> description, plus the stream
/// positions at which the next member is loaded before the port symbol is
/// read (advice-driven switches). Space-driven switches need no position:
/// the running member announces them with GROW.
struct BridgeAdvice {
  std::string start_word;  // first configuration of member 0
  std::map<std::size_t, ModelDescription> descriptions;
  std::set<std::size_t> boundary_switches;
  friend bool operator==(const BridgeAdvice&, const BridgeAdvice&) = default;
};

BridgeAdvice harvest_advice(const Lineage& lineage);

/// Directory layout: manifest.txt plus one numbered file per description.
void write_bridge_advice(const std::filesystem::path& dir, const BridgeAdvice& advice);
BridgeAdvice read_bridge_advice(const std::filesystem::path& dir);  // ParseError; missing files stay missing

struct BridgeRunResult {
  std::vector<SymbolString> chunks;
  std::vector<std::vector<std::string>> epoch_words;
  std::vector<std::size_t> load_positions;  // epoch at which each member was loaded (0 for member 0)
  std::size_t tokens_generated = 0;
  std::int64_t min_margin = kNoCompetitor;
};

/// Executes the described members in turn on the stream. MissingAdvice when
/// a switch needs a description the table lacks; ParseError on a corrupt one.
BridgeRunResult bridge_run(const BridgeAdvice& advice, const SymbolString& stream,
                           std::size_t max_epoch_tokens = std::size_t{1} << 24);

struct RoundtripReport {
  std::vector<SymbolString> oracle;
  std::vector<SymbolString> lineage;
  std::vector<SymbolString> bridge;
  std::vector<ReconstructionEvent> log;
  std::size_t members = 0;
  std::size_t tokens_generated = 0;          // lineage plus interpreter
  std::int64_t min_margin = kNoCompetitor;   // over both
  bool descriptions_roundtrip = false;  // parse then describe is byte-identical for every member
  std::optional<std::size_t> divergence_epoch;  // first 1-based epoch where the three legs disagree
  std::string divergence;                       // what disagreed there
  bool passed() const { return descriptions_roundtrip && !divergence_epoch; }
};

/// Runs the direct machine, the lineage, and the interpreter over the
/// descriptions harvested from the lineage, and compares the three chunk
/// sequences. `tamper` may alter the harvested advice (fault injection).
RoundtripReport roundtrip_check(const MultiTapeTm& machine, const AdviceFunction& advice, const SymbolString& stream,
                                const std::vector<std::size_t>& schedule, const LineageOptions& options = {},
                                const std::function<void(BridgeAdvice&)>& tamper = {});

}  // namespace llmsim
