#include <sstream>

#include "json.hpp"
#include "llmsim/error.hpp"
#include "llmsim/harness.hpp"

namespace llmsim {

namespace {

using Json = nlohmann::ordered_json;

std::string margin_text(std::int64_t m) { return m == kNoCompetitor ? "none" : std::to_string(m); }

Json margin_json(std::int64_t m) { return m == kNoCompetitor ? Json(nullptr) : Json(m); }

}  // namespace

bool EquivalenceReport::passed() const {
  return divergences.empty() && step_bound_violations == 0 && (min_margin == kNoCompetitor || min_margin >= 1);
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "json-lines") return ReportFormat::JsonLines;
  throw Error(ErrorCode::ConfigError, "format must be 'text' or 'json-lines'");
}

std::string format_report(const EquivalenceReport& r, ReportFormat format, bool include_timing) {
  std::ostringstream out;
  if (format == ReportFormat::Text) {
    out << "suite " << r.suite << " [" << r.tag << "] seed " << r.seed << "\n";
    for (const auto& c : r.cases) {
      out << "  case " << c.name << ": inputs " << c.inputs << ", tokens " << c.tokens << ", min margin "
          << margin_text(c.min_margin);
      for (const auto& [k, v] : c.details) out << ", " << k << " " << v;
      out << "\n";
    }
    for (const auto& d : r.divergences)
      out << "  divergence in " << d.case_name << " on '" << d.input << "' at step " << d.step << ": expected "
          << d.expected << ", got " << d.actual << "\n";
    out << "  total: inputs " << r.inputs_checked << ", tokens " << r.tokens_generated << ", min margin "
        << margin_text(r.min_margin) << ", step-bound runs " << r.step_bound_runs << " (violations "
        << r.step_bound_violations << ")";
    if (include_timing) out << ", " << static_cast<long long>(r.elapsed_ms) << " ms";
    out << "\n" << (r.passed() ? "PASS" : "FAIL") << "\n";
    return out.str();
  }

  out << Json{{"type", "suite"}, {"suite", r.suite}, {"tag", r.tag}, {"seed", r.seed}}.dump() << "\n";
  for (const auto& c : r.cases) {
    Json j{{"type", "case"}, {"name", c.name}, {"inputs", c.inputs}, {"tokens", c.tokens},
           {"min_margin", margin_json(c.min_margin)}};
    for (const auto& [k, v] : c.details) j[k] = v;
    out << j.dump() << "\n";
  }
  for (const auto& d : r.divergences)
    out << Json{{"type", "divergence"}, {"case", d.case_name}, {"input", d.input}, {"step", d.step},
                {"expected", d.expected}, {"actual", d.actual}}
               .dump()
        << "\n";
  Json summary{{"type", "summary"},
               {"inputs", r.inputs_checked},
               {"tokens", r.tokens_generated},
               {"min_margin", margin_json(r.min_margin)},
               {"step_bound_runs", r.step_bound_runs},
               {"step_bound_violations", r.step_bound_violations},
               {"divergences", r.divergences.size()},
               {"passed", r.passed()}};
  if (include_timing) summary["elapsed_ms"] = r.elapsed_ms;
  out << summary.dump() << "\n";
  return out.str();
}

}  // namespace llmsim
