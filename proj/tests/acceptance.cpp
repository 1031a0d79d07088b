// Acceptance checks: one PASS/FAIL line per criterion. Expected counts are
// computed here from first principles, not read back from the reports.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/harness.hpp"

using namespace llmsim;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::size_t pow2_sum(std::size_t from, std::size_t to) {
  std::size_t s = 0;
  for (std::size_t i = from; i <= to; ++i) s += std::size_t{1} << i;
  return s;
}

std::string detail_of(const CaseResult& c, const std::string& key) {
  for (const auto& [k, v] : c.details)
    if (k == key) return v;
  return {};
}

std::string first_divergence(const EquivalenceReport& r) {
  if (r.divergences.empty()) return "";
  const auto& d = r.divergences.front();
  return "; first divergence " + d.case_name + " '" + d.input + "': expected " + d.expected + ", got " + d.actual;
}

Outcome check_transducers() {
  const auto start = std::chrono::steady_clock::now();
  const EquivalenceReport r = run_suite("T2-fst");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::size_t per_machine = pow2_sum(1, 6);
  bool ok = r.passed() && r.cases.size() >= 3 && seconds < 60;
  for (const auto& c : r.cases) ok = ok && c.inputs == per_machine;

  // Decoded model outputs against the behavioural oracles, not the machines.
  std::size_t decoded = 0;
  for (const auto& c : r.cases) {
    const CompiledModel cm = compile_fst(corpus::fst(c.name), {6});
    for (const auto& w : all_strings_up_to(2, 1, 6)) {
      const Answer a = decode_answer(cm.model, generate(cm.model, input_prompt(cm.model, w), 4096));
      ok = ok && a.kind == Answer::Kind::Output && a.output == expected_fst_output(c.name, w);
      ++decoded;
    }
  }
  return {ok, std::to_string(r.cases.size()) + " transducers, " + std::to_string(r.inputs_checked) +
                  " inputs, " + std::to_string(decoded) + " decoded against the output oracle, " +
                  std::to_string(static_cast<int>(seconds * 1000)) + " ms" + first_divergence(r)};
}

Outcome check_acceptor_sentences() {
  const EquivalenceReport r = run_suite("T4-tm");
  bool ok = r.passed() && r.inputs_checked == 2 * pow2_sum(1, 6) && r.cases.size() == 12;
  for (const auto& c : r.cases) ok = ok && c.inputs == std::size_t{1} << std::stoul(c.name.substr(c.name.find("n=") + 2));
  return {ok, std::to_string(r.inputs_checked) + " sentences compared word for word" + first_divergence(r)};
}

Outcome check_function_mode() {
  const EquivalenceReport r = run_suite("T4-function");
  const bool ok = r.passed() && r.inputs_checked == pow2_sum(1, 6);
  return {ok, std::to_string(r.inputs_checked) + " increments checked against integer arithmetic" + first_divergence(r)};
}

Outcome check_advice() {
  const EquivalenceReport r = run_suite("C4.1-advice");
  bool ok = r.passed() && r.inputs_checked == pow2_sum(1, 6);
  const MultiTapeTm m = corpus::tm("length-parity-tma");
  for (const auto& c : r.cases) {
    const std::size_t diff = std::stoul(detail_of(c, "dimension")) - std::stoul(detail_of(c, "dimension_without_advice"));
    // One-hot advice symbol plus blank, and the advice head over a one-cell tape.
    ok = ok && diff == m.advice_alphabet().size() + 1 + 1;
  }
  return {ok, std::to_string(r.inputs_checked) + " verdicts, dimension difference equals one advice field" +
                  first_divergence(r)};
}

Outcome check_extraction() {
  const EquivalenceReport r = run_suite("T3-roundtrip");
  bool ok = r.passed() && r.cases.size() == 3;
  for (const auto& c : r.cases) ok = ok && c.inputs == pow2_sum(1, 5);
  return {ok, std::to_string(r.cases.size()) + " transducers, " + std::to_string(r.inputs_checked) + " inputs" +
                  first_divergence(r)};
}

Outcome check_lineages() {
  const EquivalenceReport r = run_suite("T5-lineage");
  bool space = false;
  bool adv = false;
  bool increasing = true;
  std::size_t reconstructions = 0;
  for (const auto& c : r.cases) {
    const std::string t = detail_of(c, "triggers");
    space = space || t.find("space-exceeded") != std::string::npos;
    adv = adv || t.find("advice-changed") != std::string::npos;
    if (!detail_of(c, "reconstructions").empty()) reconstructions += std::stoul(detail_of(c, "reconstructions"));
    std::size_t prev = 0;
    std::string ks = detail_of(c, "k");
    for (std::size_t pos = 0; !ks.empty() && pos != std::string::npos;) {
      const std::size_t next = ks.find(',', pos);
      const std::size_t k = std::stoul(ks.substr(pos, next == std::string::npos ? next : next - pos));
      increasing = increasing && k > prev;
      prev = k;
      pos = next == std::string::npos ? next : next + 1;
    }
  }
  const bool ok = r.passed() && space && adv && increasing && reconstructions > 0;
  return {ok, std::to_string(r.inputs_checked) + " stream symbols, " + std::to_string(reconstructions) +
                  " reconstructions, seams checked" + first_divergence(r)};
}

Outcome check_bridge() {
  const EquivalenceReport t6 = run_suite("T6-bridge");
  const EquivalenceReport t7 = run_suite("T7-roundtrip");
  bool ok = t6.passed() && t7.passed() && t7.cases.size() == 10;
  for (const auto& c : t7.cases) ok = ok && detail_of(c, "descriptions_roundtrip") == "yes";
  return {ok, std::to_string(t7.cases.size()) + " seeded streams three-way equal, descriptions byte-identical" +
                  first_divergence(t6) + first_divergence(t7)};
}

Outcome check_step_bound() {
  const EquivalenceReport r = run_suite("step-bound");
  const bool ok = r.step_bound_runs > 0 && r.step_bound_violations == 0;
  return {ok, std::to_string(r.step_bound_runs) + " runs and epochs, " + std::to_string(r.step_bound_violations) +
                  " over the bound"};
}

Outcome check_determinism() {
  const EquivalenceReport r = run_suite("determinism");
  bool ok = r.passed();
  for (const auto& c : r.cases) ok = ok && detail_of(c, "identical_rerun") == "yes";
  SuiteConfig other;
  other.seed = 7;
  const std::string a = format_report(run_suite("T7-roundtrip", other), ReportFormat::Text);
  const std::string b = format_report(run_suite("T7-roundtrip", other), ReportFormat::Text);
  ok = ok && a == b;
  return {ok, std::to_string(r.cases.size()) + " suites rerun with identical bytes"};
}

Outcome check_margin() {
  const EquivalenceReport r = run_suite("margin");
  const bool ok = r.min_margin != kNoCompetitor && r.min_margin >= 1 && r.tokens_generated > 0;
  return {ok, "minimum margin " + std::to_string(r.min_margin) + " over " + std::to_string(r.tokens_generated) +
                  " next-token calls"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"transducers compile to equivalent models", check_transducers},
      {"acceptor sentences match machine traces", check_acceptor_sentences},
      {"function-mode answers match the increment oracle", check_function_mode},
      {"advice machines compile with one extra field", check_advice},
      {"extracted transducers agree with the originals", check_extraction},
      {"lineages match direct stream runs", check_lineages},
      {"direct run, lineage and interpreter agree", check_bridge},
      {"runs stay within the step bound", check_step_bound},
      {"reports are byte-identical under a fixed seed", check_determinism},
      {"every next-token choice has margin at least one", check_margin},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const Error& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << " (" << o.detail << ")\n";
    failed += o.ok ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
