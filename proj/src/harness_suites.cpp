#include <algorithm>
#include <chrono>
#include <functional>
#include <set>

#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/harness.hpp"

namespace llmsim {

namespace {

const Alphabet& binary() {
  static const Alphabet a({"0", "1"});
  return a;
}

std::string render(const SymbolString& w) { return binary().render(w); }

std::string render_chunks(const std::vector<SymbolString>& chunks, std::size_t from, std::size_t count) {
  std::string s;
  for (std::size_t i = from; i < std::min(chunks.size(), from + count); ++i) s += render(chunks[i]) + " ";
  if (!s.empty()) s.pop_back();
  return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep = ",") {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : sep) + p;
  return s;
}

// Ones with probability 3/10 keep a 200-symbol counter stream far below the
// largest schedule entry.
constexpr unsigned kCounterOnes = 3;

class Builder {
 public:
  Builder(std::string suite, std::string tag, std::uint64_t seed) {
    r_.suite = std::move(suite);
    r_.tag = std::move(tag);
    r_.seed = seed;
  }

  CaseResult& open(std::string name) {
    r_.cases.push_back(CaseResult{std::move(name), 0, 0, kNoCompetitor, {}});
    return r_.cases.back();
  }

  void count(CaseResult& c, std::size_t inputs, std::size_t tokens, std::int64_t margin) {
    c.inputs += inputs;
    c.tokens += tokens;
    c.min_margin = std::min(c.min_margin, margin);
    r_.inputs_checked += inputs;
    r_.tokens_generated += tokens;
    r_.min_margin = std::min(r_.min_margin, margin);
  }

  void diverge(const std::string& case_name, std::string input, std::size_t step, std::string expected,
               std::string actual) {
    r_.divergences.push_back({case_name, std::move(input), step, std::move(expected), std::move(actual)});
  }

  void steps(std::uint64_t used, std::uint64_t bound, const std::string& case_name, const std::string& input) {
    ++r_.step_bound_runs;
    if (used > bound) {
      ++r_.step_bound_violations;
      diverge(case_name, input, used, "at most " + std::to_string(bound) + " steps", std::to_string(used) + " steps");
    }
  }

  // Corpus machines must pass their behavioural oracle before a suite uses them.
  bool self_test(const std::string& machine, std::size_t max_n) {
    if (const auto failure = corpus_self_test(machine, max_n)) {
      diverge("self-test " + machine, "", 0, "oracle agreement", *failure);
      return false;
    }
    return true;
  }

  void record(CaseResult& c, const EquivalenceResult& e) {
    count(c, e.inputs_checked, e.tokens_generated, e.min_margin);
    if (e.divergence)
      diverge(c.name, render(e.divergence->input), e.divergence->step, e.divergence->expected, e.divergence->actual);
  }

  EquivalenceReport take() { return std::move(r_); }
  EquivalenceReport& report() { return r_; }

 private:
  EquivalenceReport r_;
};

void tm_steps(Builder& b, const MultiTapeTm& m, const AdviceFunction* advice, std::size_t n, std::size_t k,
              const std::string& case_name) {
  const std::uint64_t c = default_step_constant(m);
  const std::uint64_t bound = step_bound(n, k, c);
  for (const auto& w : all_strings(2, n)) {
    const TmRunResult run = advice ? tma_run(m, *advice, w, k) : tm_run(m, w, k);
    b.steps(run.steps_used, bound, case_name, render(w));
  }
}

void stream_steps(Builder& b, const MultiTapeTm& m, const ItmaRunResult& direct, const std::string& case_name) {
  const std::uint64_t c = default_step_constant(m);
  for (std::size_t e = 0; e < direct.epoch_traces.size(); ++e) {
    const auto& trace = direct.epoch_traces[e];
    std::size_t k = 0;
    for (const auto& config : trace) k = std::max(k, space(config));
    b.steps(trace.empty() ? 0 : trace.size() - 1, step_bound(e + 1, k, c), case_name, "epoch " + std::to_string(e + 1));
  }
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kFsts{"identity-fst", "running-parity-fst", "reverse-fst"};

EquivalenceReport fst_suite(const SuiteConfig& cfg) {
  Builder b("T2-fst", "T2", cfg.seed);
  const auto inputs = all_strings_up_to(2, 1, cfg.max_n);
  for (const auto& name : kFsts) {
    if (!b.self_test(name, cfg.max_n)) continue;
    const Dfst fst = corpus::fst(name);
    const CompiledModel cm = compile_fst(fst, {cfg.max_n});
    CaseResult& c = b.open(name);
    b.record(c, verify_equivalence(fst_oracle(fst), cm.model, inputs));
    c.details = {{"n", std::to_string(cfg.max_n)},
                 {"vocabulary", std::to_string(cm.report.vocabulary_size)},
                 {"dimension", std::to_string(cm.report.dimension)},
                 {"dimension_bound", std::to_string(cm.report.dimension_bound)}};
    if (cm.report.dimension > cm.report.dimension_bound)
      b.diverge(name, "", 0, "dimension <= " + std::to_string(cm.report.dimension_bound),
                std::to_string(cm.report.dimension));
  }
  return b.take();
}

// k = S(n) + 1 for each acceptor.
struct TmCase {
  std::string machine;
  std::function<std::size_t(std::size_t)> space;
  std::string space_formula;
};

EquivalenceReport tm_suite(const SuiteConfig& cfg) {
  Builder b("T4-tm", "T4", cfg.seed);
  const std::vector<TmCase> cases{{"parity-tm", [](std::size_t) { return std::size_t{1}; }, "1"},
                                  {"palindrome-tm", [](std::size_t n) { return n; }, "n"}};
  for (const auto& tc : cases) {
    if (!b.self_test(tc.machine, cfg.max_n)) continue;
    const MultiTapeTm m = corpus::tm(tc.machine);
    for (std::size_t n = 1; n <= cfg.max_n; ++n) {
      TmCompileParams p;
      p.input_length = n;
      p.space_bound = tc.space(n) + 1;
      p.policy = cfg.policy;
      const CompiledModel cm = compile_tm(m, p);
      CaseResult& c = b.open(tc.machine + " n=" + std::to_string(n));
      b.record(c, verify_equivalence(tm_oracle(m, p), cm.model, all_strings(2, n)));
      c.details = {{"space", tc.space_formula},
                   {"k", std::to_string(p.space_bound)},
                   {"vocabulary", std::to_string(cm.report.vocabulary_size)},
                   {"dimension", std::to_string(cm.report.dimension)},
                   {"dimension_bound", std::to_string(cm.report.dimension_bound)}};
      if (cm.report.dimension > cm.report.dimension_bound)
        b.diverge(c.name, "", 0, "dimension <= " + std::to_string(cm.report.dimension_bound),
                  std::to_string(cm.report.dimension));
      tm_steps(b, m, nullptr, n, p.space_bound, c.name);
    }
  }
  return b.take();
}

EquivalenceReport function_suite(const SuiteConfig& cfg) {
  Builder b("T4-function", "T4", cfg.seed);
  const std::string name = "increment-tm";
  if (!b.self_test(name, cfg.max_n)) return b.take();
  const MultiTapeTm m = corpus::tm(name);
  for (std::size_t n = 1; n <= cfg.max_n; ++n) {
    TmCompileParams p;
    p.input_length = n;
    p.space_bound = n + 2;
    p.mode = TmMode::Function;
    p.policy = cfg.policy;
    const CompiledModel cm = compile_tm(m, p);
    CaseResult& c = b.open(name + " n=" + std::to_string(n));
    c.details = {{"space", "n+1"}, {"k", std::to_string(p.space_bound)}};
    b.record(c, verify_equivalence(tm_oracle(m, p), cm.model, all_strings(2, n)));
    // Second check, against the integer oracle rather than the machine.
    const std::size_t max_tokens = static_cast<std::size_t>(
        std::min<std::uint64_t>(step_bound(n, p.space_bound, default_step_constant(m)) + 2, 1U << 20));
    for (const auto& w : all_strings(2, n)) {
      const GenerationTrace t = generate(cm.model, input_prompt(cm.model, w), max_tokens);
      std::int64_t margin = kNoCompetitor;
      for (const auto& s : t.scores) margin = std::min(margin, s.margin);
      b.count(c, 0, t.generated.size(), margin);
      // The model answers over the work alphabet, the oracle over {0,1}.
      const std::string got = to_string(decode_answer(cm.model, t), cm.model.parts().output_alphabet);
      const std::string want = to_string(expected_tm_answer(name, w), binary().names());
      if (got != want) b.diverge(c.name, render(w), t.generated.size(), want, got);
    }
    tm_steps(b, m, nullptr, n, p.space_bound, c.name);
  }
  return b.take();
}

EquivalenceReport advice_suite(const SuiteConfig& cfg) {
  Builder b("C4.1-advice", "C4.1", cfg.seed);
  const std::string name = "length-parity-tma";
  if (!b.self_test(name, cfg.max_n)) return b.take();
  const MultiTapeTm m = corpus::tm(name);
  const AdviceFunction advice = corpus::length_parity_advice(cfg.max_n);
  for (std::size_t n = 1; n <= cfg.max_n; ++n) {
    TmCompileParams p;
    p.input_length = n;
    p.space_bound = 1;
    p.advice = advice;
    p.policy = cfg.policy;
    const CompiledModel cm = compile_tm(m, p);
    CaseResult& c = b.open(name + " n=" + std::to_string(n));
    b.record(c, verify_equivalence(tm_oracle(m, p), cm.model, all_strings(2, n)));

    TmEncodingOptions plain;
    plain.input_length = n;
    plain.space_bound = p.space_bound;
    plain.posbits = cm.model.parts().posbits;
    const std::size_t without = TmEncoding(m, plain).layout().dimension;
    const std::size_t width = m.advice_alphabet().size() + 1 + bits_for(advice.at(n).size());
    c.details = {{"advice", m.advice_alphabet().render(advice.at(n))},
                 {"dimension", std::to_string(cm.report.dimension)},
                 {"dimension_without_advice", std::to_string(without)},
                 {"advice_field_width", std::to_string(width)}};
    if (cm.report.dimension - without != width)
      b.diverge(c.name, "", 0, "dimension difference " + std::to_string(width),
                std::to_string(cm.report.dimension - without));
    tm_steps(b, m, &advice, n, p.space_bound, c.name);
  }
  return b.take();
}

EquivalenceReport extraction_suite(const SuiteConfig& cfg) {
  Builder b("T3-roundtrip", "T3", cfg.seed);
  const std::size_t n = std::min<std::size_t>(cfg.max_n, 5);
  for (const auto& name : kFsts) {
    if (!b.self_test(name, cfg.max_n)) continue;
    const Dfst fst = corpus::fst(name);
    const Dfst extracted = extract_fst(compile_fst(fst, {n}).model, n);
    CaseResult& c = b.open(name);
    c.details = {{"n", std::to_string(n)},
                 {"states", std::to_string(fst.states().size())},
                 {"extracted_states", std::to_string(extracted.states().size())}};
    for (const auto& w : all_strings_up_to(2, 1, n)) {
      b.count(c, 1, 0, kNoCompetitor);
      const FstRunResult want = fst_run(fst, w);
      const FstRunResult got = fst_run(extracted, w);
      if (got.verdict != want.verdict || got.output != want.output) {
        b.diverge(c.name, render(w), 0, render(want.output), got.verdict == Verdict::Accept
                                                                  ? render(got.output)
                                                                  : std::string(to_string(got.verdict)));
        break;
      }
    }
  }
  return b.take();
}

// ---------------------------------------------------------------------------
// Stream suites

struct StreamCase {
  std::string machine;
  AdviceFunction advice;
  SymbolString stream;
};

std::vector<StreamCase> lineage_cases(const SuiteConfig& cfg) {
  std::vector<StreamCase> out;
  const std::size_t len = cfg.stream_length;
  for (std::uint64_t i = 0; i < 3; ++i)
    out.push_back({"binary-counter-itm", {}, seeded_stream(cfg.seed + i, len, kCounterOnes)});
  out.push_back({"advice-xor-itma", corpus::advice_xor_advice(len, 5), seeded_stream(cfg.seed + 3, len)});
  // Unary space reaches the stream length, so this stream stays below the
  // last schedule entry.
  const std::size_t short_len = std::min<std::size_t>(len, cfg.schedule.back() - 2);
  out.push_back({"advice-unary-counter-itma", counter_advice(short_len, 3), seeded_stream(cfg.seed + 4, short_len)});
  return out;
}

std::vector<StreamCase> roundtrip_cases(const SuiteConfig& cfg) {
  static const std::vector<std::string> cycle{"binary-counter-itm", "advice-xor-itma", "binary-counter-itm",
                                              "xor-itm",            "binary-counter-itm", "advice-xor-itma",
                                              "echo-itm",           "binary-counter-itm", "xor-itm",
                                              "advice-unary-counter-itma"};
  std::vector<StreamCase> out;
  const std::size_t len = cfg.stream_length;
  const std::size_t short_len = std::min<std::size_t>(len, cfg.schedule.back() - 2);
  for (std::size_t i = 0; i < cfg.streams; ++i) {
    const std::string& machine = cycle[i % cycle.size()];
    const std::uint64_t seed = cfg.seed + i;
    if (machine == "binary-counter-itm")
      out.push_back({machine, {}, seeded_stream(seed, len, kCounterOnes)});
    else if (machine == "advice-xor-itma")
      out.push_back({machine, corpus::advice_xor_advice(len, 5), seeded_stream(seed, len)});
    else if (machine == "advice-unary-counter-itma")
      out.push_back({machine, counter_advice(short_len, 3), seeded_stream(seed, short_len)});
    else
      out.push_back({machine, {}, seeded_stream(seed, len)});
  }
  return out;
}

std::string triggers_of(const std::vector<ReconstructionEvent>& log) {
  std::vector<std::string> parts;
  for (const auto& ev : log) parts.push_back(std::string(to_string(ev.trigger)) + "@" + std::to_string(ev.position));
  return join(parts);
}

std::string ks_of(const Lineage& lineage) {
  std::vector<std::string> parts;
  for (const auto& m : lineage.members) parts.push_back(std::to_string(m.space_bound));
  return join(parts);
}

EquivalenceReport lineage_suite(const SuiteConfig& cfg) {
  Builder b("T5-lineage", "T5", cfg.seed);
  std::set<Trigger> seen;
  const auto cases = lineage_cases(cfg);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const StreamCase& sc = cases[i];
    if (!b.self_test(sc.machine, cfg.max_n)) continue;
    const MultiTapeTm m = corpus::tm(sc.machine);
    CaseResult& c = b.open("stream " + std::to_string(i + 1) + " " + sc.machine);
    const ItmaRunResult direct = itma_run_stream(m, sc.advice, sc.stream, KSchedule::unbounded());
    if (direct.failure) {
      b.diverge(c.name, render(sc.stream), direct.failed_epoch, "direct run completes",
                std::string(to_string(*direct.failure)));
      continue;
    }
    const LineageRunReport lin = process_stream(m, sc.advice, sc.stream, cfg.schedule);
    b.count(c, sc.stream.size(), lin.tokens_generated, lin.min_margin);
    c.details = {{"reconstructions", std::to_string(lin.lineage.log.size())},
                 {"k", ks_of(lin.lineage)},
                 {"triggers", triggers_of(lin.lineage.log)}};
    for (const auto& ev : lin.lineage.log) seen.insert(ev.trigger);
    if (const auto problem = check_lineage(m, sc.advice, sc.stream, direct, lin)) {
      std::size_t epoch = 0;
      for (std::size_t e = 0; e < sc.stream.size(); ++e)
        if (e >= lin.chunks.size() || lin.chunks[e] != direct.chunks()[e]) {
          epoch = e + 1;
          break;
        }
      b.diverge(c.name, render(sc.stream), epoch, "lineage agrees with the direct run", *problem);
    }
    stream_steps(b, m, direct, c.name);
  }
  CaseResult& cov = b.open("trigger coverage");
  std::vector<std::string> names;
  for (Trigger t : seen) names.emplace_back(to_string(t));
  cov.details = {{"triggers", join(names)}};
  for (Trigger t : {Trigger::SpaceExceeded, Trigger::AdviceChanged, Trigger::Both})
    if (!seen.count(t)) b.diverge(cov.name, "", 0, std::string(to_string(t)) + " exercised", "never fired");
  return b.take();
}

EquivalenceReport bridge_suite(const SuiteConfig& cfg) {
  Builder b("T6-bridge", "T6", cfg.seed);
  const auto cases = lineage_cases(cfg);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const StreamCase& sc = cases[i];
    if (!b.self_test(sc.machine, cfg.max_n)) continue;
    const MultiTapeTm m = corpus::tm(sc.machine);
    CaseResult& c = b.open("stream " + std::to_string(i + 1) + " " + sc.machine);
    const ItmaRunResult direct = itma_run_stream(m, sc.advice, sc.stream, KSchedule::unbounded());
    const LineageRunReport lin = process_stream(m, sc.advice, sc.stream, cfg.schedule);
    const BridgeAdvice advice = harvest_advice(lin.lineage);
    const BridgeRunResult run = bridge_run(advice, sc.stream);
    b.count(c, sc.stream.size(), run.tokens_generated, run.min_margin);
    std::vector<std::string> loads;
    for (std::size_t p : run.load_positions) loads.push_back(std::to_string(p));
    std::size_t bytes = 0;
    for (const auto& [index, d] : advice.descriptions) {
      bytes += d.bytes.size();
      if (describe_model(parse_model_description(d.bytes)) != d)
        b.diverge(c.name, "member " + std::to_string(index), 0, "byte-identical description", "differs");
    }
    c.details = {{"members", std::to_string(advice.descriptions.size())},
                 {"load_positions", join(loads)},
                 {"description_bytes", std::to_string(bytes)}};
    const auto want = direct.chunks();
    for (std::size_t e = 0; e < sc.stream.size(); ++e)
      if (e >= run.chunks.size() || run.chunks[e] != want[e]) {
        b.diverge(c.name, render(sc.stream), e + 1, render_chunks(want, e, 1), render_chunks(run.chunks, e, 1));
        break;
      }
  }

  // The harvested table depends on the switch structure only: two streams
  // with the same reconstruction log must yield byte-identical advice.
  const MultiTapeTm m = corpus::tm("advice-xor-itma");
  const AdviceFunction fn = corpus::advice_xor_advice(cfg.stream_length, 5);
  CaseResult& c = b.open("input independence advice-xor-itma");
  const auto a = process_stream(m, fn, seeded_stream(cfg.seed + 100, cfg.stream_length), cfg.schedule);
  const auto z = process_stream(m, fn, seeded_stream(cfg.seed + 101, cfg.stream_length), cfg.schedule);
  b.count(c, 2 * cfg.stream_length, a.tokens_generated + z.tokens_generated, std::min(a.min_margin, z.min_margin));
  if (a.lineage.log != z.lineage.log)
    b.diverge(c.name, "", 0, "equal reconstruction logs", "logs differ");
  else if (harvest_advice(a.lineage) != harvest_advice(z.lineage))
    b.diverge(c.name, "", 0, "identical advice", "advice depends on the stream");
  return b.take();
}

EquivalenceReport roundtrip_suite(const SuiteConfig& cfg) {
  Builder b("T7-roundtrip", "T7", cfg.seed);
  const auto cases = roundtrip_cases(cfg);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const StreamCase& sc = cases[i];
    if (!b.self_test(sc.machine, cfg.max_n)) continue;
    const MultiTapeTm m = corpus::tm(sc.machine);
    CaseResult& c = b.open("stream " + std::to_string(i + 1) + " " + sc.machine);
    const RoundtripReport r = roundtrip_check(m, sc.advice, sc.stream, cfg.schedule);
    b.count(c, sc.stream.size(), r.tokens_generated, r.min_margin);
    c.details = {{"seed", std::to_string(cfg.seed + i)},
                 {"length", std::to_string(sc.stream.size())},
                 {"reconstructions", std::to_string(r.log.size())},
                 {"members", std::to_string(r.members)},
                 {"triggers", triggers_of(r.log)},
                 {"descriptions_roundtrip", r.descriptions_roundtrip ? "yes" : "no"}};
    if (!r.descriptions_roundtrip) b.diverge(c.name, "", 0, "byte-identical descriptions", "differs");
    if (r.divergence_epoch) {
      const std::size_t e = *r.divergence_epoch - 1;
      b.diverge(c.name, render(sc.stream), *r.divergence_epoch, render_chunks(r.oracle, e, 1), r.divergence);
    }
    stream_steps(b, m, itma_run_stream(m, sc.advice, sc.stream, KSchedule::unbounded()), c.name);
  }
  return b.take();
}

// ---------------------------------------------------------------------------

using SuiteFn = EquivalenceReport (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& theorem_suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> all{
      {"T2-fst", fst_suite},          {"T3-roundtrip", extraction_suite}, {"T4-tm", tm_suite},
      {"T4-function", function_suite}, {"C4.1-advice", advice_suite},      {"T5-lineage", lineage_suite},
      {"T6-bridge", bridge_suite},     {"T7-roundtrip", roundtrip_suite},
  };
  return all;
}

// One case per theorem suite, carrying that suite's totals; divergences are
// forwarded with the suite name prefixed.
EquivalenceReport aggregate(const std::string& name, const SuiteConfig& cfg, bool twice) {
  Builder b(name, "all", cfg.seed);
  for (const auto& [suite, fn] : theorem_suites()) {
    const EquivalenceReport r = fn(cfg);
    CaseResult& c = b.open(suite);
    b.count(c, r.inputs_checked, r.tokens_generated, r.min_margin);
    b.report().step_bound_runs += r.step_bound_runs;
    b.report().step_bound_violations += r.step_bound_violations;
    c.details = {{"tag", r.tag},
                 {"step_bound_runs", std::to_string(r.step_bound_runs)},
                 {"step_bound_violations", std::to_string(r.step_bound_violations)},
                 {"divergences", std::to_string(r.divergences.size())}};
    for (const auto& d : r.divergences)
      b.diverge(suite + ": " + d.case_name, d.input, d.step, d.expected, d.actual);
    if (twice) {
      const std::string first = format_report(r, ReportFormat::JsonLines);
      const std::string second = format_report(fn(cfg), ReportFormat::JsonLines);
      c.details.emplace_back("identical_rerun", first == second ? "yes" : "no");
      if (first != second) b.diverge(suite, "", 0, "byte-identical rerun", "reports differ");
    }
  }
  return b.take();
}

EquivalenceReport validated(const SuiteConfig& cfg) {
  if (cfg.max_n == 0) throw Error(ErrorCode::ConfigError, "max_n must be positive");
  if (cfg.schedule.empty() || cfg.schedule.back() < 4)
    throw Error(ErrorCode::ConfigError, "schedule must end at 4 or more cells");
  for (std::size_t i = 1; i < cfg.schedule.size(); ++i)
    if (cfg.schedule[i] <= cfg.schedule[i - 1])
      throw Error(ErrorCode::ConfigError, "schedule must be strictly increasing");
  return {};
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : theorem_suites()) names.push_back(name);
  for (const char* meta : {"step-bound", "margin", "determinism", "all"}) names.emplace_back(meta);
  return names;
}

EquivalenceReport run_suite(const std::string& name, const SuiteConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  EquivalenceReport r;
  bool found = false;
  for (const auto& [suite, fn] : theorem_suites())
    if (suite == name) {
      validated(config);
      r = fn(config);
      found = true;
    }
  if (!found) {
    if (name != "step-bound" && name != "margin" && name != "determinism" && name != "all")
      throw Error(ErrorCode::UnknownSuite, "unknown suite '" + name + "'");
    validated(config);
    r = aggregate(name, config, name == "determinism");
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace llmsim
