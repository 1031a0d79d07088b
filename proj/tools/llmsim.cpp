#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/harness.hpp"
#include "llmsim/machine_spec.hpp"

using namespace llmsim;

namespace {

constexpr int kPass = 0;
constexpr int kDivergence = 1;
constexpr int kUsage = 2;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out << text;
}

// A machine argument is a spec file path or a corpus machine name.
Machine load_machine(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return parse_machine_spec(read_text(arg));
  return parse_machine_spec(corpus::entry(arg).spec);
}

Dfst load_fst(const std::string& arg) {
  Machine m = load_machine(arg);
  if (auto* f = std::get_if<Dfst>(&m)) return *f;
  throw Error(ErrorCode::ConfigError, arg + " is not a transducer");
}

MultiTapeTm load_tm(const std::string& arg) {
  Machine m = load_machine(arg);
  if (auto* t = std::get_if<MultiTapeTm>(&m)) return *t;
  throw Error(ErrorCode::ConfigError, arg + " is not a Turing machine");
}

// A stream argument is a stream file (one symbol per line) or an inline
// string of one-character symbols.
SymbolString load_stream(const Alphabet& alphabet, const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return parse_stream(alphabet, read_text(arg));
  return alphabet.parse_string(arg);
}

AdviceFunction load_advice(const MultiTapeTm& m, const std::string& path) {
  return path.empty() ? AdviceFunction{} : parse_advice_table(m, read_text(path));
}

std::string render_chunks(const Alphabet& a, const std::vector<SymbolString>& chunks) {
  std::string s;
  for (const auto& c : chunks) s += (s.empty() ? "" : " ") + (c.empty() ? std::string("-") : a.render(c));
  return s;
}

std::string render_schedule(const std::vector<std::size_t>& s) {
  std::string out;
  for (std::size_t k : s) out += (out.empty() ? "" : ",") + std::to_string(k);
  return out;
}

std::string margin_text(std::int64_t m) { return m == kNoCompetitor ? "none" : std::to_string(m); }

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::UnknownSuite:
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::SyntaxError:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidMachine:
    case ErrorCode::UnknownSymbol:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::SpaceBoundViolated:
    case ErrorCode::VocabularyBudgetExceeded:
    case ErrorCode::StateBudgetExceeded:
    case ErrorCode::ScheduleExhausted:
      return kUsage;
    default:
      return kDivergence;
  }
}

struct Options {
  std::string machine;
  std::string input;
  std::string model;
  std::string advice;
  std::string output;
  std::string dir;
  std::string mode = "acceptor";
  std::string vocab_policy = "reachable";
  std::string format = "text";
  std::string schedule = "2,4,8,16,32";
  std::string itma_schedule;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t c = 0;
  std::uint64_t seed = 42;
  std::size_t length = 0;
  std::size_t streams = 10;
  std::size_t max_tokens = std::size_t{1} << 24;
  bool timing = false;
  bool trace = false;
};

std::optional<std::uint64_t> step_constant(const Options& o) {
  return o.c ? std::optional<std::uint64_t>(o.c) : std::nullopt;
}

std::vector<std::size_t> parse_schedule(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoul(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ConfigError, "schedule entry '" + part + "' is not a number");
    }
  }
  return out;
}

// With --seed and --length the stream is generated; otherwise it is read.
SymbolString stream_for(const MultiTapeTm& m, const Options& o) {
  if (o.input.empty()) {
    if (o.length == 0) throw Error(ErrorCode::ConfigError, "give a stream or --length");
    return seeded_stream(o.seed, o.length);
  }
  return load_stream(m.input_alphabet(), o.input);
}

TmCompileParams tm_params(const MultiTapeTm& m, const Options& o) {
  TmCompileParams p;
  p.input_length = o.n;
  p.space_bound = o.k;
  if (!o.advice.empty()) p.advice = load_advice(m, o.advice);
  if (o.mode == "function")
    p.mode = TmMode::Function;
  else if (o.mode != "acceptor")
    throw Error(ErrorCode::ConfigError, "mode must be 'acceptor' or 'function'");
  p.policy = parse_vocabulary_policy(o.vocab_policy);
  p.step_constant = step_constant(o);
  return p;
}

// ---------------------------------------------------------------------------

int cmd_run_fst(const Options& o) {
  const Dfst fst = load_fst(o.machine);
  const FstRunResult r = fst_run(fst, fst.input_alphabet().parse_string(o.input));
  std::cout << "verdict " << to_string(r.verdict) << "\noutput " << fst.output_alphabet().render(r.output)
            << "\nsteps " << r.steps_used << "\n";
  return kPass;
}

int cmd_run_tm(const Options& o) {
  const MultiTapeTm m = load_tm(o.machine);
  const SymbolString w = m.input_alphabet().parse_string(o.input);
  const TmRunResult r = m.uses_advice() ? tma_run(m, load_advice(m, o.advice), w, o.k, step_constant(o))
                                        : tm_run(m, w, o.k, step_constant(o));
  if (o.trace)
    for (const auto& c : r.trace) std::cout << config_word(m, c) << "\n";
  std::cout << "verdict " << to_string(r.verdict) << "\noutput " << m.work_alphabet().render(r.output) << "\nsteps "
            << r.steps_used << "\nspace " << r.space_used << "\nstep_bound "
            << step_bound(w.size(), o.k, o.c ? o.c : default_step_constant(m)) << "\n";
  return kPass;
}

int cmd_run_itma(const Options& o) {
  const MultiTapeTm m = load_tm(o.machine);
  const AdviceFunction advice = load_advice(m, o.advice);
  const SymbolString stream = stream_for(m, o);
  KSchedule schedule;
  if (!o.itma_schedule.empty()) schedule.bounds = parse_schedule(o.itma_schedule);
  const ItmaRunResult r = itma_run_stream(m, advice, stream, schedule, step_constant(o));
  std::cout << "chunks " << render_chunks(m.input_alphabet(), r.chunks()) << "\n";
  if (r.failure) {
    std::cout << "failure " << to_string(*r.failure) << " at epoch " << r.failed_epoch << "\n";
    return kDivergence;
  }
  return kPass;
}

int cmd_compile(const Options& o) {
  const Machine machine = load_machine(o.machine);
  CompiledModel cm = std::holds_alternative<Dfst>(machine)
                         ? compile_fst(std::get<Dfst>(machine), {o.n})
                         : compile_tm(std::get<MultiTapeTm>(machine), tm_params(std::get<MultiTapeTm>(machine), o));
  const std::string text = describe(cm.model);
  if (o.output.empty())
    std::cout << text;
  else
    write_text(o.output, text);
  const CompileReport& r = cm.report;
  std::cerr << "vocabulary " << r.vocabulary_size << ", machine words " << r.machine_words << ", successor rules "
            << r.successor_rules << ", dimension " << r.dimension << " (bound " << r.dimension_bound << "), window "
            << r.window << "\n";
  return kPass;
}

int cmd_verify(const Options& o) {
  const Machine machine = load_machine(o.machine);
  const FixedLlm model = parse_model_description(read_text(o.model));
  EquivalenceReport report;
  report.suite = "verify";
  EquivalenceResult r;
  const Alphabet* alphabet = nullptr;
  if (const Dfst* fst = std::get_if<Dfst>(&machine)) {
    report.tag = "T2";
    alphabet = &fst->input_alphabet();
    r = verify_equivalence(fst_oracle(*fst), model, all_strings_up_to(fst->input_alphabet().size(), 1, o.n));
  } else {
    const MultiTapeTm& m = std::get<MultiTapeTm>(machine);
    report.tag = m.uses_advice() ? "C4.1" : "T4";
    alphabet = &m.input_alphabet();
    r = verify_equivalence(tm_oracle(m, tm_params(m, o)), model, all_strings(m.input_alphabet().size(), o.n));
  }
  report.cases.push_back({o.machine, r.inputs_checked, r.tokens_generated, r.min_margin, {}});
  report.inputs_checked = r.inputs_checked;
  report.tokens_generated = r.tokens_generated;
  report.min_margin = r.min_margin;
  if (r.divergence)
    report.divergences.push_back(
        {o.machine, alphabet->render(r.divergence->input), r.divergence->step, r.divergence->expected,
         r.divergence->actual});
  std::cout << format_report(report, parse_report_format(o.format));
  return report.passed() ? kPass : kDivergence;
}

int cmd_extract(const Options& o) {
  const FixedLlm model = parse_model_description(read_text(o.model));
  const std::string text = serialize_machine(extract_fst(model, o.n));
  if (o.output.empty())
    std::cout << text;
  else
    write_text(o.output, text);
  return kPass;
}

void print_log(const Lineage& lineage) {
  for (std::size_t i = 0; i < lineage.members.size(); ++i)
    std::cout << "member " << i << " k " << lineage.members[i].space_bound << " vocabulary "
              << lineage.members[i].report.vocabulary_size << " root " << lineage.members[i].root << "\n";
  for (const auto& ev : lineage.log)
    std::cout << "switch " << to_string(ev.trigger) << " at " << ev.position << " k " << ev.old_k << " -> "
              << ev.new_k << " rho " << ev.rho << "\n";
}

LineageOptions lineage_options(const Options& o) {
  LineageOptions l;
  l.step_constant = step_constant(o);
  return l;
}

int cmd_lineage(const Options& o) {
  const MultiTapeTm m = load_tm(o.machine);
  const AdviceFunction advice = load_advice(m, o.advice);
  const SymbolString stream = stream_for(m, o);
  const LineageRunReport r = process_stream(m, advice, stream, parse_schedule(o.schedule), lineage_options(o));
  std::cout << "schedule " << render_schedule(r.lineage.schedule) << "\nchunks "
            << render_chunks(m.input_alphabet(), r.chunks) << "\n";
  print_log(r.lineage);
  std::cout << "tokens " << r.tokens_generated << "\nmin margin " << margin_text(r.min_margin) << "\n";
  if (!o.dir.empty()) write_bridge_advice(o.dir, harvest_advice(r.lineage));
  return kPass;
}

int cmd_bridge(const Options& o) {
  const BridgeAdvice advice = read_bridge_advice(o.dir);
  if (!advice.descriptions.count(0)) throw Error(ErrorCode::MissingAdvice, "no description for member 0");
  const Alphabet inputs(parse_model_description(advice.descriptions.at(0).bytes).parts().input_alphabet);
  const SymbolString stream = o.input.empty() ? seeded_stream(o.seed, o.length) : load_stream(inputs, o.input);
  const BridgeRunResult r = bridge_run(advice, stream, o.max_tokens);
  std::cout << "chunks " << render_chunks(inputs, r.chunks) << "\nloads";
  for (std::size_t p : r.load_positions) std::cout << ' ' << p;
  std::cout << "\ntokens " << r.tokens_generated << "\nmin margin " << margin_text(r.min_margin) << "\n";
  return kPass;
}

int cmd_roundtrip(const Options& o) {
  const MultiTapeTm m = load_tm(o.machine);
  const AdviceFunction advice = load_advice(m, o.advice);
  const SymbolString stream = stream_for(m, o);
  const RoundtripReport r = roundtrip_check(m, advice, stream, parse_schedule(o.schedule), lineage_options(o));
  EquivalenceReport report;
  report.suite = "roundtrip";
  report.tag = "T7";
  report.seed = o.seed;
  CaseResult c{o.machine, stream.size(), r.tokens_generated, r.min_margin, {}};
  std::vector<std::string> triggers;
  for (const auto& ev : r.log) triggers.push_back(std::string(to_string(ev.trigger)) + "@" + std::to_string(ev.position));
  std::string joined;
  for (const auto& t : triggers) joined += (joined.empty() ? "" : ",") + t;
  c.details = {{"reconstructions", std::to_string(r.log.size())},
               {"members", std::to_string(r.members)},
               {"triggers", joined},
               {"descriptions_roundtrip", r.descriptions_roundtrip ? "yes" : "no"}};
  report.cases.push_back(c);
  report.inputs_checked = stream.size();
  report.tokens_generated = r.tokens_generated;
  report.min_margin = r.min_margin;
  if (r.divergence_epoch)
    report.divergences.push_back({o.machine, m.input_alphabet().render(stream), *r.divergence_epoch,
                                  render_chunks(m.input_alphabet(), {r.oracle[*r.divergence_epoch - 1]}),
                                  r.divergence});
  if (!r.descriptions_roundtrip)
    report.divergences.push_back({o.machine, "", 0, "byte-identical descriptions", "differs"});
  std::cout << format_report(report, parse_report_format(o.format), o.timing);
  return report.passed() ? kPass : kDivergence;
}

int cmd_suite(const Options& o, const CLI::App& sub) {
  SuiteConfig cfg;
  cfg.seed = o.seed;
  if (sub.count("--n")) cfg.max_n = o.n;
  if (sub.count("--length")) cfg.stream_length = o.length;
  if (sub.count("--streams")) cfg.streams = o.streams;
  if (sub.count("--schedule")) cfg.schedule = parse_schedule(o.schedule);
  cfg.policy = parse_vocabulary_policy(o.vocab_policy);
  const ReportFormat format = parse_report_format(o.format);
  if (o.machine == "list") {
    for (const auto& name : suite_names()) std::cout << name << "\n";
    return kPass;
  }
  const EquivalenceReport r = run_suite(o.machine, cfg);
  std::cout << format_report(r, format, o.timing);
  return r.passed() ? kPass : kDivergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-LLM simulation of finite-state and Turing machines"};
  app.require_subcommand(1);
  Options o;

  auto machine_arg = [&](CLI::App* s) {
    s->add_option("machine", o.machine, "Machine spec file or corpus name")->required();
  };
  auto stream_args = [&](CLI::App* s) {
    s->add_option("stream", o.input, "Stream file or inline symbols (omit to generate one)");
    s->add_option("--seed", o.seed, "Seed for a generated stream");
    s->add_option("--length", o.length, "Length of a generated stream");
    s->add_option("--advice", o.advice, "Advice table file");
    s->add_option("--c", o.c, "Step constant");
  };
  auto format_arg = [&](CLI::App* s) {
    s->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json-lines"}));
    s->add_flag("--timing", o.timing, "Include elapsed time in the report");
  };

  auto* run_fst = app.add_subcommand("run-fst", "Run a transducer on one input");
  machine_arg(run_fst);
  run_fst->add_option("input", o.input, "Input string")->required();

  auto* run_tm = app.add_subcommand("run-tm", "Run a TM or TM/A on one input within k cells");
  machine_arg(run_tm);
  run_tm->add_option("input", o.input, "Input string")->required();
  run_tm->add_option("--k", o.k, "Space bound")->required();
  run_tm->add_option("--c", o.c, "Step constant");
  run_tm->add_option("--advice", o.advice, "Advice table file");
  run_tm->add_flag("--trace", o.trace, "Print every configuration word");

  auto* run_itma = app.add_subcommand("run-itma", "Run an interactive machine over a stream");
  machine_arg(run_itma);
  stream_args(run_itma);
  run_itma->add_option("--schedule", o.itma_schedule, "Space bound per epoch, last entry repeats (default unbounded)");

  auto* compile = app.add_subcommand("compile", "Compile a machine into a model description");
  machine_arg(compile);
  compile->add_option("--n", o.n, "Input length")->required();
  compile->add_option("--k", o.k, "Space bound (TMs)");
  compile->add_option("--c", o.c, "Step constant");
  compile->add_option("--advice", o.advice, "Advice table file");
  compile->add_option("--mode", o.mode, "acceptor or function");
  compile->add_option("--vocab-policy", o.vocab_policy, "reachable or exhaustive");
  compile->add_option("-o,--output", o.output, "Description file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check a model against its machine on every input of length n");
  machine_arg(verify);
  verify->add_option("model", o.model, "Model description file")->required();
  verify->add_option("--n", o.n, "Input length (transducers: 1..n)")->required();
  verify->add_option("--k", o.k, "Space bound (TMs)");
  verify->add_option("--c", o.c, "Step constant");
  verify->add_option("--advice", o.advice, "Advice table file");
  verify->add_option("--mode", o.mode, "acceptor or function");
  verify->add_option("--vocab-policy", o.vocab_policy, "reachable or exhaustive");
  format_arg(verify);

  auto* extract = app.add_subcommand("extract-fst", "Extract a transducer from a model description");
  extract->add_option("model", o.model, "Model description file")->required();
  extract->add_option("--n", o.n, "Longest input")->required();
  extract->add_option("-o,--output", o.output, "Machine spec file (default stdout)");

  auto* lineage = app.add_subcommand("lineage-run", "Run a stream through a lineage of members");
  machine_arg(lineage);
  stream_args(lineage);
  lineage->add_option("--schedule", o.schedule, "Comma-separated space bounds");
  lineage->add_option("--write-advice", o.dir, "Write the harvested descriptions to this directory");

  auto* bridge = app.add_subcommand("bridge-run", "Interpret harvested descriptions on a stream");
  bridge->add_option("advice-dir", o.dir, "Directory written by lineage-run --write-advice")->required();
  bridge->add_option("stream", o.input, "Stream file or inline symbols");
  bridge->add_option("--seed", o.seed, "Seed for a generated stream");
  bridge->add_option("--length", o.length, "Length of a generated stream");
  bridge->add_option("--max-tokens", o.max_tokens, "Token budget per epoch");

  auto* roundtrip = app.add_subcommand("roundtrip", "Compare direct run, lineage and interpreter");
  machine_arg(roundtrip);
  stream_args(roundtrip);
  roundtrip->add_option("--schedule", o.schedule, "Comma-separated space bounds");
  format_arg(roundtrip);

  auto* suite = app.add_subcommand("suite", "Run a named equivalence suite ('list' to show them)");
  suite->add_option("name", o.machine, "Suite name")->required();
  suite->add_option("--seed", o.seed, "Seed for generated streams");
  suite->add_option("--n", o.n, "Longest input");
  suite->add_option("--length", o.length, "Stream length");
  suite->add_option("--streams", o.streams, "Streams in the round-trip suite");
  suite->add_option("--schedule", o.schedule, "Comma-separated space bounds");
  suite->add_option("--vocab-policy", o.vocab_policy, "reachable or exhaustive");
  format_arg(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_fst) return cmd_run_fst(o);
    if (*run_tm) return cmd_run_tm(o);
    if (*run_itma) return cmd_run_itma(o);
    if (*compile) return cmd_compile(o);
    if (*verify) return cmd_verify(o);
    if (*extract) return cmd_extract(o);
    if (*lineage) return cmd_lineage(o);
    if (*bridge) return cmd_bridge(o);
    if (*roundtrip) return cmd_roundtrip(o);
    if (*suite) return cmd_suite(o, *suite);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kUsage;
}
