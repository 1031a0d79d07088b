#include <algorithm>
#include <random>

#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/harness.hpp"

namespace llmsim {

namespace {

const Alphabet& binary() {
  static const Alphabet a({"0", "1"});
  return a;
}

std::size_t ones(const SymbolString& w) { return static_cast<std::size_t>(std::count(w.begin(), w.end(), 1)); }

SymbolString binary_value(std::uint64_t v, std::size_t width) {
  SymbolString out;
  while (v > 0) {
    out.insert(out.begin(), static_cast<SymbolId>(v & 1U));
    v >>= 1;
  }
  while (out.size() < width) out.insert(out.begin(), 0);
  return out;
}

}  // namespace

SymbolString expected_fst_output(const std::string& machine, const SymbolString& w) {
  if (machine == "identity-fst") return w;
  if (machine == "reverse-fst") return SymbolString(w.rbegin(), w.rend());
  if (machine == "running-parity-fst") {
    SymbolString out;
    std::size_t seen = 0;
    for (SymbolId s : w) {
      out.push_back(seen % 2 == 0 ? 1 : 0);
      seen += s;
    }
    return out;
  }
  throw Error(ErrorCode::ConfigError, "no output oracle for '" + machine + "'");
}

Answer expected_tm_answer(const std::string& machine, const SymbolString& w) {
  auto verdict = [](bool yes) { return Answer{yes ? Answer::Kind::Accept : Answer::Kind::Reject, {}}; };
  if (machine == "parity-tm") return verdict(ones(w) % 2 == 0);
  if (machine == "palindrome-tm") return verdict(std::equal(w.begin(), w.end(), w.rbegin()));
  if (machine == "length-parity-tma") return verdict(w.size() % 2 == 0);
  if (machine == "increment-tm") {
    std::uint64_t v = 0;
    for (SymbolId s : w) v = 2 * v + s;
    return Answer{Answer::Kind::Output, binary_value(v + 1, w.size())};
  }
  throw Error(ErrorCode::ConfigError, "no answer oracle for '" + machine + "'");
}

std::vector<SymbolString> expected_stream_chunks(const std::string& machine, const AdviceFunction& advice,
                                                 const SymbolString& stream) {
  std::vector<SymbolString> out;
  SymbolId running = 0;
  std::size_t count = 0;
  SymbolString tape;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const SymbolId x = stream[i];
    if (machine == "echo-itm" || machine == "unary-counter-itm" || machine == "advice-unary-counter-itma") {
      out.push_back({x});
    } else if (machine == "xor-itm") {
      running ^= x;
      out.push_back({running});
    } else if (machine == "binary-counter-itm") {
      count += x;
      out.push_back({static_cast<SymbolId>(count & 1U)});
    } else if (machine == "advice-xor-itma") {
      const SymbolString& more = advice.at(i + 1);
      tape.insert(tape.end(), more.begin(), more.end());
      out.push_back({static_cast<SymbolId>(x ^ (tape.empty() ? 0 : tape.back()))});
    } else {
      throw Error(ErrorCode::ConfigError, "no stream oracle for '" + machine + "'");
    }
  }
  return out;
}

SymbolString seeded_stream(std::uint64_t seed, std::size_t length, unsigned ones_per_ten) {
  std::mt19937_64 rng(seed);
  SymbolString s;
  s.reserve(length);
  for (std::size_t i = 0; i < length; ++i) s.push_back(rng() % 10 < ones_per_ten ? 1 : 0);
  return s;
}

AdviceFunction counter_advice(std::size_t max_length, std::size_t change_at) {
  AdviceFunction f = corpus::empty_advice(max_length);
  f.set(1, {0});
  if (change_at <= max_length) f.set(change_at, {1});
  return f;
}

std::optional<std::string> corpus_self_test(const std::string& name, std::size_t max_n) {
  const corpus::MachineCorpusEntry& e = corpus::entry(name);
  const Machine machine = parse_machine_spec(e.spec);
  if (const Dfst* fst = std::get_if<Dfst>(&machine)) {
    for (const auto& w : all_strings_up_to(2, 0, max_n)) {
      const auto run = fst_run(*fst, w);
      if (run.verdict != Verdict::Accept || run.output != expected_fst_output(name, w))
        return name + ": wrong output on '" + binary().render(w) + "'";
    }
    return std::nullopt;
  }
  const MultiTapeTm& m = std::get<MultiTapeTm>(machine);
  if (!m.interactive()) {
    const AdviceFunction advice = m.uses_advice() ? corpus::length_parity_advice(max_n) : AdviceFunction{};
    for (const auto& w : all_strings_up_to(2, 0, max_n)) {
      const TmRunResult run = m.uses_advice() ? tma_run(m, advice, w, max_n + 2) : tm_run(m, w, max_n + 2);
      Answer got;
      if (run.verdict == Verdict::Reject) got = {Answer::Kind::Reject, {}};
      if (run.verdict == Verdict::Accept)
        got = name == "increment-tm"
                  ? Answer{Answer::Kind::Output, binary().parse_string(m.work_alphabet().render(run.output))}
                  : Answer{Answer::Kind::Accept, {}};
      if (got != expected_tm_answer(name, w)) return name + ": wrong answer on '" + binary().render(w) + "'";
    }
    return std::nullopt;
  }
  const std::size_t length = 64;
  AdviceFunction advice;
  if (name == "advice-xor-itma") advice = corpus::advice_xor_advice(length, 5);
  if (name == "advice-unary-counter-itma") advice = counter_advice(length, 3);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SymbolString stream = seeded_stream(seed, length);
    const ItmaRunResult run = itma_run_stream(m, advice, stream, KSchedule::unbounded());
    if (run.failure) return name + ": stream run fails at epoch " + std::to_string(run.failed_epoch);
    if (run.chunks() != expected_stream_chunks(name, advice, stream))
      return name + ": wrong chunks on stream seed " + std::to_string(seed);
  }
  return std::nullopt;
}

std::optional<std::string> check_lineage(const MultiTapeTm& m, const AdviceFunction& advice,
                                         const SymbolString& stream, const ItmaRunResult& direct,
                                         const LineageRunReport& r) {
  if (r.chunks != direct.chunks()) {
    for (std::size_t e = 0; e < stream.size(); ++e)
      if (e >= r.chunks.size() || r.chunks[e] != direct.chunks()[e])
        return "chunk differs at epoch " + std::to_string(e + 1);
  }
  std::vector<std::string> flat{config_word(m, initial_config(m))};
  std::vector<std::size_t> epoch_of{0};
  for (std::size_t e = 0; e < direct.epoch_traces.size(); ++e) {
    std::vector<std::string> words;
    for (const auto& c : direct.epoch_traces[e]) words.push_back(config_word(m, c));
    if (e >= r.epoch_words.size() || r.epoch_words[e] != words)
      return "configuration sentence differs at epoch " + std::to_string(e + 1);
    for (auto& w : words) {
      flat.push_back(std::move(w));
      epoch_of.push_back(e + 1);
    }
  }
  std::size_t from = 0;
  std::size_t prev_new_k = r.lineage.schedule.front();
  for (const auto& ev : r.lineage.log) {
    if (ev.old_k >= ev.new_k || ev.old_k != prev_new_k) return "schedule not consumed in order at " + ev.rho;
    prev_new_k = ev.new_k;
    std::optional<std::size_t> at;
    for (std::size_t i = from; i + 1 < flat.size(); ++i)
      if (epoch_of[i + 1] == ev.position && flat[i] == ev.rho && flat[i + 1] == ev.first_word) {
        at = i;
        break;
      }
    if (!at) return "seam broken at position " + std::to_string(ev.position);
    from = *at + 1;
    const bool space_trigger = space(parse_config_word(m, flat[*at + 1])) > ev.old_k ||
                               (ev.trigger == Trigger::Both && *at + 2 < flat.size() &&
                                space(parse_config_word(m, flat[*at + 2])) > ev.old_k);
    const bool advice_trigger = m.uses_advice() && ev.position >= 2 && !advice.at(ev.position).empty();
    const bool ok = ev.trigger == Trigger::SpaceExceeded   ? space_trigger
                    : ev.trigger == Trigger::AdviceChanged ? advice_trigger
                                                           : space_trigger && advice_trigger;
    if (!ok) return std::string(to_string(ev.trigger)) + " without its condition at " + std::to_string(ev.position);
  }
  return std::nullopt;
}

}  // namespace llmsim
