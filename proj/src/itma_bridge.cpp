#include "llmsim/itma_bridge.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "llmsim/error.hpp"

namespace llmsim {

namespace {

constexpr std::string_view kManifestMagic = "llmsim-bridge v1";

std::string member_file(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "member-%04zu.model", index);
  return name;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + p.string());
  out << text;
}

void run_into(const BridgeAdvice& advice, const SymbolString& stream, std::size_t max_epoch_tokens,
              BridgeRunResult& out) {
  std::size_t member = 0;
  std::optional<FixedLlm> model;
  auto load = [&](std::size_t index, std::size_t position) {
    auto it = advice.descriptions.find(index);
    if (it == advice.descriptions.end())
      throw Error(ErrorCode::MissingAdvice, "no description for member " + std::to_string(index) +
                                                " at stream position " + std::to_string(position));
    model.emplace(parse_model_description(it->second.bytes));
    if (model->mode() != ModelMode::Stream)
      throw Error(ErrorCode::ParseError, "member " + std::to_string(index) + " is not a stream model");
    member = index;
    out.load_positions.push_back(position);
  };

  load(0, 0);
  std::vector<TokenId> context{model->id(advice.start_word)};
  bool halted = false;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::size_t epoch = i + 1;
    out.chunks.emplace_back();
    out.epoch_words.emplace_back();
    if (halted) continue;
    if (advice.boundary_switches.count(epoch)) {
      const std::string rho = model->token(context.back()).word;
      load(member + 1, epoch);
      context = {model->id(rho)};
    }
    const auto& names = model->parts().input_alphabet;
    if (stream[i] >= names.size())
      throw Error(ErrorCode::UnknownSymbol, "stream symbol id " + std::to_string(stream[i]));
    context.push_back(model->id(names[stream[i]]));

    std::size_t steps = 0;
    while (true) {
      const NextToken nt = model->next_token(context);
      ++out.tokens_generated;
      out.min_margin = std::min(out.min_margin, nt.score.margin);
      const Token& t = model->token(nt.token);
      if (t.kind == TokenKind::Grow) {
        const std::string rho = model->token(context.back()).word;
        load(member + 1, epoch);
        context = {model->id(rho)};
        continue;
      }
      out.epoch_words.back().push_back(t.word);
      out.chunks.back().insert(out.chunks.back().end(), t.emit.begin(), t.emit.end());
      context.push_back(nt.token);
      if (context.size() > model->window()) context.erase(context.begin());
      if (t.verdict != TokenVerdict::None) {
        halted = true;
        break;
      }
      if (model->is_stop(nt.token)) break;
      if (++steps > max_epoch_tokens)
        throw Error(ErrorCode::Diverges, "epoch " + std::to_string(epoch) + " exceeds " +
                                             std::to_string(max_epoch_tokens) + " tokens");
    }
  }
}

}  // namespace

std::string ModelDescription::version() const { return bytes.substr(0, bytes.find('\n')); }

ModelDescription describe_model(const FixedLlm& model) { return ModelDescription{describe(model)}; }

BridgeAdvice harvest_advice(const Lineage& lineage) {
  BridgeAdvice a;
  if (lineage.members.empty()) throw Error(ErrorCode::PreconditionViolated, "lineage has no members");
  a.start_word = lineage.members.front().root;
  for (std::size_t i = 0; i < lineage.members.size(); ++i) a.descriptions[i] = describe_model(lineage.members[i].model);
  for (const auto& ev : lineage.log)
    if (ev.trigger != Trigger::SpaceExceeded) a.boundary_switches.insert(ev.position);
  return a;
}

void write_bridge_advice(const std::filesystem::path& dir, const BridgeAdvice& advice) {
  std::filesystem::create_directories(dir);
  std::ostringstream m;
  m << kManifestMagic << "\nstart " << advice.start_word << "\n";
  for (const auto& [index, d] : advice.descriptions) {
    m << "member " << index << ' ' << member_file(index) << "\n";
    write_file(dir / member_file(index), d.bytes);
  }
  for (std::size_t p : advice.boundary_switches) m << "switch " << p << "\n";
  write_file(dir / "manifest.txt", m.str());
}

BridgeAdvice read_bridge_advice(const std::filesystem::path& dir) {
  std::istringstream in(read_file(dir / "manifest.txt"));
  std::string line;
  if (!std::getline(in, line) || line != kManifestMagic)
    throw Error(ErrorCode::ParseError, "manifest.txt: expected '" + std::string(kManifestMagic) + "'");
  BridgeAdvice a;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream f(line);
    std::string key;
    f >> key;
    auto fail = [&] { throw Error(ErrorCode::ParseError, "manifest.txt line " + std::to_string(line_no)); };
    if (key == "start") {
      if (!(f >> a.start_word)) fail();
    } else if (key == "member") {
      std::size_t index = 0;
      std::string file;
      if (!(f >> index >> file)) fail();
      if (std::filesystem::exists(dir / file)) a.descriptions[index] = ModelDescription{read_file(dir / file)};
    } else if (key == "switch") {
      std::size_t p = 0;
      if (!(f >> p)) fail();
      a.boundary_switches.insert(p);
    } else if (!key.empty()) {
      fail();
    }
  }
  if (a.start_word.empty()) throw Error(ErrorCode::ParseError, "manifest.txt: no start line");
  return a;
}

BridgeRunResult bridge_run(const BridgeAdvice& advice, const SymbolString& stream, std::size_t max_epoch_tokens) {
  BridgeRunResult out;
  run_into(advice, stream, max_epoch_tokens, out);
  return out;
}

RoundtripReport roundtrip_check(const MultiTapeTm& machine, const AdviceFunction& advice, const SymbolString& stream,
                                const std::vector<std::size_t>& schedule, const LineageOptions& options,
                                const std::function<void(BridgeAdvice&)>& tamper) {
  RoundtripReport r;
  const ItmaRunResult direct = itma_run_stream(machine, advice, stream, KSchedule::unbounded(), options.step_constant);
  if (direct.failure)
    throw Error(ErrorCode::PreconditionViolated, "direct run fails at epoch " + std::to_string(direct.failed_epoch));
  r.oracle = direct.chunks();

  const LineageRunReport lin = process_stream(machine, advice, stream, schedule, options);
  r.lineage = lin.chunks;
  r.log = lin.lineage.log;
  r.members = lin.lineage.members.size();

  BridgeAdvice harvested = harvest_advice(lin.lineage);
  r.descriptions_roundtrip = true;
  for (const auto& [index, d] : harvested.descriptions)
    r.descriptions_roundtrip = r.descriptions_roundtrip && describe(parse_model_description(d.bytes)) == d.bytes;
  if (tamper) tamper(harvested);

  BridgeRunResult bridged;
  std::optional<std::string> error;
  try {
    run_into(harvested, stream, std::size_t{1} << 24, bridged);
  } catch (const Error& e) {
    error = e.what();
  }
  r.bridge = bridged.chunks;
  r.tokens_generated = lin.tokens_generated + bridged.tokens_generated;
  r.min_margin = std::min(lin.min_margin, bridged.min_margin);

  for (std::size_t e = 0; e < stream.size(); ++e) {
    const bool have_bridge = e < r.bridge.size() && !(error && e + 1 == r.bridge.size());
    if (!have_bridge) {
      r.divergence_epoch = e + 1;
      r.divergence = error ? "interpreter: " + *error : "interpreter stopped early";
      break;
    }
    if (r.oracle[e] != r.lineage[e]) {
      r.divergence_epoch = e + 1;
      r.divergence = "lineage chunk differs from the direct run";
      break;
    }
    if (r.lineage[e] != r.bridge[e] || lin.epoch_words[e] != bridged.epoch_words[e]) {
      r.divergence_epoch = e + 1;
      r.divergence = "interpreter differs from the lineage";
      break;
    }
  }
  return r;
}

}  // namespace llmsim
