#include "llmsim/llm.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "llmsim/error.hpp"

namespace llmsim {

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Prompt: return "prompt";
    case TokenKind::Word: return "word";
    case TokenKind::Begin: return "begin";
    case TokenKind::Halt: return "halt";
    case TokenKind::Grow: return "grow";
  }
  return "?";
}

std::string_view to_string(TokenVerdict v) {
  switch (v) {
    case TokenVerdict::None: return "-";
    case TokenVerdict::Accept: return "accept";
    case TokenVerdict::Reject: return "reject";
  }
  return "?";
}

std::string_view to_string(ModelMode m) {
  switch (m) {
    case ModelMode::Transducer: return "transducer";
    case ModelMode::Acceptor: return "acceptor";
    case ModelMode::Function: return "function";
    case ModelMode::Stream: return "stream";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.entries_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), 1});
  return m;
}

void SparseMatrix::set(std::size_t row, std::size_t col, std::int64_t value) {
  if (row >= rows_ || col >= cols_) throw Error(ErrorCode::ConfigError, "matrix index out of range");
  const Entry probe{static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col), 0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, [](const Entry& a, const Entry& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  const bool present = it != entries_.end() && it->row == probe.row && it->col == probe.col;
  if (value == 0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->value = value;
  } else {
    entries_.insert(it, Entry{probe.row, probe.col, value});
  }
}

std::int64_t SparseMatrix::at(std::size_t row, std::size_t col) const {
  for (const auto& e : entries_)
    if (e.row == row && e.col == col) return e.value;
  return 0;
}

IntVector SparseMatrix::apply(const IntVector& x) const {
  if (x.size() != cols_) throw Error(ErrorCode::ConfigError, "matrix/vector shape mismatch");
  IntVector y(rows_, 0);
  for (const auto& e : entries_) y[e.row] += e.value * x[e.col];
  return y;
}

// ---------------------------------------------------------------------------
// Positions

IntVector positional_code(std::size_t offset, std::size_t bits) {
  IntVector code(bits);
  for (std::size_t s = 0; s < bits; ++s) code[s] = ((offset >> s) & 1U) ? 1 : -1;
  return code;
}

std::size_t posbits_for_window(std::size_t window) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < window + 2) ++bits;
  return bits;
}

// ---------------------------------------------------------------------------
// FixedLlm

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConfigError, "malformed model: " + what);
}

IntVector with_position(const IntVector& e, std::size_t offset, std::size_t bits) {
  IntVector x = e;
  const IntVector p = positional_code(offset, bits);
  x.insert(x.end(), p.begin(), p.end());
  return x;
}

std::int64_t dot(const IntVector& a, const IntVector& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

FixedLlm::FixedLlm(ModelParts parts) : parts_(std::move(parts)) {
  const auto& p = parts_;
  const std::size_t d = p.embeddings.dimension;
  require(p.window >= 1, "window must be positive");
  require(p.posbits >= 1 && p.posbits < 32 && (std::size_t{1} << p.posbits) >= p.window, "posbits too small for window");
  require(!p.tokens.empty(), "empty vocabulary");
  require(p.embeddings.vectors.size() == p.tokens.size(), "one embedding per token");
  for (const auto& v : p.embeddings.vectors) require(v.size() == d, "embedding dimension");
  const auto& a = p.attention;
  require(a.query.cols() == d + p.posbits && a.key.cols() == d + p.posbits && a.value.cols() == d + p.posbits,
          "attention input width");
  require(a.query.rows() == a.key.rows(), "query/key score width");
  require(a.residual.cols() == d, "residual input width");
  for (const auto& [key, next] : p.successor) {
    require(key.size() == a.residual.rows() + a.value.rows(), "successor key width");
    require(next < p.tokens.size(), "successor target");
  }
  require(std::is_sorted(p.stop_tokens.begin(), p.stop_tokens.end()) &&
              std::adjacent_find(p.stop_tokens.begin(), p.stop_tokens.end()) == p.stop_tokens.end(),
          "stop tokens sorted and unique");
  for (TokenId t : p.stop_tokens) require(t < p.tokens.size(), "stop token id");
  require(p.fixpoint < p.tokens.size(), "fixpoint id");
  for (TokenId id = 0; id < p.tokens.size(); ++id)
    require(index_.emplace(p.tokens[id].word, id).second, "duplicate word " + p.tokens[id].word);
}

const Token& FixedLlm::token(TokenId id) const {
  if (id >= parts_.tokens.size()) throw Error(ErrorCode::UnknownToken, "token id " + std::to_string(id));
  return parts_.tokens[id];
}

std::optional<TokenId> FixedLlm::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId FixedLlm::id(std::string_view word) const {
  auto t = find(word);
  if (!t) throw Error(ErrorCode::UnknownToken, "word '" + std::string(word) + "' not in vocabulary");
  return *t;
}

const IntVector& FixedLlm::embed(TokenId id) const {
  if (id >= parts_.tokens.size()) throw Error(ErrorCode::UnknownToken, "token id " + std::to_string(id));
  return parts_.embeddings.vectors[id];
}

bool FixedLlm::is_stop(TokenId id) const {
  return std::binary_search(parts_.stop_tokens.begin(), parts_.stop_tokens.end(), id);
}

NextToken FixedLlm::next_token(const std::vector<TokenId>& context) const {
  if (context.empty()) throw Error(ErrorCode::PreconditionViolated, "empty context");
  for (TokenId t : context) embed(t);
  const std::size_t n = context.size();
  if (is_stop(context.back())) return {parts_.fixpoint, {0, kNoCompetitor, n - 1}};

  const std::size_t start = n > parts_.window ? n - parts_.window : 0;
  const auto& att = parts_.attention;
  const IntVector& current = embed(context.back());
  const IntVector query = att.query.apply(with_position(current, n - 1 - start, parts_.posbits));

  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  std::int64_t second = std::numeric_limits<std::int64_t>::min();
  std::size_t best_at = start;
  IntVector best_x;
  for (std::size_t i = start; i < n; ++i) {
    IntVector x = with_position(embed(context[i]), i - start, parts_.posbits);
    const std::int64_t s = dot(query, att.key.apply(x));
    if (s > best) {
      second = best;
      best = s;
      best_at = i;
      best_x = std::move(x);
    } else if (s > second) {
      second = s;
    }
  }
  const std::int64_t margin = n - start == 1 ? kNoCompetitor : best - second;
  if (margin < 1)
    throw Error(ErrorCode::AmbiguousArgmax,
                "tie in attention after '" + parts_.tokens[context.back()].word + "' (score " + std::to_string(best) + ")");

  IntVector key = att.residual.apply(current);
  const IntVector selected = att.value.apply(best_x);
  key.insert(key.end(), selected.begin(), selected.end());
  auto it = parts_.successor.find(key);
  if (it == parts_.successor.end())
    throw Error(ErrorCode::MissingRule, "no successor for '" + parts_.tokens[context.back()].word + "' attending '" +
                                            parts_.tokens[context[best_at]].word + "'");
  return {it->second, {best, margin, best_at}};
}

// ---------------------------------------------------------------------------
// Generation and decoding

GenerationTrace continue_generation(const FixedLlm& model, const std::vector<TokenId>& context,
                                    std::size_t max_tokens) {
  if (max_tokens < 1) throw Error(ErrorCode::PreconditionViolated, "max_tokens must be at least 1");
  GenerationTrace trace;
  trace.prompt = context;
  std::vector<TokenId> window = context;
  for (std::size_t i = 0; i < max_tokens; ++i) {
    const NextToken next = model.next_token(window);
    trace.generated.push_back(next.token);
    trace.scores.push_back(next.score);
    window.push_back(next.token);
    if (window.size() > model.window()) window.erase(window.begin());
    if (model.is_stop(next.token)) {
      trace.stopped = true;
      break;
    }
  }
  return trace;
}

GenerationTrace generate(const FixedLlm& model, const std::vector<TokenId>& prompt, std::size_t max_tokens) {
  if (prompt.size() > model.window())
    throw Error(ErrorCode::PromptTooLong, std::to_string(prompt.size()) + " tokens exceed window " +
                                              std::to_string(model.window()));
  return continue_generation(model, prompt, max_tokens);
}

std::string to_string(const Answer& a, const std::vector<std::string>& output_alphabet) {
  switch (a.kind) {
    case Answer::Kind::Accept: return "accept";
    case Answer::Kind::Reject: return "reject";
    case Answer::Kind::Truncated: return "truncated";
    case Answer::Kind::Output: break;
  }
  std::string out = "output ";
  for (SymbolId s : a.output) out += s < output_alphabet.size() ? output_alphabet[s] : "?";
  return out;
}

Answer decode_answer(const FixedLlm& model, const GenerationTrace& trace) {
  if (!trace.stopped || trace.generated.empty()) return {};
  const Token& last = model.token(trace.generated.back());
  switch (model.mode()) {
    case ModelMode::Transducer:
    case ModelMode::Stream: {
      Answer a{Answer::Kind::Output, {}};
      for (TokenId t : trace.generated) {
        const auto& e = model.token(t).emit;
        a.output.insert(a.output.end(), e.begin(), e.end());
      }
      return a;
    }
    case ModelMode::Acceptor:
      if (last.verdict == TokenVerdict::Accept) return {Answer::Kind::Accept, {}};
      if (last.verdict == TokenVerdict::Reject) return {Answer::Kind::Reject, {}};
      return {};
    case ModelMode::Function:
      if (last.verdict == TokenVerdict::Accept) return {Answer::Kind::Output, last.output};
      if (last.verdict == TokenVerdict::Reject) return {Answer::Kind::Reject, {}};
      return {};
  }
  return {};
}

std::vector<TokenId> input_prompt(const FixedLlm& model, const SymbolString& input) {
  const auto& names = model.parts().input_alphabet;
  std::vector<TokenId> prompt{model.id(kLeftEndName)};
  for (SymbolId s : input) {
    if (s >= names.size()) throw Error(ErrorCode::UnknownSymbol, "input symbol id " + std::to_string(s));
    prompt.push_back(model.id(names[s]));
  }
  prompt.push_back(model.id(kRightEndName));
  prompt.push_back(model.id(kBeginWord));
  return prompt;
}

std::vector<std::string> words_of(const FixedLlm& model, const std::vector<TokenId>& tokens) {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (TokenId t : tokens) words.push_back(model.token(t).word);
  return words;
}

std::vector<std::vector<TokenId>> reachable_states(const FixedLlm& model,
                                                   const std::vector<std::vector<TokenId>>& prompts,
                                                   std::size_t max_states, std::size_t max_tokens) {
  std::set<std::vector<TokenId>> seen;
  auto visit = [&](const std::vector<TokenId>& context) {
    const std::size_t start = context.size() > model.window() ? context.size() - model.window() : 0;
    seen.emplace(context.begin() + static_cast<std::ptrdiff_t>(start), context.end());
    if (seen.size() > max_states)
      throw Error(ErrorCode::StateBudgetExceeded, "more than " + std::to_string(max_states) + " decoder states");
  };
  for (const auto& prompt : prompts) {
    std::vector<TokenId> context = prompt;
    visit(context);
    for (std::size_t i = 0; i < max_tokens && !model.is_stop(context.back()); ++i) {
      context.push_back(model.next_token(context).token);
      visit(context);
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace llmsim
