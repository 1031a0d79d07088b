#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmsim/run_result.hpp"
#include "llmsim/symbols.hpp"

namespace llmsim {

using TokenId = std::uint32_t;
using IntVector = std::vector<std::int64_t>;

/// Order matters: it is the layout of the kind block every compiler places at
/// the start of an embedding.
enum class TokenKind { Prompt, Word, Begin, Halt, Grow };
inline constexpr std::size_t kTokenKindCount = 5;

enum class TokenVerdict { None, Accept, Reject };

/// How generated sentences are decoded.
enum class ModelMode { Transducer, Acceptor, Function, Stream };

std::string_view to_string(TokenKind k);
std::string_view to_string(TokenVerdict v);
std::string_view to_string(ModelMode m);

/// Reserved control words. '<' never occurs in a symbol name, so these cannot
/// collide with prompt symbols, rule words or configuration words.
inline constexpr std::string_view kBeginWord = "<BEGIN>";
inline constexpr std::string_view kHaltWord = "<HALT>";
inline constexpr std::string_view kGrowWord = "<GROW>";

struct Token {
  std::string word;
  TokenKind kind = TokenKind::Word;
  TokenVerdict verdict = TokenVerdict::None;
  SymbolString emit;    // output-alphabet symbols contributed by this word
  SymbolString output;  // function value carried by a final configuration

  friend bool operator==(const Token&, const Token&) = default;
};

/// Sparse matrix with exact integer coefficients. Entries are kept sorted by
/// (row, col) with no zeros, so equal maps compare and serialize identically.
class SparseMatrix {
 public:
  struct Entry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::int64_t value = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void set(std::size_t row, std::size_t col, std::int64_t value);
  std::int64_t at(std::size_t row, std::size_t col) const;
  IntVector apply(const IntVector& x) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Entry> entries_;
};

/// score(i, j) = query(x_j) . key(x_i) where x = [embedding ; positional code]
/// and j is the current (last) position. The successor rule is keyed on
/// [residual(e_j) ; value(x_argmax)].
struct AttentionSpec {
  SparseMatrix query;
  SparseMatrix key;
  SparseMatrix value;
  SparseMatrix residual;

  friend bool operator==(const AttentionSpec&, const AttentionSpec&) = default;
};

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::vector<IntVector> vectors;  // indexed by token id

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

/// Everything a fixed model consists of. Compilers fill one in; FixedLlm
/// validates and freezes it.
struct ModelParts {
  ModelMode mode = ModelMode::Acceptor;
  std::size_t window = 1;
  std::size_t posbits = 1;
  std::vector<std::string> input_alphabet;   // prompt symbols, in id order
  std::vector<std::string> output_alphabet;  // names for emit/output ids
  std::vector<Token> tokens;
  EmbeddingTable embeddings;
  AttentionSpec attention;
  std::map<IntVector, TokenId> successor;
  std::vector<TokenId> stop_tokens;  // sorted
  TokenId fixpoint = 0;

  friend bool operator==(const ModelParts&, const ModelParts&) = default;
};

/// Positional code for an offset inside the window: `bits` entries of +1/-1,
/// least significant bit first.
IntVector positional_code(std::size_t offset, std::size_t bits);

/// Bits needed for window positions: ceil(log2(W + 2)).
std::size_t posbits_for_window(std::size_t window);

struct StepScore {
  std::int64_t best = 0;
  std::int64_t margin = 0;  // kNoCompetitor when the window held one token
  std::size_t attended = 0; // context index of the selected position

  friend bool operator==(const StepScore&, const StepScore&) = default;
};

inline constexpr std::int64_t kNoCompetitor = std::numeric_limits<std::int64_t>::max();

struct NextToken {
  TokenId token = 0;
  StepScore score;
};

/// Immutable, deterministic next-token predictor. The only state between steps
/// is the context the caller passes in.
class FixedLlm {
 public:
  explicit FixedLlm(ModelParts parts);  // throws ConfigError on malformed parts

  const ModelParts& parts() const { return parts_; }
  ModelMode mode() const { return parts_.mode; }
  std::size_t window() const { return parts_.window; }
  std::size_t dimension() const { return parts_.embeddings.dimension; }
  std::size_t vocabulary_size() const { return parts_.tokens.size(); }

  const Token& token(TokenId id) const;  // UnknownToken
  std::optional<TokenId> find(std::string_view word) const;
  TokenId id(std::string_view word) const;  // UnknownToken
  const IntVector& embed(TokenId id) const;  // UnknownToken
  bool is_stop(TokenId id) const;

  /// One decoding step over the last min(W, |context|) tokens. Throws
  /// AmbiguousArgmax (margin < 1), MissingRule (no successor entry) or
  /// UnknownToken. A context ending in a stop token maps to the fixpoint.
  NextToken next_token(const std::vector<TokenId>& context) const;

  friend bool operator==(const FixedLlm& a, const FixedLlm& b) { return a.parts_ == b.parts_; }

 private:
  ModelParts parts_;
  std::map<std::string, TokenId, std::less<>> index_;
};

struct GenerationTrace {
  std::vector<TokenId> prompt;
  std::vector<TokenId> generated;
  std::vector<StepScore> scores;  // one per generated token
  bool stopped = false;           // false: cut by max_tokens

  friend bool operator==(const GenerationTrace&, const GenerationTrace&) = default;
};

GenerationTrace generate(const FixedLlm& model, const std::vector<TokenId>& prompt, std::size_t max_tokens);

/// Generation continued from an existing context (prompt may exceed W; only the
/// window is consulted).
GenerationTrace continue_generation(const FixedLlm& model, const std::vector<TokenId>& context,
                                    std::size_t max_tokens);

struct Answer {
  enum class Kind { Accept, Reject, Output, Truncated };
  Kind kind = Kind::Truncated;
  SymbolString output;

  friend bool operator==(const Answer&, const Answer&) = default;
};

std::string to_string(const Answer& a, const std::vector<std::string>& output_alphabet);

Answer decode_answer(const FixedLlm& model, const GenerationTrace& trace);

/// Prompt `< w > <BEGIN>` for transducer, acceptor and function models.
std::vector<TokenId> input_prompt(const FixedLlm& model, const SymbolString& input);

std::vector<std::string> words_of(const FixedLlm& model, const std::vector<TokenId>& tokens);

/// Decoder states are window contents. Starting from each prompt, follows the
/// deterministic generation until a stop token (or max_tokens) and collects
/// every distinct window. StateBudgetExceeded past `max_states`.
std::vector<std::vector<TokenId>> reachable_states(const FixedLlm& model,
                                                   const std::vector<std::vector<TokenId>>& prompts,
                                                   std::size_t max_states, std::size_t max_tokens);

/// Canonical line-based description (`llmsim-model v1`).
std::string describe(const FixedLlm& model);
FixedLlm parse_model_description(std::string_view text);  // ParseError

}  // namespace llmsim
