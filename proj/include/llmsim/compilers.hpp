#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "llmsim/dfst.hpp"
#include "llmsim/llm.hpp"
#include "llmsim/tm.hpp"

namespace llmsim {

// ---------------------------------------------------------------------------
// Embedding layouts

struct FieldSpan {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;

  friend bool operator==(const FieldSpan&, const FieldSpan&) = default;
};

/// Named, contiguous slices of an embedding vector.
struct FieldLayout {
  std::vector<FieldSpan> fields;
  std::size_t dimension = 0;

  std::size_t add(std::string name, std::size_t width);
  const FieldSpan& field(std::string_view name) const;  // ConfigError when absent
  bool has(std::string_view name) const;
};

/// Bits needed to write values 0..max_value in binary.
std::size_t bits_for(std::size_t max_value);

/// Binary code of `value` over `width` bits (0/1 entries, LSB first).
IntVector binary_code(std::size_t value, std::size_t width);

/// Encodes TM configurations (and the prompt/control tokens around them) as
/// exact-integer embeddings. Fields, in order:
///   kind(5) bias(1) prompt(|S|+2 or |S| for streams) target(posbits, not
///   for streams) boundary(1, streams only) state(|Q|) scanned(|S|+2, or +3
///   with the empty port) inhead(bits, not for streams) then per work tape
///   cells(k*|G| one-hot) head(bits) extent(bits), and finally advice
///   (|A|+1 one-hot plus advice head bits) when advice is present.
struct TmEncodingOptions {
  bool stream = false;
  std::size_t input_length = 0;   // acceptors: input head ranges over 0..n+1
  std::size_t space_bound = 1;
  bool with_advice = false;
  std::size_t advice_length = 0;  // advice head ranges over 0..len
  std::size_t posbits = 1;
};

class TmEncoding {
 public:
  TmEncoding(const MultiTapeTm& machine, TmEncodingOptions options);

  const FieldLayout& layout() const { return layout_; }
  const TmEncodingOptions& options() const { return options_; }

  /// `target` is the window position the configuration's successor needs to
  /// read (acceptors only).
  IntVector config(const TmConfiguration& c, std::size_t target) const;
  IntVector prompt(SymbolId extended_symbol) const;
  IntVector control(TokenKind kind, std::size_t target = 0) const;

 private:
  IntVector base(TokenKind kind) const;

  const MultiTapeTm* machine_;
  TmEncodingOptions options_;
  FieldLayout layout_;
  std::size_t head_bits_ = 0;
  std::size_t inhead_bits_ = 0;
  std::size_t advhead_bits_ = 0;
};

/// Attention that lets the last token read one prompt position: the query is
/// the token's target code, the key is the position code plus a strong
/// prompt/non-prompt separation term. Exact match scores 2P, anything else at
/// most 2P - 2. The value is the prompt-symbol field of the attended token.
AttentionSpec lookahead_attention(const FieldLayout& layout, std::size_t posbits);

/// Recency attention for stream members: configurations attend to themselves,
/// port tokens attend to the latest boundary configuration. The value is the
/// whole embedding of the attended token.
AttentionSpec stream_attention(const FieldLayout& layout, std::size_t posbits, std::size_t window);

// ---------------------------------------------------------------------------
// Compilation

struct FstCompileParams {
  std::size_t max_input_length = 1;
};

enum class VocabularyPolicy { ReachableOnly, ExhaustiveUpToK };
enum class TmMode { Acceptor, Function };

std::string_view to_string(VocabularyPolicy p);
VocabularyPolicy parse_vocabulary_policy(std::string_view s);  // ConfigError

struct TmCompileParams {
  std::size_t input_length = 0;
  std::size_t space_bound = 1;
  std::optional<AdviceFunction> advice;
  TmMode mode = TmMode::Acceptor;
  VocabularyPolicy policy = VocabularyPolicy::ReachableOnly;
  std::size_t vocabulary_cap = 200000;
  std::optional<std::uint64_t> step_constant;
};

struct CompileReport {
  std::size_t vocabulary_size = 0;
  std::size_t machine_words = 0;  // rule words or configuration words
  std::size_t successor_rules = 0;
  std::size_t dimension = 0;
  std::size_t dimension_bound = 0;
  std::size_t window = 0;
  std::size_t max_space = 0;       // largest space seen in the pre-pass
  std::uint64_t exhaustive_bound = 0;  // c^k, reported for ExhaustiveUpToK
  friend bool operator==(const CompileReport&, const CompileReport&) = default;
};

struct CompiledModel {
  FixedLlm model;
  FieldLayout layout;
  CompileReport report;
};

/// Fixed constant in the transducer dimension bound
/// d <= 8 * (|Q| + |S| + ceil(log2(n + 1))).
inline constexpr std::size_t kFstDimensionConstant = 8;

std::size_t fst_dimension_bound(const Dfst& machine, std::size_t n);

/// Machine constant C_M in the TM bound
/// d <= C_M * (k + ceil(log2(n + 2)) + 1) + advice field width, where
/// C_M = 8 + 2(|S| + 2) + |Q| + T(|G| + 2) + 2(ceil(log2 c) + 1).
std::size_t tm_dimension_constant(const MultiTapeTm& machine, std::uint64_t c);

/// R(q,s;move,next,out;@pos): the transition consulted at head position pos.
std::string rule_word(const Dfst& machine, StateId state, SymbolId scanned, std::size_t head);

/// Sentence of rule words the transducer walks through on `input`.
std::vector<std::string> fst_sentence(const Dfst& machine, const FstRunResult& run, const SymbolString& input);

CompiledModel compile_fst(const Dfst& machine, const FstCompileParams& params);

/// SpaceBoundViolated when some length-n input needs more than k cells,
/// PreconditionViolated when a run hits the step bound, MissingAdvice when
/// the machine reads advice and none is given for n.
CompiledModel compile_tm(const MultiTapeTm& machine, const TmCompileParams& params);

/// Transducer whose states are the model's decoder states: one scan state per
/// prefix of length <= n, then one state per window content reached after
/// the prompt is complete, each emitting the generated token's output.
Dfst extract_fst(const FixedLlm& model, std::size_t n, std::size_t max_states = 200000);

// ---------------------------------------------------------------------------
// Equivalence

struct OracleRun {
  std::vector<std::string> words;
  Answer answer;
};

using OracleRunner = std::function<OracleRun(const SymbolString&)>;

OracleRunner fst_oracle(const Dfst& machine);
OracleRunner tm_oracle(const MultiTapeTm& machine, const TmCompileParams& params);

struct Divergence {
  SymbolString input;
  std::size_t step = 0;  // index into the generated sentence; == length for answer mismatches
  std::string expected;
  std::string actual;

  friend bool operator==(const Divergence&, const Divergence&) = default;
};

struct EquivalenceResult {
  std::size_t inputs_checked = 0;
  std::size_t tokens_generated = 0;
  std::int64_t min_margin = kNoCompetitor;
  std::optional<Divergence> divergence;

  bool passed() const { return !divergence.has_value(); }
  friend bool operator==(const EquivalenceResult&, const EquivalenceResult&) = default;
};

/// Runs the oracle and the model on every input and stops at the first
/// divergence. Model errors (MissingRule, AmbiguousArgmax) count as
/// divergences and are reported with their message.
EquivalenceResult verify_equivalence(const OracleRunner& oracle, const FixedLlm& model,
                                     const std::vector<SymbolString>& inputs);

}  // namespace llmsim
