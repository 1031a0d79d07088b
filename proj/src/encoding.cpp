#include <algorithm>

#include "llmsim/compilers.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

std::size_t FieldLayout::add(std::string name, std::size_t width) {
  const std::size_t offset = dimension;
  fields.push_back({std::move(name), offset, width});
  dimension += width;
  return offset;
}

const FieldSpan& FieldLayout::field(std::string_view name) const {
  for (const auto& f : fields)
    if (f.name == name) return f;
  throw Error(ErrorCode::ConfigError, "no embedding field '" + std::string(name) + "'");
}

bool FieldLayout::has(std::string_view name) const {
  return std::any_of(fields.begin(), fields.end(), [&](const FieldSpan& f) { return f.name == name; });
}

std::size_t bits_for(std::size_t max_value) {
  std::size_t bits = 1;
  while (bits < 64 && (std::size_t{1} << bits) <= max_value) ++bits;
  return bits;
}

IntVector binary_code(std::size_t value, std::size_t width) {
  IntVector code(width, 0);
  for (std::size_t s = 0; s < width; ++s) code[s] = (value >> s) & 1U;
  return code;
}

namespace {

void put(IntVector& v, const FieldSpan& f, const IntVector& code) {
  std::copy(code.begin(), code.end(), v.begin() + static_cast<std::ptrdiff_t>(f.offset));
}

void one_hot(IntVector& v, const FieldSpan& f, std::size_t index) {
  if (index >= f.width) throw Error(ErrorCode::ConfigError, "value out of range for field " + f.name);
  v[f.offset + index] = 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// TmEncoding

TmEncoding::TmEncoding(const MultiTapeTm& machine, TmEncodingOptions options)
    : machine_(&machine), options_(options) {
  const std::size_t sigma = machine.input_alphabet().size();
  layout_.add("kind", kTokenKindCount);
  layout_.add("bias", 1);
  layout_.add("prompt", options.stream ? sigma : sigma + 2);
  if (options.stream) {
    layout_.add("boundary", 1);
  } else {
    layout_.add("target", options.posbits);
  }
  layout_.add("state", machine.states().size());
  layout_.add("scanned", options.stream ? sigma + 3 : sigma + 2);
  if (!options.stream) {
    inhead_bits_ = bits_for(options.input_length + 1);
    layout_.add("inhead", inhead_bits_);
  }
  head_bits_ = bits_for(options.space_bound);
  for (std::size_t t = 0; t < machine.tape_count(); ++t) {
    const std::string p = "tape" + std::to_string(t) + ".";
    layout_.add(p + "cells", options.space_bound * machine.work_alphabet().size());
    layout_.add(p + "head", head_bits_);
    layout_.add(p + "extent", head_bits_);
  }
  if (options.with_advice) {
    advhead_bits_ = bits_for(options.advice_length);
    layout_.add("advice", machine.advice_alphabet().size() + 1 + advhead_bits_);
  }
}

IntVector TmEncoding::base(TokenKind kind) const {
  IntVector v(layout_.dimension, 0);
  one_hot(v, layout_.field("kind"), static_cast<std::size_t>(kind));
  v[layout_.field("bias").offset] = 1;
  return v;
}

IntVector TmEncoding::prompt(SymbolId extended_symbol) const {
  IntVector v = base(TokenKind::Prompt);
  one_hot(v, layout_.field("prompt"), extended_symbol);
  return v;
}

IntVector TmEncoding::control(TokenKind kind, std::size_t target) const {
  IntVector v = base(kind);
  if (!options_.stream) put(v, layout_.field("target"), positional_code(target, options_.posbits));
  return v;
}

IntVector TmEncoding::config(const TmConfiguration& c, std::size_t target) const {
  const MultiTapeTm& m = *machine_;
  IntVector v = base(TokenKind::Word);
  if (options_.stream) {
    if (is_boundary(m, c)) v[layout_.field("boundary").offset] = 1;
  } else {
    put(v, layout_.field("target"), positional_code(target, options_.posbits));
    if (c.input_head > options_.input_length + 1) throw Error(ErrorCode::ConfigError, "input head out of range");
    put(v, layout_.field("inhead"), binary_code(c.input_head, inhead_bits_));
  }
  one_hot(v, layout_.field("state"), c.state);
  one_hot(v, layout_.field("scanned"), c.scanned_input);
  const std::size_t g = m.work_alphabet().size();
  for (std::size_t t = 0; t < m.tape_count(); ++t) {
    const std::string p = "tape" + std::to_string(t) + ".";
    const TapeConfig& tape = c.tapes.at(t);
    if (tape.extent > options_.space_bound || tape.head > options_.space_bound)
      throw Error(ErrorCode::SpaceBoundViolated, "configuration does not fit in " +
                                                     std::to_string(options_.space_bound) + " cells");
    const FieldSpan& cells = layout_.field(p + "cells");
    for (std::size_t i = 0; i < options_.space_bound; ++i) {
      const SymbolId s = i < tape.cells.size() ? tape.cells[i] : m.blank();
      v[cells.offset + i * g + s] = 1;
    }
    put(v, layout_.field(p + "head"), binary_code(tape.head, head_bits_));
    put(v, layout_.field(p + "extent"), binary_code(tape.extent, head_bits_));
  }
  if (options_.with_advice) {
    const FieldSpan& f = layout_.field("advice");
    const std::size_t symbols = m.advice_alphabet().size() + 1;
    if (c.advice_head > options_.advice_length) throw Error(ErrorCode::ConfigError, "advice head out of range");
    v[f.offset + c.scanned_advice] = 1;
    const IntVector head = binary_code(c.advice_head, advhead_bits_);
    std::copy(head.begin(), head.end(), v.begin() + static_cast<std::ptrdiff_t>(f.offset + symbols));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Attention constructions

AttentionSpec lookahead_attention(const FieldLayout& layout, std::size_t posbits) {
  const std::size_t d = layout.dimension;
  const std::size_t kind = layout.field("kind").offset;
  const std::size_t bias = layout.field("bias").offset;
  const FieldSpan& target = layout.field("target");
  const FieldSpan& prompt = layout.field("prompt");
  const auto separation = static_cast<std::int64_t>(posbits);

  AttentionSpec a;
  a.query = SparseMatrix(posbits + 1, d + posbits);
  a.key = SparseMatrix(posbits + 1, d + posbits);
  for (std::size_t s = 0; s < posbits; ++s) {
    a.query.set(s, target.offset + s, 1);
    a.key.set(s, d + s, 1);
  }
  a.query.set(posbits, bias, separation);
  for (std::size_t k = 0; k < kTokenKindCount; ++k)
    a.key.set(posbits, kind + k, k == static_cast<std::size_t>(TokenKind::Prompt) ? 1 : -1);
  a.value = SparseMatrix(prompt.width, d + posbits);
  for (std::size_t i = 0; i < prompt.width; ++i) a.value.set(i, prompt.offset + i, 1);
  a.residual = SparseMatrix::identity(d);
  return a;
}

AttentionSpec stream_attention(const FieldLayout& layout, std::size_t posbits, std::size_t window) {
  const std::size_t d = layout.dimension;
  const std::size_t bias = layout.field("bias").offset;
  const std::size_t prompt_kind = layout.field("kind").offset + static_cast<std::size_t>(TokenKind::Prompt);
  const std::size_t boundary = layout.field("boundary").offset;

  AttentionSpec a;
  // Row 0 scores 2 * (window offset), recovered from the +-1 position bits:
  // sum 2^s p_s = 2i - (2^P - 1). Row 1 adds a boundary bonus that only port
  // tokens ask for and that outweighs any recency difference.
  a.query = SparseMatrix(2, d + posbits);
  a.key = SparseMatrix(2, d + posbits);
  a.query.set(0, bias, 1);
  a.query.set(1, prompt_kind, static_cast<std::int64_t>(2 * window + 2));
  for (std::size_t s = 0; s < posbits; ++s) a.key.set(0, d + s, std::int64_t{1} << s);
  a.key.set(0, bias, (std::int64_t{1} << posbits) - 1);
  a.key.set(1, boundary, 1);
  a.value = SparseMatrix(d, d + posbits);
  for (std::size_t i = 0; i < d; ++i) a.value.set(i, i, 1);
  a.residual = SparseMatrix::identity(d);
  return a;
}

}  // namespace llmsim
