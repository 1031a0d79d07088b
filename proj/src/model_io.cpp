// Canonical text form of a FixedLlm. Sections appear in a fixed order and
// every list is emitted sorted, so equal models produce identical bytes.

#include <charconv>
#include <sstream>

#include "llmsim/error.hpp"
#include "llmsim/llm.hpp"

namespace llmsim {

namespace {

constexpr std::string_view kMagic = "llmsim-model v1";

void write_symbols(std::ostringstream& out, const SymbolString& s) {
  for (SymbolId x : s) out << ' ' << x;
}

void write_sparse(std::ostringstream& out, const IntVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) out << ' ' << i << ':' << v[i];
}

void write_matrix(std::ostringstream& out, std::string_view name, const SparseMatrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << ' ' << m.entries().size() << '\n';
  for (const auto& e : m.entries()) out << "entry " << e.row << ' ' << e.col << ' ' << e.value << '\n';
}

class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      lines_.push_back(text.substr(pos, end - pos));
      pos = end + 1;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, "model description line " + std::to_string(line_) + ": " + msg);
  }

  // Next line split on single spaces; the first field must equal `keyword`.
  std::vector<std::string_view> expect(std::string_view keyword) {
    if (next_ >= lines_.size()) {
      line_ = next_ + 1;
      fail("unexpected end, wanted '" + std::string(keyword) + "'");
    }
    line_ = next_ + 1;
    std::string_view l = lines_[next_++];
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    while (pos <= l.size()) {
      std::size_t end = l.find(' ', pos);
      if (end == std::string_view::npos) end = l.size();
      f.push_back(l.substr(pos, end - pos));
      pos = end + 1;
    }
    if (f.empty() || f[0] != keyword) fail("expected '" + std::string(keyword) + "'");
    for (std::size_t i = 1; i < f.size(); ++i)
      if (f[i].empty()) fail("empty field");
    return f;
  }

  std::string_view peek_keyword() const {
    if (next_ >= lines_.size()) return {};
    std::string_view l = lines_[next_];
    return l.substr(0, l.find(' '));
  }

  bool at_end() const { return next_ >= lines_.size() || (next_ + 1 == lines_.size() && lines_[next_].empty()); }

  template <class T>
  T number(std::string_view s) const {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("bad number '" + std::string(s) + "'");
    return v;
  }

  std::size_t size_field(std::string_view keyword) {
    auto f = expect(keyword);
    if (f.size() != 2) fail("'" + std::string(keyword) + "' takes one value");
    return number<std::size_t>(f[1]);
  }

  std::pair<std::size_t, std::int64_t> pair(std::string_view s) const {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) fail("expected index:value");
    return {number<std::size_t>(s.substr(0, colon)), number<std::int64_t>(s.substr(colon + 1))};
  }

  IntVector sparse(const std::vector<std::string_view>& f, std::size_t from, std::size_t width) const {
    IntVector v(width, 0);
    std::size_t last = 0;
    for (std::size_t i = from; i < f.size(); ++i) {
      auto [idx, val] = pair(f[i]);
      if (idx >= width || val == 0 || (i > from && idx <= last)) fail("sparse entries must be increasing and nonzero");
      v[idx] = val;
      last = idx;
    }
    return v;
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t next_ = 0;
  std::size_t line_ = 0;
};

template <class E>
E parse_enum(const Reader& r, std::string_view s, std::initializer_list<E> all) {
  for (E e : all)
    if (to_string(e) == s) return e;
  r.fail("unknown value '" + std::string(s) + "'");
}

SparseMatrix read_matrix(Reader& r, std::string_view name) {
  auto f = r.expect("matrix");
  if (f.size() != 5 || f[1] != name) r.fail("expected matrix " + std::string(name));
  SparseMatrix m(r.number<std::size_t>(f[2]), r.number<std::size_t>(f[3]));
  const std::size_t count = r.number<std::size_t>(f[4]);
  for (std::size_t i = 0; i < count; ++i) {
    auto e = r.expect("entry");
    if (e.size() != 4) r.fail("entry takes row, column, value");
    const auto row = r.number<std::size_t>(e[1]), col = r.number<std::size_t>(e[2]);
    const auto value = r.number<std::int64_t>(e[3]);
    if (row >= m.rows() || col >= m.cols() || value == 0) r.fail("entry out of range");
    if (m.at(row, col) != 0) r.fail("duplicate entry");
    m.set(row, col, value);
  }
  return m;
}

SymbolString read_symbols(const Reader& r, const std::vector<std::string_view>& f, std::size_t from) {
  SymbolString s;
  for (std::size_t i = from; i < f.size(); ++i) s.push_back(r.number<SymbolId>(f[i]));
  return s;
}

}  // namespace

std::string describe(const FixedLlm& model) {
  const ModelParts& p = model.parts();
  std::ostringstream out;
  out << kMagic << '\n';
  out << "mode " << to_string(p.mode) << '\n';
  out << "window " << p.window << '\n';
  out << "posbits " << p.posbits << '\n';
  out << "dimension " << p.embeddings.dimension << '\n';
  out << "input";
  for (const auto& n : p.input_alphabet) out << ' ' << n;
  out << "\noutput";
  for (const auto& n : p.output_alphabet) out << ' ' << n;
  out << "\ntokens " << p.tokens.size() << '\n';
  for (TokenId id = 0; id < p.tokens.size(); ++id) {
    const Token& t = p.tokens[id];
    out << "tok " << id << ' ' << to_string(t.kind) << ' ' << to_string(t.verdict) << ' ' << t.word << '\n';
    if (!t.emit.empty()) {
      out << "emit " << id;
      write_symbols(out, t.emit);
      out << '\n';
    }
    if (!t.output.empty()) {
      out << "out " << id;
      write_symbols(out, t.output);
      out << '\n';
    }
  }
  out << "stop";
  for (TokenId t : p.stop_tokens) out << ' ' << t;
  out << "\nfixpoint " << p.fixpoint << '\n';
  write_matrix(out, "query", p.attention.query);
  write_matrix(out, "key", p.attention.key);
  write_matrix(out, "value", p.attention.value);
  write_matrix(out, "residual", p.attention.residual);
  for (TokenId id = 0; id < p.embeddings.vectors.size(); ++id) {
    out << "embed " << id;
    write_sparse(out, p.embeddings.vectors[id]);
    out << '\n';
  }
  out << "rules " << p.successor.size() << '\n';
  for (const auto& [key, next] : p.successor) {
    out << "rule " << next;
    write_sparse(out, key);
    out << '\n';
  }
  out << "environment none\n";
  out << "end\n";
  return out.str();
}

FixedLlm parse_model_description(std::string_view text) {
  Reader r(text);
  {
    auto f = r.expect("llmsim-model");
    if (f.size() != 2 || f[1] != "v1") r.fail("unsupported version");
  }
  ModelParts p;
  {
    auto f = r.expect("mode");
    if (f.size() != 2) r.fail("mode takes one value");
    p.mode = parse_enum(r, f[1], {ModelMode::Transducer, ModelMode::Acceptor, ModelMode::Function, ModelMode::Stream});
  }
  p.window = r.size_field("window");
  p.posbits = r.size_field("posbits");
  p.embeddings.dimension = r.size_field("dimension");
  for (auto f = r.expect("input"); auto s : std::vector(f.begin() + 1, f.end())) p.input_alphabet.emplace_back(s);
  for (auto f = r.expect("output"); auto s : std::vector(f.begin() + 1, f.end())) p.output_alphabet.emplace_back(s);
  const std::size_t count = r.size_field("tokens");
  for (std::size_t id = 0; id < count; ++id) {
    auto f = r.expect("tok");
    if (f.size() != 5 || r.number<std::size_t>(f[1]) != id) r.fail("tok lines must be numbered in order");
    Token t;
    t.kind = parse_enum(r, f[2], {TokenKind::Prompt, TokenKind::Word, TokenKind::Begin, TokenKind::Halt, TokenKind::Grow});
    t.verdict = parse_enum(r, f[3], {TokenVerdict::None, TokenVerdict::Accept, TokenVerdict::Reject});
    t.word = std::string(f[4]);
    p.tokens.push_back(std::move(t));
    // Optional emit/out lines follow their tok line.
    if (r.peek_keyword() == "emit") {
      auto e = r.expect("emit");
      if (e.size() < 3 || r.number<std::size_t>(e[1]) != id) r.fail("emit line for wrong token");
      p.tokens.back().emit = read_symbols(r, e, 2);
    }
    if (r.peek_keyword() == "out") {
      auto o = r.expect("out");
      if (o.size() < 3 || r.number<std::size_t>(o[1]) != id) r.fail("out line for wrong token");
      p.tokens.back().output = read_symbols(r, o, 2);
    }
  }
  for (auto f = r.expect("stop"); auto s : std::vector(f.begin() + 1, f.end()))
    p.stop_tokens.push_back(r.number<TokenId>(s));
  p.fixpoint = static_cast<TokenId>(r.size_field("fixpoint"));
  p.attention.query = read_matrix(r, "query");
  p.attention.key = read_matrix(r, "key");
  p.attention.value = read_matrix(r, "value");
  p.attention.residual = read_matrix(r, "residual");
  for (std::size_t id = 0; id < count; ++id) {
    auto f = r.expect("embed");
    if (f.size() < 2 || r.number<std::size_t>(f[1]) != id) r.fail("embed lines must be numbered in order");
    p.embeddings.vectors.push_back(r.sparse(f, 2, p.embeddings.dimension));
  }
  const std::size_t rules = r.size_field("rules");
  const std::size_t key_width = p.attention.residual.rows() + p.attention.value.rows();
  for (std::size_t i = 0; i < rules; ++i) {
    auto f = r.expect("rule");
    if (f.size() < 2) r.fail("rule needs a target");
    IntVector key = r.sparse(f, 2, key_width);
    if (!p.successor.emplace(std::move(key), r.number<TokenId>(f[1])).second) r.fail("duplicate rule key");
  }
  {
    auto f = r.expect("environment");
    if (f.size() != 2 || f[1] != "none") r.fail("only 'environment none' is supported");
  }
  r.expect("end");
  if (!r.at_end()) r.fail("trailing content");
  try {
    return FixedLlm(std::move(p));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace llmsim
