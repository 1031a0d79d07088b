#include "llmsim/symbols.hpp"

#include "llmsim/error.hpp"

namespace llmsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::TerminalConfig: return "TerminalConfig";
    case ErrorCode::MissingAdvice: return "MissingAdvice";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::AmbiguousArgmax: return "AmbiguousArgmax";
    case ErrorCode::MissingRule: return "MissingRule";
    case ErrorCode::PromptTooLong: return "PromptTooLong";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::SpaceBoundViolated: return "SpaceBoundViolated";
    case ErrorCode::VocabularyBudgetExceeded: return "VocabularyBudgetExceeded";
    case ErrorCode::DimensionBoundViolated: return "DimensionBoundViolated";
    case ErrorCode::ScheduleExhausted: return "ScheduleExhausted";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InvalidMachine: return "InvalidMachine";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Diverges: return "Diverges";
  }
  return "Unknown";
}

bool is_valid_symbol_name(std::string_view name) {
  if (name.empty() || name == kLeftEndName || name == kRightEndName || name == kEmptyPortName ||
      name == "*" || name == "=" || name == "-" || name == "->")
    return false;
  for (char ch : name) {
    bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
              ch == '_' || ch == '#' || ch == '+' || ch == '-' || ch == '!' || ch == '?' ||
              ch == '$' || ch == '%' || ch == '&';
    if (!ok) return false;
  }
  return true;
}

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!is_valid_symbol_name(names_[i]))
      throw Error(ErrorCode::InvalidMachine, "invalid symbol name '" + names_[i] + "'");
    if (!index_.emplace(names_[i], static_cast<SymbolId>(i)).second)
      throw Error(ErrorCode::InvalidMachine, "duplicate symbol name '" + names_[i] + "'");
  }
}

const std::string& Alphabet::name(SymbolId id) const {
  if (id >= names_.size())
    throw Error(ErrorCode::UnknownSymbol, "symbol id " + std::to_string(id) + " out of range");
  return names_[id];
}

SymbolId Alphabet::id(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
  return it->second;
}

bool Alphabet::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

SymbolString Alphabet::parse_string(std::string_view text) const {
  SymbolString out;
  out.reserve(text.size());
  for (char ch : text) out.push_back(id(std::string_view(&ch, 1)));
  return out;
}

SymbolString Alphabet::parse_words(const std::vector<std::string>& names) const {
  SymbolString out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(id(n));
  return out;
}

std::string Alphabet::render(const SymbolString& s, std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += sep;
    out += name(s[i]);
  }
  return out;
}

std::string extended_name(const Alphabet& a, SymbolId id) {
  if (id < a.size()) return a.name(id);
  if (id == left_end(a)) return std::string(kLeftEndName);
  if (id == right_end(a)) return std::string(kRightEndName);
  if (id == empty_port(a)) return std::string(kEmptyPortName);
  throw Error(ErrorCode::UnknownSymbol, "extended symbol id " + std::to_string(id) + " out of range");
}

SymbolId extended_id(const Alphabet& a, std::string_view name) {
  if (name == kLeftEndName) return left_end(a);
  if (name == kRightEndName) return right_end(a);
  if (name == kEmptyPortName) return empty_port(a);
  return a.id(name);
}

char move_char(Move m) {
  switch (m) {
    case Move::Left: return 'L';
    case Move::Stay: return 'S';
    case Move::Right: return 'R';
  }
  return '?';
}

Move parse_move(std::string_view text) {
  if (text == "L") return Move::Left;
  if (text == "S") return Move::Stay;
  if (text == "R") return Move::Right;
  throw Error(ErrorCode::ParseError, "bad head move '" + std::string(text) + "'");
}

std::vector<SymbolString> all_strings(std::size_t alphabet_size, std::size_t length) {
  std::vector<SymbolString> out;
  if (alphabet_size == 0) {
    if (length == 0) out.emplace_back();
    return out;
  }
  SymbolString cur(length, 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = length;
    while (i > 0) {
      --i;
      if (++cur[i] < alphabet_size) break;
      cur[i] = 0;
      if (i == 0) return out;
    }
    if (length == 0) return out;
  }
}

std::vector<SymbolString> all_strings_up_to(std::size_t alphabet_size, std::size_t min_length,
                                            std::size_t max_length) {
  std::vector<SymbolString> out;
  for (std::size_t len = min_length; len <= max_length; ++len) {
    auto part = all_strings(alphabet_size, len);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace llmsim
