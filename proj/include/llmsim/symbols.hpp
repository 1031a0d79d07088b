#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace llmsim {

using SymbolId = std::uint32_t;
using SymbolString = std::vector<SymbolId>;

/// Reserved names for the extended input alphabet. They are never legal as
/// user symbol names.
inline constexpr std::string_view kLeftEndName = "<";
inline constexpr std::string_view kRightEndName = ">";
inline constexpr std::string_view kEmptyPortName = "~";

/// Dense alphabet: ids are [0, size()) in declaration order, names unique.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(SymbolId id) const;
  SymbolId id(std::string_view name) const;  // throws UnknownSymbol
  bool contains(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  SymbolString parse_string(std::string_view text) const;  // one char per symbol
  SymbolString parse_words(const std::vector<std::string>& names) const;
  std::string render(const SymbolString& s, std::string_view sep = "") const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> names_;
  std::map<std::string, SymbolId, std::less<>> index_;
};

/// Symbol names may not collide with the serialization delimiters used by
/// rule words, configuration words and the machine-spec grammar.
bool is_valid_symbol_name(std::string_view name);

/// The input tape of every machine is endmarked; interactive machines also see
/// an "empty port" reading between epochs. These ids extend an input alphabet.
inline SymbolId left_end(const Alphabet& a) { return static_cast<SymbolId>(a.size()); }
inline SymbolId right_end(const Alphabet& a) { return static_cast<SymbolId>(a.size() + 1); }
inline SymbolId empty_port(const Alphabet& a) { return static_cast<SymbolId>(a.size() + 2); }
inline std::size_t extended_size(const Alphabet& a) { return a.size() + 3; }

std::string extended_name(const Alphabet& a, SymbolId id);
SymbolId extended_id(const Alphabet& a, std::string_view name);

enum class Move : std::int8_t { Left = -1, Stay = 0, Right = 1 };

char move_char(Move m);
Move parse_move(std::string_view text);  // "L" | "S" | "R"

/// Enumerates every string over `alphabet_size` symbols of exactly `length`
/// symbols in lexicographic order.
std::vector<SymbolString> all_strings(std::size_t alphabet_size, std::size_t length);
/// Lengths min_length..max_length inclusive, shortest first.
std::vector<SymbolString> all_strings_up_to(std::size_t alphabet_size, std::size_t min_length,
                                            std::size_t max_length);

}  // namespace llmsim
