#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "llmsim/dfst.hpp"
#include "llmsim/tm.hpp"

namespace llmsim {

using Machine = std::variant<Dfst, MultiTapeTm>;

/// Parses the line-oriented machine-spec format documented in
/// docs/machine-spec.md. Throws SyntaxError (with line:column) for malformed
/// text and ValidationError naming the violated invariant otherwise.
Machine parse_machine_spec(std::string_view text);

Dfst parse_fst_spec(std::string_view text);
MultiTapeTm parse_tm_spec(std::string_view text);

/// Canonical form: declarations in fixed order, every transition listed
/// explicitly and sorted. parse(serialize(m)) == m.
std::string serialize_machine(const Dfst& machine);
std::string serialize_machine(const MultiTapeTm& machine);
std::string serialize_machine(const Machine& machine);

/// Advice tables: one `<length> <symbol>...` line per length, `-` for empty.
AdviceFunction parse_advice_table(const MultiTapeTm& machine, std::string_view text);
std::string serialize_advice_table(const MultiTapeTm& machine, const AdviceFunction& advice);

/// Streams: one symbol name per line; blank lines and `#` comments ignored.
SymbolString parse_stream(const Alphabet& alphabet, std::string_view text);

}  // namespace llmsim
