#include <map>

#include "llmsim/compilers.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

namespace {

std::string scan_name(const SymbolString& prefix) {
  std::string name = "s";
  for (SymbolId s : prefix) name += "_" + std::to_string(s);
  return name;
}

}  // namespace

Dfst extract_fst(const FixedLlm& model, std::size_t n, std::size_t max_states) {
  if (model.mode() != ModelMode::Transducer)
    throw Error(ErrorCode::PreconditionViolated, "only transducer models can be extracted");
  const Alphabet sigma(model.parts().input_alphabet);
  const Alphabet out(model.parts().output_alphabet);
  const SymbolId lend = left_end(sigma), rend = right_end(sigma);

  std::vector<std::string> names;
  Dfst::Table table;
  auto new_state = [&](std::string name) {
    if (names.size() >= max_states)
      throw Error(ErrorCode::StateBudgetExceeded, "more than " + std::to_string(max_states) + " states");
    names.push_back(std::move(name));
    return static_cast<StateId>(names.size() - 1);
  };
  auto every_symbol = [&](StateId q, const FstAction& a) {
    for (SymbolId s = 0; s < sigma.size() + 2; ++s) table[{q, s}] = a;
  };

  const StateId halt = new_state("h");
  std::map<SymbolString, StateId> scan;
  for (const auto& prefix : all_strings_up_to(sigma.size(), 0, n)) scan[prefix] = new_state(scan_name(prefix));

  std::size_t decoder_count = 0;
  for (const auto& [prefix, q] : scan) {
    table[{q, lend}] = FstAction{Move::Right, q, {}};
    for (SymbolId a = 0; a < sigma.size(); ++a) {
      SymbolString longer = prefix;
      longer.push_back(a);
      auto it = scan.find(longer);
      // Inputs longer than n are outside the model's domain; stop silently.
      table[{q, a}] = it != scan.end() ? FstAction{Move::Right, it->second, {}} : FstAction{Move::Stay, halt, {}};
    }

    // Decoder chain for this prompt: one state per window content, each
    // emitting the output of the token generated from it.
    std::vector<TokenId> context = input_prompt(model, prefix);
    StateId current = new_state("d" + std::to_string(decoder_count++));
    table[{q, rend}] = FstAction{Move::Stay, current, {}};
    while (true) {
      const TokenId t = model.next_token(context).token;
      context.push_back(t);
      const SymbolString& emit = model.token(t).emit;
      if (model.is_stop(t)) {
        every_symbol(current, FstAction{Move::Stay, halt, emit});
        break;
      }
      const StateId next = new_state("d" + std::to_string(decoder_count++));
      every_symbol(current, FstAction{Move::Stay, next, emit});
      current = next;
    }
  }
  return Dfst(Alphabet(names), sigma, out, scan.at({}), {halt}, std::move(table));
}

}  // namespace llmsim
