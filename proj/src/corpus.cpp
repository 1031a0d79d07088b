#include "llmsim/corpus.hpp"

#include <sstream>

#include "llmsim/error.hpp"

namespace llmsim::corpus {

namespace {

std::string join(const Names& names) {
  std::string out;
  for (const auto& n : names) out += " " + n;
  return out;
}

}  // namespace

std::string identity_fst_spec(const Names& alphabet) {
  std::ostringstream s;
  s << "machine fst\n"
    << "# copies the input; q0 is the only working state\n"
    << "states q0 h\n"
    << "alphabet" << join(alphabet) << "\n"
    << "initial q0\n"
    << "halt h\n"
    << "trans q0 < -> q0 R\n";
  for (const auto& a : alphabet) s << "trans q0 " << a << " -> q0 R " << a << "\n";
  s << "trans q0 > -> h S\n";
  return s.str();
}

std::string running_parity_fst_spec() {
  return "machine fst\n"
         "# two working states tracking the parity of the ones read so far\n"
         "states even odd h\n"
         "alphabet 0 1\n"
         "initial even\n"
         "halt h\n"
         "trans even < -> even R\n"
         "trans even 0 -> even R 1\n"
         "trans even 1 -> odd R 1\n"
         "trans odd 0 -> odd R 0\n"
         "trans odd 1 -> even R 0\n"
         "trans odd < -> odd R\n"
         "trans even > -> h S\n"
         "trans odd > -> h S\n";
}

std::string reverse_fst_spec(const Names& alphabet) {
  std::ostringstream s;
  s << "machine fst\n"
    << "states right left h\n"
    << "alphabet" << join(alphabet) << "\n"
    << "initial right\n"
    << "halt h\n"
    << "trans right * -> right R\n"
    << "trans right > -> left L\n";
  for (const auto& a : alphabet) s << "trans left " << a << " -> left L " << a << "\n";
  s << "trans left < -> h S\n"
    << "trans left > -> h S\n";
  return s.str();
}

std::string parity_tm_spec() {
  return "machine tm\n"
         "states scan acc rej\n"
         "alphabet 0 1\n"
         "work _ 1\n"
         "tapes 1\n"
         "initial scan\n"
         "accept acc\n"
         "reject rej\n"
         "trans scan < * -> scan R = S\n"
         "trans scan 0 * -> scan R = S\n"
         "trans scan 1 _ -> scan R 1 S\n"
         "trans scan 1 1 -> scan R _ S\n"
         "trans scan > _ -> acc S = S\n"
         "trans scan > 1 -> rej S = S\n";
}

std::string palindrome_tm_spec(const Names& alphabet) {
  std::ostringstream s;
  s << "machine tm\n"
    << "states copy shift rewind cmp acc rej\n"
    << "alphabet" << join(alphabet) << "\n"
    << "work _" << join(alphabet) << "\n"
    << "tapes 1\n"
    << "initial copy\n"
    << "accept acc\n"
    << "reject rej\n"
    << "trans copy < _ -> copy R _ S\n"
    << "trans copy > _ -> acc S _ S\n";
  for (const auto& a : alphabet) s << "trans copy " << a << " _ -> shift R " << a << " S\n";
  for (const auto& a : alphabet) s << "trans shift " << a << " * -> copy S = R\n";
  s << "trans shift > * -> rewind L = S\n";
  for (const auto& a : alphabet) s << "trans rewind " << a << " * -> rewind L = S\n";
  s << "trans rewind < * -> cmp R = S\n";
  for (const auto& a : alphabet)
    for (const auto& b : alphabet) {
      if (a == b) s << "trans cmp " << a << " " << b << " -> cmp R = L\n";
      else s << "trans cmp " << a << " " << b << " -> rej S = S\n";
    }
  s << "trans cmp > * -> acc S = S\n";
  return s.str();
}

std::string increment_tm_spec() {
  return "machine tm\n"
         "# digits live in cells 1..n; cell 0 takes the final carry\n"
         "states start copy shift add done rej\n"
         "alphabet 0 1\n"
         "work _ 0 1\n"
         "tapes 1\n"
         "initial start\n"
         "accept done\n"
         "reject rej\n"
         "trans start < _ -> copy R _ R\n"
         "trans copy 0 * -> shift R 0 S\n"
         "trans copy 1 * -> shift R 1 S\n"
         "trans copy > * -> add S = S\n"
         "trans shift 0 * -> copy S = R\n"
         "trans shift 1 * -> copy S = R\n"
         "trans shift > * -> add S = S\n"
         "trans add * 1 -> add S 0 L\n"
         "trans add * 0 -> done S 1 S\n"
         "trans add * _ -> done S 1 S\n";
}

std::string length_parity_tma_spec() {
  return "machine tm\n"
         "states scan acc rej\n"
         "alphabet 0 1\n"
         "work _\n"
         "advice E O\n"
         "tapes 1\n"
         "initial scan\n"
         "accept acc\n"
         "reject rej\n"
         "trans scan * _ * -> scan R _ S S\n"
         "trans scan > _ E -> acc S _ S S\n"
         "trans scan > _ O -> rej S _ S S\n"
         "trans scan > _ . -> rej S _ S S\n";
}

AdviceFunction length_parity_advice(std::size_t max_length) {
  AdviceFunction f;
  for (std::size_t n = 0; n <= max_length; ++n) f.set(n, {static_cast<SymbolId>(n % 2 == 0 ? 0 : 1)});
  return f;
}

std::string echo_itm_spec() {
  return "machine tm\n"
         "states wait acc rej\n"
         "alphabet 0 1\n"
         "work _\n"
         "tapes 1\n"
         "initial wait\n"
         "accept acc\n"
         "reject rej\n"
         "await wait\n"
         "trans wait 0 _ -> wait S _ S emit 0\n"
         "trans wait 1 _ -> wait S _ S emit 1\n";
}

std::string xor_itm_spec() {
  return "machine tm\n"
         "states wait acc rej\n"
         "alphabet 0 1\n"
         "work _ 0 1\n"
         "tapes 1\n"
         "initial wait\n"
         "accept acc\n"
         "reject rej\n"
         "await wait\n"
         "trans wait 0 _ -> wait S _ S emit 0\n"
         "trans wait 0 0 -> wait S 0 S emit 0\n"
         "trans wait 0 1 -> wait S 1 S emit 1\n"
         "trans wait 1 _ -> wait S 1 S emit 1\n"
         "trans wait 1 0 -> wait S 1 S emit 1\n"
         "trans wait 1 1 -> wait S 0 S emit 0\n";
}

std::string unary_counter_itm_spec() {
  return "machine tm\n"
         "states wait grow acc rej\n"
         "alphabet 0 1\n"
         "work _ 1\n"
         "tapes 1\n"
         "initial wait\n"
         "accept acc\n"
         "reject rej\n"
         "await wait\n"
         "trans wait 0 _ -> wait S 1 S emit 0\n"
         "trans wait 1 _ -> wait S 1 S emit 1\n"
         "trans wait * 1 -> grow S 1 R\n"
         "trans grow 0 _ -> wait S 1 S emit 0\n"
         "trans grow 1 _ -> wait S 1 S emit 1\n";
}

std::string binary_counter_itm_spec() {
  return "machine tm\n"
         "states init wait inc back report acc rej\n"
         "alphabet 0 1\n"
         "work _ # 0 1\n"
         "tapes 1\n"
         "initial init\n"
         "accept acc\n"
         "reject rej\n"
         "await wait\n"
         "trans init 0 _ -> report S # R\n"
         "trans init 1 _ -> inc S # R\n"
         "trans wait 0 * -> report S = S\n"
         "trans wait 1 * -> inc S = S\n"
         "trans inc * 1 -> inc S 0 R\n"
         "trans inc * 0 -> back S 1 L\n"
         "trans inc * _ -> back S 1 L\n"
         "trans back * 0 -> back S = L\n"
         "trans back * 1 -> back S = L\n"
         "trans back * # -> report S = R\n"
         "trans report * 0 -> wait S = S emit 0\n"
         "trans report * _ -> wait S = S emit 0\n"
         "trans report * 1 -> wait S = S emit 1\n";
}

std::string advice_xor_itma_spec() {
  return "machine tm\n"
         "states wait seek out acc rej\n"
         "alphabet 0 1\n"
         "work _\n"
         "advice 0 1\n"
         "tapes 1\n"
         "initial wait\n"
         "accept acc\n"
         "reject rej\n"
         "await wait\n"
         "trans wait * _ * -> seek S _ S S\n"
         "trans seek * _ 0 -> seek S _ S R\n"
         "trans seek * _ 1 -> seek S _ S R\n"
         "trans seek * _ . -> out S _ S L\n"
         "trans out 0 _ 0 -> wait S _ S S emit 0\n"
         "trans out 0 _ 1 -> wait S _ S S emit 1\n"
         "trans out 1 _ 0 -> wait S _ S S emit 1\n"
         "trans out 1 _ 1 -> wait S _ S S emit 0\n"
         "trans out 0 _ . -> wait S _ S S emit 0\n"
         "trans out 1 _ . -> wait S _ S S emit 1\n";
}

AdviceFunction advice_xor_advice(std::size_t max_length, std::size_t change_at) {
  AdviceFunction f;
  for (std::size_t n = 0; n <= max_length; ++n) {
    SymbolString a;
    if (n == 1) a.push_back(0);
    if (n == change_at) a.push_back(1);
    f.set(n, a);
  }
  return f;
}

std::string advice_unary_counter_itma_spec() {
  return "machine tm\n"
         "states wait grow acc rej\n"
         "alphabet 0 1\n"
         "work _ 1\n"
         "advice 0 1\n"
         "tapes 1\n"
         "initial wait\n"
         "accept acc\n"
         "reject rej\n"
         "await wait\n"
         "trans wait 0 _ * -> wait S 1 S S emit 0\n"
         "trans wait 1 _ * -> wait S 1 S S emit 1\n"
         "trans wait * 1 * -> grow S 1 R S\n"
         "trans grow 0 _ * -> wait S 1 S S emit 0\n"
         "trans grow 1 _ * -> wait S 1 S S emit 1\n";
}

AdviceFunction empty_advice(std::size_t max_length) {
  AdviceFunction f;
  for (std::size_t n = 0; n <= max_length; ++n) f.set(n, {});
  return f;
}

std::vector<MachineCorpusEntry> entries() {
  return {
      {"identity-fst", identity_fst_spec(), "0", "one right move per cell, halts on >"},
      {"running-parity-fst", running_parity_fst_spec(), "0", "one right move per cell, halts on >"},
      {"reverse-fst", reverse_fst_spec(), "0", "one sweep right, one sweep left, halts on <"},
      {"parity-tm", parity_tm_spec(), "1", "input head only moves right"},
      {"palindrome-tm", palindrome_tm_spec(), "n", "copy, rewind and compare each sweep the input once"},
      {"increment-tm", increment_tm_spec(), "n+1", "copy sweep then a carry walk of at most n+1 cells"},
      {"length-parity-tma", length_parity_tma_spec(), "0", "input head only moves right"},
      {"echo-itm", echo_itm_spec(), "0", "one step per epoch"},
      {"xor-itm", xor_itm_spec(), "1", "one step per epoch"},
      {"unary-counter-itm", unary_counter_itm_spec(), "m after m inputs", "at most two steps per epoch"},
      {"binary-counter-itm", binary_counter_itm_spec(), "bits(count)+1", "carry walk out and back"},
      {"advice-xor-itma", advice_xor_itma_spec(), "0", "advice head walks to the tape end and back one cell"},
      {"advice-unary-counter-itma", advice_unary_counter_itma_spec(), "m after m inputs",
       "at most two steps per epoch"},
  };
}

const MachineCorpusEntry& entry(const std::string& name) {
  static const std::vector<MachineCorpusEntry> all = entries();
  for (const auto& e : all)
    if (e.name == name) return e;
  throw Error(ErrorCode::ConfigError, "unknown corpus machine '" + name + "'");
}

Dfst fst(const std::string& name) { return parse_fst_spec(entry(name).spec); }
MultiTapeTm tm(const std::string& name) { return parse_tm_spec(entry(name).spec); }

}  // namespace llmsim::corpus
