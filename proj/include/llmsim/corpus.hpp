#pragma once

#include <string>
#include <vector>

#include "llmsim/machine_spec.hpp"

namespace llmsim::corpus {

using Names = std::vector<std::string>;

inline const Names kBinary{"0", "1"};

// Transducers
std::string identity_fst_spec(const Names& alphabet = kBinary);
/// Emits, for each input symbol, 1 when the ones seen before it are even and
/// 0 otherwise: 1101 -> 1011.
std::string running_parity_fst_spec();
/// Two-way: walks to the right endmarker, then emits while walking left.
std::string reverse_fst_spec(const Names& alphabet = kBinary);

// Acceptors and function-mode machines
/// Accepts binary words with an even number of ones; S(n) = 1.
std::string parity_tm_spec();
/// Copies the input onto the work tape and compares it reversed; S(n) = n.
std::string palindrome_tm_spec(const Names& alphabet = kBinary);
/// Function mode: work tape 0 ends holding input + 1 in binary; S(n) = n + 1.
std::string increment_tm_spec();
/// Scans the input, then accepts iff the first advice symbol is E; S(n) = 0.
std::string length_parity_tma_spec();
AdviceFunction length_parity_advice(std::size_t max_length);

// Interactive machines (await state "wait")
std::string echo_itm_spec();
/// Emits the running xor of the stream.
std::string xor_itm_spec();
/// Appends one cell per input and echoes it: space after m inputs is m.
std::string unary_counter_itm_spec();
/// Counts the ones of the stream in binary (LSB first behind a '#' marker)
/// and emits the low bit; space after a count of v >= 1 is bits(v) + 1.
std::string binary_counter_itm_spec();
/// Emits input xor the last advice symbol; constant (zero) space.
std::string advice_xor_itma_spec();
/// Advice for advice_xor: "0" at length 1, "1" at `change_at`, empty elsewhere.
AdviceFunction advice_xor_advice(std::size_t max_length, std::size_t change_at = 5);
/// Unary counter that also carries an advice tape it never reads.
std::string advice_unary_counter_itma_spec();

/// Advice with every length 0..max_length mapped to the empty string.
AdviceFunction empty_advice(std::size_t max_length);

struct MachineCorpusEntry {
  std::string name;
  std::string spec;
  std::string space;       // S(n) formula
  std::string halting;     // why every run halts (or why each epoch ends)
};

/// Every corpus machine by name, in a fixed order.
std::vector<MachineCorpusEntry> entries();
const MachineCorpusEntry& entry(const std::string& name);  // UnknownSuite-style ConfigError

Dfst fst(const std::string& name);
MultiTapeTm tm(const std::string& name);

}  // namespace llmsim::corpus
