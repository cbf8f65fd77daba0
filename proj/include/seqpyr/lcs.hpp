#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "seqpyr/sequence.hpp"

namespace seqpyr {

using SymbolView = std::span<const Symbol>;

// One maximal monotone matching between two sequences: pairs of
// (index in a, index in b), strictly increasing in both coordinates,
// witnessing equal symbols.
struct Alignment {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

    std::size_t length() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

// Length of the longest common subsequence. Symmetric, <= min(|a|,|b|).
std::size_t lcs_length(SymbolView a, SymbolView b);

// One maximal alignment, deterministic: among equal-length alignments the
// lexicographically smallest sequence of (i,j) pairs, i.e. matching as
// early as possible in a, then in b.
Alignment lcs_alignment(SymbolView a, SymbolView b);

// lcs_length(a,b) / max(|a|,|b|). Equals 1 iff a == b elementwise.
// Throws undefined_input_error when both sequences are empty.
double similarity_full(SymbolView a, SymbolView b);

// lcs_length(buffer, prototype) / |buffer|: how well the prototype explains
// what has arrived so far. Equals 1 when the buffer is a subsequence of the
// prototype. Throws undefined_input_error on an empty buffer.
double similarity_stream(SymbolView buffer, SymbolView prototype);

// Prototype update rule: the stored sequence is replaced by the latest
// matching exemplar. Caller keeps cluster identity and support.
std::vector<Symbol> merge_recency(SymbolView prototype, SymbolView episode);

// Alternative update rule (off by default): keep only the common backbone
// of the old prototype and the new exemplar.
std::vector<Symbol> merge_lcs_backbone(SymbolView prototype, SymbolView episode);

}  // namespace seqpyr
