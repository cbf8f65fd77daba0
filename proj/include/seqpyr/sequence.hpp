#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqpyr {

// A code in some agent-local code space. Codes are dense non-negative
// integers allocated in first-seen order; 0 is reserved for
// "blank / no output yet" in every code space.
using Symbol = std::uint32_t;

inline constexpr Symbol kBlankSymbol = 0;

// The raw value an agent receives on one tick, before interning. A scalar
// sensor reading is a one-element token; a parent's input is the tuple of
// its children's codes for the tick.
using Token = std::vector<std::uint32_t>;

struct TokenHash {
    std::size_t operator()(const Token& t) const noexcept {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (std::uint32_t v : t) {
            h ^= v;
            h *= 0x100000001B3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// Positional tupling of an ordered child-code list into one token.
// Injective on fixed-length lists: compose([1,2]) != compose([2,1]).
inline Token compose(const std::vector<Symbol>& child_codes) {
    return Token(child_codes.begin(), child_codes.end());
}

// Grow-only bijection between observed tokens and symbol codes.
// Owned by a single agent; code values are stable for the lifetime of a run.
class Alphabet {
public:
    Alphabet() = default;

    // Returns the existing code for a previously seen token, else allocates
    // the next one. Idempotent per token.
    Symbol intern(const Token& token);

    // Inverse lookup. Valid for codes 1..size(); the blank code has no token.
    const Token& token_of(Symbol code) const;

    bool contains(Symbol code) const { return code >= 1 && code <= tokens_.size(); }

    // Number of registered tokens (the blank code is not counted).
    std::size_t size() const { return tokens_.size(); }

    Symbol next_code() const { return static_cast<Symbol>(tokens_.size() + 1); }

private:
    std::unordered_map<Token, Symbol, TokenHash> registry_;
    std::vector<Token> tokens_;  // tokens_[c-1] is the token of code c
};

// One complete temporal sequence, the unit over which clustering is
// finalized. The label is generator-side ground truth; agents never see it.
struct Episode {
    std::uint32_t id = 0;
    std::vector<Symbol> symbols;
    std::optional<std::string> label;
};

}  // namespace seqpyr
