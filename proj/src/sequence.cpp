#include "seqpyr/sequence.hpp"

#include <limits>
#include <stdexcept>

#include "seqpyr/errors.hpp"

namespace seqpyr {

Symbol Alphabet::intern(const Token& token) {
    auto it = registry_.find(token);
    if (it != registry_.end()) {
        return it->second;
    }
    if (tokens_.size() >= std::numeric_limits<Symbol>::max() - 1) {
        throw config_error("alphabet code space exhausted");
    }
    const Symbol code = static_cast<Symbol>(tokens_.size() + 1);
    registry_.emplace(token, code);
    tokens_.push_back(token);
    return code;
}

const Token& Alphabet::token_of(Symbol code) const {
    if (!contains(code)) {
        throw std::out_of_range("no token registered for code " + std::to_string(code));
    }
    return tokens_[code - 1];
}

}  // namespace seqpyr
