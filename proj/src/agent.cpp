#include "seqpyr/agent.hpp"

#include <string>

#include "seqpyr/errors.hpp"
#include "seqpyr/rng.hpp"

namespace seqpyr {

Agent::Agent(std::uint32_t agent_id, std::uint32_t layer, std::uint32_t fan_in,
             AgentConfig config)
    : id_(agent_id), layer_(layer), fan_in_(fan_in), config_(config) {}

AgentOutput Agent::on_tick(const Token& input) {
    if (standby_) {
        throw standby_error("on_tick on standby agent " + std::to_string(id_));
    }
    if (layer_ > 1 && input.size() != fan_in_) {
        throw topology_error("agent " + std::to_string(id_) + " expected tuple of " +
                             std::to_string(fan_in_) + " child codes, got " +
                             std::to_string(input.size()));
    }

    const Symbol sym = alphabet_.intern(input);
    stats_ = verify(stats_, pending_prediction_, sym);
    buffer_.push_back(sym);

    const Recognition rec =
        scorer_.observe(store_, buffer_, feedback_hint_, config_.hint_margin);
    pending_prediction_ = rec.predicted_next;
    if (config_.single_use_hints) {
        feedback_hint_.reset();
    }
    ++ticks_processed_;

    AgentOutput out;
    out.code = rec.cluster_id;
    if (layer_ > 1) {
        out.child_predictions.assign(fan_in_, std::nullopt);
        if (rec.predicted_next && *rec.predicted_next != kBlankSymbol) {
            // A predicted input is a tuple this agent has interned; its
            // components are the children's predicted codes.
            const Token& tuple = alphabet_.token_of(*rec.predicted_next);
            for (std::size_t c = 0; c < tuple.size(); ++c) {
                out.child_predictions[c] = tuple[c];
            }
        }
    }
    return out;
}

void Agent::on_feedback(Symbol hint) {
    if (standby_ || hint == kBlankSymbol) {
        return;
    }
    feedback_hint_ = hint;
}

Symbol Agent::on_episode_end(std::uint32_t episode_id) {
    if (standby_) {
        return kBlankSymbol;
    }
    if (buffer_.empty()) {
        return kBlankSymbol;
    }
    const auto [code, created] =
        finalize_episode(store_, buffer_, episode_id, config_.theta, config_.merge_rule);
    (void)created;
    buffer_.clear();
    pending_prediction_.reset();
    feedback_hint_.reset();
    scorer_.reset();
    return code;
}

void Agent::set_standby(bool standby) {
    if (standby_ == standby) {
        return;
    }
    standby_ = standby;
    if (!standby_) {
        // Resume fresh: the next episode starts with an empty buffer.
        buffer_.clear();
        pending_prediction_.reset();
        feedback_hint_.reset();
        scorer_.reset();
    }
}

Symbol Agent::add_prototype(SymbolView sequence, std::uint32_t episode_id) {
    return store_.create(sequence, episode_id);
}

std::uint64_t Agent::state_hash() const {
    std::uint64_t h = splitmix64(id_);
    auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
    mix(standby_ ? 1 : 0);
    mix(buffer_.size());
    for (Symbol s : buffer_) {
        mix(s);
    }
    mix(store_.size());
    for (const auto& p : store_.all()) {
        mix(p.cluster_id);
        mix(p.support);
        mix(p.last_update);
        mix(p.sequence.size());
        for (Symbol s : p.sequence) {
            mix(s);
        }
    }
    mix(alphabet_.size());
    for (Symbol c = 1; c <= alphabet_.size(); ++c) {
        for (std::uint32_t v : alphabet_.token_of(c)) {
            mix(v);
        }
    }
    mix(stats_.hits);
    mix(stats_.misses);
    mix(stats_.streak_misses);
    mix(pending_prediction_ ? *pending_prediction_ + 1 : 0);
    mix(feedback_hint_ ? *feedback_hint_ + 1 : 0);
    mix(ticks_processed_);
    return h;
}

}  // namespace seqpyr
