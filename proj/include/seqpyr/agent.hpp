#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seqpyr/cluster_model.hpp"
#include "seqpyr/sequence.hpp"

namespace seqpyr {

// What one agent emits on one tick: the cluster code sent upward and the
// per-child components of its predicted next input, sent downward. Bottom
// agents have no children inside the system, so their prediction list is
// empty.
struct AgentOutput {
    Symbol code = kBlankSymbol;
    std::vector<std::optional<Symbol>> child_predictions;
};

struct AgentConfig {
    double theta = kDefaultTheta;
    double hint_margin = kDefaultHintMargin;
    MergeRule merge_rule = MergeRule::Replace;
    // When false, a delivered hint stays armed until consumed by a tick
    // instead of being cleared after the next tick. Single-use is the
    // default behavior.
    bool single_use_hints = true;
};

// One clustering agent: consumes one input per tick, emits a cluster code
// upward and per-child predictions downward, accepts feedback hints, and
// finalizes its episode buffer into the prototype store.
class Agent {
public:
    Agent(std::uint32_t agent_id, std::uint32_t layer, std::uint32_t fan_in,
          AgentConfig config = {});

    // Processes one input. Interns the token, verifies the pending
    // prediction, recognizes the grown buffer (biased by any feedback hint,
    // which this consumes), and derives the next prediction.
    AgentOutput on_tick(const Token& input);

    // Stores a hint for the next tick; blank is a no-op, latest wins.
    void on_feedback(Symbol hint);

    // Finalizes the buffered episode and clears per-episode state. Returns
    // the final cluster code, or blank when nothing was buffered.
    Symbol on_episode_end(std::uint32_t episode_id);

    void set_standby(bool standby);
    bool standby() const { return standby_; }

    std::uint32_t id() const { return id_; }
    std::uint32_t layer() const { return layer_; }
    std::uint32_t fan_in() const { return fan_in_; }
    const std::vector<Symbol>& buffer() const { return buffer_; }
    const PrototypeStore& store() const { return store_; }
    const Alphabet& alphabet() const { return alphabet_; }
    const PredictionStats& stats() const { return stats_; }
    std::optional<Symbol> pending_prediction() const { return pending_prediction_; }
    std::optional<Symbol> feedback_hint() const { return feedback_hint_; }
    std::uint64_t ticks_processed() const { return ticks_processed_; }

    // Pre-seed a cluster (tests and hand-built stores).
    Symbol add_prototype(SymbolView sequence, std::uint32_t episode_id = 0);

    void set_theta(double theta) { config_.theta = theta; }
    double theta() const { return config_.theta; }

    // Order-sensitive digest of the full mutable state.
    std::uint64_t state_hash() const;

private:
    std::uint32_t id_;
    std::uint32_t layer_;
    std::uint32_t fan_in_;
    AgentConfig config_;

    std::vector<Symbol> buffer_;
    PrototypeStore store_;
    Alphabet alphabet_;
    StreamScorer scorer_;
    std::optional<Symbol> pending_prediction_;
    std::optional<Symbol> feedback_hint_;
    PredictionStats stats_;
    bool standby_ = false;
    std::uint64_t ticks_processed_ = 0;
};

}  // namespace seqpyr
