#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "seqpyr/agent.hpp"
#include "seqpyr/topology.hpp"

namespace seqpyr {

// One tick's relay record: every agent's upward code (blank for standby)
// and the hints delivered for the next tick.
struct TickFrame {
    std::uint32_t tick = 0;
    std::vector<Symbol> upward_codes;
    std::vector<std::optional<Symbol>> downward_hints;
};

enum class ExecMode : std::uint8_t {
    Serial,    // reference implementation
    Parallel,  // OpenMP within-layer passes; observably identical
};

struct SchedulerOptions {
    ExecMode mode = ExecMode::Serial;
    bool feedback_enabled = true;
    // Agents that replace their upward and final codes with a fixed wrong
    // constant every tick.
    std::set<std::uint32_t> adversarial;
    Symbol adversarial_code = 9999;
};

// Deterministic lock-step relay over the pyramid. Each tick runs one upward
// code pass (layer 1 to the top) and, when feedback is enabled, one
// downward prediction pass (top to layer 2's children). Passes are
// barriers; within a pass, agents of one layer are independent, which is
// what the parallel mode exploits.
class Scheduler {
public:
    Scheduler(const PyramidTopology& topo, AgentConfig agent_config, SchedulerOptions opts);

    // Per-layer clustering thresholds; index 0 applies to layer 1.
    void set_layer_thetas(const std::vector<double>& thetas);

    // Runs one tick. sensor_tokens holds one raw token per bottom agent, in
    // layer-1 row-major order; entries for standby bottom agents are ignored.
    TickFrame step(const std::vector<Token>& sensor_tokens);

    // Finalizes the episode for every active agent, bottom layer first.
    // Returns one final code per agent (blank for standby agents).
    std::vector<Symbol> end_episode(std::uint32_t episode_id);

    Agent& agent(std::uint32_t id) { return agents_[id]; }
    const Agent& agent(std::uint32_t id) const { return agents_[id]; }
    std::size_t agent_count() const { return agents_.size(); }
    const PyramidTopology& topology() const { return *topo_; }

    std::uint32_t tick_index() const { return tick_; }
    void reset_tick_index() { tick_ = 0; }

    // Number of on_feedback deliveries performed so far (ablation probe).
    std::uint64_t feedback_deliveries() const { return feedback_deliveries_; }

private:
    void tick_bottom(const std::vector<Token>& sensor_tokens, TickFrame& frame);
    void tick_layer(std::uint32_t layer, TickFrame& frame);
    void feedback_layer(std::uint32_t layer, TickFrame& frame);

    const PyramidTopology* topo_;
    SchedulerOptions opts_;
    std::vector<Agent> agents_;
    std::vector<AgentOutput> outputs_;  // per-agent output of the current tick
    std::uint32_t tick_ = 0;
    std::uint64_t feedback_deliveries_ = 0;
};

}  // namespace seqpyr
