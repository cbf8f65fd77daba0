#include "seqpyr/scheduler.hpp"

#include <string>

#include "seqpyr/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqpyr {

Scheduler::Scheduler(const PyramidTopology& topo, AgentConfig agent_config,
                     SchedulerOptions opts)
    : topo_(&topo), opts_(opts) {
    agents_.reserve(topo.total_agents());
    for (std::uint32_t id = 0; id < topo.total_agents(); ++id) {
        const std::uint32_t layer = topo.layer_of(id);
        const std::uint32_t fan = layer == 1 ? 0 : topo.fan_in();
        agents_.emplace_back(id, layer, fan, agent_config);
    }
    outputs_.resize(topo.total_agents());
}

void Scheduler::set_layer_thetas(const std::vector<double>& thetas) {
    if (thetas.size() != topo_->layers) {
        throw config_error("expected " + std::to_string(topo_->layers) +
                           " per-layer thresholds, got " + std::to_string(thetas.size()));
    }
    for (auto& a : agents_) {
        a.set_theta(thetas[a.layer() - 1]);
    }
}

void Scheduler::tick_bottom(const std::vector<Token>& sensor_tokens, TickFrame& frame) {
    const std::int64_t n = topo_->layer_size(1);
    const bool par = opts_.mode == ExecMode::Parallel;
#pragma omp parallel for if (par) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        Agent& a = agents_[i];
        if (a.standby()) {
            frame.upward_codes[i] = kBlankSymbol;
            continue;
        }
        outputs_[i] = a.on_tick(sensor_tokens[i]);
        frame.upward_codes[i] = opts_.adversarial.contains(static_cast<std::uint32_t>(i))
                                    ? opts_.adversarial_code
                                    : outputs_[i].code;
    }
}

void Scheduler::tick_layer(std::uint32_t layer, TickFrame& frame) {
    const std::uint32_t offset = topo_->dims[layer - 1].offset;
    const std::int64_t n = topo_->layer_size(layer);
    const bool par = opts_.mode == ExecMode::Parallel;
#pragma omp parallel for if (par) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint32_t id = offset + static_cast<std::uint32_t>(i);
        Agent& a = agents_[id];
        if (a.standby()) {
            frame.upward_codes[id] = kBlankSymbol;
            continue;
        }
        std::vector<Symbol> child_codes;
        child_codes.reserve(topo_->children[id].size());
        for (std::uint32_t cid : topo_->children[id]) {
            child_codes.push_back(frame.upward_codes[cid]);
        }
        outputs_[id] = a.on_tick(compose(child_codes));
        frame.upward_codes[id] =
            opts_.adversarial.contains(id) ? opts_.adversarial_code : outputs_[id].code;
    }
}

void Scheduler::feedback_layer(std::uint32_t layer, TickFrame& frame) {
    const std::uint32_t offset = topo_->dims[layer - 1].offset;
    const std::int64_t n = topo_->layer_size(layer);
    const bool par = opts_.mode == ExecMode::Parallel;
    std::uint64_t delivered = 0;
    // Each child has exactly one parent, so parents write disjoint slots.
#pragma omp parallel for if (par) schedule(static) reduction(+ : delivered)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint32_t id = offset + static_cast<std::uint32_t>(i);
        const Agent& a = agents_[id];
        if (a.standby()) {
            continue;
        }
        const auto& preds = outputs_[id].child_predictions;
        const auto& kids = topo_->children[id];
        for (std::size_t c = 0; c < kids.size(); ++c) {
            if (!preds[c] || *preds[c] == kBlankSymbol) {
                continue;
            }
            Agent& child = agents_[kids[c]];
            if (child.standby()) {
                continue;
            }
            child.on_feedback(*preds[c]);
            frame.downward_hints[kids[c]] = *preds[c];
            ++delivered;
        }
    }
    feedback_deliveries_ += delivered;
}

TickFrame Scheduler::step(const std::vector<Token>& sensor_tokens) {
    if (sensor_tokens.size() != topo_->layer_size(1)) {
        throw input_error("expected " + std::to_string(topo_->layer_size(1)) +
                          " sensor tokens, got " + std::to_string(sensor_tokens.size()));
    }
    TickFrame frame;
    frame.tick = tick_;
    frame.upward_codes.assign(topo_->total_agents(), kBlankSymbol);
    frame.downward_hints.assign(topo_->total_agents(), std::nullopt);

    tick_bottom(sensor_tokens, frame);
    for (std::uint32_t layer = 2; layer <= topo_->layers; ++layer) {
        tick_layer(layer, frame);
    }
    if (opts_.feedback_enabled) {
        for (std::uint32_t layer = topo_->layers; layer >= 2; --layer) {
            feedback_layer(layer, frame);
        }
    }
    ++tick_;
    return frame;
}

std::vector<Symbol> Scheduler::end_episode(std::uint32_t episode_id) {
    std::vector<Symbol> finals(topo_->total_agents(), kBlankSymbol);
    const bool par = opts_.mode == ExecMode::Parallel;
    for (std::uint32_t layer = 1; layer <= topo_->layers; ++layer) {
        const std::uint32_t offset = topo_->dims[layer - 1].offset;
        const std::int64_t n = topo_->layer_size(layer);
#pragma omp parallel for if (par) schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const std::uint32_t id = offset + static_cast<std::uint32_t>(i);
            Agent& a = agents_[id];
            if (a.standby()) {
                continue;
            }
            const Symbol code = a.on_episode_end(episode_id);
            finals[id] = opts_.adversarial.contains(id) ? opts_.adversarial_code : code;
        }
    }
    tick_ = 0;
    return finals;
}

}  // namespace seqpyr
