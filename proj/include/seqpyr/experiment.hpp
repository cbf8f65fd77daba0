#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqpyr/cluster_model.hpp"
#include "seqpyr/scenario.hpp"
#include "seqpyr/scheduler.hpp"

namespace seqpyr {

// Full description of one run. A run (and its report) is a pure function
// of this struct.
struct ProtocolConfig {
    std::uint32_t total_episodes = 500;
    std::uint32_t warmup = 32;      // phase 1: deterministic alternation of A and B
    std::uint32_t inject_at = 200;  // phase 3 (A, B and C) starts after this episode
    std::uint64_t seed = 1;

    std::uint32_t grid_w = 8, grid_h = 8;
    std::uint32_t fan_w = 2, fan_h = 2;
    std::uint32_t layers = 4;

    std::uint32_t duration = 16;  // ticks per episode
    double noise_p = 0.0025;

    double theta = 0.8;
    // Per-layer overrides; entry k applies to layer k+1 and the last entry
    // extends to any deeper layers. Empty list leaves every layer at theta.
    // The default keeps the bottom permissive enough to absorb sensor noise
    // while upper layers only merge near-identical code streams.
    std::vector<double> layer_thetas = {0.8, 0.9, 0.9, 0.9};
    double hint_margin = 0.1;
    MergeRule merge_rule = MergeRule::Replace;

    bool feedback_enabled = true;
    std::vector<std::uint32_t> adversarial;  // global agent ids
    std::uint32_t label_window = 50;         // trailing window for code->label mapping

    bool parallel = false;
    bool trace = false;         // keep per-tick frames for trace emission
    bool log_episodes = false;  // keep generated episodes for replay export

    bool operator==(const ProtocolConfig&) const = default;
};

// Throws config_error when a field combination is invalid.
void validate(const ProtocolConfig& config);

// Effective per-layer thresholds after applying overrides.
std::vector<double> effective_thetas(const ProtocolConfig& config);

struct EpisodeRecord {
    std::uint32_t episode = 0;
    std::uint32_t phase = 0;  // 1 warmup, 2 two-behavior random, 3 with injection
    Behavior label = Behavior::TypeA;
    std::vector<double> layer_rates;  // fraction of agents mapped correctly, per layer
    bool top_correct = false;
    Symbol top_code = kBlankSymbol;  // top agent's final code for this episode
};

struct TracedTick {
    std::uint32_t episode = 0;
    TickFrame frame;
};

struct RunReport {
    ProtocolConfig config;
    std::vector<EpisodeRecord> records;
    // Top agent's code->label mapping over the final window; label is the
    // behavior character, or '?' for codes unseen in the window.
    std::vector<std::pair<Symbol, char>> final_top_mapping;
    std::uint64_t feedback_deliveries = 0;
    // Total clusters across all agents of each layer at the end of the run.
    std::vector<std::uint32_t> layer_cluster_counts;
    std::vector<TracedTick> traced;          // only populated when config.trace
    std::vector<TrafficEpisode> episode_log;  // only populated when config.log_episodes
};

// One (final code, true label) observation for one agent and episode.
struct CodeLabel {
    Symbol code = kBlankSymbol;
    Behavior label = Behavior::TypeA;
};

// Majority label per code over the trailing `window` entries of the given
// history. Ties go to the label seen earliest within the window; codes
// absent from the window are unmapped. When scoring episode e the caller
// passes the history up to e-1, so a code first emitted at e is unmapped
// and counts as incorrect.
std::vector<std::pair<Symbol, Behavior>> map_clusters_to_labels(
    const std::vector<CodeLabel>& history, std::uint32_t window);

// Mapped label for one code under the same rule, or nullopt when the code
// does not occur in the window.
std::optional<Behavior> mapped_label(const std::vector<CodeLabel>& history,
                                     std::uint32_t window, Symbol code);

// Runs the three-phase protocol and collects per-episode metrics.
RunReport run_protocol(const ProtocolConfig& config);

// Sliding-window mean of one layer's correctness series; layer is 1-based.
// window must be >= 1 and at most the number of episodes.
std::vector<double> correct_rate_series(const RunReport& report, std::uint32_t layer,
                                        std::uint32_t window);

// Mean top-agent correctness over episodes [first, last] (1-based, inclusive).
double top_rate_over(const RunReport& report, std::uint32_t first, std::uint32_t last);

// Independent runs for a list of configs, parallelized across runs when
// parallel is set.
std::vector<RunReport> run_many(const std::vector<ProtocolConfig>& configs, bool parallel);

}  // namespace seqpyr
