#include "seqpyr/experiment.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "seqpyr/errors.hpp"
#include "seqpyr/rng.hpp"
#include "seqpyr/topology.hpp"

namespace seqpyr {

namespace {

constexpr std::uint64_t kBehaviorStream = 0x42454841;  // behavior choice draws
constexpr std::uint64_t kNoiseStream = 0x4E4F4953;     // per-episode noise seeds

}  // namespace

void validate(const ProtocolConfig& config) {
    if (config.total_episodes == 0) {
        throw config_error("total_episodes must be positive");
    }
    if (config.warmup > config.inject_at || config.inject_at > config.total_episodes) {
        throw config_error("phases must satisfy warmup <= inject_at <= total_episodes");
    }
    if (config.duration == 0) {
        throw config_error("duration must be positive");
    }
    if (config.noise_p < 0.0 || config.noise_p >= 0.5) {
        throw config_error("noise probability must be in [0, 0.5)");
    }
    if (config.theta <= 0.0 || config.theta > 1.0) {
        throw config_error("theta must be in (0, 1]");
    }
    for (double t : config.layer_thetas) {
        if (t <= 0.0 || t > 1.0) {
            throw config_error("per-layer theta must be in (0, 1]");
        }
    }
    if (config.hint_margin < 0.0 || config.hint_margin > 1.0) {
        throw config_error("hint margin must be in [0, 1]");
    }
    if (config.label_window == 0) {
        throw config_error("label window must be positive");
    }
    // Topology dimensions are validated by construction.
    const std::uint32_t total =
        build_pyramid(config.grid_w, config.grid_h, config.fan_w, config.fan_h, config.layers)
            .total_agents();
    for (std::uint32_t id : config.adversarial) {
        if (id >= total) {
            throw config_error("adversarial agent id " + std::to_string(id) +
                               " out of range (total " + std::to_string(total) + ")");
        }
    }
}

std::vector<double> effective_thetas(const ProtocolConfig& config) {
    std::vector<double> thetas(config.layers, config.theta);
    for (std::size_t k = 0; k < config.layers; ++k) {
        if (k < config.layer_thetas.size()) {
            thetas[k] = config.layer_thetas[k];
        } else if (!config.layer_thetas.empty()) {
            thetas[k] = config.layer_thetas.back();
        }
    }
    return thetas;
}

std::vector<std::pair<Symbol, Behavior>> map_clusters_to_labels(
    const std::vector<CodeLabel>& history, std::uint32_t window) {
    const std::size_t begin = history.size() > window ? history.size() - window : 0;
    // Per code: counts per label and first occurrence index, in window order.
    std::vector<std::pair<Symbol, Behavior>> mapping;
    std::vector<Symbol> seen_codes;
    for (std::size_t i = begin; i < history.size(); ++i) {
        if (std::find(seen_codes.begin(), seen_codes.end(), history[i].code) ==
            seen_codes.end()) {
            seen_codes.push_back(history[i].code);
        }
    }
    for (Symbol code : seen_codes) {
        std::array<std::uint32_t, 3> counts{0, 0, 0};
        std::array<std::size_t, 3> first{SIZE_MAX, SIZE_MAX, SIZE_MAX};
        for (std::size_t i = begin; i < history.size(); ++i) {
            if (history[i].code != code) {
                continue;
            }
            const std::size_t l = static_cast<std::size_t>(history[i].label);
            ++counts[l];
            first[l] = std::min(first[l], i);
        }
        std::size_t best = 0;
        for (std::size_t l = 1; l < 3; ++l) {
            if (counts[l] > counts[best] ||
                (counts[l] == counts[best] && first[l] < first[best])) {
                best = l;
            }
        }
        mapping.emplace_back(code, static_cast<Behavior>(best));
    }
    return mapping;
}

std::optional<Behavior> mapped_label(const std::vector<CodeLabel>& history,
                                     std::uint32_t window, Symbol code) {
    for (const auto& [c, label] : map_clusters_to_labels(history, window)) {
        if (c == code) {
            return label;
        }
    }
    return std::nullopt;
}

RunReport run_protocol(const ProtocolConfig& config) {
    validate(config);

    const PyramidTopology topo =
        build_pyramid(config.grid_w, config.grid_h, config.fan_w, config.fan_h, config.layers);

    AgentConfig agent_config;
    agent_config.theta = config.theta;
    agent_config.hint_margin = config.hint_margin;
    agent_config.merge_rule = config.merge_rule;

    SchedulerOptions opts;
    opts.mode = config.parallel ? ExecMode::Parallel : ExecMode::Serial;
    opts.feedback_enabled = config.feedback_enabled;
    opts.adversarial.insert(config.adversarial.begin(), config.adversarial.end());

    Scheduler sched(topo, agent_config, opts);
    sched.set_layer_thetas(effective_thetas(config));

    const auto behaviors = default_behaviors(config.grid_w, config.grid_h);
    std::mt19937_64 behavior_rng(derive_seed(config.seed, kBehaviorStream));
    const std::uint64_t noise_base = derive_seed(config.seed, kNoiseStream);

    RunReport report;
    report.config = config;
    report.records.reserve(config.total_episodes);

    std::vector<std::vector<CodeLabel>> history(topo.total_agents());
    const std::uint32_t bottom = topo.layer_size(1);
    std::vector<Token> tokens(bottom);

    for (std::uint32_t ep = 1; ep <= config.total_episodes; ++ep) {
        std::uint32_t phase;
        Behavior label;
        if (ep <= config.warmup) {
            phase = 1;
            label = ep % 2 == 1 ? Behavior::TypeA : Behavior::TypeB;
        } else if (ep <= config.inject_at) {
            phase = 2;
            label = static_cast<Behavior>(next_below(behavior_rng, 2));
        } else {
            phase = 3;
            label = static_cast<Behavior>(next_below(behavior_rng, 3));
        }

        const TrafficEpisode episode =
            gen_traffic_episode(splitmix64(noise_base + ep),
                                behaviors[static_cast<std::size_t>(label)], config.grid_w,
                                config.grid_h, config.duration, config.noise_p);

        if (config.log_episodes) {
            report.episode_log.push_back(episode);
        }
        for (std::uint32_t t = 0; t < config.duration; ++t) {
            const Frame& frame = episode.frames[t];
            for (std::uint32_t i = 0; i < bottom; ++i) {
                tokens[i] = Token{frame[i]};
            }
            TickFrame tf = sched.step(tokens);
            if (config.trace) {
                report.traced.push_back(TracedTick{ep, std::move(tf)});
            }
        }

        const std::vector<Symbol> finals = sched.end_episode(ep);
        EpisodeRecord rec;
        rec.episode = ep;
        rec.phase = phase;
        rec.label = label;
        rec.top_code = finals[topo.top_agent()];
        rec.layer_rates.resize(config.layers, 0.0);

        // Correctness is judged against the mapping learned from episodes
        // before this one: a code never emitted in the trailing window maps
        // to unknown and counts as incorrect.
        for (std::uint32_t layer = 1; layer <= config.layers; ++layer) {
            const std::uint32_t offset = topo.dims[layer - 1].offset;
            std::uint32_t active = 0;
            std::uint32_t correct = 0;
            for (std::uint32_t i = 0; i < topo.layer_size(layer); ++i) {
                const std::uint32_t id = offset + i;
                if (sched.agent(id).standby()) {
                    continue;
                }
                ++active;
                const auto mapped =
                    mapped_label(history[id], config.label_window, finals[id]);
                if (mapped && *mapped == label) {
                    ++correct;
                }
            }
            rec.layer_rates[layer - 1] =
                active == 0 ? 0.0 : static_cast<double>(correct) / active;
        }
        const auto top_mapped =
            mapped_label(history[topo.top_agent()], config.label_window, rec.top_code);
        rec.top_correct = top_mapped && *top_mapped == label;
        report.records.push_back(std::move(rec));

        for (std::uint32_t id = 0; id < topo.total_agents(); ++id) {
            if (!sched.agent(id).standby()) {
                history[id].push_back(CodeLabel{finals[id], label});
            }
        }
    }

    const auto& top_history = history[topo.top_agent()];
    for (const auto& [code, label] : map_clusters_to_labels(top_history, config.label_window)) {
        report.final_top_mapping.emplace_back(code, behavior_char(label));
    }
    report.feedback_deliveries = sched.feedback_deliveries();
    report.layer_cluster_counts.assign(config.layers, 0);
    for (std::uint32_t id = 0; id < topo.total_agents(); ++id) {
        report.layer_cluster_counts[topo.layer_of(id) - 1] +=
            static_cast<std::uint32_t>(sched.agent(id).store().size());
    }
    return report;
}

std::vector<double> correct_rate_series(const RunReport& report, std::uint32_t layer,
                                        std::uint32_t window) {
    if (window < 1) {
        throw config_error("window must be >= 1");
    }
    const std::size_t n = report.records.size();
    if (window > n) {
        throw config_error("window exceeds the number of episodes");
    }
    if (layer < 1 || layer > report.config.layers) {
        throw config_error("layer out of range");
    }
    std::vector<double> series;
    series.reserve(n - window + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += report.records[i].layer_rates[layer - 1];
        if (i + 1 >= window) {
            series.push_back(sum / window);
            sum -= report.records[i + 1 - window].layer_rates[layer - 1];
        }
    }
    return series;
}

double top_rate_over(const RunReport& report, std::uint32_t first, std::uint32_t last) {
    double sum = 0.0;
    std::uint32_t count = 0;
    for (const auto& rec : report.records) {
        if (rec.episode >= first && rec.episode <= last) {
            sum += rec.top_correct ? 1.0 : 0.0;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / count;
}

std::vector<RunReport> run_many(const std::vector<ProtocolConfig>& configs, bool parallel) {
    std::vector<RunReport> reports(configs.size());
    const std::int64_t n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for if (parallel) schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        reports[i] = run_protocol(configs[i]);
    }
    return reports;
}

}  // namespace seqpyr
