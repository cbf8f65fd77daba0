#include "seqpyr/report.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqpyr/errors.hpp"

namespace seqpyr {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string join_u32(const std::vector<std::uint32_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(values[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += fmt_double(values[i]);
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw config_error("invalid integer for " + what + ": '" + s + "'");
    }
    return v;
}

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw config_error("invalid number for " + what + ": '" + s + "'");
    }
    return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    throw config_error("invalid boolean for " + what + ": '" + s + "'");
}

std::pair<std::uint32_t, std::uint32_t> parse_dims(const std::string& s,
                                                   const std::string& what) {
    const auto xpos = s.find('x');
    if (xpos == std::string::npos) {
        throw config_error("expected WxH for " + what + ", got '" + s + "'");
    }
    return {static_cast<std::uint32_t>(parse_u64(s.substr(0, xpos), what)),
            static_cast<std::uint32_t>(parse_u64(s.substr(xpos + 1), what))};
}

}  // namespace

std::string emit_config(const ProtocolConfig& c) {
    std::ostringstream os;
    os << "episodes = " << c.total_episodes << "\n";
    os << "warmup = " << c.warmup << "\n";
    os << "inject_at = " << c.inject_at << "\n";
    os << "seed = " << c.seed << "\n";
    os << "grid = " << c.grid_w << "x" << c.grid_h << "\n";
    os << "fan_in = " << c.fan_w << "x" << c.fan_h << "\n";
    os << "layers = " << c.layers << "\n";
    os << "duration = " << c.duration << "\n";
    os << "noise = " << fmt_double(c.noise_p) << "\n";
    os << "theta = " << fmt_double(c.theta) << "\n";
    os << "layer_thetas = " << join_doubles(c.layer_thetas) << "\n";
    os << "hint_margin = " << fmt_double(c.hint_margin) << "\n";
    os << "merge_rule = " << (c.merge_rule == MergeRule::Replace ? "replace" : "backbone")
       << "\n";
    os << "feedback = " << (c.feedback_enabled ? "true" : "false") << "\n";
    os << "adversarial = " << join_u32(c.adversarial) << "\n";
    os << "label_window = " << c.label_window << "\n";
    os << "parallel = " << (c.parallel ? "true" : "false") << "\n";
    os << "trace = " << (c.trace ? "true" : "false") << "\n";
    os << "log_episodes = " << (c.log_episodes ? "true" : "false") << "\n";
    return os.str();
}

ProtocolConfig parse_config(const std::string& text) {
    ProtocolConfig c;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw config_error("expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "episodes") {
            c.total_episodes = static_cast<std::uint32_t>(parse_u64(value, key));
        } else if (key == "warmup") {
            c.warmup = static_cast<std::uint32_t>(parse_u64(value, key));
        } else if (key == "inject_at") {
            c.inject_at = static_cast<std::uint32_t>(parse_u64(value, key));
        } else if (key == "seed") {
            c.seed = parse_u64(value, key);
        } else if (key == "grid") {
            std::tie(c.grid_w, c.grid_h) = parse_dims(value, key);
        } else if (key == "fan_in") {
            std::tie(c.fan_w, c.fan_h) = parse_dims(value, key);
        } else if (key == "layers") {
            c.layers = static_cast<std::uint32_t>(parse_u64(value, key));
        } else if (key == "duration") {
            c.duration = static_cast<std::uint32_t>(parse_u64(value, key));
        } else if (key == "noise") {
            c.noise_p = parse_double(value, key);
        } else if (key == "theta") {
            c.theta = parse_double(value, key);
        } else if (key == "layer_thetas") {
            c.layer_thetas.clear();
            if (!value.empty()) {
                for (const auto& part : split(value, ',')) {
                    c.layer_thetas.push_back(parse_double(trim(part), key));
                }
            }
        } else if (key == "hint_margin") {
            c.hint_margin = parse_double(value, key);
        } else if (key == "merge_rule") {
            if (value == "replace") {
                c.merge_rule = MergeRule::Replace;
            } else if (value == "backbone") {
                c.merge_rule = MergeRule::LcsBackbone;
            } else {
                throw config_error("merge_rule must be 'replace' or 'backbone'");
            }
        } else if (key == "feedback") {
            c.feedback_enabled = parse_bool(value, key);
        } else if (key == "adversarial") {
            c.adversarial.clear();
            if (!value.empty()) {
                for (const auto& part : split(value, ',')) {
                    c.adversarial.push_back(
                        static_cast<std::uint32_t>(parse_u64(trim(part), key)));
                }
            }
        } else if (key == "label_window") {
            c.label_window = static_cast<std::uint32_t>(parse_u64(value, key));
        } else if (key == "parallel") {
            c.parallel = parse_bool(value, key);
        } else if (key == "trace") {
            c.trace = parse_bool(value, key);
        } else if (key == "log_episodes") {
            c.log_episodes = parse_bool(value, key);
        } else {
            throw config_error("unknown config key '" + key + "'");
        }
    }
    return c;
}

ProtocolConfig load_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw config_error("cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

std::string csv_text(const RunReport& report) {
    std::ostringstream os;
    os << "episode,phase,label";
    for (std::uint32_t k = 1; k <= report.config.layers; ++k) {
        os << ",layer" << k << "_rate";
    }
    os << ",top_correct\n";
    for (const auto& rec : report.records) {
        os << rec.episode << ',' << rec.phase << ',' << behavior_char(rec.label);
        for (double r : rec.layer_rates) {
            os << ',' << fmt_fixed6(r);
        }
        os << ',' << (rec.top_correct ? 1 : 0) << "\n";
    }
    return os.str();
}

std::vector<std::uint32_t> parse_trace_filter(const std::string& filter,
                                              const PyramidTopology& topo) {
    if (trim(filter).empty()) {
        throw config_error("empty trace filter");
    }
    auto bad = [&topo](const std::string& detail) {
        std::string msg = "invalid trace filter (" + detail + "); valid agents:";
        for (std::uint32_t k = 1; k <= topo.layers; ++k) {
            msg += " layer" + std::to_string(k) + ":0-" +
                   std::to_string(topo.layer_size(k) - 1);
        }
        return config_error(msg);
    };
    std::vector<std::uint32_t> ids;
    for (const auto& raw : split(filter, ',')) {
        const std::string part = trim(raw);
        if (part.rfind("layer", 0) != 0) {
            throw bad("expected 'layerK:range' in '" + part + "'");
        }
        const auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw bad("missing ':' in '" + part + "'");
        }
        const std::uint32_t layer =
            static_cast<std::uint32_t>(parse_u64(part.substr(5, colon - 5), "layer"));
        if (layer < 1 || layer > topo.layers) {
            throw bad("layer " + std::to_string(layer) + " out of range");
        }
        const std::string range = part.substr(colon + 1);
        const auto dash = range.find('-');
        std::uint32_t lo, hi;
        if (dash == std::string::npos) {
            lo = hi = static_cast<std::uint32_t>(parse_u64(range, "agent index"));
        } else {
            lo = static_cast<std::uint32_t>(parse_u64(range.substr(0, dash), "agent index"));
            hi = static_cast<std::uint32_t>(parse_u64(range.substr(dash + 1), "agent index"));
        }
        if (lo > hi || hi >= topo.layer_size(layer)) {
            throw bad("index range " + range + " out of range for layer " +
                      std::to_string(layer));
        }
        for (std::uint32_t i = lo; i <= hi; ++i) {
            ids.push_back(topo.dims[layer - 1].offset + i);
        }
    }
    return ids;
}

std::string trace_text(const RunReport& report, const std::vector<std::uint32_t>& agents) {
    const PyramidTopology topo = build_pyramid(report.config.grid_w, report.config.grid_h,
                                               report.config.fan_w, report.config.fan_h,
                                               report.config.layers);
    std::ostringstream os;
    os << "episode,tick,agent,layer,index,code,hint\n";
    for (const auto& traced : report.traced) {
        for (std::uint32_t id : agents) {
            os << traced.episode << ',' << traced.frame.tick << ',' << id << ','
               << topo.layer_of(id) << ',' << topo.index_in_layer(id) << ','
               << traced.frame.upward_codes[id] << ',';
            if (traced.frame.downward_hints[id]) {
                os << *traced.frame.downward_hints[id];
            }
            os << "\n";
        }
    }
    return os.str();
}

std::string manifest_text(const RunReport& report,
                          const std::vector<std::string>& output_files,
                          double wall_seconds) {
    nlohmann::ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["seed"] = report.config.seed;
    j["config"] = emit_config(report.config);
    j["outputs"] = output_files;
    j["wall_seconds"] = wall_seconds;

    nlohmann::ordered_json summary;
    summary["episodes"] = report.records.size();
    const std::uint32_t total = report.config.total_episodes;
    const std::uint32_t first = total > 99 ? total - 99 : 1;
    summary["top_rate_last_100"] = top_rate_over(report, first, total);
    summary["feedback_deliveries"] = report.feedback_deliveries;
    nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
    for (const auto& [code, label] : report.final_top_mapping) {
        mapping[std::to_string(code)] = std::string(1, label);
    }
    summary["final_top_mapping"] = mapping;
    j["summary"] = summary;
    return j.dump(2) + "\n";
}

void write_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw io_error("cannot create directory " + path.parent_path().string() + ": " +
                           ec.message());
        }
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw io_error("cannot open " + tmp.string() + " for writing");
        }
        os << content;
        os.flush();
        if (!os) {
            fs::remove(tmp, ec);
            throw io_error("failed writing " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw io_error("cannot move output into place at " + path.string());
    }
}

namespace {

struct CliValues {
    std::string config_path;
    std::uint64_t seed = 0;
    std::uint32_t episodes = 0, warmup = 0, inject_at = 0, layers = 0, duration = 0;
    std::uint32_t label_window = 0;
    std::string grid, fan_in, layer_thetas, adversarial, trace_filter, seeds, merge_rule;
    double theta = 0.0, hint_margin = 0.0, noise = 0.0;
    bool no_feedback = false, parallel = false, log_episodes = false;
    std::string out_dir = "out";
};

// Applies only the flags the user actually passed on top of the config.
void apply_flags(const CLI::App& app, const CliValues& v, ProtocolConfig& c) {
    if (app.count("--seed")) c.seed = v.seed;
    if (app.count("--episodes")) c.total_episodes = v.episodes;
    if (app.count("--warmup")) c.warmup = v.warmup;
    if (app.count("--inject-at")) c.inject_at = v.inject_at;
    if (app.count("--layers")) c.layers = v.layers;
    if (app.count("--duration")) c.duration = v.duration;
    if (app.count("--label-window")) c.label_window = v.label_window;
    if (app.count("--grid")) std::tie(c.grid_w, c.grid_h) = parse_dims(v.grid, "--grid");
    if (app.count("--fan-in")) std::tie(c.fan_w, c.fan_h) = parse_dims(v.fan_in, "--fan-in");
    if (app.count("--theta")) c.theta = v.theta;
    if (app.count("--hint-margin")) c.hint_margin = v.hint_margin;
    if (app.count("--noise")) c.noise_p = v.noise;
    if (app.count("--layer-thetas")) {
        c.layer_thetas.clear();
        for (const auto& part : split(v.layer_thetas, ',')) {
            c.layer_thetas.push_back(parse_double(trim(part), "--layer-thetas"));
        }
    }
    if (app.count("--merge-rule")) {
        if (v.merge_rule == "replace") {
            c.merge_rule = MergeRule::Replace;
        } else if (v.merge_rule == "backbone") {
            c.merge_rule = MergeRule::LcsBackbone;
        } else {
            throw config_error("--merge-rule must be 'replace' or 'backbone'");
        }
    }
    if (app.count("--adversarial")) {
        c.adversarial.clear();
        for (const auto& part : split(v.adversarial, ',')) {
            c.adversarial.push_back(
                static_cast<std::uint32_t>(parse_u64(trim(part), "--adversarial")));
        }
    }
    if (v.no_feedback) c.feedback_enabled = false;
    if (v.parallel) c.parallel = true;
    if (v.log_episodes) c.log_episodes = true;
    if (app.count("--trace")) c.trace = true;
}

// Runs one configured simulation and writes its outputs under dir.
void run_and_emit(const ProtocolConfig& config, const fs::path& dir,
                  const std::string& trace_filter, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport report = run_protocol(config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::string> outputs;
    outputs.push_back((dir / "run.csv").string());
    write_atomic(dir / "run.csv", csv_text(report));

    if (config.trace) {
        const PyramidTopology topo =
            build_pyramid(config.grid_w, config.grid_h, config.fan_w, config.fan_h,
                          config.layers);
        const auto agents = parse_trace_filter(trace_filter, topo);
        outputs.push_back((dir / "trace.csv").string());
        write_atomic(dir / "trace.csv", trace_text(report, agents));
    }
    if (config.log_episodes) {
        std::ostringstream log;
        for (std::size_t i = 0; i < report.episode_log.size(); ++i) {
            write_episode_log(log, report.episode_log[i], static_cast<std::uint32_t>(i + 1));
        }
        outputs.push_back((dir / "episodes.log").string());
        write_atomic(dir / "episodes.log", log.str());
    }

    outputs.push_back((dir / "run.json").string());
    write_atomic(dir / "run.json", manifest_text(report, outputs, wall));

    const std::uint32_t total = config.total_episodes;
    const std::uint32_t first = total > 99 ? total - 99 : 1;
    out << "seed " << config.seed << ": top-agent correct rate over last "
        << (total - first + 1) << " episodes = " << fmt_fixed6(top_rate_over(report, first, total))
        << "; outputs in " << dir.string() << "\n";
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"prediction-driven pyramid clustering of temporal sequences"};
    app.name("seqpyramid");

    CliValues v;
    app.add_option("--config", v.config_path, "config file (key = value lines)");
    app.add_option("--seed", v.seed, "run seed");
    app.add_option("--episodes", v.episodes, "total episodes (default 500)");
    app.add_option("--warmup", v.warmup, "deterministic warmup episodes (default 32)");
    app.add_option("--inject-at", v.inject_at,
                   "episode after which the third behavior appears (default 200)");
    app.add_option("--grid", v.grid, "bottom grid WxH (default 8x8)");
    app.add_option("--fan-in", v.fan_in, "children per parent WxH (default 2x2)");
    app.add_option("--layers", v.layers, "pyramid layers (default 4)");
    app.add_option("--theta", v.theta, "match threshold (default 0.8)");
    app.add_option("--layer-thetas", v.layer_thetas,
                   "per-layer match thresholds, comma separated, bottom first");
    app.add_option("--hint-margin", v.hint_margin, "feedback tie margin (default 0.1)");
    app.add_option("--noise", v.noise, "per-cell flip probability (default 0.0025)");
    app.add_option("--duration", v.duration, "ticks per episode (default 16)");
    app.add_option("--label-window", v.label_window,
                   "episodes in the code->label mapping window (default 50)");
    app.add_option("--merge-rule", v.merge_rule, "prototype update: replace|backbone");
    app.add_flag("--no-feedback", v.no_feedback, "disable all downward feedback");
    app.add_option("--adversarial", v.adversarial,
                   "agent ids that always report a wrong code, comma separated");
    app.add_option("--trace", v.trace_filter,
                   "emit per-tick trace for agents, e.g. layer1:1-4,layer2:0");
    app.add_option("--out", v.out_dir, "output directory (default out)");
    app.add_option("--seeds", v.seeds, "seed sweep A..B, one run per seed");
    app.add_flag("--parallel", v.parallel, "parallel within-layer passes and sweep runs");
    app.add_flag("--log-episodes", v.log_episodes, "write generated episodes to episodes.log");

    try {
        // CLI11 consumes the vector back to front.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        ProtocolConfig config;
        if (!v.config_path.empty()) {
            config = load_config_file(v.config_path);
        }
        apply_flags(app, v, config);
        validate(config);

        if (app.count("--seeds")) {
            const auto dots = v.seeds.find("..");
            if (dots == std::string::npos) {
                throw config_error("--seeds expects A..B, got '" + v.seeds + "'");
            }
            const std::uint64_t a = parse_u64(trim(v.seeds.substr(0, dots)), "--seeds");
            const std::uint64_t b = parse_u64(trim(v.seeds.substr(dots + 2)), "--seeds");
            if (a > b) {
                throw config_error("--seeds range is empty");
            }
            std::vector<ProtocolConfig> configs;
            for (std::uint64_t s = a; s <= b; ++s) {
                ProtocolConfig c = config;
                c.seed = s;
                configs.push_back(c);
            }
            const auto reports_start = std::chrono::steady_clock::now();
            const std::vector<RunReport> reports = run_many(configs, config.parallel);
            const double wall = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - reports_start)
                                    .count();
            for (const auto& report : reports) {
                const fs::path dir =
                    fs::path(v.out_dir) / ("seed_" + std::to_string(report.config.seed));
                std::vector<std::string> outputs{(dir / "run.csv").string(),
                                                 (dir / "run.json").string()};
                write_atomic(dir / "run.csv", csv_text(report));
                write_atomic(dir / "run.json",
                             manifest_text(report, outputs, wall / reports.size()));
                const std::uint32_t total = report.config.total_episodes;
                const std::uint32_t first = total > 99 ? total - 99 : 1;
                out << "seed " << report.config.seed
                    << ": top-agent correct rate over last " << (total - first + 1)
                    << " episodes = "
                    << fmt_fixed6(top_rate_over(report, first, total)) << "\n";
            }
        } else {
            run_and_emit(config, v.out_dir, v.trace_filter, out);
        }
        return 0;
    } catch (const config_error& e) {
        err << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        err << "io error: " << e.what() << "\n";
        return 4;
    } catch (const fs::filesystem_error& e) {
        err << "io error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace seqpyr
