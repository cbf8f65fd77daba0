// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Trend criteria run the default protocol over seeds 1-10.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "seqpyr/experiment.hpp"
#include "seqpyr/report.hpp"
#include "seqpyr/scheduler.hpp"

using namespace seqpyr;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report_line(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

double stddev(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. lcs_length equals brute-force subsequence enumeration.

bool is_subsequence(const std::vector<Symbol>& sub, const std::vector<Symbol>& seq) {
    std::size_t i = 0;
    for (Symbol s : seq) {
        if (i < sub.size() && sub[i] == s) ++i;
    }
    return i == sub.size();
}

std::size_t brute_lcs(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
        std::vector<Symbol> sub;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (mask & (1u << i)) sub.push_back(a[i]);
        }
        if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
    }
    return best;
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    int checked = 0;
    bool ok = true;
    for (int trial = 0; trial < 250; ++trial) {
        std::vector<Symbol> a(rng() % 9), b(rng() % 9);
        for (auto& s : a) s = static_cast<Symbol>(1 + rng() % 3);
        for (auto& s : b) s = static_cast<Symbol>(1 + rng() % 3);
        if (lcs_length(a, b) != brute_lcs(a, b)) {
            ok = false;
            break;
        }
        ++checked;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "lcs_length == brute force on " << checked << " random pairs in " << std::fixed
      << secs << "s";
    report_line(1, ok && checked >= 200 && secs < 1.0, d.str());
}

// ---------------------------------------------------------------------------
// 2. Three-cluster walkthrough: ambiguous prefixes tie to the smallest id
// without hints; hints steer the per-tick stream to 1,1,1,2,2,2,3,3,3.

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    auto seq = [](const char* s) {
        std::vector<Symbol> out;
        for (const char* p = s; *p; ++p) out.push_back(static_cast<Symbol>(*p - 'A' + 1));
        return out;
    };
    PrototypeStore store;
    store.create(seq("ABC"), 1);
    store.create(seq("ABD"), 2);
    store.create(seq("ADD"), 3);

    const auto input = seq("ABCABDADD");
    bool ok = true;

    // Per-tick recognition in 3-symbol windows, no hints: every "AB" prefix
    // must tie clusters 1 and 2 with the id tie-break picking 1.
    std::vector<Symbol> unhinted;
    for (std::size_t w = 0; w < 3; ++w) {
        std::vector<Symbol> buffer;
        for (std::size_t t = 0; t < 3; ++t) {
            buffer.push_back(input[w * 3 + t]);
            unhinted.push_back(recognize(store, buffer, std::nullopt).cluster_id);
            if (buffer == seq("AB")) {
                const double s1 = similarity_stream(buffer, store.find(1)->sequence);
                const double s2 = similarity_stream(buffer, store.find(2)->sequence);
                ok = ok && s1 == s2 && unhinted.back() == 1;
            }
        }
    }
    ok = ok && unhinted[0] == 1 && unhinted[1] == 1 && unhinted[2] == 1;

    // Hinted: 2 before the second window, 3 before the third.
    const std::vector<std::optional<Symbol>> window_hints = {std::nullopt, 2, 3};
    std::vector<Symbol> hinted;
    for (std::size_t w = 0; w < 3; ++w) {
        std::vector<Symbol> buffer;
        for (std::size_t t = 0; t < 3; ++t) {
            buffer.push_back(input[w * 3 + t]);
            hinted.push_back(recognize(store, buffer, window_hints[w]).cluster_id);
        }
    }
    const std::vector<Symbol> expected = {1, 1, 1, 2, 2, 2, 3, 3, 3};
    ok = ok && hinted == expected;

    std::ostringstream got;
    for (Symbol s : hinted) got << s;
    report_line(2, ok && seconds_since(t0) < 1.0,
                "hinted per-tick stream " + got.str() + " (expected 111222333)");
}

// ---------------------------------------------------------------------------
// Shared runs for criteria 3-5.

struct TrendRuns {
    std::vector<RunReport> with_feedback;     // seeds 1..10
    std::vector<RunReport> without_feedback;  // seeds 1..10
    std::vector<RunReport> adversarial;       // seeds 1..10, bottom agent 0 faulty
    double seconds_for_20 = 0.0;
};

TrendRuns run_trends() {
    TrendRuns out;
    std::vector<ProtocolConfig> pair_configs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ProtocolConfig fb;
        fb.seed = seed;
        fb.parallel = false;  // run_many parallelizes across runs
        pair_configs.push_back(fb);
        ProtocolConfig nf = fb;
        nf.feedback_enabled = false;
        pair_configs.push_back(nf);
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto reports = run_many(pair_configs, true);
    out.seconds_for_20 = seconds_since(t0);
    for (std::size_t i = 0; i < reports.size(); i += 2) {
        out.with_feedback.push_back(std::move(reports[i]));
        out.without_feedback.push_back(std::move(reports[i + 1]));
    }

    std::vector<ProtocolConfig> adv_configs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ProtocolConfig adv;
        adv.seed = seed;
        adv.adversarial = {0};
        adv_configs.push_back(adv);
    }
    out.adversarial = run_many(adv_configs, true);
    return out;
}

void criterion_3(const TrendRuns& runs) {
    int recovery = 0;
    int ablation = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        const double mid = top_rate_over(runs.with_feedback[i], 201, 300);
        const double late = top_rate_over(runs.with_feedback[i], 401, 500);
        const double late_nf = top_rate_over(runs.without_feedback[i], 401, 500);
        recovery += late > mid;
        ablation += late > late_nf;
    }
    std::ostringstream d;
    d << "post-injection recovery " << recovery << "/10, feedback beats ablation "
      << ablation << "/10, 20 runs in " << std::fixed << runs.seconds_for_20 << "s";
    report_line(3, recovery >= 8 && ablation >= 8 && runs.seconds_for_20 < 60.0, d.str());
}

void criterion_4(const TrendRuns& runs) {
    int ok_seeds = 0;
    std::ostringstream chains;
    for (const auto& report : runs.with_feedback) {
        std::vector<double> sd;
        for (std::uint32_t layer = 1; layer <= 4; ++layer) {
            sd.push_back(stddev(correct_rate_series(report, layer, 20)));
        }
        const bool ok = sd[0] >= sd[1] && sd[1] >= sd[2] && sd[2] >= sd[3] && sd[3] < sd[0];
        ok_seeds += ok;
    }
    std::ostringstream d;
    d << "smoothed-series deviation non-increasing layer1->4 in " << ok_seeds << "/10 seeds";
    report_line(4, ok_seeds >= 8, d.str());
}

void criterion_5(const TrendRuns& runs) {
    int contained = 0;
    int worst = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        int diffs = 0;
        for (std::size_t ep = 400; ep < 500; ++ep) {
            diffs += runs.with_feedback[i].records[ep].top_code !=
                     runs.adversarial[i].records[ep].top_code;
        }
        worst = std::max(worst, diffs);
        contained += diffs <= 5;
    }
    std::ostringstream d;
    d << "top codes differ in <=5 of episodes 401-500 in " << contained
      << "/10 seeds (worst " << worst << ")";
    report_line(5, contained >= 8, d.str());
}

// ---------------------------------------------------------------------------
// 6. Two-layer miniature with one late-informed child: feedback strictly
// reduces that child's within-episode code switches.

int miniature_switches(bool feedback) {
    const PyramidTopology topo = build_pyramid(2, 2, 2, 2, 2);
    SchedulerOptions opts;
    opts.feedback_enabled = feedback;
    Scheduler sched(topo, AgentConfig{}, opts);

    auto episode_tokens = [](std::uint32_t type, bool flips) {
        // Children 0-2 reveal the type from the first tick; child 3 shares
        // a prefix and becomes informative only over the last four ticks.
        std::vector<std::vector<Token>> ticks;
        for (std::uint32_t t = 0; t < 12; ++t) {
            std::uint32_t late = t < 8 ? 7 : type;
            if (flips && (t == 9 || t == 10)) {
                late = 1;  // noisy late symbols pointing at the other cluster
            }
            ticks.push_back({Token{type}, Token{type}, Token{type}, Token{late}});
        }
        return ticks;
    };

    std::uint32_t episode_id = 0;
    for (std::uint32_t round = 0; round < 4; ++round) {
        for (std::uint32_t type : {1u, 2u}) {
            for (const auto& tokens : episode_tokens(type, false)) {
                sched.step(tokens);
            }
            sched.end_episode(++episode_id);
        }
    }

    // Test episode: type 2 with two flipped late symbols.
    std::vector<Symbol> codes;
    for (const auto& tokens : episode_tokens(2, true)) {
        codes.push_back(sched.step(tokens).upward_codes[3]);
    }
    sched.end_episode(++episode_id);

    int switches = 0;
    for (std::size_t t = 1; t < codes.size(); ++t) {
        switches += codes[t] != codes[t - 1];
    }
    return switches;
}

void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    const int with_fb = miniature_switches(true);
    const int without_fb = miniature_switches(false);
    std::ostringstream d;
    d << "late-informed child switches " << with_fb << " times with feedback vs "
      << without_fb << " without";
    report_line(6, with_fb < without_fb && seconds_since(t0) < 1.0, d.str());
}

// ---------------------------------------------------------------------------
// 7. Determinism of the CLI outputs.

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::vector<std::string> label_columns(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        std::size_t pos = 0;
        for (int commas = 0; commas < 3 && pos != std::string::npos; ++commas) {
            pos = line.find(',', pos + 1);
        }
        out.push_back(line.substr(0, pos));
    }
    return out;
}

void criterion_7() {
    const fs::path root =
        fs::temp_directory_path() / ("seqpyr_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
    std::ostringstream sink;
    const std::vector<std::string> base = {"--seed", "3"};
    auto invoke = [&](const std::string& dir, bool no_feedback) {
        std::vector<std::string> args = base;
        if (no_feedback) args.push_back("--no-feedback");
        args.push_back("--out");
        args.push_back((root / dir).string());
        return cli_run(args, sink, sink);
    };
    bool ok = invoke("a", false) == 0 && invoke("b", false) == 0 && invoke("c", true) == 0;
    const std::string a = slurp(root / "a" / "run.csv");
    const std::string b = slurp(root / "b" / "run.csv");
    const std::string c = slurp(root / "c" / "run.csv");
    const bool identical = ok && !a.empty() && a == b;
    const bool labels_match = ok && label_columns(a) == label_columns(c) && a != c;
    fs::remove_all(root);
    report_line(7, identical && labels_match,
                std::string("repeat run.csv byte-identical: ") +
                    (identical ? "yes" : "no") +
                    ", ablation keeps episode,phase,label columns: " +
                    (labels_match ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// 8. Standby semantics over a full run.

void criterion_8() {
    const PyramidTopology topo = build_pyramid(8, 8, 2, 2, 4);
    Scheduler sched(topo, AgentConfig{}, SchedulerOptions{});
    // Agent 9 has no live connection for the whole run.
    sched.agent(9).set_standby(true);
    const std::uint64_t hash_before = sched.agent(9).state_hash();

    const auto behaviors = default_behaviors(8, 8);
    ProtocolConfig defaults;
    std::vector<Token> tokens(64);
    std::mt19937_64 label_rng(99);
    for (std::uint32_t ep = 1; ep <= 500; ++ep) {
        const auto& behavior = behaviors[label_rng() % behaviors.size()];
        const TrafficEpisode episode =
            gen_traffic_episode(ep, behavior, 8, 8, defaults.duration, defaults.noise_p);
        for (std::uint32_t t = 0; t < defaults.duration; ++t) {
            for (std::uint32_t i = 0; i < 64; ++i) {
                tokens[i] = Token{episode.frames[t][i]};
            }
            sched.step(tokens);
        }
        sched.end_episode(ep);
    }
    const bool zero_ticks = sched.agent(9).ticks_processed() == 0;
    const bool unchanged = sched.agent(9).state_hash() == hash_before;
    std::ostringstream d;
    d << "standby agent processed " << sched.agent(9).ticks_processed()
      << " ticks, state hash " << (unchanged ? "unchanged" : "CHANGED");
    report_line(8, zero_ticks && unchanged, d.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    const TrendRuns runs = run_trends();
    criterion_3(runs);
    criterion_4(runs);
    criterion_5(runs);
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures > 0) {
        std::printf("%d of 8 criteria failed\n", failures);
        return 1;
    }
    std::printf("all 8 criteria passed\n");
    return 0;
}
