#include <doctest.h>

#include "seqpyr/errors.hpp"
#include "seqpyr/experiment.hpp"

using namespace seqpyr;

namespace {

ProtocolConfig small_config() {
    ProtocolConfig c;
    c.total_episodes = 80;
    c.warmup = 8;
    c.inject_at = 40;
    c.seed = 7;
    return c;
}

}  // namespace

TEST_CASE("default protocol produces 500 records with phases 32/168/300") {
    ProtocolConfig c;
    const RunReport r = run_protocol(c);
    REQUIRE(r.records.size() == 500);
    std::uint32_t phase_counts[4] = {0, 0, 0, 0};
    for (const auto& rec : r.records) {
        REQUIRE(rec.phase >= 1);
        REQUIRE(rec.phase <= 3);
        ++phase_counts[rec.phase];
        CHECK(rec.layer_rates.size() == 4);
        for (double rate : rec.layer_rates) {
            CHECK(rate >= 0.0);
            CHECK(rate <= 1.0);
        }
        // The third behavior never appears before the injection point.
        if (rec.episode <= 200) {
            CHECK(rec.label != Behavior::TypeC);
        }
        // Warmup alternates deterministically, starting with A.
        if (rec.phase == 1) {
            CHECK(rec.label ==
                  (rec.episode % 2 == 1 ? Behavior::TypeA : Behavior::TypeB));
        }
    }
    CHECK(phase_counts[1] == 32);
    CHECK(phase_counts[2] == 168);
    CHECK(phase_counts[3] == 300);
}

TEST_CASE("identical configs reproduce identical reports") {
    const ProtocolConfig c = small_config();
    const RunReport a = run_protocol(c);
    const RunReport b = run_protocol(c);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].label == b.records[i].label);
        CHECK(a.records[i].top_code == b.records[i].top_code);
        CHECK(a.records[i].layer_rates == b.records[i].layer_rates);
        CHECK(a.records[i].top_correct == b.records[i].top_correct);
    }
    CHECK(a.final_top_mapping == b.final_top_mapping);
}

TEST_CASE("parallel execution reproduces the serial report") {
    ProtocolConfig c = small_config();
    const RunReport serial = run_protocol(c);
    c.parallel = true;
    const RunReport parallel = run_protocol(c);
    REQUIRE(serial.records.size() == parallel.records.size());
    for (std::size_t i = 0; i < serial.records.size(); ++i) {
        CHECK(serial.records[i].top_code == parallel.records[i].top_code);
        CHECK(serial.records[i].layer_rates == parallel.records[i].layer_rates);
    }
}

TEST_CASE("the ablated run replays identical inputs with zero feedback") {
    ProtocolConfig c = small_config();
    const RunReport base = run_protocol(c);
    c.feedback_enabled = false;
    const RunReport ablated = run_protocol(c);
    CHECK(ablated.feedback_deliveries == 0);
    CHECK(base.feedback_deliveries > 0);
    for (std::size_t i = 0; i < base.records.size(); ++i) {
        CHECK(base.records[i].label == ablated.records[i].label);
        CHECK(base.records[i].phase == ablated.records[i].phase);
    }
}

TEST_CASE("a single-episode run reports no mapped correctness yet") {
    // Correctness is judged against the pre-episode mapping, so the very
    // first emission of any code counts as unknown.
    ProtocolConfig c;
    c.total_episodes = 1;
    c.warmup = 0;
    c.inject_at = 0;
    const RunReport r = run_protocol(c);
    REQUIRE(r.records.size() == 1);
    CHECK(!r.records[0].top_correct);
    for (double rate : r.records[0].layer_rates) {
        CHECK(rate == 0.0);
    }
    // The final mapping still reflects the episode itself.
    REQUIRE(r.final_top_mapping.size() == 1);
}

TEST_CASE("repeated stable codes become correct once the pyramid bootstraps") {
    ProtocolConfig c;
    c.total_episodes = 14;
    c.warmup = 14;
    c.inject_at = 14;
    c.noise_p = 0.0;
    const RunReport r = run_protocol(c);
    // Episodes alternate A B A B... Codes churn while the layers bootstrap
    // on each other's young code spaces; without noise both behaviors emit
    // stable top codes from around the fifth repetition.
    CHECK(!r.records[0].top_correct);
    CHECK(!r.records[1].top_correct);
    for (std::size_t i = 10; i < 14; ++i) {
        CHECK(r.records[i].top_correct);
    }
}

TEST_CASE("mapping majority, tie, and window rules") {
    using CL = CodeLabel;
    std::vector<CL> history;
    // Code 5 emitted for A,A,A then B: majority A.
    history = {{5, Behavior::TypeA}, {5, Behavior::TypeA}, {5, Behavior::TypeA},
               {5, Behavior::TypeB}};
    CHECK(mapped_label(history, 50, 5) == Behavior::TypeA);

    // 2xA and 2xB with A seen first: tie goes to A.
    history = {{5, Behavior::TypeA}, {5, Behavior::TypeB}, {5, Behavior::TypeB},
               {5, Behavior::TypeA}};
    CHECK(mapped_label(history, 50, 5) == Behavior::TypeA);

    // Outside the trailing window the old evidence is forgotten.
    history.clear();
    history.push_back({5, Behavior::TypeA});
    for (int i = 0; i < 10; ++i) {
        history.push_back({6, Behavior::TypeB});
    }
    CHECK(mapped_label(history, 10, 5) == std::nullopt);
    CHECK(mapped_label(history, 11, 5) == Behavior::TypeA);

    // Codes never emitted are unmapped.
    CHECK(mapped_label(history, 50, 9) == std::nullopt);
}

TEST_CASE("correct_rate_series windows") {
    ProtocolConfig c = small_config();
    const RunReport r = run_protocol(c);

    const auto raw = correct_rate_series(r, 1, 1);
    REQUIRE(raw.size() == r.records.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(raw[i] == doctest::Approx(r.records[i].layer_rates[0]));
    }

    const auto smoothed = correct_rate_series(r, 1, 20);
    CHECK(smoothed.size() == r.records.size() - 19);
    double head = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        head += r.records[i].layer_rates[0];
    }
    CHECK(smoothed[0] == doctest::Approx(head / 20.0));

    CHECK_THROWS_AS(correct_rate_series(r, 1, 0), config_error);
    CHECK_THROWS_AS(correct_rate_series(r, 1, 1000), config_error);
    CHECK_THROWS_AS(correct_rate_series(r, 9, 10), config_error);
}

TEST_CASE("config validation rejects bad field combinations") {
    ProtocolConfig c;
    c.warmup = 300;
    c.inject_at = 200;
    CHECK_THROWS_AS(validate(c), config_error);

    c = ProtocolConfig{};
    c.total_episodes = 0;
    CHECK_THROWS_AS(validate(c), config_error);

    c = ProtocolConfig{};
    c.noise_p = 0.7;
    CHECK_THROWS_AS(validate(c), config_error);

    c = ProtocolConfig{};
    c.layers = 3;  // 8x8 with 2x2 fan-in cannot reach one top agent
    CHECK_THROWS_AS(validate(c), config_error);

    c = ProtocolConfig{};
    c.adversarial = {999};
    CHECK_THROWS_AS(validate(c), config_error);

    c = ProtocolConfig{};
    c.theta = 0.0;
    CHECK_THROWS_AS(validate(c), config_error);
}

TEST_CASE("effective thetas extend the last override to deeper layers") {
    ProtocolConfig c;
    c.layers = 6;
    c.grid_w = c.grid_h = 32;
    c.theta = 0.7;
    c.layer_thetas = {0.8, 0.9};
    const auto thetas = effective_thetas(c);
    REQUIRE(thetas.size() == 6);
    CHECK(thetas[0] == 0.8);
    CHECK(thetas[1] == 0.9);
    CHECK(thetas[5] == 0.9);

    c.layer_thetas.clear();
    const auto flat = effective_thetas(c);
    for (double t : flat) {
        CHECK(t == 0.7);
    }
}

TEST_CASE("an adversarial agent drags its layer's correctness down") {
    ProtocolConfig base = small_config();
    ProtocolConfig faulty = base;
    faulty.adversarial = {3};
    const RunReport rb = run_protocol(base);
    const RunReport rf = run_protocol(faulty);
    double mean_base = 0.0, mean_faulty = 0.0;
    for (std::size_t i = 0; i < rb.records.size(); ++i) {
        mean_base += rb.records[i].layer_rates[0];
        mean_faulty += rf.records[i].layer_rates[0];
    }
    CHECK(mean_faulty < mean_base);
}

TEST_CASE("trace capture records every tick of the run") {
    ProtocolConfig c = small_config();
    c.total_episodes = 10;
    c.inject_at = 9;
    c.trace = true;
    const RunReport r = run_protocol(c);
    CHECK(r.traced.size() == 10u * c.duration);
    CHECK(r.traced.front().episode == 1);
    CHECK(r.traced.back().episode == 10);
}
