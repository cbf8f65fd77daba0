// Compares the serial reference scheduler with the OpenMP passes, and a
// serial seed sweep with a parallel one. Larger pyramids than the default
// experiment so the per-layer loops have enough work to share.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "seqpyr/experiment.hpp"
#include "seqpyr/scheduler.hpp"
#include "seqpyr/topology.hpp"

using namespace seqpyr;

namespace {

double time_run(const ProtocolConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport report = run_protocol(config);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Touch the result so the run cannot be elided.
    if (report.records.empty()) {
        std::fprintf(stderr, "empty report\n");
    }
    return dt;
}

ProtocolConfig pyramid_config(std::uint32_t grid, std::uint32_t layers,
                              std::uint32_t episodes) {
    ProtocolConfig c;
    c.grid_w = c.grid_h = grid;
    c.layers = layers;
    c.total_episodes = episodes;
    c.warmup = 8;
    c.inject_at = episodes / 2;
    c.seed = 7;
    return c;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("openmp disabled; parallel mode falls back to serial\n");
#endif

    struct Case {
        const char* name;
        std::uint32_t grid, layers, episodes;
    };
    const Case cases[] = {
        {"default 8x8 L4", 8, 4, 120},
        {"16x16 L5", 16, 5, 60},
        {"32x32 L6", 32, 6, 30},
    };

    std::printf("%-16s %12s %12s %8s\n", "scheduler", "serial s", "parallel s", "speedup");
    for (const Case& c : cases) {
        ProtocolConfig serial = pyramid_config(c.grid, c.layers, c.episodes);
        ProtocolConfig parallel = serial;
        parallel.parallel = true;
        const double ts = time_run(serial);
        const double tp = time_run(parallel);
        std::printf("%-16s %12.3f %12.3f %8.2f\n", c.name, ts, tp, ts / tp);
    }

    // Seed sweep: independent runs, parallelized across runs.
    std::vector<ProtocolConfig> sweep;
    for (std::uint64_t s = 1; s <= 8; ++s) {
        ProtocolConfig c = pyramid_config(8, 4, 200);
        c.seed = s;
        sweep.push_back(c);
    }
    const auto t0 = std::chrono::steady_clock::now();
    run_many(sweep, false);
    const double ts =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto t1 = std::chrono::steady_clock::now();
    run_many(sweep, true);
    const double tp =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    std::printf("%-16s %12.3f %12.3f %8.2f\n", "seed sweep x8", ts, tp, ts / tp);
    return 0;
}
