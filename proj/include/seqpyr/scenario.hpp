#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqpyr/sequence.hpp"

namespace seqpyr {

enum class Behavior : std::uint8_t { TypeA = 0, TypeB = 1, TypeC = 2 };

char behavior_char(Behavior b);
Behavior behavior_from_char(char c);

enum class Heading : std::uint8_t { East, South, West, North };

// Parametric grid path: entry cell, heading, optional single 90-degree
// turn, and speed expressed as ticks spent per cell (2 = half a cell per
// tick). A turning vehicle can dwell extra ticks on the turn cell before
// resuming. The footprint is the head cell plus the cell behind it.
struct Trajectory {
    std::int32_t entry_x = 0, entry_y = 0;
    Heading heading = Heading::East;
    bool has_turn = false;
    std::int32_t turn_x = 0, turn_y = 0;
    Heading turn_heading = Heading::East;
    std::uint32_t ticks_per_cell = 1;
    std::uint32_t turn_dwell = 0;
};

struct BehaviorType {
    Behavior label = Behavior::TypeA;
    Trajectory trajectory;
};

// Per-tick occupancy of the bottom grid, row-major, 0/1 per cell.
using Frame = std::vector<std::uint8_t>;

struct TrafficEpisode {
    Behavior label = Behavior::TypeA;
    std::uint32_t grid_w = 0, grid_h = 0;
    std::vector<Frame> frames;
};

// The sequence of in-bounds cells the trajectory visits, in visit order.
// Throws config_error when the entry or turn cell lies outside the grid.
std::vector<std::pair<std::int32_t, std::int32_t>> trajectory_cells(
    const Trajectory& t, std::uint32_t grid_w, std::uint32_t grid_h);

// Emits `repeats` episodes of the pattern, ids 1..repeats. Symbols are
// interned per pattern in first-seen order ('A' before 'B' yields 1, 2).
std::vector<Episode> gen_symbolic(const std::string& pattern, std::uint32_t repeats);

// Simulates one labeled episode: a 1x2-cell vehicle follows the behavior's
// trajectory; every cell token is independently flipped with probability
// noise_p. Deterministic per argument tuple.
TrafficEpisode gen_traffic_episode(std::uint64_t seed, const BehaviorType& behavior,
                                   std::uint32_t grid_w, std::uint32_t grid_h,
                                   std::uint32_t duration, double noise_p);

// The three stock behaviors: straight west-to-east along the middle row,
// straight north-to-south down the middle column, and west-to-east with a
// turn south at the grid center (sharing its prefix with the first).
// Requires a grid of at least 8x8.
std::vector<BehaviorType> default_behaviors(std::uint32_t grid_w, std::uint32_t grid_h);

// Line-oriented replay format: a header line per episode, then one line of
// 0/1 characters per row per tick, ticks separated by blank lines.
void write_episode_log(std::ostream& os, const TrafficEpisode& episode, std::uint32_t id);
std::vector<TrafficEpisode> read_episode_log(std::istream& is);

}  // namespace seqpyr
