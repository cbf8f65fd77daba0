#include "seqpyr/scenario.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "seqpyr/errors.hpp"
#include "seqpyr/rng.hpp"

namespace seqpyr {

char behavior_char(Behavior b) {
    switch (b) {
        case Behavior::TypeA: return 'A';
        case Behavior::TypeB: return 'B';
        case Behavior::TypeC: return 'C';
    }
    return '?';
}

Behavior behavior_from_char(char c) {
    switch (c) {
        case 'A': return Behavior::TypeA;
        case 'B': return Behavior::TypeB;
        case 'C': return Behavior::TypeC;
        default: throw config_error(std::string("unknown behavior label '") + c + "'");
    }
}

namespace {

std::pair<std::int32_t, std::int32_t> step_cell(std::int32_t x, std::int32_t y, Heading h) {
    switch (h) {
        case Heading::East: return {x + 1, y};
        case Heading::South: return {x, y + 1};
        case Heading::West: return {x - 1, y};
        case Heading::North: return {x, y - 1};
    }
    return {x, y};
}

bool in_grid(std::int32_t x, std::int32_t y, std::uint32_t w, std::uint32_t h) {
    return x >= 0 && y >= 0 && x < static_cast<std::int32_t>(w) &&
           y < static_cast<std::int32_t>(h);
}

}  // namespace

std::vector<std::pair<std::int32_t, std::int32_t>> trajectory_cells(
    const Trajectory& t, std::uint32_t grid_w, std::uint32_t grid_h) {
    if (!in_grid(t.entry_x, t.entry_y, grid_w, grid_h)) {
        throw config_error("trajectory entry cell lies outside the grid");
    }
    if (t.has_turn && !in_grid(t.turn_x, t.turn_y, grid_w, grid_h)) {
        throw config_error("trajectory turn cell lies outside the grid");
    }
    std::vector<std::pair<std::int32_t, std::int32_t>> cells;
    std::int32_t x = t.entry_x;
    std::int32_t y = t.entry_y;
    Heading heading = t.heading;
    bool turned = false;
    while (in_grid(x, y, grid_w, grid_h)) {
        cells.push_back({x, y});
        if (t.has_turn && !turned && x == t.turn_x && y == t.turn_y) {
            heading = t.turn_heading;
            turned = true;
        }
        auto [nx, ny] = step_cell(x, y, heading);
        x = nx;
        y = ny;
    }
    if (t.has_turn && !turned) {
        throw config_error("trajectory never reaches its turn cell");
    }
    return cells;
}

std::vector<Episode> gen_symbolic(const std::string& pattern, std::uint32_t repeats) {
    if (pattern.empty()) {
        throw config_error("gen_symbolic: empty pattern");
    }
    Alphabet alpha;
    std::vector<Symbol> symbols;
    symbols.reserve(pattern.size());
    for (char c : pattern) {
        symbols.push_back(alpha.intern(Token{static_cast<std::uint32_t>(c)}));
    }
    std::vector<Episode> episodes;
    episodes.reserve(repeats);
    for (std::uint32_t i = 1; i <= repeats; ++i) {
        episodes.push_back(Episode{i, symbols, std::nullopt});
    }
    return episodes;
}

TrafficEpisode gen_traffic_episode(std::uint64_t seed, const BehaviorType& behavior,
                                   std::uint32_t grid_w, std::uint32_t grid_h,
                                   std::uint32_t duration, double noise_p) {
    if (noise_p < 0.0 || noise_p >= 0.5) {
        throw config_error("noise probability must be in [0, 0.5)");
    }
    const Trajectory& traj = behavior.trajectory;
    if (traj.ticks_per_cell == 0) {
        throw config_error("ticks_per_cell must be positive");
    }
    const auto path = trajectory_cells(traj, grid_w, grid_h);

    TrafficEpisode ep;
    ep.label = behavior.label;
    ep.grid_w = grid_w;
    ep.grid_h = grid_h;
    ep.frames.reserve(duration);

    // Path index of the turn cell, for dwell timing.
    std::size_t turn_idx = path.size();
    if (traj.has_turn) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (path[i].first == traj.turn_x && path[i].second == traj.turn_y) {
                turn_idx = i;
                break;
            }
        }
    }

    std::mt19937_64 rng(splitmix64(seed));
    for (std::uint32_t t = 0; t < duration; ++t) {
        Frame frame(static_cast<std::size_t>(grid_w) * grid_h, 0);
        const std::uint32_t tpc = traj.ticks_per_cell;
        const std::uint32_t dwell = traj.has_turn ? traj.turn_dwell : 0;
        const std::uint32_t turn_end = static_cast<std::uint32_t>(turn_idx + 1) * tpc;
        std::size_t head;
        if (dwell == 0 || t < turn_end) {
            head = t / tpc;
        } else if (t < turn_end + dwell) {
            head = turn_idx;  // paused on the turn cell
        } else {
            head = (t - dwell) / tpc;
        }
        if (head < path.size()) {
            frame[path[head].second * grid_w + path[head].first] = 1;
        }
        if (head >= 1 && head - 1 < path.size()) {
            frame[path[head - 1].second * grid_w + path[head - 1].first] = 1;
        }
        if (noise_p > 0.0) {
            for (auto& cell : frame) {
                if (next_unit(rng) < noise_p) {
                    cell ^= 1;
                }
            }
        }
        ep.frames.push_back(std::move(frame));
    }
    return ep;
}

std::vector<BehaviorType> default_behaviors(std::uint32_t grid_w, std::uint32_t grid_h) {
    if (grid_w < 8 || grid_h < 8) {
        throw config_error("default behaviors need a grid of at least 8x8");
    }
    const std::int32_t mid_row = static_cast<std::int32_t>((grid_h - 1) / 2);
    const std::int32_t mid_col = static_cast<std::int32_t>((grid_w - 1) / 2);

    BehaviorType a;
    a.label = Behavior::TypeA;
    a.trajectory = {0, mid_row, Heading::East, false, 0, 0, Heading::East, 2, 0};

    BehaviorType b;
    b.label = Behavior::TypeB;
    b.trajectory = {mid_col, 0, Heading::South, false, 0, 0, Heading::South, 2, 0};

    // Same entry and row as TypeA until the grid center, then south after a
    // short dwell in the corner: the ambiguous-prefix case at system scale,
    // with a post-turn timing that differs from TypeB's.
    BehaviorType c;
    c.label = Behavior::TypeC;
    c.trajectory = {0, mid_row, Heading::East, true, mid_col, mid_row, Heading::South, 2, 3};

    return {a, b, c};
}

void write_episode_log(std::ostream& os, const TrafficEpisode& episode, std::uint32_t id) {
    os << "episode " << id << " label " << behavior_char(episode.label) << " grid "
       << episode.grid_w << "x" << episode.grid_h << " ticks " << episode.frames.size()
       << "\n";
    for (const Frame& frame : episode.frames) {
        for (std::uint32_t y = 0; y < episode.grid_h; ++y) {
            for (std::uint32_t x = 0; x < episode.grid_w; ++x) {
                os << (frame[y * episode.grid_w + x] ? '1' : '0');
            }
            os << "\n";
        }
        os << "\n";
    }
}

std::vector<TrafficEpisode> read_episode_log(std::istream& is) {
    std::vector<TrafficEpisode> episodes;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream header(line);
        std::string word;
        std::uint32_t id = 0;
        char label = 0;
        std::string grid;
        std::uint32_t ticks = 0;
        header >> word >> id >> word >> label >> word >> grid >> word >> ticks;
        if (!header) {
            throw io_error("malformed episode log header: " + line);
        }
        const auto xpos = grid.find('x');
        TrafficEpisode ep;
        ep.label = behavior_from_char(label);
        ep.grid_w = static_cast<std::uint32_t>(std::stoul(grid.substr(0, xpos)));
        ep.grid_h = static_cast<std::uint32_t>(std::stoul(grid.substr(xpos + 1)));
        for (std::uint32_t t = 0; t < ticks; ++t) {
            Frame frame(static_cast<std::size_t>(ep.grid_w) * ep.grid_h, 0);
            for (std::uint32_t y = 0; y < ep.grid_h; ++y) {
                if (!std::getline(is, line) || line.size() != ep.grid_w) {
                    throw io_error("malformed episode log frame row");
                }
                for (std::uint32_t x = 0; x < ep.grid_w; ++x) {
                    frame[y * ep.grid_w + x] = line[x] == '1' ? 1 : 0;
                }
            }
            ep.frames.push_back(std::move(frame));
            std::getline(is, line);  // blank separator
        }
        episodes.push_back(std::move(ep));
    }
    return episodes;
}

}  // namespace seqpyr
