#include "seqpyr/topology.hpp"

#include "seqpyr/errors.hpp"

namespace seqpyr {

std::uint32_t PyramidTopology::layer_of(std::uint32_t agent_id) const {
    for (std::uint32_t k = layers; k-- > 1;) {
        if (agent_id >= dims[k].offset) {
            return k + 1;
        }
    }
    return 1;
}

std::uint32_t PyramidTopology::index_in_layer(std::uint32_t agent_id) const {
    return agent_id - dims[layer_of(agent_id) - 1].offset;
}

std::uint32_t PyramidTopology::agent_at(std::uint32_t layer, std::uint32_t x,
                                        std::uint32_t y) const {
    const LayerDim& d = dims[layer - 1];
    return d.offset + y * d.w + x;
}

PyramidTopology build_pyramid(std::uint32_t grid_w, std::uint32_t grid_h,
                              std::uint32_t fan_w, std::uint32_t fan_h,
                              std::uint32_t layers) {
    if (layers < 2) {
        throw config_error("pyramid needs at least 2 layers, got " + std::to_string(layers));
    }
    if (grid_w == 0 || grid_h == 0 || fan_w == 0 || fan_h == 0) {
        throw config_error("grid and fan-in dimensions must be positive");
    }
    if (fan_w * fan_h < 2) {
        throw config_error("fan-in must merge at least 2 children per parent");
    }

    PyramidTopology topo;
    topo.layers = layers;
    topo.grid_w = grid_w;
    topo.grid_h = grid_h;
    topo.fan_w = fan_w;
    topo.fan_h = fan_h;

    std::uint32_t w = grid_w;
    std::uint32_t h = grid_h;
    std::uint32_t offset = 0;
    for (std::uint32_t k = 1; k <= layers; ++k) {
        if (k > 1) {
            if (w % fan_w != 0 || h % fan_h != 0) {
                throw config_error("layer " + std::to_string(k - 1) + " size " +
                                   std::to_string(w) + "x" + std::to_string(h) +
                                   " is not divisible by fan-in " + std::to_string(fan_w) +
                                   "x" + std::to_string(fan_h));
            }
            w /= fan_w;
            h /= fan_h;
        }
        topo.dims.push_back({w, h, offset});
        offset += w * h;
    }
    if (w != 1 || h != 1) {
        throw config_error("top layer has " + std::to_string(w) + "x" + std::to_string(h) +
                           " agents, expected exactly 1");
    }

    const std::uint32_t total = offset;
    topo.parent.assign(total, -1);
    topo.children.assign(total, {});
    for (std::uint32_t k = 2; k <= layers; ++k) {
        const auto& pd = topo.dims[k - 1];
        for (std::uint32_t py = 0; py < pd.h; ++py) {
            for (std::uint32_t px = 0; px < pd.w; ++px) {
                const std::uint32_t pid = topo.agent_at(k, px, py);
                auto& kids = topo.children[pid];
                kids.reserve(fan_w * fan_h);
                for (std::uint32_t dy = 0; dy < fan_h; ++dy) {
                    for (std::uint32_t dx = 0; dx < fan_w; ++dx) {
                        const std::uint32_t cid =
                            topo.agent_at(k - 1, px * fan_w + dx, py * fan_h + dy);
                        kids.push_back(cid);
                        topo.parent[cid] = static_cast<std::int32_t>(pid);
                    }
                }
            }
        }
    }
    return topo;
}

}  // namespace seqpyr
