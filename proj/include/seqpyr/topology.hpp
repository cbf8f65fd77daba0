#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seqpyr {

// Layered many-to-one pyramid over a grid of bottom regions. Layer 1 has
// one agent per grid cell; each parent merges a fan_w x fan_h block of the
// layer below; the top layer is a single agent. Agent ids are layer-major,
// then row-major within the layer.
struct PyramidTopology {
    std::uint32_t layers = 0;
    std::uint32_t grid_w = 0, grid_h = 0;
    std::uint32_t fan_w = 0, fan_h = 0;

    struct LayerDim {
        std::uint32_t w = 0, h = 0;
        std::uint32_t offset = 0;  // global id of this layer's first agent
    };
    std::vector<LayerDim> dims;          // dims[k-1] describes layer k
    std::vector<std::int32_t> parent;    // global child id -> parent id (-1 for top)
    std::vector<std::vector<std::uint32_t>> children;  // parent id -> ordered child ids

    std::uint32_t total_agents() const { return static_cast<std::uint32_t>(parent.size()); }
    std::uint32_t layer_size(std::uint32_t layer) const {
        return dims[layer - 1].w * dims[layer - 1].h;
    }
    std::uint32_t layer_of(std::uint32_t agent_id) const;
    // Index of the agent within its layer (row-major).
    std::uint32_t index_in_layer(std::uint32_t agent_id) const;
    std::uint32_t agent_at(std::uint32_t layer, std::uint32_t x, std::uint32_t y) const;
    std::uint32_t top_agent() const { return dims.back().offset; }
    std::uint32_t fan_in() const { return fan_w * fan_h; }
};

// Validates the dimensions and builds the edge maps. Children are ordered
// row-major within each parent block. Throws config_error when the layer
// sizes do not reduce to a single top agent.
PyramidTopology build_pyramid(std::uint32_t grid_w, std::uint32_t grid_h,
                              std::uint32_t fan_w, std::uint32_t fan_h,
                              std::uint32_t layers);

}  // namespace seqpyr
