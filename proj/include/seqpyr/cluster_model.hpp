#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seqpyr/lcs.hpp"
#include "seqpyr/sequence.hpp"

namespace seqpyr {

// How a cluster's stored sequence is updated when an episode matches it.
enum class MergeRule : std::uint8_t {
    Replace,      // keep the latest matching exemplar (default)
    LcsBackbone,  // keep only the common backbone of old and new
};

// A stored representative sequence. cluster_id is the code this cluster
// emits upward; ids are dense 1..k and never reused.
struct ClusterPrototype {
    Symbol cluster_id = kBlankSymbol;
    std::vector<Symbol> sequence;
    std::uint32_t support = 0;
    std::uint32_t last_update = 0;  // episode id of the last merge/create
};

// Per-agent prototype store. All mutation happens in the owning agent's
// processing turn.
class PrototypeStore {
public:
    bool empty() const { return protos_.empty(); }
    std::size_t size() const { return protos_.size(); }

    const ClusterPrototype& at(std::size_t idx) const { return protos_[idx]; }
    const std::vector<ClusterPrototype>& all() const { return protos_; }

    // nullptr when no prototype carries the code.
    const ClusterPrototype* find(Symbol cluster_id) const;

    // Allocates the next cluster code for a new prototype.
    Symbol create(SymbolView sequence, std::uint32_t episode_id);

    // Applies the merge rule to prototype idx, bumps support and recency.
    void merge(std::size_t idx, SymbolView episode, std::uint32_t episode_id, MergeRule rule);

    // Bumped on every mutation; lets streaming caches detect staleness.
    std::uint64_t version() const { return version_; }

private:
    std::vector<ClusterPrototype> protos_;
    std::uint64_t version_ = 0;
};

// Result of one streaming recognition step.
struct Recognition {
    Symbol cluster_id = kBlankSymbol;
    double score = 0.0;
    std::optional<Symbol> predicted_next;
    // Index into the winning prototype of the last aligned element, -1 when
    // the alignment is empty. predicted_next, when present, is the prototype
    // element at matched_prefix_end + 1.
    std::int32_t matched_prefix_end = -1;
};

// Running verification counts for one agent's next-input predictions.
struct PredictionStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t streak_misses = 0;

    bool operator==(const PredictionStats&) const = default;
};

inline constexpr double kDefaultTheta = 0.8;
inline constexpr double kDefaultHintMargin = 0.1;

// Streaming recognition of a partial buffer against the store.
//
// Empty store: blank code, score 0, no prediction. Otherwise the prototype
// with the highest streaming similarity wins; the hinted cluster wins any
// tie and any contest it loses by at most hint_margin (feedback helps the
// selection, it does not override a plainly better cluster). Remaining ties
// go to the smallest cluster id.
Recognition recognize(const PrototypeStore& store, SymbolView buffer,
                      std::optional<Symbol> hint,
                      double hint_margin = kDefaultHintMargin);

// Verifies a prediction against the symbol that just arrived. Absent
// prediction leaves the stats unchanged.
PredictionStats verify(PredictionStats stats, std::optional<Symbol> predicted, Symbol actual);

// End-of-episode update: merge into the best full-sequence match at or
// above theta, else create a new cluster. Returns the cluster code and
// whether it was newly created.
std::pair<Symbol, bool> finalize_episode(PrototypeStore& store, SymbolView buffer,
                                         std::uint32_t episode_id, double theta,
                                         MergeRule rule = MergeRule::Replace);

// Incremental scorer: per-prototype DP rows updated one appended symbol at
// a time, so a tick costs O(total prototype length) instead of
// O(|buffer| * total prototype length). Produces results identical to
// recognize(); the pure function stays as the reference implementation.
class StreamScorer {
public:
    // Appends one symbol to the tracked buffer and recognizes. The caller's
    // buffer (including the new symbol) is needed only for the winner's
    // alignment and for rebuilds after store changes.
    Recognition observe(const PrototypeStore& store, SymbolView buffer_after_append,
                        std::optional<Symbol> hint, double hint_margin = kDefaultHintMargin);

    // Forget the tracked episode (call at episode boundaries).
    void reset();

private:
    void rebuild(const PrototypeStore& store, SymbolView buffer);

    std::uint64_t store_version_ = UINT64_MAX;
    std::size_t buffer_len_ = 0;
    // rows_[p][j] = lcs_length(buffer, prototype p's first j symbols)
    std::vector<std::vector<std::uint32_t>> rows_;
};

}  // namespace seqpyr
