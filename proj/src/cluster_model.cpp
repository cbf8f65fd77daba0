#include "seqpyr/cluster_model.hpp"

#include <algorithm>
#include <cassert>

#include "seqpyr/errors.hpp"

namespace seqpyr {

namespace {

// Guard against representation error in score-vs-margin comparisons; scores
// are small rationals.
constexpr double kScoreEps = 1e-9;

Recognition pick_winner(const PrototypeStore& store, SymbolView buffer,
                        const std::vector<double>& scores, std::optional<Symbol> hint,
                        double hint_margin) {
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        // Strict improvement keeps the smallest cluster id among ties
        // (prototypes are stored in id order).
        if (scores[p] > best + kScoreEps) {
            best = scores[p];
            best_idx = p;
        }
    }

    std::size_t winner = best_idx;
    if (hint && *hint != kBlankSymbol) {
        for (std::size_t p = 0; p < store.size(); ++p) {
            if (store.at(p).cluster_id == *hint) {
                if (scores[p] >= best - hint_margin - kScoreEps) {
                    winner = p;
                }
                break;
            }
        }
    }

    Recognition rec;
    rec.cluster_id = store.at(winner).cluster_id;
    rec.score = scores[winner];

    const auto& proto = store.at(winner).sequence;
    const Alignment al = lcs_alignment(buffer, proto);
    if (!al.empty()) {
        rec.matched_prefix_end = static_cast<std::int32_t>(al.pairs.back().second);
        const std::size_t next_idx = static_cast<std::size_t>(rec.matched_prefix_end) + 1;
        if (next_idx < proto.size()) {
            rec.predicted_next = proto[next_idx];
        }
    }
    return rec;
}

}  // namespace

const ClusterPrototype* PrototypeStore::find(Symbol cluster_id) const {
    for (const auto& p : protos_) {
        if (p.cluster_id == cluster_id) {
            return &p;
        }
    }
    return nullptr;
}

Symbol PrototypeStore::create(SymbolView sequence, std::uint32_t episode_id) {
    ClusterPrototype proto;
    proto.cluster_id = static_cast<Symbol>(protos_.size() + 1);
    proto.sequence.assign(sequence.begin(), sequence.end());
    proto.support = 1;
    proto.last_update = episode_id;
    protos_.push_back(std::move(proto));
    ++version_;
    return protos_.back().cluster_id;
}

void PrototypeStore::merge(std::size_t idx, SymbolView episode, std::uint32_t episode_id,
                           MergeRule rule) {
    ClusterPrototype& proto = protos_[idx];
    proto.sequence = rule == MergeRule::Replace
                         ? merge_recency(proto.sequence, episode)
                         : merge_lcs_backbone(proto.sequence, episode);
    if (proto.sequence.empty()) {
        // Backbone merge of disjoint sequences; keep the exemplar so the
        // non-empty invariant holds.
        proto.sequence.assign(episode.begin(), episode.end());
    }
    ++proto.support;
    proto.last_update = episode_id;
    ++version_;
}

Recognition recognize(const PrototypeStore& store, SymbolView buffer,
                      std::optional<Symbol> hint, double hint_margin) {
    if (buffer.empty()) {
        throw undefined_input_error("recognize: empty buffer");
    }
    if (store.empty()) {
        return Recognition{};
    }
    std::vector<double> scores(store.size());
    for (std::size_t p = 0; p < store.size(); ++p) {
        scores[p] = similarity_stream(buffer, store.at(p).sequence);
    }
    return pick_winner(store, buffer, scores, hint, hint_margin);
}

PredictionStats verify(PredictionStats stats, std::optional<Symbol> predicted, Symbol actual) {
    if (!predicted) {
        return stats;
    }
    if (*predicted == actual) {
        ++stats.hits;
        stats.streak_misses = 0;
    } else {
        ++stats.misses;
        ++stats.streak_misses;
    }
    return stats;
}

std::pair<Symbol, bool> finalize_episode(PrototypeStore& store, SymbolView buffer,
                                         std::uint32_t episode_id, double theta,
                                         MergeRule rule) {
    if (buffer.empty()) {
        throw undefined_input_error("finalize_episode: empty buffer");
    }
    assert(theta > 0.0 && theta <= 1.0);
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t p = 0; p < store.size(); ++p) {
        const double s = similarity_full(buffer, store.at(p).sequence);
        if (s > best + kScoreEps) {
            best = s;
            best_idx = p;
        }
    }
    if (!store.empty() && best >= theta - kScoreEps) {
        store.merge(best_idx, buffer, episode_id, rule);
        return {store.at(best_idx).cluster_id, false};
    }
    return {store.create(buffer, episode_id), true};
}

void StreamScorer::reset() {
    buffer_len_ = 0;
    store_version_ = UINT64_MAX;
    rows_.clear();
}

void StreamScorer::rebuild(const PrototypeStore& store, SymbolView buffer) {
    rows_.assign(store.size(), {});
    for (std::size_t p = 0; p < store.size(); ++p) {
        rows_[p].assign(store.at(p).sequence.size() + 1, 0);
    }
    buffer_len_ = 0;
    for (std::size_t t = 0; t < buffer.size(); ++t) {
        const Symbol sym = buffer[t];
        for (std::size_t p = 0; p < store.size(); ++p) {
            const auto& proto = store.at(p).sequence;
            auto& row = rows_[p];
            // In-place one-symbol DP row update.
            std::uint32_t diag = 0;
            for (std::size_t j = 0; j < proto.size(); ++j) {
                const std::uint32_t up = row[j + 1];
                row[j + 1] = (proto[j] == sym) ? diag + 1 : std::max(up, row[j]);
                diag = up;
            }
        }
        ++buffer_len_;
    }
    store_version_ = store.version();
}

Recognition StreamScorer::observe(const PrototypeStore& store, SymbolView buffer_after_append,
                                  std::optional<Symbol> hint, double hint_margin) {
    if (buffer_after_append.empty()) {
        throw undefined_input_error("StreamScorer::observe: empty buffer");
    }
    if (store.empty()) {
        buffer_len_ = buffer_after_append.size();
        return Recognition{};
    }
    if (store.version() != store_version_ || buffer_len_ + 1 != buffer_after_append.size()) {
        rebuild(store, buffer_after_append);
    } else {
        const Symbol sym = buffer_after_append.back();
        for (std::size_t p = 0; p < store.size(); ++p) {
            const auto& proto = store.at(p).sequence;
            auto& row = rows_[p];
            std::uint32_t diag = 0;
            for (std::size_t j = 0; j < proto.size(); ++j) {
                const std::uint32_t up = row[j + 1];
                row[j + 1] = (proto[j] == sym) ? diag + 1 : std::max(up, row[j]);
                diag = up;
            }
        }
        ++buffer_len_;
    }

    std::vector<double> scores(store.size());
    for (std::size_t p = 0; p < store.size(); ++p) {
        scores[p] = static_cast<double>(rows_[p].back()) /
                    static_cast<double>(buffer_after_append.size());
    }
    return pick_winner(store, buffer_after_append, scores, hint, hint_margin);
}

}  // namespace seqpyr
