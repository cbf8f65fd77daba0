#include "seqpyr/lcs.hpp"

#include <algorithm>
#include <cassert>

#include "seqpyr/errors.hpp"

namespace seqpyr {

std::size_t lcs_length(SymbolView a, SymbolView b) {
    if (a.empty() || b.empty()) {
        return 0;
    }
    // Two-row DP over the shorter sequence.
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    std::vector<std::uint32_t> prev(b.size() + 1, 0);
    std::vector<std::uint32_t> cur(b.size() + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (a[i] == b[j]) {
                cur[j + 1] = prev[j] + 1;
            } else {
                cur[j + 1] = std::max(prev[j + 1], cur[j]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

Alignment lcs_alignment(SymbolView a, SymbolView b) {
    Alignment out;
    if (a.empty() || b.empty()) {
        return out;
    }
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    // dp[i][j] = LCS length of the suffixes a[i..], b[j..]; flat layout,
    // reused across calls.
    thread_local std::vector<std::uint32_t> dp;
    const std::size_t stride = m + 1;
    dp.assign((n + 1) * stride, 0);
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            if (a[i] == b[j]) {
                dp[i * stride + j] = dp[(i + 1) * stride + j + 1] + 1;
            } else {
                dp[i * stride + j] =
                    std::max(dp[(i + 1) * stride + j], dp[i * stride + j + 1]);
            }
        }
    }

    std::uint32_t need = dp[0];
    out.pairs.reserve(need);
    std::size_t i = 0;
    std::size_t j = 0;
    // Greedy front construction: the first feasible match in (i,j) order is
    // the lexicographically smallest one (any match reaching need-1 on the
    // remaining suffixes preserves maximality).
    while (need > 0) {
        bool matched = false;
        for (std::size_t ii = i; ii < n && !matched; ++ii) {
            for (std::size_t jj = j; jj < m; ++jj) {
                if (dp[ii * stride + jj] < need) {
                    break;
                }
                if (a[ii] == b[jj] && dp[(ii + 1) * stride + jj + 1] == need - 1) {
                    out.pairs.emplace_back(static_cast<std::uint32_t>(ii),
                                           static_cast<std::uint32_t>(jj));
                    i = ii + 1;
                    j = jj + 1;
                    --need;
                    matched = true;
                    break;
                }
            }
        }
    }

#ifndef NDEBUG
    // Strictly monotone pairs witnessing equal symbols, maximal length.
    assert(out.pairs.size() == dp[0]);
    for (std::size_t k = 0; k < out.pairs.size(); ++k) {
        assert(a[out.pairs[k].first] == b[out.pairs[k].second]);
        if (k > 0) {
            assert(out.pairs[k - 1].first < out.pairs[k].first);
            assert(out.pairs[k - 1].second < out.pairs[k].second);
        }
    }
#endif
    return out;
}

double similarity_full(SymbolView a, SymbolView b) {
    if (a.empty() && b.empty()) {
        throw undefined_input_error("similarity_full: both sequences empty");
    }
    const std::size_t denom = std::max(a.size(), b.size());
    return static_cast<double>(lcs_length(a, b)) / static_cast<double>(denom);
}

double similarity_stream(SymbolView buffer, SymbolView prototype) {
    if (buffer.empty()) {
        throw undefined_input_error("similarity_stream: empty buffer");
    }
    return static_cast<double>(lcs_length(buffer, prototype)) /
           static_cast<double>(buffer.size());
}

std::vector<Symbol> merge_recency(SymbolView /*prototype*/, SymbolView episode) {
    return std::vector<Symbol>(episode.begin(), episode.end());
}

std::vector<Symbol> merge_lcs_backbone(SymbolView prototype, SymbolView episode) {
    const Alignment al = lcs_alignment(prototype, episode);
    std::vector<Symbol> out;
    out.reserve(al.pairs.size());
    for (const auto& [i, j] : al.pairs) {
        out.push_back(prototype[i]);
    }
    return out;
}

}  // namespace seqpyr
