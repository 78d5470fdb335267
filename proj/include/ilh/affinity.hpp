#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ilh/rng.hpp"
#include "ilh/types.hpp"

namespace ilh {

struct AffinityBuildResult {
    AffinitySet affinities;
    std::size_t conflict_pairs = 0;  // same unordered pair generated with both signs
    std::size_t lonely_points = 0;   // points whose class has a single member
};

namespace detail {

inline std::uint64_t pair_key(std::int32_t n, std::int32_t m) {
    if (n > m) std::swap(n, m);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
           static_cast<std::uint32_t>(m);
}

// First-writer-wins dedup of unordered pairs; conflicting signs are counted.
class PairAccumulator {
public:
    void add(std::int32_t n, std::int32_t m, std::int8_t y) {
        auto [it, inserted] = seen_.emplace(pair_key(n, m), y);
        if (inserted)
            set_.pairs.push_back({n, m, y});
        else if (it->second != y)
            ++conflicts_;
    }
    AffinitySet take() { return std::move(set_); }
    std::size_t conflicts() const { return conflicts_; }

private:
    std::unordered_map<std::uint64_t, std::int8_t> seen_;
    AffinitySet set_;
    std::size_t conflicts_ = 0;
};

// Uniform sample of `k` entries from `pool` without replacement (partial
// Fisher-Yates on a scratch copy owned by the caller).
inline void sample_without_replacement(std::vector<std::int32_t>& pool, std::size_t k,
                                       std::mt19937_64& rng,
                                       std::vector<std::int32_t>& out) {
    out.clear();
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        out.push_back(pool[i]);
    }
}

}  // namespace detail

/// Per point: up to s_pos same-class partners (y=+1) and up to s_neg
/// differently-labeled ones (y=-1), sampled uniformly without replacement.
/// Pairs are deduplicated as unordered pairs, first writer wins.
inline AffinityBuildResult build_affinities_supervised(const FeatureMatrix& features,
                                                       const LabelVector& labels,
                                                       std::size_t s_pos, std::size_t s_neg,
                                                       std::uint64_t seed) {
    const std::size_t n = features.n_points();
    require(labels.size() == n, "build_affinities_supervised: label/feature size mismatch");
    require(s_pos >= 1 && s_neg >= 1, "build_affinities_supervised: s_pos, s_neg must be >= 1");

    std::unordered_map<std::int32_t, std::vector<std::int32_t>> by_class;
    for (std::size_t i = 0; i < n; ++i)
        by_class[labels[i]].push_back(static_cast<std::int32_t>(i));
    require(by_class.size() >= 2, "build_affinities_supervised: need at least two classes");

    AffinityBuildResult res;
    detail::PairAccumulator acc;
    auto rng = make_rng(seed);
    std::vector<std::int32_t> pool, drawn;
    std::uniform_int_distribution<std::size_t> any(0, n - 1);

    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<std::int32_t>(i);
        const auto& mates = by_class[labels[i]];
        if (mates.size() < 2) {
            ++res.lonely_points;
        } else {
            pool.clear();
            for (auto m : mates)
                if (m != ii) pool.push_back(m);
            detail::sample_without_replacement(pool, s_pos, rng, drawn);
            for (auto m : drawn) acc.add(ii, m, +1);
        }
        // Negatives by rejection: other classes are a large fraction of the data.
        const std::size_t want = std::min(s_neg, n - mates.size());
        std::unordered_set<std::int32_t> taken;
        while (taken.size() < want) {
            const auto m = static_cast<std::int32_t>(any(rng));
            if (labels[m] == labels[i] || taken.count(m)) continue;
            taken.insert(m);
            acc.add(ii, m, -1);
        }
    }
    res.conflict_pairs = acc.conflicts();
    res.affinities = acc.take();
    return res;
}

/// Per point: its k_pos Euclidean nearest neighbors are positives, and s_neg
/// uniform picks among the remaining points are negatives.
inline AffinityBuildResult build_affinities_unsupervised(const FeatureMatrix& features,
                                                         std::size_t k_pos, std::size_t s_neg,
                                                         std::uint64_t seed) {
    const std::size_t n = features.n_points();
    require(k_pos >= 1 && k_pos < n, "build_affinities_unsupervised: k_pos out of range");
    require(n > k_pos + s_neg, "build_affinities_unsupervised: not enough points");

    AffinityBuildResult res;
    detail::PairAccumulator acc;
    auto rng = make_rng(seed);
    std::uniform_int_distribution<std::size_t> any(0, n - 1);

    std::vector<std::pair<double, std::int32_t>> dists(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = features.row(i);
        for (std::size_t m = 0; m < n; ++m) {
            double d2 = 0.0;
            const auto xm = features.row(m);
            for (std::size_t j = 0; j < features.dim(); ++j) {
                const double diff = static_cast<double>(xi[j]) - xm[j];
                d2 += diff * diff;
            }
            dists[m] = {d2, static_cast<std::int32_t>(m)};
        }
        dists[i].first = std::numeric_limits<double>::infinity();  // exclude self
        std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k_pos),
                          dists.end());
        std::unordered_set<std::int32_t> neighbors;
        for (std::size_t r = 0; r < k_pos; ++r) {
            acc.add(static_cast<std::int32_t>(i), dists[r].second, +1);
            neighbors.insert(dists[r].second);
        }
        std::unordered_set<std::int32_t> taken;
        while (taken.size() < s_neg) {
            const auto m = static_cast<std::int32_t>(any(rng));
            if (m == static_cast<std::int32_t>(i) || neighbors.count(m) || taken.count(m))
                continue;
            taken.insert(m);
            acc.add(static_cast<std::int32_t>(i), m, -1);
        }
    }
    res.conflict_pairs = acc.conflicts();
    res.affinities = acc.take();
    return res;
}

/// Pairs with both endpoints inside `subset`, reindexed to subset-local ids.
inline AffinitySet restrict_affinities(const AffinitySet& aff,
                                       std::span<const std::int32_t> subset,
                                       std::size_t n_total) {
    std::vector<std::int32_t> local(n_total, -1);
    for (std::size_t i = 0; i < subset.size(); ++i)
        local[static_cast<std::size_t>(subset[i])] = static_cast<std::int32_t>(i);
    AffinitySet out;
    for (const auto& p : aff.pairs) {
        const auto ln = local[static_cast<std::size_t>(p.n)];
        const auto lm = local[static_cast<std::size_t>(p.m)];
        if (ln >= 0 && lm >= 0) out.pairs.push_back({ln, lm, p.y});
    }
    return out;
}

}  // namespace ilh
