#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <vector>

#include "ilh/ensemble.hpp"
#include "ilh/types.hpp"

namespace ilh {

struct GroundTruth {
    std::vector<std::vector<std::int32_t>> relevant;  // per query, database indices
};

struct Neighbor {
    std::int32_t id = 0;
    std::int32_t distance = 0;
};

struct RetrievalResult {
    std::size_t k = 0;
    std::vector<std::vector<Neighbor>> neighbors;  // per query, sorted by (distance, id)
};

namespace detail {

// True when every bit is a full-feature kernel hash over one shared basis, so
// the RBF features can be computed once per row instead of once per bit.
inline bool shared_kernel_basis(const HashEnsemble& e) {
    if (e.family() != HashFamily::kernel || e.bits.empty()) return false;
    const auto* first = std::get_if<KernelHash>(&e.bits[0].hash);
    if (!first) return false;
    for (const auto& bit : e.bits) {
        if (bit.feature_subset.size() != e.dim) return false;
        const auto* k = std::get_if<KernelHash>(&bit.hash);
        if (!k || k->sigma != first->sigma) return false;
        if (k->weights.size() != k->centers.n_points()) return false;
        if (&*k != first && k->centers.data() != first->centers.data()) return false;
    }
    return true;
}

}  // namespace detail

/// Apply every bit's hash to every row; bit-packed output.
inline CodeMatrix encode(const HashEnsemble& e, const FeatureMatrix& data) {
    require(data.dim() == e.dim, "encode: dimension mismatch");
    CodeMatrix codes(data.n_points(), e.n_bits());
    if (detail::shared_kernel_basis(e)) {
        const auto& k0 = std::get<KernelHash>(e.bits[0].hash);
        std::vector<float> phi(k0.centers.n_points());
        for (std::size_t i = 0; i < data.n_points(); ++i) {
            rbf_features(data.row(i), k0.centers, k0.sigma, phi);
            for (std::size_t j = 0; j < e.n_bits(); ++j) {
                const auto& k = std::get<KernelHash>(e.bits[j].hash);
                double score = k.bias;
                for (std::size_t c = 0; c < phi.size(); ++c)
                    score += k.weights[c] * static_cast<double>(phi[c]);
                codes.set(i, j, score >= 0.0 ? +1 : -1);
            }
        }
        return codes;
    }
    std::vector<float> scratch;
    for (std::size_t i = 0; i < data.n_points(); ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < e.n_bits(); ++j)
            codes.set(i, j, predict_bit(e.bits[j], row, scratch));
    }
    return codes;
}

/// Exact Hamming k-NN by linear scan over packed rows; ties break toward the
/// lower database index.
inline RetrievalResult hamming_knn(const CodeMatrix& queries, const CodeMatrix& database,
                                   std::size_t k) {
    require(queries.n_bits() == database.n_bits(), "hamming_knn: code width mismatch");
    require(k <= database.n_points(), "hamming_knn: k exceeds database size");

    RetrievalResult res;
    res.k = k;
    res.neighbors.resize(queries.n_points());
    if (k == 0) return res;

    const std::size_t nb = database.n_points();
    const std::size_t row_bytes = database.row_bytes();
    const std::size_t words = row_bytes / 8;

    // keys = distance << 32 | index; ascending sort gives (distance, index).
    std::vector<std::uint64_t> keys(nb);
    for (std::size_t q = 0; q < queries.n_points(); ++q) {
        const std::uint8_t* qrow = queries.row_data(q);
        for (std::size_t i = 0; i < nb; ++i) {
            const std::uint8_t* drow = database.row_data(i);
            std::uint32_t dist = 0;
            std::size_t byte = 0;
            for (std::size_t w = 0; w < words; ++w, byte += 8) {
                std::uint64_t a, b;
                std::memcpy(&a, qrow + byte, 8);
                std::memcpy(&b, drow + byte, 8);
                dist += static_cast<std::uint32_t>(std::popcount(a ^ b));
            }
            for (; byte < row_bytes; ++byte)
                dist += static_cast<std::uint32_t>(
                    std::popcount(static_cast<unsigned>(qrow[byte] ^ drow[byte])));
            keys[i] = (static_cast<std::uint64_t>(dist) << 32) | static_cast<std::uint32_t>(i);
        }
        const auto kth = keys.begin() + static_cast<std::ptrdiff_t>(k);
        std::nth_element(keys.begin(), kth - 1, keys.end());
        std::sort(keys.begin(), kth);
        auto& out = res.neighbors[q];
        out.resize(k);
        for (std::size_t r = 0; r < k; ++r)
            out[r] = {static_cast<std::int32_t>(keys[r] & 0xffffffffu),
                      static_cast<std::int32_t>(keys[r] >> 32)};
    }
    return res;
}

struct PrMetrics {
    std::vector<double> precision;  // per query; NaN-free, skipped queries omitted from means
    std::vector<double> recall;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped_empty = 0;  // queries with no relevant items
};

/// precision = |retrieved ∩ relevant| / k, recall = |retrieved ∩ relevant| /
/// |relevant|. Queries with empty relevant sets are excluded from the means.
inline PrMetrics precision_recall(const RetrievalResult& result, const GroundTruth& gt) {
    require(result.neighbors.size() == gt.relevant.size(),
            "precision_recall: query count mismatch");
    PrMetrics m;
    m.precision.resize(result.neighbors.size(), 0.0);
    m.recall.resize(result.neighbors.size(), 0.0);

    std::vector<std::uint32_t> stamp;
    std::uint32_t cur = 0;
    for (std::size_t q = 0; q < result.neighbors.size(); ++q) {
        const auto& rel = gt.relevant[q];
        if (rel.empty()) {
            ++m.skipped_empty;
            continue;
        }
        ++cur;
        for (auto id : rel) {
            const auto u = static_cast<std::size_t>(id);
            if (u >= stamp.size()) stamp.resize(u + 1, 0);
            stamp[u] = cur;
        }
        std::size_t hits = 0;
        for (const auto& nb : result.neighbors[q]) {
            const auto u = static_cast<std::size_t>(nb.id);
            if (u < stamp.size() && stamp[u] == cur) ++hits;
        }
        const auto k = result.neighbors[q].size();
        m.precision[q] = k ? static_cast<double>(hits) / static_cast<double>(k) : 0.0;
        m.recall[q] = static_cast<double>(hits) / static_cast<double>(rel.size());
        m.mean_precision += m.precision[q];
        m.mean_recall += m.recall[q];
        ++m.evaluated;
    }
    if (m.evaluated) {
        m.mean_precision /= static_cast<double>(m.evaluated);
        m.mean_recall /= static_cast<double>(m.evaluated);
    }
    return m;
}

/// Relevant = database points sharing the query's label.
inline GroundTruth ground_truth_labels(const LabelVector& query_labels,
                                       const LabelVector& base_labels) {
    GroundTruth gt;
    gt.relevant.resize(query_labels.size());
    for (std::size_t q = 0; q < query_labels.size(); ++q)
        for (std::size_t i = 0; i < base_labels.size(); ++i)
            if (base_labels[i] == query_labels[q])
                gt.relevant[q].push_back(static_cast<std::int32_t>(i));
    return gt;
}

/// Relevant = exact K nearest database points in Euclidean distance,
/// ties toward the lower index.
inline GroundTruth ground_truth_euclidean(const FeatureMatrix& query_features,
                                          const FeatureMatrix& base_features, std::size_t k) {
    require(query_features.dim() == base_features.dim(),
            "ground_truth_euclidean: dimension mismatch");
    require(k <= base_features.n_points(), "ground_truth_euclidean: K exceeds base size");
    GroundTruth gt;
    gt.relevant.resize(query_features.n_points());
    std::vector<std::pair<double, std::int32_t>> dists(base_features.n_points());
    for (std::size_t q = 0; q < query_features.n_points(); ++q) {
        const auto xq = query_features.row(q);
        for (std::size_t i = 0; i < base_features.n_points(); ++i) {
            const auto xi = base_features.row(i);
            double d2 = 0.0;
            for (std::size_t j = 0; j < xq.size(); ++j) {
                const double diff = static_cast<double>(xq[j]) - xi[j];
                d2 += diff * diff;
            }
            dists[i] = {d2, static_cast<std::int32_t>(i)};
        }
        std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k),
                          dists.end());
        auto& rel = gt.relevant[q];
        rel.resize(k);
        for (std::size_t r = 0; r < k; ++r) rel[r] = dists[r].second;
    }
    return gt;
}

}  // namespace ilh
