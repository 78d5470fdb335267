#pragma once

#include <algorithm>
#include <cstdint>

#include "ilh/ensemble.hpp"
#include "ilh/retrieval.hpp"

namespace ilh {

struct SelectReport {
    std::vector<std::size_t> sizes;      // ensemble size after each batch
    std::vector<double> precision;      // validation precision at that size
    std::size_t best_size = 0;
    double best_precision = 0.0;
};

/// Grow the ensemble in batches until validation precision@k stops improving
/// by more than epsilon for `patience` consecutive batches (or b_max bits).
/// Returns the ensemble truncated at the best-precision prefix. Batch size
/// defaults to the concurrency level so batch training stays parallel.
inline HashEnsemble select_bits(const FeatureMatrix& data, const AffinitySet& affinities,
                                const FeatureMatrix& validation_queries,
                                const GroundTruth& validation_truth, std::size_t b_max,
                                std::size_t patience, double epsilon, const TrainOptions& opts,
                                std::size_t jobs = 1, std::size_t k = 100,
                                SelectReport* report = nullptr) {
    require(b_max >= 1, "select_bits: b_max must be >= 1");
    require(patience >= 1, "select_bits: patience must be >= 1");
    const std::size_t batch = std::max<std::size_t>(1, jobs);

    HashEnsemble e = train_ensemble(data, affinities, std::min(batch, b_max), opts, jobs);

    const auto score = [&](const HashEnsemble& cur) {
        const auto db = encode(cur, data);
        const auto queries = encode(cur, validation_queries);
        const auto knn = hamming_knn(queries, db, std::min(k, db.n_points()));
        return precision_recall(knn, validation_truth).mean_precision;
    };

    double best = score(e);
    std::size_t best_size = e.n_bits();
    if (report) {
        report->sizes.push_back(e.n_bits());
        report->precision.push_back(best);
    }

    std::size_t stale = 0;
    while (e.n_bits() < b_max && stale < patience) {
        const std::size_t extra = std::min(batch, b_max - e.n_bits());
        e = extend_ensemble(e, extra, data, affinities, jobs);
        const double p = score(e);
        if (report) {
            report->sizes.push_back(e.n_bits());
            report->precision.push_back(p);
        }
        if (p > best + epsilon) {
            best = p;
            best_size = e.n_bits();
            stale = 0;
        } else {
            if (p > best) {
                best = p;
                best_size = e.n_bits();
            }
            ++stale;
        }
    }

    e.bits.resize(best_size);
    if (report) {
        report->best_size = best_size;
        report->best_precision = best;
    }
    return e;
}

}  // namespace ilh
