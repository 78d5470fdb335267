#pragma once

#include <cmath>
#include <cstdint>

#include "ilh/rng.hpp"
#include "ilh/types.hpp"

namespace ilh {

struct SynthDataset {
    FeatureMatrix features;
    LabelVector labels;
};

/// Gaussian blobs. Cluster means are unit-separated; within-cluster noise has
/// standard deviation `spread`, so smaller spread means cleaner clusters.
/// Points are laid out cluster-major, sizes as equal as possible.
inline SynthDataset synth_dataset(std::size_t n_clusters, std::size_t dim,
                                  std::size_t n_points, double spread,
                                  std::uint64_t seed) {
    require(n_clusters >= 2, "synth_dataset: n_clusters must be >= 2");
    require(n_points >= n_clusters, "synth_dataset: n_points must be >= n_clusters");
    require(dim >= 1 && spread >= 0.0, "synth_dataset: bad dim or spread");

    // Mean c sits on basis axis (c mod dim), pushed one shell further out each
    // time the axes wrap; scale 1/sqrt(2) makes first-shell means exactly unit
    // distance apart.
    const double s = 1.0 / std::sqrt(2.0);
    FeatureMatrix means(n_clusters, dim);
    for (std::size_t c = 0; c < n_clusters; ++c)
        means(c, c % dim) = static_cast<float>(s * (1.0 + static_cast<double>(c / dim)));

    SynthDataset out;
    out.features = FeatureMatrix(n_points, dim);
    out.labels.resize(n_points);

    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::size_t base = n_points / n_clusters;
    const std::size_t extra = n_points % n_clusters;
    std::size_t row = 0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        const std::size_t count = base + (c < extra ? 1 : 0);
        for (std::size_t p = 0; p < count; ++p, ++row) {
            out.labels[row] = static_cast<std::int32_t>(c);
            auto dst = out.features.row(row);
            for (std::size_t j = 0; j < dim; ++j)
                dst[j] = means(c, j) + static_cast<float>(spread * gauss(rng));
        }
    }
    return out;
}

}  // namespace ilh
