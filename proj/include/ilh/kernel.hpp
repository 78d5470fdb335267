#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ilh/rng.hpp"
#include "ilh/svm.hpp"
#include "ilh/types.hpp"

namespace ilh {

struct KernelHash {
    FeatureMatrix centers;         // M x D
    double sigma = 1.0;            // RBF width, > 0
    std::vector<double> weights;   // dim M
    double bias = 0.0;
};

enum class CentersMode { shared, priv };

struct KernelFit {
    KernelHash hash;
    double train_accuracy = 0.0;
    std::size_t epochs = 0;
};

/// phi_j(x) = exp(-||x - c_j||^2 / (2 sigma^2)).
inline void rbf_features(std::span<const float> x, const FeatureMatrix& centers, double sigma,
                         std::span<float> out) {
    require(sigma > 0.0, "rbf_features: sigma must be > 0");
    require(x.size() == centers.dim(), "rbf_features: dimension mismatch");
    require(out.size() == centers.n_points(), "rbf_features: output size mismatch");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t j = 0; j < centers.n_points(); ++j) {
        const auto c = centers.row(j);
        double d2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double diff = static_cast<double>(x[k]) - c[k];
            d2 += diff * diff;
        }
        out[j] = static_cast<float>(std::exp(-d2 * inv));
    }
}

inline std::vector<float> rbf_features(std::span<const float> x, const FeatureMatrix& centers,
                                       double sigma) {
    std::vector<float> out(centers.n_points());
    rbf_features(x, centers, sigma, out);
    return out;
}

/// Median pairwise Euclidean distance over at most `cap` sampled points.
/// Falls back to the smallest positive distance (then 1.0) when the median
/// vanishes under duplicates.
inline double median_sigma(const FeatureMatrix& features, std::mt19937_64& rng,
                           std::size_t cap = 1000) {
    const std::size_t n = features.n_points();
    std::vector<std::int32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (n > cap) {
        for (std::size_t i = 0; i < cap; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        idx.resize(cap);
    }

    std::vector<double> dists;
    dists.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const auto xa = features.row(static_cast<std::size_t>(idx[a]));
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const auto xb = features.row(static_cast<std::size_t>(idx[b]));
            double d2 = 0.0;
            for (std::size_t k = 0; k < features.dim(); ++k) {
                const double diff = static_cast<double>(xa[k]) - xb[k];
                d2 += diff * diff;
            }
            dists.push_back(std::sqrt(d2));
        }
    }
    if (dists.empty()) return 1.0;
    const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    if (*mid > 0.0) return *mid;
    double smallest = 0.0;
    for (auto d : dists)
        if (d > 0.0 && (smallest == 0.0 || d < smallest)) smallest = d;
    return smallest > 0.0 ? smallest : 1.0;
}

/// Uniform sample of M distinct rows to act as RBF centers.
inline FeatureMatrix pick_centers(const FeatureMatrix& features, std::size_t m,
                                  std::mt19937_64& rng) {
    const std::size_t n = features.n_points();
    require(m >= 1 && m <= n, "pick_centers: M out of range");
    std::vector<std::int32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(m);
    return features.gather_rows(idx);
}

/// RBF-feature map followed by a linear SVM in feature space. In shared mode
/// the caller provides the centers; in private mode a fresh subset is drawn
/// from this bit's own training features.
inline KernelFit fit_kernel(const FeatureMatrix& features, std::span<const std::int8_t> targets,
                            CentersMode mode, std::size_t m, const SvmConfig& cfg,
                            std::uint64_t seed, const FeatureMatrix* shared_centers = nullptr) {
    auto rng = make_rng(seed);
    KernelFit fit;
    if (mode == CentersMode::shared) {
        require(shared_centers != nullptr, "fit_kernel: shared mode needs centers");
        require(shared_centers->dim() == features.dim(), "fit_kernel: center dim mismatch");
        fit.hash.centers = *shared_centers;
    } else {
        fit.hash.centers = pick_centers(features, m, rng);
    }
    fit.hash.sigma = median_sigma(features, rng);

    FeatureMatrix phi(features.n_points(), fit.hash.centers.n_points());
    for (std::size_t i = 0; i < features.n_points(); ++i)
        rbf_features(features.row(i), fit.hash.centers, fit.hash.sigma, phi.row(i));

    const auto lin = fit_linear(phi, targets, cfg, stream_seed(seed, Stream::svm));
    fit.hash.weights = lin.hash.weights;
    fit.hash.bias = lin.hash.bias;
    fit.train_accuracy = lin.train_accuracy;
    fit.epochs = lin.epochs;
    return fit;
}

inline double kernel_score(const KernelHash& h, std::span<const float> x) {
    const auto phi = rbf_features(x, h.centers, h.sigma);
    double s = h.bias;
    for (std::size_t j = 0; j < phi.size(); ++j) s += h.weights[j] * phi[j];
    return s;
}

inline int predict(const KernelHash& h, std::span<const float> x) {
    return kernel_score(h, x) >= 0.0 ? +1 : -1;
}

}  // namespace ilh
