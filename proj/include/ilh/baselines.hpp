#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "ilh/ensemble.hpp"

namespace ilh {

struct KshcutConfig {
    std::size_t outer_iterations = 1;  // one pass over all bits per iteration
    std::uint64_t seed = 0;
};

/// Called after every per-bit code update with the current code columns
/// (column i = codes of bit i). Lets tests recompute the exact joint loss.
using KshcutObserver = std::function<void(std::size_t iter, std::size_t bit,
                                          const std::vector<std::vector<std::int8_t>>&)>;

/// Coupled baseline: all bits optimize one joint squared-correlation loss.
/// Codes start all +1 (or from `init`); bits are visited sequentially, each
/// minimizing its conditional quadratic with the other bits fixed, via
/// alternating min-cut. Classifiers are fit per bit afterwards.
inline HashEnsemble kshcut_train(const FeatureMatrix& data, const AffinitySet& affinities,
                                 std::size_t b, const KshcutConfig& cfg,
                                 TrainOptions opts = {}, const CodeMatrix* init = nullptr,
                                 const KshcutObserver& observer = {}) {
    const std::size_t n = data.n_points();
    require(b >= 1 && cfg.outer_iterations >= 1, "kshcut_train: bad config");
    require(!affinities.pairs.empty(), "kshcut_train: empty affinity set");
    if (init) {
        require(init->n_points() == n && init->n_bits() == b,
                "kshcut_train: init codes shape mismatch");
    }

    opts.loss = LossKind::ksh;
    opts.diversity.master_seed = cfg.seed;
    opts.diversity.sampling = SamplingMode::none;

    std::vector<std::vector<std::int8_t>> z(b, std::vector<std::int8_t>(n, +1));
    if (init)
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t p = 0; p < n; ++p)
                z[i][p] = static_cast<std::int8_t>(init->get(p, i));

    // Per-pair code dot products, maintained incrementally across bit updates.
    const auto& pairs = affinities.pairs;
    std::vector<std::int32_t> dot(pairs.size(), 0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        std::int32_t s = 0;
        for (std::size_t i = 0; i < b; ++i)
            s += z[i][static_cast<std::size_t>(pairs[p].n)] *
                 z[i][static_cast<std::size_t>(pairs[p].m)];
        dot[p] = s;
    }

    const double bits_real = static_cast<double>(b);
    for (std::size_t iter = 0; iter < cfg.outer_iterations; ++iter) {
        for (std::size_t i = 0; i < b; ++i) {
            auto& zi = z[i];
            QuadraticEnergy e;
            e.n_vars = static_cast<std::int32_t>(n);
            e.linear.assign(n, 0.0);
            e.couplings.reserve(pairs.size());
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto& pr = pairs[p];
                const double s = dot[p] - zi[static_cast<std::size_t>(pr.n)] *
                                              zi[static_cast<std::size_t>(pr.m)];
                const double resid = s - bits_real * pr.y;
                const double a = 2.0 * resid;
                if (a != 0.0) {
                    auto [lo, hi] = std::minmax(pr.n, pr.m);
                    e.couplings.push_back({lo, hi, a});
                }
                e.constant += 1.0 + resid * resid;
            }

            const auto zs = bit_seed(cfg.seed, static_cast<std::uint32_t>(i));
            auto updated = alternating_mincut(e, zi, opts.max_sweeps,
                                              mincut_round_seed(zs, static_cast<std::uint32_t>(iter)));
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto& pr = pairs[p];
                dot[p] += updated[static_cast<std::size_t>(pr.n)] *
                              updated[static_cast<std::size_t>(pr.m)] -
                          zi[static_cast<std::size_t>(pr.n)] * zi[static_cast<std::size_t>(pr.m)];
            }
            zi = std::move(updated);
            if (observer) observer(iter, i, z);
        }
    }

    HashEnsemble e;
    e.opts = opts;
    e.dim = data.dim();
    e.bits.resize(b);

    const FeatureMatrix* shared = nullptr;
    FeatureMatrix shared_store;
    if (opts.family == HashFamily::kernel && opts.kernel.mode == CentersMode::shared) {
        shared_store = detail::shared_kernel_centers(data, opts);
        shared = &shared_store;
    }
    std::vector<std::int32_t> all_points(n), all_feats(data.dim());
    std::iota(all_points.begin(), all_points.end(), 0);
    std::iota(all_feats.begin(), all_feats.end(), 0);

    for (std::size_t i = 0; i < b; ++i) {
        auto& entry = e.bits[i];
        entry.bit_seed = bit_seed(cfg.seed, static_cast<std::uint32_t>(i));
        entry.training_subset = all_points;
        entry.feature_subset = all_feats;
        auto fitted = detail::fit_codes_classifier(data, z[i], opts, entry.bit_seed, shared);
        entry.hash = std::move(fitted.hash);
        entry.train_accuracy = fitted.accuracy;
        entry.degenerate = fitted.degenerate;
        if (entry.degenerate)
            e.warnings.push_back("bit " + std::to_string(i) +
                                 " collapsed to a constant code; kept with zero weights");
    }
    return e;
}

/// Data-free random projections: standard-normal weights, zero bias.
inline HashEnsemble lsh_train(std::size_t dim, std::size_t b, std::uint64_t seed) {
    require(dim >= 1 && b >= 1, "lsh_train: bad dims");
    HashEnsemble e;
    e.opts.family = HashFamily::linear;
    e.opts.diversity.master_seed = seed;
    e.dim = dim;
    e.bits.resize(b);
    std::vector<std::int32_t> all_feats(dim);
    std::iota(all_feats.begin(), all_feats.end(), 0);
    for (std::size_t i = 0; i < b; ++i) {
        auto& entry = e.bits[i];
        entry.bit_seed = bit_seed(seed, static_cast<std::uint32_t>(i));
        entry.feature_subset = all_feats;
        auto rng = make_rng(entry.bit_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        LinearHash h;
        h.weights.resize(dim);
        for (auto& w : h.weights) w = gauss(rng);
        h.bias = 0.0;
        entry.hash = std::move(h);
    }
    return e;
}

namespace detail {

// Top-b eigenvectors of the covariance by power iteration with deflation and
// re-orthogonalization. Returns row-major directions; rank_found reports how
// many came from the spectrum rather than random fill.
struct PowerSpectrum {
    Matrix directions;  // b x D, orthonormal rows
    std::vector<double> eigenvalues;
    std::size_t rank_found = 0;
};

inline PowerSpectrum power_spectrum(const Matrix& cov, std::size_t b, std::mt19937_64& rng) {
    const std::size_t d = cov.rows;
    PowerSpectrum out;
    out.directions = Matrix(b, d);
    out.eigenvalues.assign(b, 0.0);

    Matrix defl = cov;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(d), w(d);

    const auto orthogonalize = [&](std::vector<double>& x, std::size_t upto) {
        for (std::size_t k = 0; k < upto; ++k) {
            double proj = 0.0;
            for (std::size_t j = 0; j < d; ++j) proj += x[j] * out.directions(k, j);
            for (std::size_t j = 0; j < d; ++j) x[j] -= proj * out.directions(k, j);
        }
    };
    const auto norm = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (auto t : x) s += t * t;
        return std::sqrt(s);
    };

    double top_eig = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
        // Random unit start, re-drawn if it collapses under orthogonalization.
        double nv = 0.0;
        do {
            for (auto& t : v) t = gauss(rng);
            orthogonalize(v, k);
            nv = norm(v);
        } while (nv < 1e-12);
        for (auto& t : v) t /= nv;

        bool converged = false;
        for (std::size_t it = 0; it < 10000 && !converged; ++it) {
            for (std::size_t r = 0; r < d; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += defl.data[r * d + c] * v[c];
                w[r] = s;
            }
            orthogonalize(w, k);
            const double nw = norm(w);
            if (nw < 1e-12) break;  // deflated matrix vanishes on this subspace
            double diff = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                w[j] /= nw;
                diff = std::max(diff, std::min(std::fabs(w[j] - v[j]), std::fabs(w[j] + v[j])));
            }
            v = w;
            converged = diff <= 1e-8;
        }

        // Rayleigh quotient on the deflated matrix.
        double lambda = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += defl.data[r * d + c] * v[c];
            lambda += v[r] * s;
        }
        if (k == 0) top_eig = std::fabs(lambda);
        if (lambda <= std::max(1e-12, 1e-10 * top_eig)) break;  // numerical rank exhausted

        // Deterministic sign: largest-magnitude component positive.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::fabs(v[j]) > std::fabs(v[arg])) arg = j;
        if (v[arg] < 0.0)
            for (auto& t : v) t = -t;

        for (std::size_t j = 0; j < d; ++j) out.directions(k, j) = v[j];
        out.eigenvalues[k] = lambda;
        out.rank_found = k + 1;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) defl.data[r * d + c] -= lambda * v[r] * v[c];
    }

    // Fill unreached bits with random orthonormal directions.
    for (std::size_t k = out.rank_found; k < b; ++k) {
        double nv = 0.0;
        do {
            for (auto& t : v) t = gauss(rng);
            orthogonalize(v, k);
            nv = norm(v);
        } while (nv < 1e-12);
        for (std::size_t j = 0; j < d; ++j) out.directions(k, j) = v[j] / nv;
    }
    return out;
}

}  // namespace detail

/// Thresholded PCA: bit i = sign(v_i . (x - mean)), directions from the
/// sample covariance. Bits beyond the numerical rank become deterministic
/// random directions and a warning is recorded.
inline HashEnsemble tpca_train(const FeatureMatrix& data, std::size_t b, std::uint64_t seed) {
    const std::size_t n = data.n_points();
    const std::size_t d = data.dim();
    require(b >= 1 && b <= d, "tpca_train: need 1 <= b <= dim");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.row(i);
        for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
    }
    for (auto& m : mean) m /= static_cast<double>(n);

    Matrix cov(d, d);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.row(i);
        for (std::size_t j = 0; j < d; ++j) centered[j] = x[j] - mean[j];
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = r; c < d; ++c) cov.data[r * d + c] += centered[r] * centered[c];
    }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < r; ++c) cov.data[r * d + c] = cov.data[c * d + r];
    for (auto& t : cov.data) t /= static_cast<double>(n);

    auto rng = make_rng(stream_seed(seed, Stream::init));
    const auto spec = detail::power_spectrum(cov, b, rng);

    HashEnsemble e;
    e.opts.family = HashFamily::linear;
    e.opts.diversity.master_seed = seed;
    e.dim = d;
    e.bits.resize(b);
    std::vector<std::int32_t> all_points(n), all_feats(d);
    std::iota(all_points.begin(), all_points.end(), 0);
    std::iota(all_feats.begin(), all_feats.end(), 0);
    for (std::size_t i = 0; i < b; ++i) {
        auto& entry = e.bits[i];
        entry.bit_seed = bit_seed(seed, static_cast<std::uint32_t>(i));
        entry.training_subset = all_points;
        entry.feature_subset = all_feats;
        LinearHash h;
        h.weights.resize(d);
        double bias = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            h.weights[j] = spec.directions(i, j);
            bias -= spec.directions(i, j) * mean[j];
        }
        h.bias = bias;
        entry.hash = std::move(h);
    }
    if (spec.rank_found < b)
        e.warnings.push_back("tpca: numerical rank " + std::to_string(spec.rank_found) +
                             " < " + std::to_string(b) +
                             " bits; remaining directions are random");
    return e;
}

/// Bagged tPCA: ceil(b / member_bits) members, each trained on an independent
/// bootstrap sample; bits concatenated in member order and truncated to b.
inline HashEnsemble tpca_bagging_train(const FeatureMatrix& data, std::size_t b,
                                       std::size_t member_bits, std::uint64_t seed) {
    require(member_bits >= 1 && member_bits <= data.dim(),
            "tpca_bagging_train: need 1 <= member_bits <= dim");
    require(b >= 1, "tpca_bagging_train: b must be >= 1");
    const std::size_t n = data.n_points();
    const std::size_t members = (b + member_bits - 1) / member_bits;

    HashEnsemble e;
    e.opts.family = HashFamily::linear;
    e.opts.diversity.master_seed = seed;
    e.opts.diversity.sampling = SamplingMode::bootstrap;
    e.opts.diversity.sample_size = n;
    e.dim = data.dim();

    for (std::size_t j = 0; j < members && e.bits.size() < b; ++j) {
        const auto member_seed = mix_seed(seed, 0xBA660000ULL + j);
        auto rng = make_rng(stream_seed(member_seed, Stream::subset));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::int32_t> sample(n);
        for (auto& s : sample) s = static_cast<std::int32_t>(pick(rng));
        const auto boot = data.gather_rows(sample);

        auto member = tpca_train(boot, member_bits, member_seed);
        for (std::size_t i = 0; i < member.bits.size() && e.bits.size() < b; ++i) {
            auto entry = std::move(member.bits[i]);
            entry.training_subset = sample;
            e.bits.push_back(std::move(entry));
        }
        for (const auto& w : member.warnings)
            e.warnings.push_back("member " + std::to_string(j) + ": " + w);
    }
    return e;
}

}  // namespace ilh
