#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ilh/affinity.hpp"
#include "ilh/energy.hpp"
#include "ilh/kernel.hpp"
#include "ilh/mincut.hpp"
#include "ilh/rng.hpp"
#include "ilh/svm.hpp"
#include "ilh/types.hpp"

namespace ilh {

enum class InitMode { all_ones, random };
enum class SamplingMode { none, disjoint, random, bootstrap };
enum class HashFamily { linear, kernel };

struct DiversityConfig {
    InitMode init_mode = InitMode::all_ones;
    SamplingMode sampling = SamplingMode::none;
    std::size_t sample_size = 0;  // per-bit N_bit; ignored when sampling == none
    double feature_fraction = 1.0;
    std::uint64_t master_seed = 0;
};

struct KernelOptions {
    std::size_t centers = 500;
    CentersMode mode = CentersMode::shared;
};

struct TrainOptions {
    DiversityConfig diversity;
    HashFamily family = HashFamily::linear;
    KernelOptions kernel;
    SvmConfig svm;
    LossKind loss = LossKind::lap;
    std::size_t max_sweeps = 5;
};

struct BitEntry {
    std::variant<LinearHash, KernelHash> hash;
    std::vector<std::int32_t> feature_subset;   // ascending feature indices
    std::vector<std::int32_t> training_subset;  // as drawn; repeats under bootstrap
    std::uint64_t bit_seed = 0;
    double train_accuracy = 0.0;
    double train_seconds = 0.0;
    bool degenerate = false;  // constant bit kept with a warning
};

struct HashEnsemble {
    TrainOptions opts;
    std::size_t dim = 0;  // full input dimensionality
    std::vector<BitEntry> bits;
    std::vector<std::string> warnings;

    std::size_t n_bits() const { return bits.size(); }
    HashFamily family() const { return opts.family; }
    LossKind loss_kind() const { return opts.loss; }
    const DiversityConfig& diversity() const { return opts.diversity; }
};

inline void validate_options(const FeatureMatrix& data, std::size_t b,
                             const TrainOptions& opts) {
    const auto& d = opts.diversity;
    require(data.n_points() >= 1 && data.dim() >= 1, "train: empty data");
    require(d.feature_fraction > 0.0 && d.feature_fraction <= 1.0,
            "train: feature_fraction must be in (0,1]");
    if (d.sampling != SamplingMode::none) {
        require(d.sample_size >= 1, "train: sample_size required for sampled training");
        require(d.sample_size <= data.n_points(), "train: sample_size exceeds data");
        if (d.sampling == SamplingMode::disjoint)
            require(b * d.sample_size <= data.n_points(),
                    "train: disjoint budget exhausted (b * sample_size > N); "
                    "use sampling=random or lower sample_size");
    }
    if (opts.family == HashFamily::kernel)
        require(opts.kernel.centers >= 1, "train: kernel centers must be >= 1");
}

namespace detail {

inline std::vector<std::int32_t> draw_subset(const DiversityConfig& d, std::size_t n_points,
                                             std::uint64_t bseed, std::uint32_t bit_index) {
    std::vector<std::int32_t> subset;
    switch (d.sampling) {
        case SamplingMode::none: {
            subset.resize(n_points);
            std::iota(subset.begin(), subset.end(), 0);
            break;
        }
        case SamplingMode::disjoint: {
            // One master-seed permutation shared by all bits; bit i owns chunk i.
            std::vector<std::int32_t> perm(n_points);
            std::iota(perm.begin(), perm.end(), 0);
            auto rng = make_rng(stream_seed(d.master_seed, Stream::subset));
            std::shuffle(perm.begin(), perm.end(), rng);
            const std::size_t lo = static_cast<std::size_t>(bit_index) * d.sample_size;
            subset.assign(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                          perm.begin() + static_cast<std::ptrdiff_t>(lo + d.sample_size));
            break;
        }
        case SamplingMode::random: {
            std::vector<std::int32_t> pool(n_points);
            std::iota(pool.begin(), pool.end(), 0);
            auto rng = make_rng(stream_seed(bseed, Stream::subset));
            for (std::size_t i = 0; i < d.sample_size; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, n_points - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
            subset.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d.sample_size));
            break;
        }
        case SamplingMode::bootstrap: {
            // Bagging: one master-seed subset is the ensemble's training set;
            // each bit resamples it with replacement. Unlike disjoint/random,
            // the ensemble never sees more than sample_size distinct points.
            std::vector<std::int32_t> pool(n_points);
            std::iota(pool.begin(), pool.end(), 0);
            auto master = make_rng(stream_seed(d.master_seed, Stream::subset));
            for (std::size_t i = 0; i < d.sample_size; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, n_points - 1);
                std::swap(pool[i], pool[pick(master)]);
            }
            auto rng = make_rng(stream_seed(bseed, Stream::subset));
            std::uniform_int_distribution<std::size_t> pick(0, d.sample_size - 1);
            subset.reserve(d.sample_size);
            for (std::size_t i = 0; i < d.sample_size; ++i)
                subset.push_back(pool[pick(rng)]);
            break;
        }
    }
    return subset;
}

inline std::vector<std::int32_t> draw_feature_subset(const DiversityConfig& d, std::size_t dim,
                                                     std::uint64_t bseed) {
    const auto want = static_cast<std::size_t>(
        std::max<double>(1.0, std::ceil(d.feature_fraction * static_cast<double>(dim))));
    std::vector<std::int32_t> feats(dim);
    std::iota(feats.begin(), feats.end(), 0);
    if (want >= dim) return feats;
    auto rng = make_rng(stream_seed(bseed, Stream::features));
    for (std::size_t i = 0; i < want; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, dim - 1);
        std::swap(feats[i], feats[pick(rng)]);
    }
    feats.resize(want);
    std::sort(feats.begin(), feats.end());
    return feats;
}

inline bool all_equal(std::span<const std::int8_t> z) {
    if (z.empty()) return true;
    for (auto v : z)
        if (v != z.front()) return false;
    return true;
}

inline FeatureMatrix shared_kernel_centers(const FeatureMatrix& data, const TrainOptions& opts) {
    auto rng = make_rng(stream_seed(opts.diversity.master_seed, Stream::centers));
    return pick_centers(data, std::min(opts.kernel.centers, data.n_points()), rng);
}

struct ClassifierOutcome {
    std::variant<LinearHash, KernelHash> hash;
    double accuracy = 1.0;
    bool degenerate = false;
};

// Fit a bit's classifier to optimized codes. An all-equal code column yields
// a flagged constant hash instead of an SVM fit.
inline ClassifierOutcome fit_codes_classifier(const FeatureMatrix& feats,
                                              std::span<const std::int8_t> targets,
                                              const TrainOptions& opts, std::uint64_t bseed,
                                              const FeatureMatrix* shared_centers) {
    ClassifierOutcome out;
    if (all_equal(targets)) {
        out.degenerate = true;
        const double c = targets.empty() ? 1.0 : static_cast<double>(targets.front());
        if (opts.family == HashFamily::linear) {
            LinearHash h;
            h.weights.assign(feats.dim(), 0.0);
            h.bias = c;
            out.hash = std::move(h);
        } else {
            KernelHash h;
            const std::int32_t anchor[] = {0};
            h.centers = feats.gather_rows(anchor);
            h.sigma = 1.0;
            h.weights.assign(1, 0.0);
            h.bias = c;
            out.hash = std::move(h);
        }
        return out;
    }
    if (opts.family == HashFamily::linear) {
        auto fit = fit_linear(feats, targets, opts.svm, stream_seed(bseed, Stream::svm));
        out.accuracy = fit.train_accuracy;
        out.hash = std::move(fit.hash);
    } else {
        auto fit = fit_kernel(feats, targets, opts.kernel.mode,
                              std::min(opts.kernel.centers, feats.n_points()), opts.svm,
                              stream_seed(bseed, Stream::centers), shared_centers);
        out.accuracy = fit.train_accuracy;
        out.hash = std::move(fit.hash);
    }
    return out;
}

}  // namespace detail

/// Train one bit: draw this bit's training/feature subsets, restrict the
/// affinities, minimize the single-bit energy by alternating min-cut, then
/// fit the bit's classifier to the optimized codes. Pure function of
/// (data, affinities, opts, bit_index).
inline BitEntry train_bit(const FeatureMatrix& data, const AffinitySet& affinities,
                          const TrainOptions& opts, std::uint32_t bit_index) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_options(data, bit_index + 1, opts);
    const auto& div = opts.diversity;

    BitEntry entry;
    entry.bit_seed = bit_seed(div.master_seed, bit_index);
    entry.training_subset = detail::draw_subset(div, data.n_points(), entry.bit_seed, bit_index);
    entry.feature_subset = detail::draw_feature_subset(div, data.dim(), entry.bit_seed);

    // Codes are optimized over distinct points; bootstrap repeats only weight
    // the classifier fit below.
    std::vector<std::int32_t> uniq = entry.training_subset;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    const auto restricted = restrict_affinities(affinities, uniq, data.n_points());
    if (restricted.pairs.empty()) {
        std::ostringstream msg;
        msg << "train_bit: bit " << bit_index << ": no affinity pairs survive the training "
            << "subset (" << uniq.size() << " distinct points, " << affinities.size()
            << " total pairs); increase sample_size or supply denser affinities";
        throw std::runtime_error(msg.str());
    }

    const auto energy =
        build_energy(restricted, opts.loss, static_cast<std::int32_t>(uniq.size()));

    auto initial = [&](Stream s) {
        std::vector<std::int8_t> z(uniq.size(), +1);
        if (s != Stream::init || div.init_mode == InitMode::random) {
            auto rng = make_rng(stream_seed(entry.bit_seed, s));
            std::uniform_int_distribution<int> coin(0, 1);
            for (auto& v : z) v = coin(rng) ? +1 : -1;
        }
        return z;
    };

    std::vector<std::int8_t> z0(uniq.size(), +1);
    if (div.init_mode == InitMode::random) z0 = initial(Stream::init);
    auto z = alternating_mincut(energy, std::move(z0), opts.max_sweeps,
                                mincut_round_seed(entry.bit_seed, 0));
    if (detail::all_equal(z) && uniq.size() > 1) {
        z = alternating_mincut(energy, initial(Stream::retry), opts.max_sweeps,
                               mincut_round_seed(entry.bit_seed, 0));
    }

    // Map optimized codes back onto the sampled multiset for the fit.
    std::vector<std::int32_t> local(data.n_points(), -1);
    for (std::size_t i = 0; i < uniq.size(); ++i)
        local[static_cast<std::size_t>(uniq[i])] = static_cast<std::int32_t>(i);
    std::vector<std::int8_t> targets(entry.training_subset.size());
    for (std::size_t i = 0; i < entry.training_subset.size(); ++i)
        targets[i] = z[static_cast<std::size_t>(
            local[static_cast<std::size_t>(entry.training_subset[i])])];

    const auto feats = data.gather(entry.training_subset, entry.feature_subset);
    const FeatureMatrix* shared = nullptr;
    FeatureMatrix shared_store;
    if (opts.family == HashFamily::kernel && opts.kernel.mode == CentersMode::shared) {
        shared_store = detail::shared_kernel_centers(data, opts);
        if (entry.feature_subset.size() != data.dim())
            shared_store = shared_store.gather_cols(entry.feature_subset);
        shared = &shared_store;
    }
    auto fitted = detail::fit_codes_classifier(feats, targets, opts, entry.bit_seed, shared);
    entry.hash = std::move(fitted.hash);
    entry.train_accuracy = fitted.accuracy;
    entry.degenerate = fitted.degenerate;

    entry.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return entry;
}

/// Apply one bit's hash to a full-dimensional row.
inline int predict_bit(const BitEntry& bit, std::span<const float> row,
                       std::vector<float>& scratch) {
    const auto& fs = bit.feature_subset;
    std::span<const float> x = row;
    if (fs.size() != row.size()) {
        scratch.resize(fs.size());
        for (std::size_t j = 0; j < fs.size(); ++j)
            scratch[j] = row[static_cast<std::size_t>(fs[j])];
        x = scratch;
    }
    return std::visit([&](const auto& h) { return predict(h, x); }, bit.hash);
}

/// Train b independent bits, optionally in parallel. Results are identical
/// for every `jobs` value; per-bit failures carry their bit index.
inline HashEnsemble train_ensemble(const FeatureMatrix& data, const AffinitySet& affinities,
                                   std::size_t b, const TrainOptions& opts,
                                   std::size_t jobs = 1) {
    require(b >= 1, "train_ensemble: b must be >= 1");
    validate_options(data, b, opts);

    HashEnsemble e;
    e.opts = opts;
    e.dim = data.dim();
    e.bits.resize(b);

    std::vector<std::exception_ptr> errors(b);
    const auto run_bit = [&](std::size_t i) {
        try {
            e.bits[i] = train_bit(data, affinities, opts, static_cast<std::uint32_t>(i));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < b; ++i) run_bit(i);
    } else {
        std::atomic<std::size_t> next{0};
        const std::size_t n_workers = std::min(jobs, b);
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < b; i = next.fetch_add(1)) run_bit(i);
            });
        for (auto& t : workers) t.join();
    }

    for (std::size_t i = 0; i < b; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& ex) {
            throw std::runtime_error("train_ensemble: bit " + std::to_string(i) + ": " +
                                     ex.what());
        }
    }
    for (std::size_t i = 0; i < b; ++i)
        if (e.bits[i].degenerate)
            e.warnings.push_back("bit " + std::to_string(i) +
                                 " collapsed to a constant code; kept with zero weights");
    return e;
}

/// Append extra bits trained as indices b, b+1, ...; the existing entries are
/// untouched, so the result nests the input exactly.
inline HashEnsemble extend_ensemble(const HashEnsemble& e, std::size_t extra_bits,
                                    const FeatureMatrix& data, const AffinitySet& affinities,
                                    std::size_t jobs = 1) {
    if (extra_bits == 0) return e;
    const std::size_t b0 = e.n_bits();
    validate_options(data, b0 + extra_bits, e.opts);

    HashEnsemble out = e;
    out.bits.resize(b0 + extra_bits);

    std::vector<std::exception_ptr> errors(extra_bits);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < extra_bits; i = next.fetch_add(1)) {
            try {
                out.bits[b0 + i] =
                    train_bit(data, affinities, e.opts, static_cast<std::uint32_t>(b0 + i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> workers;
        const std::size_t n_workers = std::min(jobs, extra_bits);
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
        for (auto& t : workers) t.join();
    }
    for (std::size_t i = 0; i < extra_bits; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& ex) {
            throw std::runtime_error("extend_ensemble: bit " + std::to_string(b0 + i) + ": " +
                                     ex.what());
        }
    }
    for (std::size_t i = 0; i < extra_bits; ++i)
        if (out.bits[b0 + i].degenerate)
            out.warnings.push_back("bit " + std::to_string(b0 + i) +
                                   " collapsed to a constant code; kept with zero weights");
    return out;
}

}  // namespace ilh
