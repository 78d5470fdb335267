#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ilh/rng.hpp"
#include "ilh/types.hpp"

namespace ilh {

struct LinearHash {
    std::vector<double> weights;
    double bias = 0.0;
};

struct SvmConfig {
    double C = 1.0;
    double tolerance = 1e-4;
    std::size_t max_epochs = 1000;
};

struct LinearFit {
    LinearHash hash;
    double train_accuracy = 0.0;
    std::size_t epochs = 0;
    std::vector<double> primal_trace;  // per epoch, filled when requested
};

inline double linear_score(const LinearHash& h, std::span<const float> x) {
    require(x.size() == h.weights.size(), "linear_score: dimension mismatch");
    double s = h.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += h.weights[j] * x[j];
    return s;
}

/// sign with sign(0) = +1.
inline int predict(const LinearHash& h, std::span<const float> x) {
    return linear_score(h, x) >= 0.0 ? +1 : -1;
}

/// L2-regularized L1-loss SVM by dual coordinate descent. The bias is an
/// augmented constant feature, so Q_ii = x_i.x_i + 1 and the bias is
/// regularized along with w. Variable order is reshuffled every epoch.
inline LinearFit fit_linear(const FeatureMatrix& features,
                            std::span<const std::int8_t> targets, const SvmConfig& cfg,
                            std::uint64_t seed, bool want_primal_trace = false) {
    const std::size_t n = features.n_points();
    const std::size_t d = features.dim();
    require(targets.size() == n, "fit_linear: target length mismatch");
    require(cfg.C > 0.0 && cfg.tolerance > 0.0 && cfg.max_epochs > 0, "fit_linear: bad config");
    bool pos = false, neg = false;
    for (auto t : targets) {
        require(t == 1 || t == -1, "fit_linear: targets must be +-1");
        (t > 0 ? pos : neg) = true;
    }
    require(pos && neg, "fit_linear: both classes required");

    LinearFit fit;
    fit.hash.weights.assign(d, 0.0);
    double& bias = fit.hash.bias;
    auto& w = fit.hash.weights;

    std::vector<double> q_ii(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = features.row(i);
        double q = 1.0;  // bias feature
        for (auto v : x) q += static_cast<double>(v) * v;
        q_ii[i] = q;
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(seed);

    const auto primal = [&] {
        double obj = 0.5 * (bias * bias);
        for (auto wj : w) obj += 0.5 * wj * wj;
        for (std::size_t i = 0; i < n; ++i) {
            const double margin = targets[i] * linear_score(fit.hash, features.row(i));
            obj += cfg.C * std::max(0.0, 1.0 - margin);
        }
        return obj;
    };

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double max_violation = 0.0;
        for (auto i : order) {
            const auto x = features.row(static_cast<std::size_t>(i));
            const double y = targets[static_cast<std::size_t>(i)];
            const double g = y * linear_score(fit.hash, x) - 1.0;

            double pg = g;
            const double a = alpha[static_cast<std::size_t>(i)];
            if (a <= 0.0)
                pg = std::min(g, 0.0);
            else if (a >= cfg.C)
                pg = std::max(g, 0.0);
            max_violation = std::max(max_violation, std::fabs(pg));
            if (std::fabs(pg) < 1e-12) continue;

            const double a_new =
                std::clamp(a - g / q_ii[static_cast<std::size_t>(i)], 0.0, cfg.C);
            const double delta = a_new - a;
            if (delta == 0.0) continue;
            alpha[static_cast<std::size_t>(i)] = a_new;
            for (std::size_t j = 0; j < d; ++j) w[j] += delta * y * x[j];
            bias += delta * y;
        }
        fit.epochs = epoch + 1;
        if (want_primal_trace) fit.primal_trace.push_back(primal());
        if (max_violation < cfg.tolerance) break;
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (predict(fit.hash, features.row(i)) == targets[i]) ++correct;
    fit.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return fit;
}

}  // namespace ilh
