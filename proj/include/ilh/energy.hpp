#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "ilh/types.hpp"

namespace ilh {

enum class LossKind { ksh, bre, lap };

/// E(z) = sum over couplings a_nm z_n z_m (each unordered pair once)
///      + sum_n linear_n z_n + constant,  z in {-1,+1}^n_vars.
/// Couplings keep n < m and appear at most once; diagonal terms are constants
/// by z_n^2 = 1 and live in `constant`.
struct Coupling {
    std::int32_t n = 0, m = 0;
    double a = 0.0;
};

struct QuadraticEnergy {
    std::int32_t n_vars = 0;
    std::vector<Coupling> couplings;
    std::vector<double> linear;  // sized n_vars
    double constant = 0.0;
};

class EnergyBuilder {
public:
    explicit EnergyBuilder(std::int32_t n_vars) {
        e_.n_vars = n_vars;
        e_.linear.assign(static_cast<std::size_t>(n_vars), 0.0);
    }
    void add_coupling(std::int32_t n, std::int32_t m, double a) {
        require(n != m, "EnergyBuilder: self coupling");
        require(n >= 0 && m >= 0 && n < e_.n_vars && m < e_.n_vars,
                "EnergyBuilder: index out of range");
        if (n > m) std::swap(n, m);
        acc_[{n, m}] += a;
    }
    void add_linear(std::int32_t n, double l) {
        e_.linear[static_cast<std::size_t>(n)] += l;
    }
    void add_constant(double c) { e_.constant += c; }

    QuadraticEnergy take() {
        e_.couplings.reserve(acc_.size());
        for (const auto& [key, a] : acc_)
            if (a != 0.0) e_.couplings.push_back({key.first, key.second, a});
        acc_.clear();
        return std::move(e_);
    }

private:
    QuadraticEnergy e_;
    std::map<std::pair<std::int32_t, std::int32_t>, double> acc_;
};

struct PairCoefficient {
    double a = 0.0;  // coefficient on z_n z_m
    double c = 0.0;  // additive constant
};

/// Single-bit loss written as a*z_n*z_m + c. Any loss depending only on
/// whether the two bits agree has this form; the same holds for three bits
/// but not for four or more.
inline PairCoefficient pairwise_coefficient(LossKind kind, double y) {
    switch (kind) {
        case LossKind::ksh:
            // (z_n z_m - y)^2
            require(y == 1.0 || y == -1.0, "pairwise_coefficient: KSH needs y in {-1,+1}");
            return {-2.0 * y, 1.0 + y * y};
        case LossKind::bre:
            // ((z_n - z_m)^2 - y)^2, squared distance in {0,4}
            require(y >= 0.0 && y <= 1.0, "pairwise_coefficient: BRE needs y in [0,1]");
            return {-4.0 * (2.0 - y), (2.0 - y) * (2.0 - y) + 4.0};
        case LossKind::lap:
            // y (z_n - z_m)^2
            require(y == 1.0 || y == -1.0, "pairwise_coefficient: LAP needs y in {-1,+1}");
            return {-2.0 * y, 2.0 * y};
    }
    throw std::invalid_argument("pairwise_coefficient: bad kind");
}

/// Literal single-bit loss value, used as the reduction oracle.
inline double literal_loss(LossKind kind, double y, int zn, int zm) {
    const double t = static_cast<double>(zn * zm);
    switch (kind) {
        case LossKind::ksh:
            return (t - y) * (t - y);
        case LossKind::bre: {
            const double d2 = 2.0 * (1.0 - t);
            return (d2 - y) * (d2 - y);
        }
        case LossKind::lap:
            return y * 2.0 * (1.0 - t);
    }
    throw std::invalid_argument("literal_loss: bad kind");
}

/// BRE's y is a scaled distance target in [0,1]: similar pairs (+1) want
/// distance 0, dissimilar pairs (-1) want distance 1.
inline double bre_target(std::int8_t y) { return y > 0 ? 0.0 : 1.0; }

inline QuadraticEnergy build_energy(const AffinitySet& affinities, LossKind kind,
                                    std::int32_t n_vars) {
    EnergyBuilder b(n_vars);
    for (const auto& p : affinities.pairs) {
        const double y = kind == LossKind::bre ? bre_target(p.y) : static_cast<double>(p.y);
        const auto pc = pairwise_coefficient(kind, y);
        b.add_coupling(p.n, p.m, pc.a);
        b.add_constant(pc.c);
    }
    return b.take();
}

inline QuadraticEnergy build_energy(const AffinitySet& affinities, LossKind kind) {
    std::int32_t n_vars = 0;
    for (const auto& p : affinities.pairs)
        n_vars = std::max({n_vars, p.n + 1, p.m + 1});
    return build_energy(affinities, kind, n_vars);
}

inline double energy_eval(const QuadraticEnergy& e, std::span<const std::int8_t> z) {
    require(z.size() == static_cast<std::size_t>(e.n_vars), "energy_eval: length mismatch");
    double v = e.constant;
    for (const auto& c : e.couplings)
        v += c.a * z[static_cast<std::size_t>(c.n)] * z[static_cast<std::size_t>(c.m)];
    for (std::size_t n = 0; n < e.linear.size(); ++n)
        v += e.linear[n] * z[n];
    return v;
}

}  // namespace ilh
