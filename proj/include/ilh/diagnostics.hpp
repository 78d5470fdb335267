#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ilh/ensemble.hpp"
#include "ilh/rng.hpp"
#include "ilh/types.hpp"

namespace ilh {

struct Histogram {
    std::vector<double> edges;        // n_bins + 1 edges over [-1, 1]
    std::vector<std::int64_t> counts;  // n_bins
};

inline Histogram histogram_unit(std::span<const double> samples, std::size_t n_bins = 41) {
    Histogram h;
    h.edges.resize(n_bins + 1);
    h.counts.assign(n_bins, 0);
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.edges[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_bins);
    for (auto v : samples) {
        auto bin = static_cast<std::ptrdiff_t>((v + 1.0) / 2.0 * static_cast<double>(n_bins));
        if (bin < 0) bin = 0;
        if (bin >= static_cast<std::ptrdiff_t>(n_bins))
            bin = static_cast<std::ptrdiff_t>(n_bins) - 1;
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

/// C_Z = Z^T Z / N over +-1 code columns.
inline Matrix code_gram(const CodeMatrix& codes) {
    const std::size_t b = codes.n_bits();
    const std::size_t n = codes.n_points();
    require(n >= 1, "code_gram: empty codes");

    // Unpack columns once; column-major +-1 buffer keeps the O(b^2 N) loop tight.
    std::vector<std::int8_t> cols(b * n);
    for (std::size_t j = 0; j < b; ++j)
        for (std::size_t i = 0; i < n; ++i)
            cols[j * n + i] = static_cast<std::int8_t>(codes.get(i, j));

    Matrix cz(b, b);
    for (std::size_t i = 0; i < b; ++i) {
        cz(i, i) = 1.0;
        for (std::size_t j = i + 1; j < b; ++j) {
            std::int64_t dot = 0;
            const auto* a = cols.data() + i * n;
            const auto* c = cols.data() + j * n;
            for (std::size_t p = 0; p < n; ++p) dot += a[p] * c[p];
            cz(i, j) = cz(j, i) = static_cast<double>(dot) / static_cast<double>(n);
        }
    }
    return cz;
}

/// C_W = W W^T over unit-normalized weight rows (bias excluded).
inline Matrix weight_gram(const Matrix& weights) {
    const std::size_t b = weights.rows;
    std::vector<double> norms(b);
    for (std::size_t i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < weights.cols; ++j) s += weights(i, j) * weights(i, j);
        require(s > 0.0, "weight_gram: zero-norm weight row");
        norms[i] = std::sqrt(s);
    }
    Matrix cw(b, b);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = i; j < b; ++j) {
            double dot = 0.0;
            for (std::size_t c = 0; c < weights.cols; ++c) dot += weights(i, c) * weights(j, c);
            cw(i, j) = cw(j, i) = dot / (norms[i] * norms[j]);
        }
    return cw;
}

/// Gram matrices of codes and hash directions.
inline std::pair<Matrix, Matrix> ortho_matrices(const CodeMatrix& codes,
                                                const Matrix& weights) {
    require(weights.rows == codes.n_bits(), "ortho_matrices: weight row count != n_bits");
    return {code_gram(codes), weight_gram(weights)};
}

/// Stack of unit-normalized weight rows for a linear ensemble, bias excluded.
/// Bits with restricted feature subsets embed into the full dimension with
/// zeros elsewhere. Kernel ensembles have no comparable weight space; empty.
inline std::optional<Matrix> weight_rows(const HashEnsemble& e) {
    if (e.family() != HashFamily::linear) return std::nullopt;
    Matrix w(e.n_bits(), e.dim);
    for (std::size_t i = 0; i < e.n_bits(); ++i) {
        const auto& h = std::get<LinearHash>(e.bits[i].hash);
        const auto& fs = e.bits[i].feature_subset;
        for (std::size_t j = 0; j < fs.size(); ++j)
            w(i, static_cast<std::size_t>(fs[j])) = h.weights[j];
    }
    return w;
}

/// (1/(b(b-1))) * ||I - C||_F^2 for a unit-diagonal correlation-like matrix;
/// 0 iff exactly orthogonal, 1 when all off-diagonals hit +-1.
inline double ortho_measure(const Matrix& c) {
    require(c.rows == c.cols, "ortho_measure: matrix must be square");
    const std::size_t b = c.rows;
    require(b >= 2, "ortho_measure: need at least 2 bits");
    double sum = 0.0;
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            const double target = i == j ? 1.0 : 0.0;
            const double d = target - c(i, j);
            sum += d * d;
        }
    return sum / static_cast<double>(b * (b - 1));
}

enum class ControlKind { binary, real_unit };

struct ControlSample {
    std::vector<double> values;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

/// Dot products of independent random vectors, the null model for the C
/// entries: +-1 components scaled by 1/d, or unit-normalized Gaussians. Both
/// have mean 0 and variance 1/d.
inline ControlSample random_control(std::size_t dim, std::size_t n_samples, ControlKind kind,
                                    std::uint64_t seed) {
    require(dim >= 1, "random_control: dim must be >= 1");
    ControlSample out;
    out.values.reserve(n_samples);
    auto rng = make_rng(seed);

    if (kind == ControlKind::binary) {
        std::uniform_int_distribution<int> coin(0, 1);
        for (std::size_t s = 0; s < n_samples; ++s) {
            std::int64_t dot = 0;
            for (std::size_t j = 0; j < dim; ++j) {
                const int x = coin(rng) ? 1 : -1;
                const int y = coin(rng) ? 1 : -1;
                dot += x * y;
            }
            out.values.push_back(static_cast<double>(dot) / static_cast<double>(dim));
        }
    } else {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> x(dim), y(dim);
        for (std::size_t s = 0; s < n_samples; ++s) {
            double nx = 0.0, ny = 0.0;
            do {
                nx = 0.0;
                for (auto& v : x) {
                    v = gauss(rng);
                    nx += v * v;
                }
            } while (nx == 0.0);
            do {
                ny = 0.0;
                for (auto& v : y) {
                    v = gauss(rng);
                    ny += v * v;
                }
            } while (ny == 0.0);
            double dot = 0.0;
            for (std::size_t j = 0; j < dim; ++j) dot += x[j] * y[j];
            out.values.push_back(dot / std::sqrt(nx * ny));
        }
    }

    for (auto v : out.values) out.mean += v;
    if (!out.values.empty()) out.mean /= static_cast<double>(out.values.size());
    if (out.values.size() > 1) {
        for (auto v : out.values) out.variance += (v - out.mean) * (v - out.mean);
        out.variance /= static_cast<double>(out.values.size() - 1);
    }
    return out;
}

inline std::vector<double> offdiagonal(const Matrix& c) {
    std::vector<double> out;
    out.reserve(c.rows * (c.rows - 1) / 2);
    for (std::size_t i = 0; i < c.rows; ++i)
        for (std::size_t j = i + 1; j < c.cols; ++j) out.push_back(c(i, j));
    return out;
}

struct OrthoReport {
    Matrix c_codes;
    Matrix c_weights;           // empty (0x0) for kernel ensembles
    double measure_codes = 0.0;
    double measure_weights = 0.0;  // meaningful only when c_weights nonempty
    Histogram hist_codes;
    Histogram hist_weights;
    Histogram control_codes;    // binary null model at dim = n_points
    Histogram control_weights;  // real-unit null model at dim = D
};

inline OrthoReport make_ortho_report(const HashEnsemble& e, const CodeMatrix& codes,
                                     std::uint64_t seed) {
    require(codes.n_bits() == e.n_bits(), "make_ortho_report: code width mismatch");
    OrthoReport rep;
    const std::size_t b = e.n_bits();
    const std::size_t n_pairs = b * (b - 1) / 2;

    rep.c_codes = code_gram(codes);
    // Kernel ensembles carry no comparable weight space; codes only then.
    if (const auto w = weight_rows(e)) {
        rep.c_weights = weight_gram(*w);
        rep.measure_weights = ortho_measure(rep.c_weights);
        rep.hist_weights = histogram_unit(offdiagonal(rep.c_weights));
        rep.control_weights =
            histogram_unit(random_control(e.dim, n_pairs, ControlKind::real_unit,
                                          mix_seed(seed, 2))
                               .values);
    }
    rep.measure_codes = ortho_measure(rep.c_codes);
    rep.hist_codes = histogram_unit(offdiagonal(rep.c_codes));
    rep.control_codes = histogram_unit(
        random_control(codes.n_points(), n_pairs, ControlKind::binary, mix_seed(seed, 1))
            .values);
    return rep;
}

}  // namespace ilh
