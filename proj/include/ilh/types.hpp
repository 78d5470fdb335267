#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ilh {

/// Dense row-major feature matrix, float32 storage.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t n_points, std::size_t dim)
        : n_(n_points), d_(dim), data_(n_points * dim, 0.0f) {}

    std::size_t n_points() const { return n_; }
    std::size_t dim() const { return d_; }

    std::span<const float> row(std::size_t i) const {
        return {data_.data() + i * d_, d_};
    }
    std::span<float> row(std::size_t i) {
        return {data_.data() + i * d_, d_};
    }
    float operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
    float& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    /// New matrix holding the given rows (indices may repeat).
    FeatureMatrix gather_rows(std::span<const std::int32_t> rows) const {
        FeatureMatrix out(rows.size(), d_);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto src = row(static_cast<std::size_t>(rows[r]));
            std::copy(src.begin(), src.end(), out.row(r).begin());
        }
        return out;
    }

    /// New matrix holding the given columns of every row.
    FeatureMatrix gather_cols(std::span<const std::int32_t> cols) const {
        FeatureMatrix out(n_, cols.size());
        for (std::size_t r = 0; r < n_; ++r) {
            auto src = row(r);
            for (std::size_t c = 0; c < cols.size(); ++c)
                out(r, c) = src[static_cast<std::size_t>(cols[c])];
        }
        return out;
    }

    /// New matrix holding the given columns of the given rows.
    FeatureMatrix gather(std::span<const std::int32_t> rows,
                         std::span<const std::int32_t> cols) const {
        FeatureMatrix out(rows.size(), cols.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto src = row(static_cast<std::size_t>(rows[r]));
            for (std::size_t c = 0; c < cols.size(); ++c)
                out(r, c) = src[static_cast<std::size_t>(cols[c])];
        }
        return out;
    }

private:
    std::size_t n_ = 0, d_ = 0;
    std::vector<float> data_;
};

using LabelVector = std::vector<std::int32_t>;

/// One supervised pair: y = +1 similar, -1 dissimilar.
struct AffinityPair {
    std::int32_t n = 0;
    std::int32_t m = 0;
    std::int8_t y = 0;
};

struct AffinitySet {
    std::vector<AffinityPair> pairs;

    std::size_t size() const { return pairs.size(); }
};

/// Packed binary codes. Logical code +1 stores as bit 1, -1 as bit 0.
/// Rows are padded to whole bytes; bits fill each byte LSB-first.
class CodeMatrix {
public:
    CodeMatrix() = default;
    CodeMatrix(std::size_t n_points, std::size_t n_bits)
        : n_(n_points), b_(n_bits), row_bytes_((n_bits + 7) / 8),
          data_(n_points * ((n_bits + 7) / 8), 0) {}

    std::size_t n_points() const { return n_; }
    std::size_t n_bits() const { return b_; }
    std::size_t row_bytes() const { return row_bytes_; }

    int get(std::size_t i, std::size_t j) const {
        return (data_[i * row_bytes_ + j / 8] >> (j % 8)) & 1 ? +1 : -1;
    }
    void set(std::size_t i, std::size_t j, int code) {
        std::uint8_t& byte = data_[i * row_bytes_ + j / 8];
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (j % 8));
        if (code > 0)
            byte |= mask;
        else
            byte &= static_cast<std::uint8_t>(~mask);
    }

    const std::uint8_t* row_data(std::size_t i) const { return data_.data() + i * row_bytes_; }
    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

private:
    std::size_t n_ = 0, b_ = 0, row_bytes_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Dense row-major double matrix (diagnostics, weight stacks).
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace ilh
