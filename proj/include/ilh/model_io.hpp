#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ilh/ensemble.hpp"
#include "ilh/io.hpp"

namespace ilh {

namespace detail {

inline std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void expect_word(std::istream& is, const std::string& path, const char* word) {
    std::string got;
    if (!(is >> got) || got != word)
        io_fail(path, std::string("expected '") + word + "', got '" + got + "'");
}

template <typename T>
T read_value(std::istream& is, const std::string& path, const char* what) {
    T v{};
    if (!(is >> v)) io_fail(path, std::string("bad value for ") + what);
    return v;
}

inline void write_indices(std::ostream& os, const char* tag,
                          const std::vector<std::int32_t>& v) {
    os << tag << ' ' << v.size();
    for (auto i : v) os << ' ' << i;
    os << '\n';
}

inline void write_doubles(std::ostream& os, const char* tag, const std::vector<double>& v) {
    os << tag << ' ' << v.size();
    for (auto x : v) os << ' ' << g17(x);
    os << '\n';
}

}  // namespace detail

// Model text format, version 1:
//   ilh-model v1
//   bits <b>
//   hash <linear|kernel>
//   dim <D>
// then one block per bit. All reals printed with 17 significant digits so a
// round trip is bit-exact; the file carries no timing, so identical training
// runs produce byte-identical files regardless of thread count.
inline void write_model(const std::string& path, const HashEnsemble& e) {
    auto os = detail::open_out(path, std::ios::out);
    os << "ilh-model v1\n";
    os << "bits " << e.n_bits() << '\n';
    os << "hash " << (e.family() == HashFamily::kernel ? "kernel" : "linear") << '\n';
    os << "dim " << e.dim << '\n';
    for (std::size_t i = 0; i < e.bits.size(); ++i) {
        const auto& bit = e.bits[i];
        os << "bit " << i << '\n';
        os << "seed " << bit.bit_seed << '\n';
        os << "degenerate " << (bit.degenerate ? 1 : 0) << '\n';
        os << "accuracy " << detail::g17(bit.train_accuracy) << '\n';
        detail::write_indices(os, "features", bit.feature_subset);
        if (const auto* lin = std::get_if<LinearHash>(&bit.hash)) {
            detail::write_doubles(os, "weights", lin->weights);
            os << "bias " << detail::g17(lin->bias) << '\n';
        } else {
            const auto& ker = std::get<KernelHash>(bit.hash);
            os << "sigma " << detail::g17(ker.sigma) << '\n';
            os << "centers " << ker.centers.n_points() << ' ' << ker.centers.dim() << '\n';
            for (std::size_t c = 0; c < ker.centers.n_points(); ++c) {
                const auto row = ker.centers.row(c);
                for (std::size_t j = 0; j < row.size(); ++j)
                    os << (j ? " " : "") << detail::g17(static_cast<double>(row[j]));
                os << '\n';
            }
            detail::write_doubles(os, "weights", ker.weights);
            os << "bias " << detail::g17(ker.bias) << '\n';
        }
    }
    if (!os) detail::io_fail(path, "write failed");
}

inline HashEnsemble read_model(const std::string& path) {
    auto is = detail::open_in(path, std::ios::in);
    detail::expect_word(is, path, "ilh-model");
    detail::expect_word(is, path, "v1");
    detail::expect_word(is, path, "bits");
    const auto n_bits = detail::read_value<std::size_t>(is, path, "bits");
    detail::expect_word(is, path, "hash");
    const auto hash_name = detail::read_value<std::string>(is, path, "hash");
    if (hash_name != "linear" && hash_name != "kernel")
        detail::io_fail(path, "unknown hash family '" + hash_name + "'");
    detail::expect_word(is, path, "dim");
    const auto dim = detail::read_value<std::size_t>(is, path, "dim");

    HashEnsemble e;
    e.dim = dim;
    e.opts.family = hash_name == "kernel" ? HashFamily::kernel : HashFamily::linear;
    e.bits.reserve(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        detail::expect_word(is, path, "bit");
        const auto idx = detail::read_value<std::size_t>(is, path, "bit index");
        if (idx != i) detail::io_fail(path, "bit blocks out of order");
        BitEntry bit;
        detail::expect_word(is, path, "seed");
        bit.bit_seed = detail::read_value<std::uint64_t>(is, path, "seed");
        detail::expect_word(is, path, "degenerate");
        bit.degenerate = detail::read_value<int>(is, path, "degenerate") != 0;
        detail::expect_word(is, path, "accuracy");
        bit.train_accuracy = detail::read_value<double>(is, path, "accuracy");
        detail::expect_word(is, path, "features");
        const auto n_feat = detail::read_value<std::size_t>(is, path, "feature count");
        bit.feature_subset.resize(n_feat);
        for (auto& f : bit.feature_subset)
            f = detail::read_value<std::int32_t>(is, path, "feature index");
        if (e.opts.family == HashFamily::linear) {
            detail::expect_word(is, path, "weights");
            const auto n_w = detail::read_value<std::size_t>(is, path, "weight count");
            LinearHash lin;
            lin.weights.resize(n_w);
            for (auto& w : lin.weights) w = detail::read_value<double>(is, path, "weight");
            detail::expect_word(is, path, "bias");
            lin.bias = detail::read_value<double>(is, path, "bias");
            bit.hash = std::move(lin);
        } else {
            detail::expect_word(is, path, "sigma");
            KernelHash ker;
            ker.sigma = detail::read_value<double>(is, path, "sigma");
            detail::expect_word(is, path, "centers");
            const auto m = detail::read_value<std::size_t>(is, path, "center count");
            const auto dsub = detail::read_value<std::size_t>(is, path, "center dim");
            ker.centers = FeatureMatrix(m, dsub);
            for (auto& v : ker.centers.data())
                v = static_cast<float>(detail::read_value<double>(is, path, "center value"));
            detail::expect_word(is, path, "weights");
            const auto n_w = detail::read_value<std::size_t>(is, path, "weight count");
            ker.weights.resize(n_w);
            for (auto& w : ker.weights) w = detail::read_value<double>(is, path, "weight");
            detail::expect_word(is, path, "bias");
            ker.bias = detail::read_value<double>(is, path, "bias");
            bit.hash = std::move(ker);
        }
        e.bits.push_back(std::move(bit));
    }
    return e;
}

}  // namespace ilh
