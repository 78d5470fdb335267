#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ilh/retrieval.hpp"
#include "ilh/types.hpp"

namespace ilh {

namespace detail {

inline void io_fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

template <typename T>
void write_raw(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_raw(std::istream& is, const std::string& path, const char* what) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) io_fail(path, std::string("truncated ") + what);
    return v;
}

inline std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream os(path, mode);
    if (!os) io_fail(path, "cannot open for writing");
    return os;
}

inline std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
    std::ifstream is(path, mode);
    if (!is) io_fail(path, "cannot open for reading");
    return is;
}

}  // namespace detail

inline void validate_features(const FeatureMatrix& m, const std::string& origin) {
    require(m.n_points() >= 1 && m.dim() >= 1, origin + ": empty feature matrix");
    for (auto v : m.data())
        if (!std::isfinite(v)) throw std::invalid_argument(origin + ": non-finite feature value");
}

// Feature file: magic "ILHF", u32 version=1, u64 n_points, u32 dim,
// row-major little-endian float32.
inline void write_features(const std::string& path, const FeatureMatrix& m) {
    auto os = detail::open_out(path, std::ios::binary);
    os.write("ILHF", 4);
    detail::write_raw<std::uint32_t>(os, 1);
    detail::write_raw<std::uint64_t>(os, m.n_points());
    detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(m.dim()));
    os.write(reinterpret_cast<const char*>(m.data().data()),
             static_cast<std::streamsize>(m.data().size() * sizeof(float)));
    if (!os) detail::io_fail(path, "write failed");
}

inline FeatureMatrix read_features(const std::string& path) {
    auto is = detail::open_in(path, std::ios::binary);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "ILHF", 4) != 0)
        detail::io_fail(path, "not a feature file (bad magic)");
    const auto version = detail::read_raw<std::uint32_t>(is, path, "header");
    if (version != 1) detail::io_fail(path, "unsupported feature file version");
    const auto n = detail::read_raw<std::uint64_t>(is, path, "header");
    const auto d = detail::read_raw<std::uint32_t>(is, path, "header");
    FeatureMatrix m(n, d);
    if (!is.read(reinterpret_cast<char*>(m.data().data()),
                 static_cast<std::streamsize>(m.data().size() * sizeof(float))))
        detail::io_fail(path, "truncated feature data");
    validate_features(m, path);
    return m;
}

// CSV: one row per point, comma separated, no header.
inline FeatureMatrix read_features_csv(const std::string& path) {
    auto is = detail::open_in(path, std::ios::in);
    std::vector<float> values;
    std::size_t dim = 0, rows = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::size_t cols = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            float v = 0.0f;
            const auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc()) detail::io_fail(path, "bad number at row " + std::to_string(rows));
            values.push_back(v);
            ++cols;
            p = next;
            while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
        }
        if (rows == 0)
            dim = cols;
        else if (cols != dim)
            detail::io_fail(path, "inconsistent column count at row " + std::to_string(rows));
        ++rows;
    }
    if (rows == 0) detail::io_fail(path, "empty CSV");
    FeatureMatrix m(rows, dim);
    m.data() = std::move(values);
    validate_features(m, path);
    return m;
}

inline void write_labels(const std::string& path, const LabelVector& labels) {
    auto os = detail::open_out(path, std::ios::out);
    for (auto l : labels) os << l << '\n';
    if (!os) detail::io_fail(path, "write failed");
}

inline LabelVector read_labels(const std::string& path) {
    auto is = detail::open_in(path, std::ios::in);
    LabelVector labels;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        labels.push_back(static_cast<std::int32_t>(std::stol(line)));
    }
    if (labels.empty()) detail::io_fail(path, "empty label file");
    return labels;
}

// Affinities: TSV n<TAB>m<TAB>y with y in {+1,-1}.
inline void write_affinities(const std::string& path, const AffinitySet& aff) {
    auto os = detail::open_out(path, std::ios::out);
    for (const auto& p : aff.pairs)
        os << p.n << '\t' << p.m << '\t' << static_cast<int>(p.y) << '\n';
    if (!os) detail::io_fail(path, "write failed");
}

inline AffinitySet read_affinities(const std::string& path) {
    auto is = detail::open_in(path, std::ios::in);
    AffinitySet aff;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        long n, m, y;
        if (!(ss >> n >> m >> y) || (y != 1 && y != -1) || n == m || n < 0 || m < 0)
            detail::io_fail(path, "bad affinity line " + std::to_string(lineno));
        aff.pairs.push_back({static_cast<std::int32_t>(n), static_cast<std::int32_t>(m),
                             static_cast<std::int8_t>(y)});
    }
    return aff;
}

// Codes file: magic "ILHC", u32 version=1, u64 n_points, u32 n_bits, rows
// padded to whole bytes, LSB-first within each byte.
inline void write_codes(const std::string& path, const CodeMatrix& codes) {
    auto os = detail::open_out(path, std::ios::binary);
    os.write("ILHC", 4);
    detail::write_raw<std::uint32_t>(os, 1);
    detail::write_raw<std::uint64_t>(os, codes.n_points());
    detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(codes.n_bits()));
    os.write(reinterpret_cast<const char*>(codes.data().data()),
             static_cast<std::streamsize>(codes.data().size()));
    if (!os) detail::io_fail(path, "write failed");
}

inline CodeMatrix read_codes(const std::string& path) {
    auto is = detail::open_in(path, std::ios::binary);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "ILHC", 4) != 0)
        detail::io_fail(path, "not a codes file (bad magic)");
    const auto version = detail::read_raw<std::uint32_t>(is, path, "header");
    if (version != 1) detail::io_fail(path, "unsupported codes file version");
    const auto n = detail::read_raw<std::uint64_t>(is, path, "header");
    const auto b = detail::read_raw<std::uint32_t>(is, path, "header");
    CodeMatrix codes(n, b);
    if (!is.read(reinterpret_cast<char*>(codes.data().data()),
                 static_cast<std::streamsize>(codes.data().size())))
        detail::io_fail(path, "truncated code data");
    return codes;
}

// Results: TSV query_id<TAB>rank<TAB>db_id<TAB>distance, rank starting at 1.
inline void write_results_tsv(const std::string& path, const RetrievalResult& result) {
    auto os = detail::open_out(path, std::ios::out);
    for (std::size_t q = 0; q < result.neighbors.size(); ++q) {
        std::size_t rank = 1;
        for (const auto& nb : result.neighbors[q])
            os << q << '\t' << rank++ << '\t' << nb.id << '\t' << nb.distance << '\n';
    }
    if (!os) detail::io_fail(path, "write failed");
}

inline RetrievalResult read_results_tsv(const std::string& path) {
    auto is = detail::open_in(path, std::ios::in);
    std::vector<std::vector<std::pair<long, Neighbor>>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        long q, rank, id, dist;
        if (!(ss >> q >> rank >> id >> dist) || q < 0 || rank < 1 || id < 0 || dist < 0)
            detail::io_fail(path, "bad results line " + std::to_string(lineno));
        if (rows.size() <= static_cast<std::size_t>(q)) rows.resize(static_cast<std::size_t>(q) + 1);
        rows[static_cast<std::size_t>(q)].push_back(
            {rank, {static_cast<std::int32_t>(id), static_cast<std::int32_t>(dist)}});
    }
    RetrievalResult res;
    res.neighbors.resize(rows.size());
    for (std::size_t q = 0; q < rows.size(); ++q) {
        auto& r = rows[q];
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        res.neighbors[q].reserve(r.size());
        for (const auto& [rank, nb] : r) res.neighbors[q].push_back(nb);
        res.k = std::max(res.k, res.neighbors[q].size());
    }
    return res;
}

// FNV-1a 64-bit digest, hex encoded; used by run manifests.
inline std::string fnv1a_digest(const std::string& path) {
    auto is = detail::open_in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (is.read(buf, sizeof buf) || is.gcount() > 0) {
        const auto got = static_cast<std::size_t>(is.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!is) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a:") + hex;
}

}  // namespace ilh
