#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "ilh/energy.hpp"
#include "ilh/maxflow.hpp"
#include "ilh/rng.hpp"

namespace ilh {

/// Disjoint index groups covering 0..n_vars-1; within a group every coupling
/// is <= 0, so the restricted energy is submodular.
struct GroupPartition {
    std::vector<std::vector<std::int32_t>> groups;
};

namespace detail {

// Adjacency over couplings: per variable, (neighbor, coefficient).
inline std::vector<std::vector<std::pair<std::int32_t, double>>> coupling_adjacency(
    const QuadraticEnergy& e) {
    std::vector<std::vector<std::pair<std::int32_t, double>>> adj(
        static_cast<std::size_t>(e.n_vars));
    for (const auto& c : e.couplings) {
        adj[static_cast<std::size_t>(c.n)].emplace_back(c.m, c.a);
        adj[static_cast<std::size_t>(c.m)].emplace_back(c.n, c.a);
    }
    return adj;
}

}  // namespace detail

/// Greedy partition in random point order: each point joins the first group
/// it has no positive coupling into, else opens a new group.
inline GroupPartition partition_groups(const QuadraticEnergy& e, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(e.n_vars);
    auto adj = detail::coupling_adjacency(e);

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    GroupPartition part;
    std::vector<std::int32_t> group_of(n, -1);
    std::vector<std::uint32_t> conflict_stamp;
    std::uint32_t stamp = 0;

    for (auto p : order) {
        ++stamp;
        conflict_stamp.resize(part.groups.size(), 0);
        for (const auto& [q, a] : adj[static_cast<std::size_t>(p)])
            if (a > 0.0 && group_of[static_cast<std::size_t>(q)] >= 0)
                conflict_stamp[static_cast<std::size_t>(group_of[static_cast<std::size_t>(q)])] =
                    stamp;
        std::int32_t target = -1;
        for (std::size_t g = 0; g < part.groups.size(); ++g)
            if (conflict_stamp[g] != stamp) {
                target = static_cast<std::int32_t>(g);
                break;
            }
        if (target < 0) {
            target = static_cast<std::int32_t>(part.groups.size());
            part.groups.emplace_back();
        }
        part.groups[static_cast<std::size_t>(target)].push_back(p);
        group_of[static_cast<std::size_t>(p)] = target;
    }
    return part;
}

inline GroupPartition partition_groups(const QuadraticEnergy& e, std::uint64_t seed) {
    auto rng = make_rng(seed);
    return partition_groups(e, rng);
}

/// Exact minimizer of a submodular energy (all couplings <= 0, linear terms
/// arbitrary) via min-cut. Mapping: z_n = -1 on the source side, +1 on the
/// sink side. A coupling a z_p z_q with a <= 0 becomes opposing arcs of
/// capacity -2a plus constant a; a linear term l z_n becomes a unary arc of
/// weight 2l. Min energy = cut capacity + accumulated constant.
inline std::vector<std::int8_t> solve_submodular(const QuadraticEnergy& e,
                                                 double* min_energy = nullptr) {
    const auto n = e.n_vars;
    for (const auto& c : e.couplings)
        require(c.a <= 0.0, "solve_submodular: positive coupling; partition first");

    const std::int32_t source = n, sink = n + 1;
    FlowNetwork net(n + 2, source, sink);
    double constant = e.constant;

    for (const auto& c : e.couplings) {
        if (c.a == 0.0) continue;
        net.add_arc(c.n, c.m, -2.0 * c.a);
        net.add_arc(c.m, c.n, -2.0 * c.a);
        constant += c.a;
    }
    for (std::int32_t v = 0; v < n; ++v) {
        const double u = 2.0 * e.linear[static_cast<std::size_t>(v)];
        constant -= e.linear[static_cast<std::size_t>(v)];
        if (u > 0.0) {
            net.add_arc(source, v, u);
        } else if (u < 0.0) {
            net.add_arc(v, sink, -u);
            constant += u;
        }
    }

    const auto cut = max_flow(std::move(net));
    std::vector<std::int8_t> z(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v)
        z[static_cast<std::size_t>(v)] = cut.source_side[static_cast<std::size_t>(v)] ? -1 : +1;
    if (min_energy) *min_energy = cut.flow_value + constant;
    return z;
}

/// Optional per-update observer for descent assertions: called with the full
/// energy value after every accepted group update.
using SweepObserver = std::function<void(std::size_t sweep, std::size_t group, double energy)>;

/// Block-coordinate minimization: partition once, then per sweep visit groups
/// in a fresh random order, minimizing each group exactly with the rest of z
/// fixed (cross-group couplings become linear terms). Stops after max_sweeps
/// or a sweep with no change. Energy never increases.
inline std::vector<std::int8_t> alternating_mincut(const QuadraticEnergy& e,
                                                   std::vector<std::int8_t> z,
                                                   std::size_t max_sweeps, std::uint64_t seed,
                                                   const SweepObserver& observer = {}) {
    require(z.size() == static_cast<std::size_t>(e.n_vars),
            "alternating_mincut: initial codes length mismatch");
    auto rng = make_rng(seed);
    const auto part = partition_groups(e, rng);
    const auto adj = detail::coupling_adjacency(e);

    std::vector<std::int32_t> local(static_cast<std::size_t>(e.n_vars), -1);
    std::vector<std::size_t> group_order(part.groups.size());
    std::iota(group_order.begin(), group_order.end(), 0);

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        std::shuffle(group_order.begin(), group_order.end(), rng);
        bool changed = false;
        for (auto gi : group_order) {
            const auto& group = part.groups[gi];
            if (group.size() == 1) {
                // Single variable: sign against its conditional linear term.
                const auto v = group[0];
                double l = e.linear[static_cast<std::size_t>(v)];
                for (const auto& [q, a] : adj[static_cast<std::size_t>(v)])
                    l += a * z[static_cast<std::size_t>(q)];
                const std::int8_t best = l > 0.0 ? -1 : +1;
                if (best != z[static_cast<std::size_t>(v)]) {
                    z[static_cast<std::size_t>(v)] = best;
                    changed = true;
                }
                if (observer) observer(sweep, gi, energy_eval(e, z));
                continue;
            }

            EnergyBuilder sub(static_cast<std::int32_t>(group.size()));
            for (std::size_t i = 0; i < group.size(); ++i)
                local[static_cast<std::size_t>(group[i])] = static_cast<std::int32_t>(i);
            for (std::size_t i = 0; i < group.size(); ++i) {
                const auto v = group[i];
                double l = e.linear[static_cast<std::size_t>(v)];
                for (const auto& [q, a] : adj[static_cast<std::size_t>(v)]) {
                    const auto lq = local[static_cast<std::size_t>(q)];
                    if (lq < 0)
                        l += a * z[static_cast<std::size_t>(q)];  // fixed neighbor
                    else if (lq > static_cast<std::int32_t>(i))
                        sub.add_coupling(static_cast<std::int32_t>(i), lq, a);
                }
                sub.add_linear(static_cast<std::int32_t>(i), l);
            }
            const auto zg = solve_submodular(sub.take());
            for (std::size_t i = 0; i < group.size(); ++i) {
                auto& cur = z[static_cast<std::size_t>(group[i])];
                if (cur != zg[i]) {
                    cur = zg[i];
                    changed = true;
                }
            }
            for (auto v : group) local[static_cast<std::size_t>(v)] = -1;
            if (observer) observer(sweep, gi, energy_eval(e, z));
        }
        if (!changed) break;
    }
    return z;
}

}  // namespace ilh
