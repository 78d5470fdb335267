#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "ilh/types.hpp"

namespace ilh {

namespace detail {
class DinicSolver;
}

/// Directed flow network with designated source/sink. Arc capacities are
/// nonnegative reals; residuals below `capacity_eps` count as saturated.
class FlowNetwork {
public:
    static constexpr double capacity_eps = 1e-12;

    FlowNetwork(std::int32_t n_nodes, std::int32_t source, std::int32_t sink)
        : n_(n_nodes), source_(source), sink_(sink), head_(static_cast<std::size_t>(n_nodes)) {
        require(source >= 0 && source < n_nodes && sink >= 0 && sink < n_nodes &&
                    source != sink,
                "FlowNetwork: bad source/sink");
    }

    void add_arc(std::int32_t u, std::int32_t v, double cap) {
        require(u >= 0 && u < n_ && v >= 0 && v < n_, "FlowNetwork: node out of range");
        require(cap >= 0.0 && std::isfinite(cap), "FlowNetwork: capacity must be finite, >= 0");
        head_[static_cast<std::size_t>(u)].push_back(static_cast<std::int32_t>(arcs_.size()));
        arcs_.push_back({v, cap});
        head_[static_cast<std::size_t>(v)].push_back(static_cast<std::int32_t>(arcs_.size()));
        arcs_.push_back({u, 0.0});
    }

    std::int32_t n_nodes() const { return n_; }
    std::int32_t source() const { return source_; }
    std::int32_t sink() const { return sink_; }

private:
    struct Arc {
        std::int32_t to;
        double residual;
    };

    friend class detail::DinicSolver;

    std::int32_t n_, source_, sink_;
    std::vector<Arc> arcs_;                          // paired: arc 2k and its reverse 2k+1
    std::vector<std::vector<std::int32_t>> head_;    // per node, indices into arcs_
};

struct MaxFlowResult {
    double flow_value = 0.0;
    std::vector<char> source_side;  // per node, 1 if on the source side of a min cut
};

namespace detail {

class DinicSolver {
public:
    explicit DinicSolver(FlowNetwork& net) : net_(net) {}

    double run() {
        double total = 0.0;
        while (bfs()) {
            it_.assign(static_cast<std::size_t>(net_.n_nodes()), 0);
            double pushed;
            while ((pushed = dfs(net_.source(), std::numeric_limits<double>::infinity())) > 0.0)
                total += pushed;
        }
        return total;
    }

    std::vector<char> reachable() const {
        std::vector<char> side(static_cast<std::size_t>(net_.n_nodes()), 0);
        std::queue<std::int32_t> q;
        q.push(net_.source());
        side[static_cast<std::size_t>(net_.source())] = 1;
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (auto ai : net_.head_[static_cast<std::size_t>(u)]) {
                const auto& a = net_.arcs_[static_cast<std::size_t>(ai)];
                if (a.residual > FlowNetwork::capacity_eps &&
                    !side[static_cast<std::size_t>(a.to)]) {
                    side[static_cast<std::size_t>(a.to)] = 1;
                    q.push(a.to);
                }
            }
        }
        return side;
    }

private:
    bool bfs() {
        level_.assign(static_cast<std::size_t>(net_.n_nodes()), -1);
        std::queue<std::int32_t> q;
        level_[static_cast<std::size_t>(net_.source())] = 0;
        q.push(net_.source());
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (auto ai : net_.head_[static_cast<std::size_t>(u)]) {
                const auto& a = net_.arcs_[static_cast<std::size_t>(ai)];
                if (a.residual > FlowNetwork::capacity_eps &&
                    level_[static_cast<std::size_t>(a.to)] < 0) {
                    level_[static_cast<std::size_t>(a.to)] =
                        level_[static_cast<std::size_t>(u)] + 1;
                    q.push(a.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(net_.sink())] >= 0;
    }

    double dfs(std::int32_t u, double limit) {
        if (u == net_.sink()) return limit;
        auto& pos = it_[static_cast<std::size_t>(u)];
        const auto& out = net_.head_[static_cast<std::size_t>(u)];
        for (; pos < out.size(); ++pos) {
            const auto ai = out[pos];
            auto& a = net_.arcs_[static_cast<std::size_t>(ai)];
            if (a.residual <= FlowNetwork::capacity_eps ||
                level_[static_cast<std::size_t>(a.to)] !=
                    level_[static_cast<std::size_t>(u)] + 1)
                continue;
            const double pushed = dfs(a.to, std::min(limit, a.residual));
            if (pushed > 0.0) {
                a.residual -= pushed;
                net_.arcs_[static_cast<std::size_t>(ai ^ 1)].residual += pushed;
                return pushed;
            }
        }
        return 0.0;
    }

    FlowNetwork& net_;
    std::vector<int> level_;
    std::vector<std::size_t> it_;
};

}  // namespace detail

/// Dinic max-flow. Returns the flow value and the source side of a minimum cut
/// (nodes reachable from the source in the residual graph).
inline MaxFlowResult max_flow(FlowNetwork net) {
    detail::DinicSolver solver(net);
    MaxFlowResult res;
    res.flow_value = solver.run();
    res.source_side = solver.reachable();
    return res;
}

}  // namespace ilh
