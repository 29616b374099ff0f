#pragma once

#include <vector>

#include "wacukf/ukf.hpp"

namespace wacukf::consensus {

/// Node set with neighborhoods and the row-stochastic fusion weights Pi.
/// Self-loops are implied: Pi(i,i) may be positive without an adjacency edge.
template <typename Scalar>
struct ConsensusNetwork {
    Index num_nodes{};
    AdjacencyMatrix adjacency; ///< symmetric neighbor relation, no self entries required
    MatrixX<Scalar> Pi;        ///< k x k weights, Pi(i,j) = pi^(ij)
};

inline AdjacencyMatrix complete_graph(Index k) {
    AdjacencyMatrix a = AdjacencyMatrix::Constant(k, k, true);
    a.diagonal().setConstant(false);
    return a;
}

inline AdjacencyMatrix ring_graph(Index k) {
    AdjacencyMatrix a = AdjacencyMatrix::Constant(k, k, false);
    for (Index i = 0; i < k; ++i) {
        a(i, (i + 1) % k) = true;
        a((i + 1) % k, i) = true;
    }
    if (k == 1) a(0, 0) = false;
    return a;
}

inline AdjacencyMatrix path_graph(Index k) {
    AdjacencyMatrix a = AdjacencyMatrix::Constant(k, k, false);
    for (Index i = 0; i + 1 < k; ++i) {
        a(i, i + 1) = true;
        a(i + 1, i) = true;
    }
    return a;
}

namespace detail {

inline bool connected(const AdjacencyMatrix& adj) {
    const Index k = adj.rows();
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    std::vector<Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const Index i = stack.back();
        stack.pop_back();
        for (Index j = 0; j < k; ++j)
            if (adj(i, j) && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                stack.push_back(j);
            }
    }
    for (bool s : seen)
        if (!s) return false;
    return true;
}

} // namespace detail

/// Metropolis weights pi^(ij) = 1 / (1 + max(d_i, d_j)) on edges, with the
/// self weight absorbing the remainder. The result is doubly stochastic and
/// primitive on connected graphs.
template <typename Scalar>
MatrixX<Scalar> metropolis_weights(const AdjacencyMatrix& adjacency) {
    const Index k = adjacency.rows();
    if (adjacency.cols() != k) throw DimensionError("metropolis_weights: adjacency must be square");
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            if (adjacency(i, j) != adjacency(j, i))
                throw InvalidParameterError("metropolis_weights: adjacency must be symmetric");
    if (k > 1 && !detail::connected(adjacency))
        throw ConnectivityError("metropolis_weights: graph is not connected");

    VectorX<Scalar> degree = VectorX<Scalar>::Zero(k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            if (i != j && adjacency(i, j)) degree(i) += Scalar(1);

    MatrixX<Scalar> Pi = MatrixX<Scalar>::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
        Scalar off_sum = Scalar(0);
        for (Index j = 0; j < k; ++j) {
            if (i == j || !adjacency(i, j)) continue;
            Pi(i, j) = Scalar(1) / (Scalar(1) + std::max(degree(i), degree(j)));
            off_sum += Pi(i, j);
        }
        Pi(i, i) = Scalar(1) - off_sum;
    }
    return Pi;
}

template <typename Scalar>
struct PrimitivityReport {
    bool primitive{false};
    Index witness_power{0};  ///< smallest m with Pi^m entrywise positive
    VectorX<Scalar> perron;  ///< left Perron vector, normalized to sum 1
};

/// Checks non-negativity, row stochasticity, neighborhood support and
/// primitivity (powers up to the Wielandt bound (k-1)^2 + 1), and computes
/// the left Perron vector so lim Pi^l = 1 v'. Throws ValidationError naming
/// the first failed property.
template <typename Scalar>
PrimitivityReport<Scalar> validate_network(const ConsensusNetwork<Scalar>& net) {
    const Index k = net.num_nodes;
    if (net.Pi.rows() != k || net.Pi.cols() != k)
        throw ValidationError("network: Pi must be num_nodes x num_nodes");
    if (net.adjacency.size() != 0 && (net.adjacency.rows() != k || net.adjacency.cols() != k))
        throw ValidationError("network: adjacency must be num_nodes x num_nodes");
    if ((net.Pi.array() < Scalar(0)).any())
        throw ValidationError("network: Pi has a negative weight");
    for (Index i = 0; i < k; ++i) {
        const Scalar row_sum = net.Pi.row(i).sum();
        if (std::abs(row_sum - Scalar(1)) > Scalar(1e-12))
            throw ValidationError("network: row " + std::to_string(i) +
                                  " of Pi does not sum to 1");
    }
    if (net.adjacency.size() != 0) {
        for (Index i = 0; i < k; ++i)
            for (Index j = 0; j < k; ++j)
                if (i != j && net.Pi(i, j) > Scalar(0) && !net.adjacency(i, j))
                    throw ValidationError("network: Pi assigns weight outside the neighborhood of node " +
                                          std::to_string(i));
    }

    // Primitivity: some power of the support pattern must be entrywise positive.
    using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
    BoolMat support = net.Pi.array() > Scalar(0);
    BoolMat power = support;
    const Index wielandt = (k - 1) * (k - 1) + 1;
    Index witness = 0;
    for (Index m = 1; m <= wielandt; ++m) {
        if (power.all()) {
            witness = m;
            break;
        }
        BoolMat next = BoolMat::Constant(k, k, false);
        for (Index i = 0; i < k; ++i)
            for (Index j = 0; j < k; ++j) {
                bool any = false;
                for (Index t = 0; t < k && !any; ++t) any = power(i, t) && support(t, j);
                next(i, j) = any;
            }
        power = next;
    }
    if (witness == 0) throw ValidationError("network: Pi is not primitive");

    // Left Perron vector by power iteration on Pi'.
    VectorX<Scalar> v = VectorX<Scalar>::Constant(k, Scalar(1) / Scalar(k));
    for (int it = 0; it < 100000; ++it) {
        VectorX<Scalar> next = net.Pi.transpose() * v;
        next /= next.sum();
        const Scalar delta = (next - v).template lpNorm<Eigen::Infinity>();
        v = next;
        if (delta < Scalar(1e-15)) break;
    }

    PrimitivityReport<Scalar> report;
    report.primitive = true;
    report.witness_power = witness;
    report.perron = v;
    return report;
}

/// Builds a network from an adjacency pattern with Metropolis weights.
template <typename Scalar>
ConsensusNetwork<Scalar> make_network(const AdjacencyMatrix& adjacency) {
    ConsensusNetwork<Scalar> net;
    net.num_nodes = adjacency.rows();
    net.adjacency = adjacency;
    net.Pi = metropolis_weights<Scalar>(adjacency);
    return net;
}

/// Runs `rounds` synchronous weighted-average cycles: every node replaces its
/// (x, P) with the Pi-weighted sum over its neighborhood, all nodes at once.
/// The result is independent of node iteration order.
template <typename Scalar>
std::vector<ukf::UkfEstimate<Scalar>> consensus_rounds(
    std::vector<ukf::UkfEstimate<Scalar>> estimates, const ConsensusNetwork<Scalar>& net,
    long rounds) {
    if (rounds < 0) throw InvalidParameterError("consensus_rounds: iteration count must be >= 0");
    const Index k = net.num_nodes;
    if (static_cast<Index>(estimates.size()) != k)
        throw DimensionError("consensus_rounds: one estimate per node required");
    if (k == 0) return estimates;
    const Index n = estimates.front().x.size();
    for (const auto& e : estimates)
        if (e.x.size() != n || e.P.rows() != n || e.P.cols() != n)
            throw DimensionError("consensus_rounds: estimates must share one state dimension");

    std::vector<ukf::UkfEstimate<Scalar>> next(estimates.size());
    for (long r = 0; r < rounds; ++r) {
        for (Index i = 0; i < k; ++i) {
            VectorX<Scalar> x = VectorX<Scalar>::Zero(n);
            MatrixX<Scalar> P = MatrixX<Scalar>::Zero(n, n);
            for (Index j = 0; j < k; ++j) {
                x += net.Pi(i, j) * estimates[static_cast<std::size_t>(j)].x;
                P += net.Pi(i, j) * estimates[static_cast<std::size_t>(j)].P;
            }
            next[static_cast<std::size_t>(i)] = ukf::UkfEstimate<Scalar>{std::move(x), std::move(P)};
        }
        estimates.swap(next);
    }
    return estimates;
}

/// One node of the distributed filter: a model view (shared f/Q/ts, possibly
/// a node-specific measurement map) plus the posterior carried between steps.
template <typename Scalar>
struct NodeFilter {
    plants::NonlinearModel<Scalar> model;
    ukf::UkfEstimate<Scalar> estimate;
};

/// One distributed filtering instant: every node predicts with the applied
/// control, updates against its local measurement, and the posteriors are
/// fused by weighted-average consensus. The fused values are installed as the
/// node posteriors and returned. (The paper's prediction stage for the next
/// instant runs at the start of that instant's call so the in-loop control
/// input is available.)
template <typename Scalar>
std::vector<ukf::UkfEstimate<Scalar>> distributed_step(
    std::vector<NodeFilter<Scalar>>& nodes, const VectorX<Scalar>& u,
    const std::vector<VectorX<Scalar>>& measurements, const ConsensusNetwork<Scalar>& net,
    long rounds, const ukf::UtParams<Scalar>& params) {
    if (nodes.empty()) throw InvalidParameterError("distributed_step: no nodes");
    if (measurements.size() != nodes.size())
        throw DimensionError("distributed_step: one measurement vector per node required");
    if (static_cast<Index>(nodes.size()) != net.num_nodes)
        throw DimensionError("distributed_step: node count does not match the network");
    const Index n = nodes.front().model.state_dim;
    for (const auto& node : nodes)
        if (node.model.state_dim != n || node.model.ts != nodes.front().model.ts)
            throw DimensionError("distributed_step: node models must share state dimension and ts");

    std::vector<ukf::UkfEstimate<Scalar>> locals;
    locals.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto pred = ukf::time_update<Scalar>(nodes[i].estimate, u, nodes[i].model, params);
        locals.push_back(
            ukf::measurement_update<Scalar>(pred.estimate, measurements[i], nodes[i].model, params));
    }
    std::vector<ukf::UkfEstimate<Scalar>> fused = consensus_rounds<Scalar>(std::move(locals), net, rounds);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].estimate = fused[i];
    return fused;
}

} // namespace wacukf::consensus
