#pragma once

#include <cmath>
#include <limits>

#include "wacukf/rng.hpp"
#include "wacukf/scenario.hpp"

namespace wacukf::simnet {

/// One output row of a simulation: truth, per-node measurements and
/// estimates, the applied input, and the error e = x_hat - x_true per node.
struct TraceRecord {
    double t{};
    VectorX<double> x_true;
    std::vector<VectorX<double>> y;
    std::vector<VectorX<double>> x_hat;
    VectorX<double> u;
    std::vector<VectorX<double>> e;
};

struct MetricsSummary {
    MatrixX<double> rmse;              ///< node x state
    VectorX<double> max_abs_error;     ///< per node, over all states and steps
    VectorX<double> max_error_norm;    ///< per node, max_k ||e_k||
    bool settled{false};
    double settling_time{std::numeric_limits<double>::quiet_NaN()}; ///< s after the last event
    double steady_state_error{std::numeric_limits<double>::quiet_NaN()};
};

struct RunResult {
    std::vector<TraceRecord> trace;
    MetricsSummary metrics;
};

namespace detail {

/// Pre-drawn noise so comparison arms consume identical realizations.
/// Draw order per step: truth process noise first (when enabled), then the
/// node measurement noises in node-id order.
struct NoiseBank {
    std::vector<VectorX<double>> process;
    std::vector<std::vector<VectorX<double>>> measurement;
};

inline NoiseBank draw_noise(const CompiledScenario& cs, std::uint64_t seed) {
    NormalSampler rng(seed);
    NoiseBank bank;
    const bool with_process = cs.source.noise.process_noise;
    const MatrixX<double> Sq = with_process ? psd_factor(cs.Q) : MatrixX<double>();
    std::vector<MatrixX<double>> Sr;
    for (const auto& m : cs.node_models) Sr.push_back(psd_factor(m.R));

    bank.process.reserve(with_process ? static_cast<std::size_t>(cs.steps) : 0);
    bank.measurement.resize(static_cast<std::size_t>(cs.steps));
    for (Index k = 0; k < cs.steps; ++k) {
        if (with_process) bank.process.push_back(Sq * rng.normal_vector(cs.Q.rows()));
        auto& row = bank.measurement[static_cast<std::size_t>(k)];
        row.reserve(cs.node_models.size());
        for (const auto& S : Sr) row.push_back(S * rng.normal_vector(S.rows()));
    }
    return bank;
}

enum class FilterArm { consensus, isolated, centralized };

/// Stacks the per-node measurement maps into one model for the centralized arm.
inline plants::NonlinearModel<double> stacked_model(const CompiledScenario& cs) {
    Index total = 0;
    for (const auto& m : cs.node_models) total += m.output_dim;
    MatrixX<double> C = MatrixX<double>::Zero(total, cs.plant.num_states());
    MatrixX<double> R = MatrixX<double>::Zero(total, total);
    Index row = 0;
    for (std::size_t i = 0; i < cs.node_models.size(); ++i) {
        const Index pi = cs.node_models[i].output_dim;
        C.middleRows(row, pi) = cs.node_masks[i] * cs.discrete.C;
        R.block(row, row, pi, pi) = cs.node_models[i].R;
        row += pi;
    }
    plants::DiscreteModel<double> stacked = cs.discrete;
    stacked.C = C;
    stacked.D = MatrixX<double>::Zero(total, cs.discrete.num_inputs());
    return plants::as_nonlinear(stacked, cs.Q, R);
}

class ControllerLoop {
  public:
    explicit ControllerLoop(const CompiledScenario& cs)
        : cs_(cs), c_row_(cs.plant.C.row(cs.source.control.tracked_output)) {
        pid_gains_ = control::PidGains<double>{cs.source.control.kp, cs.source.control.ki,
                                               cs.source.control.kd, cs.ts};
        comp_ = control::CompensatorTF<double>{cs.source.control.comp_z0, cs.source.control.comp_p0,
                                               cs.source.control.comp_gain,
                                               cs.source.control.comp_kind};
    }

    /// Computes the actuated input value for reference r and feedback state x.
    double step(double r, const VectorX<double>& x_fb) {
        switch (cs_.source.control.type) {
            case ControllerType::none:
                return r; // the reference schedule is the open-loop input
            case ControllerType::state_feedback:
            case ControllerType::lqr:
                return cs_.law.Nbar * r - cs_.law.K.dot(x_fb);
            case ControllerType::pid: {
                const double err = r - c_row_.dot(x_fb);
                auto [u, next] = control::pid_control(pid_gains_, err, pid_state_);
                pid_state_ = next;
                return u;
            }
            case ControllerType::compensator: {
                const double err = r - c_row_.dot(x_fb);
                auto [u, next] = control::compensator_apply(comp_, err, comp_state_, cs_.ts);
                comp_state_ = next;
                return u;
            }
        }
        return 0.0;
    }

  private:
    const CompiledScenario& cs_;
    VectorX<double> c_row_;
    control::PidGains<double> pid_gains_{};
    control::PidState<double> pid_state_{};
    control::CompensatorTF<double> comp_{};
    control::CompensatorState<double> comp_state_{};
};

MetricsSummary compute_metrics(const CompiledScenario& cs, const std::vector<TraceRecord>& trace);

inline RunResult run_compiled(const CompiledScenario& cs, const NoiseBank& noise, FilterArm arm) {
    const bool centralized = arm == FilterArm::centralized;
    const long rounds = arm == FilterArm::consensus ? cs.source.network.rounds : 0;

    std::vector<consensus::NodeFilter<double>> nodes;
    if (centralized) {
        nodes.push_back({stacked_model(cs), {cs.x0_hat, cs.P0}});
    } else {
        for (const auto& m : cs.node_models) nodes.push_back({m, {cs.x0_hat, cs.P0}});
    }
    consensus::ConsensusNetwork<double> net = cs.net;
    if (centralized) net = consensus::make_network<double>(consensus::complete_graph(1));

    ControllerLoop controller(cs);
    const Index m_inputs = cs.plant.num_inputs();
    const bool feedback_truth = cs.source.control.feedback == FeedbackSource::truth;

    RunResult result;
    result.trace.reserve(static_cast<std::size_t>(cs.steps));
    VectorX<double> x_true = cs.x0;

    for (Index k = 0; k < cs.steps; ++k) {
        const double t = static_cast<double>(k) * cs.ts;
        const double r = cs.source.reference.at(t);
        const VectorX<double>& x_fb = feedback_truth ? x_true : nodes.front().estimate.x;
        VectorX<double> u = VectorX<double>::Zero(m_inputs);
        u(0) = controller.step(r, x_fb);
        if (m_inputs > 1) u(1) = cs.source.disturbance.at(t);

        VectorX<double> x_next = cs.model.f(x_true, u);
        if (cs.source.noise.process_noise) x_next += noise.process[static_cast<std::size_t>(k)];

        std::vector<VectorX<double>> ys;
        ys.reserve(nodes.size());
        if (centralized) {
            Index row = 0;
            VectorX<double> stacked(nodes.front().model.output_dim);
            for (std::size_t i = 0; i < cs.node_models.size(); ++i) {
                const VectorX<double> yi = cs.node_models[i].h(x_next) +
                                           noise.measurement[static_cast<std::size_t>(k)][i];
                stacked.segment(row, yi.size()) = yi;
                row += yi.size();
            }
            ys.push_back(std::move(stacked));
        } else {
            for (std::size_t i = 0; i < nodes.size(); ++i)
                ys.push_back(cs.node_models[i].h(x_next) +
                             noise.measurement[static_cast<std::size_t>(k)][i]);
        }

        std::vector<ukf::UkfEstimate<double>> fused;
        try {
            fused = consensus::distributed_step<double>(nodes, u, ys, net, rounds, cs.ut);
        } catch (const NumericalError& err) {
            throw DivergenceError(std::string(err.what()) + " (aborted at step " +
                                      std::to_string(k) + ")",
                                  k);
        }
        for (const auto& est : fused)
            if (!est.x.allFinite())
                throw DivergenceError("filter estimate became non-finite (aborted at step " +
                                          std::to_string(k) + ")",
                                      k);

        TraceRecord rec;
        rec.t = static_cast<double>(k + 1) * cs.ts;
        rec.x_true = x_next;
        rec.y = std::move(ys);
        rec.u = u;
        rec.x_hat.reserve(fused.size());
        rec.e.reserve(fused.size());
        for (const auto& est : fused) {
            rec.x_hat.push_back(est.x);
            rec.e.push_back(est.x - x_next);
        }
        result.trace.push_back(std::move(rec));
        x_true = std::move(x_next);
    }
    result.metrics = compute_metrics(cs, result.trace);
    return result;
}

inline MetricsSummary compute_metrics(const CompiledScenario& cs,
                                      const std::vector<TraceRecord>& trace) {
    MetricsSummary m;
    if (trace.empty()) return m;
    const Index nodes = static_cast<Index>(trace.front().x_hat.size());
    const Index n = trace.front().x_true.size();
    const auto steps = static_cast<double>(trace.size());

    m.rmse = MatrixX<double>::Zero(nodes, n);
    m.max_abs_error = VectorX<double>::Zero(nodes);
    m.max_error_norm = VectorX<double>::Zero(nodes);
    for (const auto& rec : trace) {
        for (Index i = 0; i < nodes; ++i) {
            const auto& e = rec.e[static_cast<std::size_t>(i)];
            m.rmse.row(i) += e.array().square().matrix().transpose();
            m.max_abs_error(i) = std::max(m.max_abs_error(i), e.lpNorm<Eigen::Infinity>());
            m.max_error_norm(i) = std::max(m.max_error_norm(i), e.norm());
        }
    }
    m.rmse = (m.rmse / steps).cwiseSqrt();

    // Tracked TRUE output against the schedule target. Disturbance scenarios
    // settle around wherever the loop ends up (textbook settling), reference
    // scenarios around the final setpoint.
    const VectorX<double> c_row = cs.plant.C.row(cs.source.control.tracked_output);
    const double t_end = trace.back().t;
    const bool disturbance_case = !cs.source.disturbance.empty();
    double event_time = 0.0;
    const auto& event_points =
        disturbance_case ? cs.source.disturbance.points : cs.source.reference.points;
    for (std::size_t i = 0; i < event_points.size(); ++i) {
        if (i == 0 ? event_points[i].second != 0.0
                   : event_points[i].second != event_points[i - 1].second)
            event_time = std::max(event_time, event_points[i].first);
    }
    const double target = disturbance_case ? c_row.dot(trace.back().x_true)
                                           : cs.source.reference.at(t_end);

    double peak = 0.0;
    for (const auto& rec : trace)
        if (rec.t >= event_time) peak = std::max(peak, std::abs(c_row.dot(rec.x_true) - target));
    double band = disturbance_case || target == 0.0 ? 0.02 * peak : 0.02 * std::abs(target);
    if (band == 0.0) band = std::numeric_limits<double>::infinity();

    double settle_at = std::numeric_limits<double>::quiet_NaN();
    bool inside = false;
    for (const auto& rec : trace) {
        if (rec.t < event_time) continue;
        const double dev = std::abs(c_row.dot(rec.x_true) - target);
        if (dev <= band) {
            if (!inside) {
                inside = true;
                settle_at = rec.t;
            }
        } else {
            inside = false;
        }
    }
    m.settled = inside;
    m.settling_time = inside ? settle_at - event_time : std::numeric_limits<double>::quiet_NaN();

    const double window = std::max(std::min(0.1 * cs.source.duration, 5.0), 2.0 * cs.ts);
    double acc = 0.0;
    long count = 0;
    for (const auto& rec : trace) {
        if (rec.t < t_end - window) continue;
        acc += std::abs(c_row.dot(rec.x_true) - cs.source.reference.at(rec.t));
        ++count;
    }
    m.steady_state_error = count > 0 ? acc / static_cast<double>(count) : 0.0;
    return m;
}

} // namespace detail

/// Runs one closed-loop scenario: controller, truth propagation, per-node
/// measurement synthesis, the distributed consensus filter, trace capture and
/// error metrics. Identical scenarios (including the seed) produce bitwise
/// identical traces.
inline RunResult run_scenario(const Scenario& s) {
    const CompiledScenario cs = compile(s);
    const detail::NoiseBank noise = detail::draw_noise(cs, s.rng_seed);
    return detail::run_compiled(cs, noise, detail::FilterArm::consensus);
}

/// Same-noise comparison of (a) a centralized UKF over all stacked node
/// measurements, (b) the consensus filter, (c) isolated per-node filters.
struct ComparisonReport {
    RunResult centralized;
    RunResult consensus;
    RunResult isolated;
    double centralized_rmse{};       ///< sqrt(mean ||e||^2)
    VectorX<double> consensus_rmse;  ///< per node
    VectorX<double> isolated_rmse;   ///< per node
    VectorX<double> ratio_vs_centralized;
    VectorX<double> ratio_vs_isolated;
};

namespace detail {

inline VectorX<double> aggregate_rmse(const std::vector<TraceRecord>& trace) {
    const Index nodes = static_cast<Index>(trace.front().x_hat.size());
    VectorX<double> acc = VectorX<double>::Zero(nodes);
    for (const auto& rec : trace)
        for (Index i = 0; i < nodes; ++i) acc(i) += rec.e[static_cast<std::size_t>(i)].squaredNorm();
    return (acc / static_cast<double>(trace.size())).cwiseSqrt();
}

} // namespace detail

inline ComparisonReport compare_centralized(const Scenario& s) {
    const CompiledScenario cs = compile(s);
    const detail::NoiseBank noise = detail::draw_noise(cs, s.rng_seed);
    ComparisonReport report;
    report.centralized = detail::run_compiled(cs, noise, detail::FilterArm::centralized);
    report.consensus = detail::run_compiled(cs, noise, detail::FilterArm::consensus);
    report.isolated = detail::run_compiled(cs, noise, detail::FilterArm::isolated);
    report.centralized_rmse = detail::aggregate_rmse(report.centralized.trace)(0);
    report.consensus_rmse = detail::aggregate_rmse(report.consensus.trace);
    report.isolated_rmse = detail::aggregate_rmse(report.isolated.trace);
    report.ratio_vs_centralized = report.consensus_rmse / report.centralized_rmse;
    report.ratio_vs_isolated =
        report.consensus_rmse.cwiseQuotient(report.isolated_rmse.cwiseMax(1e-300));
    return report;
}

} // namespace wacukf::simnet
