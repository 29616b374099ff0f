#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wacukf/consensus.hpp"
#include "wacukf/control.hpp"
#include "wacukf/discretize.hpp"
#include "wacukf/plants.hpp"

namespace wacukf::simnet {

enum class PlantType { cruise, suspension, aircraft, motor, motor_speed };
enum class ControllerType { none, state_feedback, lqr, pid, compensator };
enum class FeedbackSource { estimate, truth };
enum class DesignDomain { continuous, discrete };
enum class Topology { complete, ring, path, custom };
enum class QMode { diagonal, output };

struct PlantSpec {
    PlantType type = PlantType::cruise;
    plants::CruiseParams cruise;
    plants::SuspensionParams suspension;
    plants::AircraftParams aircraft;
    plants::MotorParams motor; ///< shared by motor and motor_speed

    friend bool operator==(const PlantSpec&, const PlantSpec&) = default;
};

struct ControllerSpec {
    ControllerType type = ControllerType::state_feedback;
    std::vector<std::complex<double>> poles;
    double lqr_p = 50.0; ///< output weight: Qw = p c'c for the tracked row
    double lqr_r = 1.0;  ///< input weight Rw
    double kp = 0.0, ki = 0.0, kd = 0.0;
    double comp_z0 = 1.0, comp_p0 = 1.0, comp_gain = 1.0;
    control::CompensatorKind comp_kind = control::CompensatorKind::lag;
    FeedbackSource feedback = FeedbackSource::estimate;
    DesignDomain design = DesignDomain::continuous;
    Index tracked_output = 0;

    friend bool operator==(const ControllerSpec&, const ControllerSpec&) = default;
};

struct NoiseSpec {
    double r = 1.0;  ///< measurement covariance R = r I_p
    QMode q_mode = QMode::diagonal;
    double q = 1.0;  ///< Q = q I_n (diagonal) or Q = q H'H (output)
    double p0 = 50.0;
    bool process_noise = false; ///< when true, q_k ~ N(0, Q) drives the truth

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct NetworkSpec {
    Index nodes = 4;
    Topology topology = Topology::complete;
    std::vector<int> adjacency; ///< row-major 0/1, custom topology only
    std::vector<double> pi;     ///< optional explicit row-major Pi; default Metropolis
    long rounds = 5;            ///< consensus iterations per sampling instant
    std::vector<std::string> node_outputs; ///< per-node visible output digits, e.g. "01"

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Piecewise-constant schedule: value(t) is the entry of the latest point
/// whose start time is <= t, and 0 before the first point.
struct Schedule {
    std::vector<std::pair<double, double>> points;

    double at(double t) const {
        double value = 0.0;
        for (const auto& [start, v] : points) {
            if (start <= t) value = v;
            else break;
        }
        return value;
    }
    bool empty() const { return points.empty(); }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct UtSpec {
    double alpha = 1e-3;
    double beta = 2.0;
    double kappa = 0.0;

    friend bool operator==(const UtSpec&, const UtSpec&) = default;
};

/// Declarative experiment description; see scenarios/*.scn for the file form.
struct Scenario {
    std::string name;
    PlantSpec plant;
    ControllerSpec control;
    UtSpec ukf;
    NoiseSpec noise;
    NetworkSpec network;
    Schedule reference;
    Schedule disturbance;
    double duration = 10.0;
    double ts = 0.0; ///< 0 selects the plant's default sampling period
    std::uint64_t rng_seed = 0;
    std::vector<double> x0;     ///< truth initial state; empty = zeros
    std::vector<double> x0_hat; ///< filter initial estimate; empty = zeros
    double error_bound = 0.0;   ///< declared per-node ||e|| bound; 0 = undeclared

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline double default_ts(PlantType type) {
    switch (type) {
        case PlantType::cruise: return 0.01;
        case PlantType::suspension: return 0.0005;
        case PlantType::aircraft: return 0.01;
        case PlantType::motor: return 0.01;
        case PlantType::motor_speed: return 0.01;
    }
    return 0.01;
}

inline double effective_ts(const Scenario& s) {
    return s.ts > 0.0 ? s.ts : default_ts(s.plant.type);
}

inline plants::StateSpaceModel<double> build_plant(const PlantSpec& spec) {
    switch (spec.type) {
        case PlantType::cruise: return plants::make_cruise(spec.cruise);
        case PlantType::suspension: return plants::make_suspension(spec.suspension);
        case PlantType::aircraft: return plants::make_aircraft(spec.aircraft);
        case PlantType::motor: return plants::make_motor(spec.motor);
        case PlantType::motor_speed: return plants::make_motor_speed(spec.motor);
    }
    throw InvalidSpecError("unknown plant type");
}

/// Field-by-field static validation; throws ValidationError naming the field.
inline void validate(const Scenario& s) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ValidationError(field + ": " + why);
    };

    switch (s.plant.type) {
        case PlantType::cruise:
            if (!(s.plant.cruise.m > 0)) fail("plant.m", "mass must be positive");
            if (s.plant.cruise.b < 0) fail("plant.b", "drag must be non-negative");
            break;
        case PlantType::suspension: {
            const auto& p = s.plant.suspension;
            if (!(p.M1 > 0)) fail("plant.M1", "mass must be positive");
            if (!(p.M2 > 0)) fail("plant.M2", "mass must be positive");
            if (!(p.k1 > 0)) fail("plant.k1", "stiffness must be positive");
            if (!(p.k2 > 0)) fail("plant.k2", "stiffness must be positive");
            if (!(p.b1 > 0)) fail("plant.b1", "damping must be positive");
            if (!(p.b2 > 0)) fail("plant.b2", "damping must be positive");
            break;
        }
        case PlantType::aircraft: break;
        case PlantType::motor:
        case PlantType::motor_speed: {
            const auto& p = s.plant.motor;
            if (!(p.J > 0)) fail("plant.J", "inertia must be positive");
            if (!(p.kappa > 0)) fail("plant.kappa", "gain must be positive");
            if (!(p.R > 0)) fail("plant.R", "resistance must be positive");
            if (!(p.L > 0)) fail("plant.L", "inductance must be positive");
            if (p.b < 0) fail("plant.b", "friction must be non-negative");
            break;
        }
    }

    if (!(s.duration > 0)) fail("duration", "must be positive");
    const double ts = effective_ts(s);
    if (!(ts > 0)) fail("ts", "must be positive");
    if (s.duration / ts > 5e7) fail("duration", "too many steps for this ts");

    for (const auto& [t, v] : s.reference.points)
        if (t < 0 || t > s.duration) fail("reference.schedule", "times must lie in [0, duration]");
    for (const auto& [t, v] : s.disturbance.points)
        if (t < 0 || t > s.duration) fail("disturbance.schedule", "times must lie in [0, duration]");
    for (std::size_t i = 1; i < s.reference.points.size(); ++i)
        if (s.reference.points[i].first < s.reference.points[i - 1].first)
            fail("reference.schedule", "times must be non-decreasing");
    for (std::size_t i = 1; i < s.disturbance.points.size(); ++i)
        if (s.disturbance.points[i].first < s.disturbance.points[i - 1].first)
            fail("disturbance.schedule", "times must be non-decreasing");

    if (s.ukf.alpha < 1e-4 || s.ukf.alpha > 1.0) fail("ukf.alpha", "must lie in [1e-4, 1]");
    if (s.noise.r < 0) fail("noise.r", "covariance must be non-negative");
    if (s.noise.q < 0) fail("noise.q", "covariance must be non-negative");
    if (s.noise.p0 < 0) fail("noise.p0", "initial covariance must be non-negative");

    if (s.network.nodes < 1) fail("network.nodes", "need at least one node");
    if (s.network.rounds < 0) fail("network.l", "consensus iterations must be >= 0");
    const std::size_t k = static_cast<std::size_t>(s.network.nodes);
    if (s.network.topology == Topology::custom && s.network.adjacency.size() != k * k &&
        s.network.pi.size() != k * k)
        fail("network.adjacency", "custom topology needs a k*k adjacency (or explicit pi)");
    if (!s.network.pi.empty() && s.network.pi.size() != k * k)
        fail("network.pi", "explicit weights must be k*k");
    if (!s.network.node_outputs.empty() && s.network.node_outputs.size() != k)
        fail("network.node_outputs", "one output mask per node required");

    const auto plant = build_plant(s.plant);
    const Index n = plant.num_states();
    const Index p = plant.num_outputs();
    if (!s.x0.empty() && static_cast<Index>(s.x0.size()) != n)
        fail("init.x0", "length must equal the state dimension");
    if (!s.x0_hat.empty() && static_cast<Index>(s.x0_hat.size()) != n)
        fail("init.x0_hat", "length must equal the state dimension");
    if (s.error_bound < 0) fail("init.error_bound", "must be non-negative");
    for (const auto& mask : s.network.node_outputs) {
        if (mask.empty()) fail("network.node_outputs", "a node must see at least one output");
        for (char c : mask) {
            if (c < '0' || c >= '0' + static_cast<int>(p))
                fail("network.node_outputs", "output index out of range");
        }
    }
    if (!s.disturbance.empty() && plant.num_inputs() < 2)
        fail("disturbance.schedule", "this plant has no disturbance input");

    if (s.control.type == ControllerType::state_feedback &&
        static_cast<Index>(s.control.poles.size()) != n)
        fail("control.poles", "pole count must equal the state dimension");
    if (s.control.tracked_output < 0 || s.control.tracked_output >= p)
        fail("control.tracked_output", "output index out of range");
    if (s.control.type == ControllerType::pid) {
        control::PidGains<double> g{s.control.kp, s.control.ki, s.control.kd, ts};
        try {
            control::validate(g);
        } catch (const Error& e) {
            fail("control", e.what());
        }
    }
    if (s.control.type == ControllerType::compensator) {
        control::CompensatorTF<double> comp{s.control.comp_z0, s.control.comp_p0,
                                            s.control.comp_gain, s.control.comp_kind};
        try {
            control::validate(comp);
        } catch (const Error& e) {
            fail("control", e.what());
        }
    }
}

/// Ready-to-run form of a scenario: built plant, sampled model, controller
/// gains, network and node measurement maps.
struct CompiledScenario {
    Scenario source;
    double ts{};
    Index steps{};
    plants::StateSpaceModel<double> plant;
    plants::DiscreteModel<double> discrete;
    plants::NonlinearModel<double> model; ///< full-output model (drives the truth)
    MatrixX<double> Q, R, P0;
    std::vector<MatrixX<double>> node_masks;
    std::vector<plants::NonlinearModel<double>> node_models;
    consensus::ConsensusNetwork<double> net;
    consensus::PrimitivityReport<double> net_report;
    ukf::UtParams<double> ut;
    control::StateFeedbackLaw<double> law; ///< state_feedback / lqr
    VectorX<double> x0, x0_hat;
};

inline CompiledScenario compile(const Scenario& s) {
    validate(s);
    CompiledScenario cs;
    cs.source = s;
    cs.ts = effective_ts(s);
    cs.steps = static_cast<Index>(std::llround(s.duration / cs.ts));
    if (cs.steps < 1) throw ValidationError("duration: shorter than one sampling period");

    cs.plant = build_plant(s.plant);
    cs.discrete = plants::discretize(cs.plant, cs.ts);
    const Index n = cs.plant.num_states();
    const Index p = cs.plant.num_outputs();

    const MatrixX<double>& H = cs.plant.C;
    cs.Q = s.noise.q_mode == QMode::output ? MatrixX<double>(s.noise.q * H.transpose() * H)
                                           : MatrixX<double>(s.noise.q * MatrixX<double>::Identity(n, n));
    cs.R = s.noise.r * MatrixX<double>::Identity(p, p);
    cs.P0 = s.noise.p0 * MatrixX<double>::Identity(n, n);
    cs.model = plants::as_nonlinear(cs.discrete, cs.Q, cs.R);

    // Per-node measurement maps (identity unless the scenario masks outputs).
    const Index k = s.network.nodes;
    for (Index i = 0; i < k; ++i) {
        MatrixX<double> mask;
        if (s.network.node_outputs.empty()) {
            mask = MatrixX<double>::Identity(p, p);
        } else {
            const std::string& digits = s.network.node_outputs[static_cast<std::size_t>(i)];
            mask = MatrixX<double>::Zero(static_cast<Index>(digits.size()), p);
            for (Index r = 0; r < mask.rows(); ++r)
                mask(r, digits[static_cast<std::size_t>(r)] - '0') = 1.0;
        }
        plants::DiscreteModel<double> masked = cs.discrete;
        masked.C = mask * cs.discrete.C;
        masked.D = mask * cs.discrete.D;
        cs.node_models.push_back(plants::as_nonlinear(masked, cs.Q, MatrixX<double>(mask * cs.R * mask.transpose())));
        cs.node_masks.push_back(std::move(mask));
    }

    cs.net.num_nodes = k;
    switch (s.network.topology) {
        case Topology::complete: cs.net.adjacency = consensus::complete_graph(k); break;
        case Topology::ring: cs.net.adjacency = consensus::ring_graph(k); break;
        case Topology::path: cs.net.adjacency = consensus::path_graph(k); break;
        case Topology::custom: {
            cs.net.adjacency = AdjacencyMatrix::Constant(k, k, false);
            if (!s.network.adjacency.empty())
                for (Index i = 0; i < k; ++i)
                    for (Index j = 0; j < k; ++j)
                        cs.net.adjacency(i, j) =
                            s.network.adjacency[static_cast<std::size_t>(i * k + j)] != 0;
            break;
        }
    }
    if (!s.network.pi.empty()) {
        cs.net.Pi.resize(k, k);
        for (Index i = 0; i < k; ++i)
            for (Index j = 0; j < k; ++j)
                cs.net.Pi(i, j) = s.network.pi[static_cast<std::size_t>(i * k + j)];
        if (s.network.topology == Topology::custom && s.network.adjacency.empty())
            cs.net.adjacency.resize(0, 0); // support pattern comes from Pi itself
    } else {
        cs.net.Pi = consensus::metropolis_weights<double>(cs.net.adjacency);
    }
    cs.net_report = consensus::validate_network(cs.net);

    cs.ut = ukf::UtParams<double>::make(n, s.ukf.alpha, s.ukf.beta, s.ukf.kappa);

    if (s.control.type == ControllerType::state_feedback || s.control.type == ControllerType::lqr) {
        const Index out = s.control.tracked_output;
        if (s.control.type == ControllerType::state_feedback) {
            if (s.control.design == DesignDomain::discrete) {
                std::vector<std::complex<double>> zpoles;
                for (const auto& sp : s.control.poles) zpoles.push_back(std::exp(sp * cs.ts));
                cs.law.K = control::place_poles<double>(cs.discrete.F, cs.discrete.G, zpoles, 0);
                cs.law.Nbar = control::precompensator_discrete(cs.discrete, cs.law.K, 0, out);
            } else {
                cs.law.K = control::place_poles(cs.plant, s.control.poles, 0);
                cs.law.Nbar = control::precompensator(cs.plant, cs.law.K, 0, out);
            }
        } else {
            const MatrixX<double> c_row = cs.plant.C.row(out);
            const MatrixX<double> Qw = s.control.lqr_p * c_row.transpose() * c_row;
            const MatrixX<double> Rw =
                s.control.lqr_r * MatrixX<double>::Identity(cs.plant.num_inputs(), cs.plant.num_inputs());
            cs.law.K = control::lqr_gain(cs.plant, Qw, Rw).row(0);
            cs.law.Nbar = control::precompensator(cs.plant, cs.law.K, 0, out);
        }
        cs.law.actuated_input_index = 0;
        const MatrixX<double> closed = cs.discrete.F - cs.discrete.G.col(0) * cs.law.K;
        if (!control::is_stable_discrete(closed))
            throw ValidationError("control: sampled closed loop is unstable at this ts "
                                  "(consider control.design = discrete or a smaller ts)");
    }

    cs.x0 = VectorX<double>::Zero(n);
    for (std::size_t i = 0; i < s.x0.size(); ++i) cs.x0(static_cast<Index>(i)) = s.x0[i];
    cs.x0_hat = VectorX<double>::Zero(n);
    for (std::size_t i = 0; i < s.x0_hat.size(); ++i) cs.x0_hat(static_cast<Index>(i)) = s.x0_hat[i];
    return cs;
}

} // namespace wacukf::simnet
