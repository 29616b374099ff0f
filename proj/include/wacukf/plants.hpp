#pragma once

#include <cmath>

#include "wacukf/state_space.hpp"

namespace wacukf::plants {

/// Longitudinal car dynamics m*dv/dt + b*v = u with measured speed.
struct CruiseParams {
    double m = 1000.0; ///< vehicle mass, kg
    double b = 50.0;   ///< linear drag coefficient, N.s/m
    friend bool operator==(const CruiseParams&, const CruiseParams&) = default;
};

/// Quarter-car active suspension: body mass M1 on suspension (k1, b1),
/// wheel mass M2 on tyre (k2, b2), actuator force u, road displacement gamma.
struct SuspensionParams {
    double M1 = 2500.0;   ///< quarter body mass, kg
    double M2 = 320.0;    ///< wheel/suspension mass, kg
    double k1 = 80000.0;  ///< suspension spring, N/m
    double k2 = 500000.0; ///< tyre spring, N/m
    double b1 = 350.0;    ///< suspension damper, N.s/m
    double b2 = 15020.0;  ///< tyre damper, N.s/m
    friend bool operator==(const SuspensionParams&, const SuspensionParams&) = default;
};

/// Linearized longitudinal pitch dynamics; c1..c7 are the coupling
/// coefficients of the attack-angle / pitch-rate / pitch-angle model.
struct AircraftParams {
    double c1 = -0.313;
    double c2 = 56.7;
    double c3 = 0.232;
    double c4 = -0.0139;
    double c5 = -0.426;
    double c6 = 0.0203;
    double c7 = 56.7;
    friend bool operator==(const AircraftParams&, const AircraftParams&) = default;
};

/// Armature-controlled DC motor with back-emf coupling.
struct MotorParams {
    double J = 0.01;      ///< rotor inertia, kg.m^2
    double b = 0.1;       ///< viscous friction, N.m.s
    double kappa = 0.01;  ///< torque constant = emf constant, N.m/A
    double R = 1.0;       ///< armature resistance, Ohm
    double L = 0.5;       ///< armature inductance, H
    friend bool operator==(const MotorParams&, const MotorParams&) = default;
};

/// One-state cruise model: state [v], input u (force N), output v.
template <typename Scalar = double>
StateSpaceModel<Scalar> make_cruise(const CruiseParams& p = {}) {
    if (!(p.m > 0.0)) throw InvalidParameterError("cruise: mass must be positive");
    if (p.b < 0.0) throw InvalidParameterError("cruise: drag coefficient must be non-negative");
    StateSpaceModel<Scalar> m;
    m.A = MatrixX<Scalar>::Constant(1, 1, Scalar(-p.b / p.m));
    m.B = MatrixX<Scalar>::Constant(1, 1, Scalar(1.0 / p.m));
    m.C = MatrixX<Scalar>::Constant(1, 1, Scalar(1));
    m.D = MatrixX<Scalar>::Zero(1, 1);
    m.state_names = {"v"};
    m.input_names = {"u"};
    m.output_names = {"v"};
    validate(m);
    return m;
}

/// Four-state quarter-car model with inputs [u, gamma] and output y1 = x1 - x2.
///
/// Derived from the coupled second-order equations of motion. The road rate
/// d(gamma)/dt drives the wheel, so a strictly proper realization in
/// (u, gamma) uses velocity coordinates shifted by road terms: the states are
/// [x1, x1_dot, y1, y1_dot] where the two rate slots absorb the road bias so
/// that the gamma input column aligns with -A(:,1). A constant road offset
/// then has the equilibrium (gamma, 0, 0, 0), and the measured output y1 is
/// exact. Both transfer functions (from u and from gamma) match the coupled
/// mass-spring-damper algebra identically.
template <typename Scalar = double>
StateSpaceModel<Scalar> make_suspension(const SuspensionParams& p = {}) {
    for (double v : {p.M1, p.M2, p.k1, p.k2, p.b1, p.b2})
        if (!(v > 0.0)) throw InvalidParameterError("suspension: all parameters must be positive");
    const double damper_sum = p.b1 / p.M1 + p.b1 / p.M2 + p.b2 / p.M2;
    const double spring_sum = p.k1 / p.M1 + p.k1 / p.M2 + p.k2 / p.M2;

    StateSpaceModel<Scalar> m;
    m.A = MatrixX<Scalar>::Zero(4, 4);
    m.A(0, 1) = 1.0;
    m.A(1, 0) = -p.b1 * p.b2 / (p.M1 * p.M2);
    m.A(1, 2) = (p.b1 / p.M1) * damper_sum - p.k1 / p.M1;
    m.A(1, 3) = -p.b1 / p.M1;
    m.A(2, 0) = p.b2 / p.M2;
    m.A(2, 2) = -damper_sum;
    m.A(2, 3) = 1.0;
    m.A(3, 0) = p.k2 / p.M2;
    m.A(3, 2) = -spring_sum;

    m.B = MatrixX<Scalar>::Zero(4, 2);
    m.B(1, 0) = 1.0 / p.M1;
    m.B(1, 1) = p.b1 * p.b2 / (p.M1 * p.M2);
    m.B(2, 1) = -p.b2 / p.M2;
    m.B(3, 0) = 1.0 / p.M1 + 1.0 / p.M2;
    m.B(3, 1) = -p.k2 / p.M2;

    m.C = MatrixX<Scalar>::Zero(1, 4);
    m.C(0, 2) = 1.0;
    m.D = MatrixX<Scalar>::Zero(1, 2);
    m.state_names = {"x1", "x1_dot", "y1", "y1_dot"};
    m.input_names = {"u", "gamma"};
    m.output_names = {"y1"};
    validate(m);
    return m;
}

/// Three-state pitch model: states [alpha, q, theta], input delta (elevator
/// deflection, rad), output theta (rad).
template <typename Scalar = double>
StateSpaceModel<Scalar> make_aircraft(const AircraftParams& p = {}) {
    StateSpaceModel<Scalar> m;
    m.A = MatrixX<Scalar>::Zero(3, 3);
    m.A(0, 0) = p.c1;
    m.A(0, 1) = p.c2;
    m.A(1, 0) = p.c4;
    m.A(1, 1) = p.c5;
    m.A(2, 1) = p.c7;
    m.B = MatrixX<Scalar>::Zero(3, 1);
    m.B(0, 0) = p.c3;
    m.B(1, 0) = p.c6;
    m.C = MatrixX<Scalar>::Zero(1, 3);
    m.C(0, 2) = 1.0;
    m.D = MatrixX<Scalar>::Zero(1, 1);
    m.state_names = {"alpha", "q", "theta"};
    m.input_names = {"delta"};
    m.output_names = {"theta"};
    validate(m);
    return m;
}

/// Three-state motor model: states [theta, theta_dot, i], input V (volts),
/// outputs [theta, theta_dot]. Built from the torque balance
/// J*theta_dd + b*theta_dot = kappa*i and the armature loop
/// L*di/dt + R*i = V - kappa*theta_dot.
template <typename Scalar = double>
StateSpaceModel<Scalar> make_motor(const MotorParams& p = {}) {
    for (double v : {p.J, p.kappa, p.R, p.L})
        if (!(v > 0.0)) throw InvalidParameterError("motor: J, kappa, R, L must be positive");
    if (p.b < 0.0) throw InvalidParameterError("motor: friction must be non-negative");
    StateSpaceModel<Scalar> m;
    m.A = MatrixX<Scalar>::Zero(3, 3);
    m.A(0, 1) = 1.0;
    m.A(1, 1) = -p.b / p.J;
    m.A(1, 2) = p.kappa / p.J;
    m.A(2, 1) = -p.kappa / p.L;
    m.A(2, 2) = -p.R / p.L;
    m.B = MatrixX<Scalar>::Zero(3, 1);
    m.B(2, 0) = 1.0 / p.L;
    m.C = MatrixX<Scalar>::Zero(2, 3);
    m.C(0, 0) = 1.0;
    m.C(1, 1) = 1.0;
    m.D = MatrixX<Scalar>::Zero(2, 1);
    m.state_names = {"theta", "theta_dot", "i"};
    m.input_names = {"V"};
    m.output_names = {"theta", "theta_dot"};
    validate(m);
    return m;
}

/// Speed subsystem of the motor: the shaft angle does not feed back into the
/// velocity/current dynamics, so speed experiments use the two-state model
/// [theta_dot, i] with output theta_dot.
template <typename Scalar = double>
StateSpaceModel<Scalar> make_motor_speed(const MotorParams& p = {}) {
    StateSpaceModel<Scalar> full = make_motor<Scalar>(p);
    StateSpaceModel<Scalar> m;
    m.A = full.A.template block<2, 2>(1, 1);
    m.B = full.B.bottomRows(2);
    m.C = MatrixX<Scalar>::Zero(1, 2);
    m.C(0, 0) = 1.0;
    m.D = MatrixX<Scalar>::Zero(1, 1);
    m.state_names = {"theta_dot", "i"};
    m.input_names = {"V"};
    m.output_names = {"theta_dot"};
    validate(m);
    return m;
}

} // namespace wacukf::plants
