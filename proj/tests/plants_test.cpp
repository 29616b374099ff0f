#include <doctest.h>

#include <wacukf/discretize.hpp>
#include <wacukf/plants.hpp>

#include "oracles.hpp"

using namespace wacukf;
using namespace wacukf::plants;
using oracles::Complex;

namespace {

// Shared ZOH-vs-RK4 check: piecewise-constant input, 5 s horizon, fine RK4.
void check_zoh_matches_rk4(const StateSpaceModel<double>& model, double ts,
                           const std::vector<std::pair<double, Eigen::VectorXd>>& input_schedule) {
    const auto d = discretize(model, ts);
    const long steps = static_cast<long>(std::llround(5.0 / ts));
    Eigen::VectorXd x_zoh = Eigen::VectorXd::Zero(model.num_states());
    Eigen::VectorXd x_rk4 = x_zoh;
    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * ts;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(model.num_inputs());
        for (const auto& [start, value] : input_schedule)
            if (start <= t) u = value;
        x_zoh = d.F * x_zoh + d.G * u;
        x_rk4 = oracles::rk4_lti(model.A, model.B, x_rk4, u, ts / 100.0, 100);
    }
    const double scale = std::max(1e-9, x_rk4.norm());
    CHECK((x_zoh - x_rk4).norm() / scale < 1e-4);
}

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

} // namespace

TEST_CASE("cruise factory matches the closed-form one-state model") {
    const auto m = make_cruise({1000.0, 50.0});
    CHECK(m.A(0, 0) == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(m.B(0, 0) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(m.C(0, 0) == 1.0);
    CHECK(m.D(0, 0) == 0.0);

    // Static gain 1/b, evaluated through the resolvent as well.
    CHECK(dc_gain(m)(0, 0) == doctest::Approx(0.02).epsilon(1e-12));
    const Complex at_zero = frequency_response(m, Complex(0, 0))(0, 0);
    CHECK(std::abs(at_zero - Complex(0.02, 0)) < 1e-14);

    const auto integrator = make_cruise({1.0, 0.0});
    CHECK(integrator.A(0, 0) == 0.0);
    CHECK(integrator.B(0, 0) == 1.0);

    CHECK_THROWS_AS(make_cruise({-5.0, 50.0}), InvalidParameterError);
    CHECK_THROWS_AS(make_cruise({0.0, 50.0}), InvalidParameterError);
}

TEST_CASE("cruise transfer function equals 1/(ms + b) at sample frequencies") {
    const CruiseParams p{1000.0, 50.0};
    const auto m = make_cruise(p);
    for (double w : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const Complex s(0, w);
        const Complex got = frequency_response(m, s)(0, 0);
        const Complex expected = 1.0 / (p.m * s + p.b);
        CHECK(std::abs(got - expected) / std::abs(expected) < 1e-6);
    }
}

TEST_CASE("suspension realization reproduces both quarter-car transfer functions") {
    const SuspensionParams p{};
    const oracles::QuarterCar qc{p.M1, p.M2, p.k1, p.k2, p.b1, p.b2};
    const auto m = make_suspension(p);
    REQUIRE(m.num_states() == 4);
    REQUIRE(m.num_inputs() == 2);

    for (double w : {0.5, 2.0, 10.0, 35.0, 120.0}) {
        const Complex s(0, w);
        const auto H = frequency_response(m, s);
        const Complex from_u = H(0, 0);
        const Complex from_gamma = H(0, 1);
        const Complex expect_u = oracles::quarter_car_tf_u(qc, s);
        const Complex expect_gamma = oracles::quarter_car_tf_gamma(qc, s);
        CHECK(std::abs(from_u - expect_u) / std::abs(expect_u) < 1e-6);
        CHECK(std::abs(from_gamma - expect_gamma) / std::abs(expect_gamma) < 1e-6);
        // Adjugate-elimination route agrees with the polynomial form.
        const Complex via_solve = oracles::quarter_car_tf_u_via_solve(qc, s);
        CHECK(std::abs(via_solve - expect_u) / std::abs(expect_u) < 1e-10);
    }
}

TEST_CASE("suspension numerator leading coefficient is M1 + M2") {
    const SuspensionParams p{};
    const oracles::QuarterCar qc{p.M1, p.M2, p.k1, p.k2, p.b1, p.b2};
    const auto m = make_suspension(p);
    // At large real s the normalized numerator tends to (M1 + M2) = 2820.
    const Complex s(1e6, 0);
    const Complex value = frequency_response(m, s)(0, 0) * oracles::quarter_car_detF(qc, s) / (s * s);
    CHECK(std::abs(value - Complex(2820.0, 0)) < 0.1);
}

TEST_CASE("suspension is open-loop stable and returns to rest after a road step") {
    const auto m = make_suspension({});
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.A);
    CHECK((es.eigenvalues().real().array() < 0.0).all());

    // The body mode is lightly damped (zeta ~ 0.012), so reaching a 1e-4 band
    // takes on the order of two minutes of simulated time.
    const double ts = 0.0005;
    const auto d = discretize(m, ts);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd u(2);
    u << 0.0, 0.15; // pure road disturbance, no actuation
    double y_final = 0.0;
    for (long k = 0; k < static_cast<long>(150.0 / ts); ++k) {
        x = d.F * x + d.G * u;
        y_final = (d.C * x)(0);
    }
    CHECK(std::abs(y_final) < 1e-4);

    // Equilibrium stays put.
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
    const Eigen::VectorXd zero_u = Eigen::VectorXd::Zero(2);
    CHECK((d.F * x0 + d.G * zero_u).norm() == 0.0);

    CHECK_THROWS_AS(make_suspension({2500, 320, -80000, 500000, 350, 15020}),
                    InvalidParameterError);
}

TEST_CASE("aircraft factory matches the printed coefficient matrix") {
    const auto m = make_aircraft({});
    Eigen::MatrixXd A_expected(3, 3);
    A_expected << -0.313, 56.7, 0.0, -0.0139, -0.426, 0.0, 0.0, 56.7, 0.0;
    CHECK((m.A - A_expected).lpNorm<Eigen::Infinity>() == 0.0);
    Eigen::VectorXd B_expected(3);
    B_expected << 0.232, 0.0203, 0.0;
    CHECK((m.B - B_expected).lpNorm<Eigen::Infinity>() == 0.0);

    // Zero input, zero state: nothing moves.
    CHECK((m.A * Eigen::VectorXd::Zero(3)).norm() == 0.0);
}

TEST_CASE("aircraft realization matches the pitch transfer function") {
    const AircraftParams p{};
    const auto m = make_aircraft(p);
    for (double w : {0.1, 0.5, 1.0, 5.0, 10.0}) {
        const Complex s(0, w);
        const Complex got = frequency_response(m, s)(0, 0);
        // Exact c-coefficient algebra.
        const Complex exact = oracles::pitch_tf(p.c1, p.c2, p.c3, p.c4, p.c5, p.c6, p.c7, s);
        CHECK(std::abs(got - exact) / std::abs(exact) < 1e-6);
        // Printed rounded form (1.151 s + 0.177)/(s^3 + 0.739 s^2 + 0.921 s); the
        // printed coefficients are three-digit roundings of the exact algebra.
        const Complex printed =
            oracles::polyval({0.177, 1.151}, s) / oracles::polyval({0.0, 0.921, 0.739, 1.0}, s);
        CHECK(std::abs(got - printed) / std::abs(printed) < 5e-3);
    }
}

TEST_CASE("motor factory matches the armature/torque derivation") {
    const auto m = make_motor({});
    Eigen::MatrixXd A_expected(3, 3);
    A_expected << 0, 1, 0, 0, -10, 1, 0, -0.02, -2;
    CHECK((m.A - A_expected).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(m.B(2, 0) == doctest::Approx(2.0).epsilon(1e-14));
    REQUIRE(m.num_outputs() == 2);

    // Speed static gain kappa/(b R + kappa^2).
    const MotorParams p{};
    const Complex dc = frequency_response(m, Complex(1e-9, 0))(1, 0);
    CHECK(std::abs(dc.real() - p.kappa / (p.b * p.R + p.kappa * p.kappa)) < 1e-6);
    CHECK(std::abs(dc.real() - 0.0999) < 1e-4);

    // Full transfer function against the printed denominator product.
    for (double w : {0.1, 1.0, 10.0, 40.0, 200.0}) {
        const Complex s(0, w);
        const Complex got = frequency_response(m, s)(1, 0);
        const Complex expected =
            p.kappa / ((p.J * s + p.b) * (p.L * s + p.R) + p.kappa * p.kappa);
        CHECK(std::abs(got - expected) / std::abs(expected) < 1e-6);
    }

    // kappa -> 0 decouples the speed subsystem from the current.
    MotorParams decoupled{};
    decoupled.kappa = 1e-300;
    const auto md = make_motor(decoupled);
    CHECK(md.A(1, 2) == doctest::Approx(0.0));
    CHECK(md.A(2, 1) == doctest::Approx(0.0));

    CHECK_THROWS_AS(make_motor({0.01, 0.1, 0.01, -1.0, 0.5}), InvalidParameterError);
    CHECK_THROWS_AS(make_motor({0.01, 0.1, 0.01, 1.0, 0.0}), InvalidParameterError);
}

TEST_CASE("motor speed subsystem is the lower-right block") {
    const auto full = make_motor({});
    const auto speed = make_motor_speed({});
    REQUIRE(speed.num_states() == 2);
    CHECK((speed.A - full.A.block(1, 1, 2, 2)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(speed.B(1, 0) == full.B(2, 0));
    CHECK(speed.C(0, 0) == 1.0);
}

TEST_CASE("discretize: scalar exponential and integrator limits") {
    const auto cruise = make_cruise({1000.0, 50.0});
    const auto d = discretize(cruise, 0.01);
    CHECK(d.F(0, 0) == doctest::Approx(std::exp(-0.0005)).epsilon(1e-12));
    // G = (1 - F)/0.05 * 0.001 for the scalar plant.
    CHECK(d.G(0, 0) == doctest::Approx((1.0 - std::exp(-0.0005)) / 0.05 * 0.001).epsilon(1e-10));

    // A = 0: F = I, G = B ts.
    StateSpaceModel<double> integrator;
    integrator.A = Eigen::MatrixXd::Zero(2, 2);
    integrator.B = (Eigen::MatrixXd(2, 1) << 1.0, 3.0).finished();
    integrator.C = Eigen::MatrixXd::Identity(2, 2);
    integrator.D = Eigen::MatrixXd::Zero(2, 1);
    const auto di = discretize(integrator, 0.25);
    CHECK((di.F - Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK((di.G - 0.25 * integrator.B).lpNorm<Eigen::Infinity>() < 1e-14);

    CHECK_THROWS_AS(discretize(cruise, 0.0), InvalidParameterError);
}

TEST_CASE("discretize: eigenvalues of F are exp(ts * eig(A)) on the aircraft model") {
    const auto m = make_aircraft({});
    const double ts = 0.01;
    const auto d = discretize(m, ts);
    Eigen::EigenSolver<Eigen::MatrixXd> es_a(m.A);
    Eigen::EigenSolver<Eigen::MatrixXd> es_f(d.F);
    std::vector<Complex> expected, got;
    for (int i = 0; i < 3; ++i) {
        expected.push_back(std::exp(ts * es_a.eigenvalues()(i)));
        got.push_back(es_f.eigenvalues()(i));
    }
    auto by_real = [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(expected.begin(), expected.end(), by_real);
    std::sort(got.begin(), got.end(), by_real);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(expected[i] - got[i]) < 1e-10);
}

TEST_CASE("ZOH-discretized plants track a fine RK4 integration of the continuous model") {
    check_zoh_matches_rk4(make_cruise({}), 0.01,
                          {{0.0, vec1(500.0)}, {2.5, vec1(-200.0)}});
    check_zoh_matches_rk4(make_aircraft({}), 0.01, {{0.0, vec1(0.2)}, {2.0, vec1(-0.1)}});
    check_zoh_matches_rk4(make_motor({}), 0.01, {{0.0, vec1(1.0)}, {2.5, vec1(2.0)}});
    Eigen::VectorXd u2(2);
    u2 << 100.0, 0.05;
    check_zoh_matches_rk4(make_suspension({}), 0.0005, {{0.0, u2}});
}

TEST_CASE("as_nonlinear wraps the sampled plant for the filter") {
    const auto cruise = make_cruise({1000.0, 50.0});
    const auto d = discretize(cruise, 0.01);
    const auto model = as_nonlinear(d, 0.1 * Eigen::MatrixXd::Identity(1, 1),
                                    0.5 * Eigen::MatrixXd::Identity(1, 1));
    CHECK(model.state_dim == 1);
    CHECK(model.Q(0, 0) == 0.1);
    CHECK(model.R(0, 0) == 0.5);
    const Eigen::VectorXd x = vec1(10.0), u = vec1(500.0);
    CHECK(model.f(x, u)(0) == doctest::Approx(d.F(0, 0) * 10.0 + d.G(0, 0) * 500.0));
    CHECK(model.h(x)(0) == 10.0);

    // Identity propagation special case.
    DiscreteModel<double> ident;
    ident.F = Eigen::MatrixXd::Identity(3, 3);
    ident.G = Eigen::MatrixXd::Zero(3, 1);
    ident.C = Eigen::MatrixXd::Identity(3, 3);
    ident.D = Eigen::MatrixXd::Zero(3, 1);
    ident.ts = 0.1;
    const auto id_model = as_nonlinear(ident, Eigen::MatrixXd::Zero(3, 3),
                                       Eigen::MatrixXd::Identity(3, 3));
    Eigen::VectorXd x3(3);
    x3 << 1.0, -2.0, 3.0;
    CHECK((id_model.f(x3, Eigen::VectorXd::Zero(1)) - x3).norm() == 0.0);

    // The motor measurement is the two-vector (theta, theta_dot).
    const auto motor = make_motor({});
    const auto motor_model =
        as_nonlinear(discretize(motor, 0.01), Eigen::MatrixXd::Zero(3, 3),
                     Eigen::MatrixXd::Identity(2, 2));
    Eigen::VectorXd xm(3);
    xm << 0.3, -0.7, 2.0;
    const Eigen::VectorXd ym = motor_model.h(xm);
    REQUIRE(ym.size() == 2);
    CHECK(ym(0) == 0.3);
    CHECK(ym(1) == -0.7);

    // Dimension mismatch is rejected.
    CHECK_THROWS_AS(as_nonlinear(d, Eigen::MatrixXd::Identity(2, 2),
                                 0.5 * Eigen::MatrixXd::Identity(1, 1)),
                    DimensionError);
}
