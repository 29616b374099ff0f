#include <doctest.h>

#include <random>

#include <wacukf/discretize.hpp>
#include <wacukf/plants.hpp>
#include <wacukf/rng.hpp>
#include <wacukf/ukf.hpp>

#include "oracles.hpp"

using namespace wacukf;
using namespace wacukf::ukf;

namespace {

plants::NonlinearModel<double> linear_model(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G,
                                            const Eigen::MatrixXd& C, const Eigen::MatrixXd& Q,
                                            const Eigen::MatrixXd& R, double ts = 0.01) {
    plants::DiscreteModel<double> d;
    d.F = F;
    d.G = G;
    d.C = C;
    d.D = Eigen::MatrixXd::Zero(C.rows(), G.cols());
    d.ts = ts;
    return plants::as_nonlinear(d, Q, R);
}

} // namespace

TEST_CASE("unit sigma set: L=1, alpha=1, kappa=0") {
    const auto params = UtParams<double>::make(1, 1.0, 2.0, 0.0);
    CHECK(params.lambda == 0.0);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(1, 1);
    const auto set = sigma_points<double>(x, P, params);
    REQUIRE(set.points.cols() == 3);
    CHECK(set.points(0, 0) == 0.0);
    CHECK(set.points(0, 1) == doctest::Approx(1.0));
    CHECK(set.points(0, 2) == doctest::Approx(-1.0));
    CHECK(set.Wm(0) == 0.0);
    CHECK(set.Wm(1) == doctest::Approx(0.5));
    CHECK(set.Wm(2) == doctest::Approx(0.5));
    // W0^(c) picks up the (1 - alpha^2 + beta) term.
    CHECK(set.Wc(0) == doctest::Approx(2.0));
}

TEST_CASE("near-degenerate spread: L=2, alpha=1e-3") {
    const auto params = UtParams<double>::make(2, 1e-3, 2.0, 0.0);
    CHECK(params.lambda == doctest::Approx(2e-6 - 2.0).epsilon(1e-12));
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const auto set = sigma_points<double>(x, Eigen::MatrixXd::Identity(2, 2), params);
    const double expected = std::sqrt(2e-6);
    CHECK(set.points(0, 1) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(set.points(1, 2) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(set.points(0, 3) == doctest::Approx(-expected).epsilon(1e-9));
}

TEST_CASE("sigma weights normalize and reconstruct the generating moments") {
    std::mt19937 rng(99);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 5);
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = 3.0 * dist(rng);
        const Eigen::MatrixXd P = oracles::random_spd(rng, n);
        // Benign weights (alpha = 1): the reconstruction identities hold to
        // far better than the stated tolerances.
        const auto unit = UtParams<double>::make(n, 1.0);
        const auto set = sigma_points<double>(x, P, unit);
        CHECK(std::abs(set.Wm.sum() - 1.0) < 1e-12);
        for (Eigen::Index i = 1; i < set.Wc.size(); ++i) CHECK(set.Wc(i) == set.Wm(i));
        CHECK(set.Wc(0) != set.Wm(0));
        const Eigen::VectorXd mean = weighted_mean<double>(set.points, set.Wm);
        CHECK((mean - x).lpNorm<Eigen::Infinity>() < 1e-10);
        const Eigen::MatrixXd spread =
            weighted_cross_covariance<double>(set.points, mean, set.points, mean, set.Wc);
        CHECK((spread - P).lpNorm<Eigen::Infinity>() < 1e-8);

        // Default near-degenerate weights (~1e6) leave a cancellation floor
        // proportional to the state scale; stay within a few 1e-9 of it.
        const auto tight = UtParams<double>::make(n);
        const auto set2 = sigma_points<double>(x, P, tight);
        CHECK(std::abs(set2.Wm.sum() - 1.0) < 1e-9);
        const Eigen::VectorXd mean2 = weighted_mean<double>(set2.points, set2.Wm);
        const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
        CHECK((mean2 - x).lpNorm<Eigen::Infinity>() < 3e-9 * scale);
        const Eigen::MatrixXd spread2 =
            weighted_cross_covariance<double>(set2.points, mean2, set2.points, mean2, set2.Wc);
        CHECK((spread2 - P).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("sigma point generation survives singular PSD and rejects indefinite P") {
    const auto params = UtParams<double>::make(2);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);

    Eigen::MatrixXd singular(2, 2);
    singular << 1.0, 0.0, 0.0, 0.0; // rank one: jitter retry must kick in
    CHECK_NOTHROW(sigma_points<double>(x, singular, params));

    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0; // eigenvalues 3 and -1
    CHECK_THROWS_AS(sigma_points<double>(x, indefinite, params), CovarianceNotPsdError);
}

TEST_CASE("time update: identity propagation is a fixed point") {
    plants::NonlinearModel<double> model;
    model.state_dim = 2;
    model.input_dim = 1;
    model.output_dim = 2;
    model.ts = 0.1;
    model.Q = Eigen::MatrixXd::Zero(2, 2);
    model.R = Eigen::MatrixXd::Identity(2, 2);
    model.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) { return x; };
    model.h = [](const Eigen::VectorXd& x) { return x; };

    std::mt19937 rng(1);
    UkfEstimate<double> est{(Eigen::VectorXd(2) << 1.0, -2.0).finished(),
                            oracles::random_spd(rng, 2)};
    const auto pred = time_update<double>(est, Eigen::VectorXd::Zero(1), model,
                                          UtParams<double>::make(2));
    CHECK((pred.estimate.x - est.x).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((pred.estimate.P - est.P).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("time update matches F P F' + Q on a linear plant") {
    std::mt19937 rng(5);
    const Eigen::MatrixXd F = (Eigen::MatrixXd(3, 3) << 0.9, 0.1, 0.0, -0.05, 0.85, 0.1, 0.02,
                               0.0, 0.8)
                                  .finished();
    const Eigen::MatrixXd G = (Eigen::MatrixXd(3, 1) << 0.1, 0.0, 0.05).finished();
    const Eigen::MatrixXd Q = 0.03 * Eigen::MatrixXd::Identity(3, 3);
    const auto model = linear_model(F, G, Eigen::MatrixXd::Identity(3, 3), Q,
                                    Eigen::MatrixXd::Identity(3, 3));
    UkfEstimate<double> est{(Eigen::VectorXd(3) << 1.0, 2.0, -1.0).finished(),
                            oracles::random_spd(rng, 3)};
    const Eigen::VectorXd u = (Eigen::VectorXd(1) << 2.0).finished();
    const auto pred = time_update<double>(est, u, model, UtParams<double>::make(3));
    const Eigen::VectorXd expected_mean = F * est.x + G * u;
    const Eigen::MatrixXd expected_cov = F * est.P * F.transpose() + Q;
    CHECK((pred.estimate.x - expected_mean).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((pred.estimate.P - expected_cov).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("time update advances the cruise plant one step") {
    const auto d = plants::discretize(plants::make_cruise({1000.0, 50.0}), 0.01);
    const auto model = plants::as_nonlinear(d, 0.1 * Eigen::MatrixXd::Identity(1, 1),
                                            0.5 * Eigen::MatrixXd::Identity(1, 1));
    UkfEstimate<double> est{(Eigen::VectorXd(1) << 10.0).finished(),
                            50.0 * Eigen::MatrixXd::Identity(1, 1)};
    const Eigen::VectorXd u = (Eigen::VectorXd(1) << 500.0).finished();
    const auto pred = time_update<double>(est, u, model, UtParams<double>::make(1));
    // Scalar oracle: F and G in closed form.
    const double F = std::exp(-0.05 * 0.01);
    const double G = (1.0 - F) / 0.05 * 0.001;
    CHECK(pred.estimate.x(0) == doctest::Approx(F * 10.0 + G * 500.0).epsilon(1e-10));
}

TEST_CASE("time update reports the offending state on non-finite f output") {
    plants::NonlinearModel<double> model;
    model.state_dim = 2;
    model.input_dim = 1;
    model.output_dim = 1;
    model.ts = 0.1;
    model.Q = Eigen::MatrixXd::Zero(2, 2);
    model.R = Eigen::MatrixXd::Identity(1, 1);
    model.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
        Eigen::VectorXd out = x;
        out(1) = std::numeric_limits<double>::quiet_NaN();
        return out;
    };
    model.h = [](const Eigen::VectorXd& x) { return x.head(1).eval(); };
    UkfEstimate<double> est{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    try {
        time_update<double>(est, Eigen::VectorXd::Zero(1), model, UtParams<double>::make(2));
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("state 1") != std::string::npos);
    }
}

TEST_CASE("measurement update: zero innovation leaves the state unchanged") {
    const Eigen::MatrixXd F = 0.95 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd C = (Eigen::MatrixXd(1, 2) << 1.0, 0.0).finished();
    const auto model = linear_model(F, Eigen::MatrixXd::Zero(2, 1), C,
                                    0.01 * Eigen::MatrixXd::Identity(2, 2),
                                    0.5 * Eigen::MatrixXd::Identity(1, 1));
    UkfEstimate<double> pred{(Eigen::VectorXd(2) << 3.0, -1.0).finished(),
                             Eigen::MatrixXd::Identity(2, 2)};
    // Feed exactly the predicted measurement.
    const auto params = UtParams<double>::make(2);
    const auto set = sigma_points<double>(pred.x, pred.P, params);
    Eigen::MatrixXd outputs(1, set.points.cols());
    for (Eigen::Index i = 0; i < set.points.cols(); ++i) outputs.col(i) = model.h(set.points.col(i));
    const Eigen::VectorXd y_hat = weighted_mean<double>(outputs, set.Wm);

    const auto post = measurement_update<double>(pred, y_hat, model, params);
    CHECK((post.x - pred.x).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("measurement update equals the classical Kalman update on a linear plant") {
    std::mt19937 rng(11);
    const Eigen::MatrixXd F = (Eigen::MatrixXd(2, 2) << 0.98, 0.05, -0.03, 0.92).finished();
    const Eigen::MatrixXd G = (Eigen::MatrixXd(2, 1) << 0.02, 0.01).finished();
    const Eigen::MatrixXd C = (Eigen::MatrixXd(1, 2) << 1.0, 0.5).finished();
    const Eigen::MatrixXd Q = 0.05 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd R = 0.4 * Eigen::MatrixXd::Identity(1, 1);
    const auto model = linear_model(F, G, C, Q, R);
    const auto params = UtParams<double>::make(2);

    oracles::KalmanState kf{(Eigen::VectorXd(2) << 0.5, -0.5).finished(),
                            oracles::random_spd(rng, 2)};
    UkfEstimate<double> ukf_est{kf.x, kf.P};

    std::normal_distribution<double> dist(0.0, 1.0);
    const Eigen::VectorXd u = (Eigen::VectorXd(1) << 1.0).finished();
    for (int k = 0; k < 50; ++k) {
        const Eigen::VectorXd y = (Eigen::VectorXd(1) << dist(rng)).finished();
        kf = oracles::kalman_step(kf, u, y, F, G, C, Q, R);
        const auto pred = time_update<double>(ukf_est, u, model, params);
        ukf_est = measurement_update<double>(pred.estimate, y, model, params);
        CHECK((ukf_est.x - kf.x).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((ukf_est.P - kf.P).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("measurement update never inflates the covariance") {
    std::mt19937 rng(3);
    const Eigen::MatrixXd C = (Eigen::MatrixXd(2, 3) << 1, 0, 0, 0, 1, 0).finished();
    const auto model = linear_model(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 1),
                                    C, Eigen::MatrixXd::Zero(3, 3),
                                    0.3 * Eigen::MatrixXd::Identity(2, 2));
    const auto params = UtParams<double>::make(3);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        UkfEstimate<double> pred{Eigen::VectorXd::Zero(3), oracles::random_spd(rng, 3)};
        const Eigen::VectorXd y = (Eigen::VectorXd(2) << dist(rng), dist(rng)).finished();
        const auto post = measurement_update<double>(pred, y, model, params);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pred.P - post.P);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
        CHECK((post.P - post.P.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("singular innovation covariance raises the dedicated error") {
    // Duplicated measurement rows with R = 0 make S exactly singular.
    const Eigen::MatrixXd C = (Eigen::MatrixXd(2, 2) << 1, 0, 1, 0).finished();
    const auto model = linear_model(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 1),
                                    C, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2));
    UkfEstimate<double> pred{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    CHECK_THROWS_AS(
        measurement_update<double>(pred, Eigen::VectorXd::Zero(2), model, UtParams<double>::make(2)),
        InnovationSingularError);
}

TEST_CASE("UT propagation through random linear maps is exact") {
    std::mt19937 rng(2024);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 5);
        const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng() % 5);
        Eigen::MatrixXd Gmap(p, n);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < n; ++j) Gmap(i, j) = dist(rng);
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = 2.0 * dist(rng);
        const Eigen::MatrixXd P = oracles::random_spd(rng, n);

        const auto params = UtParams<double>::make(n);
        const auto set = sigma_points<double>(x, P, params);
        Eigen::MatrixXd mapped(p, set.points.cols());
        for (Eigen::Index i = 0; i < set.points.cols(); ++i)
            mapped.col(i) = Gmap * set.points.col(i);

        const Eigen::VectorXd mean = weighted_mean<double>(mapped, set.Wm);
        const Eigen::MatrixXd cov =
            weighted_cross_covariance<double>(mapped, mean, mapped, mean, set.Wc);
        CHECK((mean - Gmap * x).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((cov - Gmap * P * Gmap.transpose()).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("long suspension run keeps P symmetric positive semi-definite") {
    const auto d = plants::discretize(plants::make_suspension({}), 0.0005);
    const auto model = plants::as_nonlinear(d, 10.0 * Eigen::MatrixXd::Identity(4, 4),
                                            0.05 * Eigen::MatrixXd::Identity(1, 1));
    const auto params = UtParams<double>::make(4);
    simnet::NormalSampler rng(77);

    UkfEstimate<double> est{Eigen::VectorXd::Zero(4), 50.0 * Eigen::MatrixXd::Identity(4, 4)};
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(4);
    const Eigen::VectorXd u = (Eigen::VectorXd(2) << 0.0, 0.05).finished();
    for (int k = 0; k < 10000; ++k) {
        x_true = model.f(x_true, u);
        const Eigen::VectorXd y = model.h(x_true) + std::sqrt(0.05) * rng.normal_vector(1);
        const auto pred = time_update<double>(est, u, model, params);
        est = measurement_update<double>(pred.estimate, y, model, params);
        if (k % 500 == 0) {
            CHECK((est.P - est.P.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.P);
            CHECK(es.eigenvalues().minCoeff() > -1e-10);
        }
    }
    CHECK(est.x.allFinite());
}

TEST_CASE("500-step cruise run: UKF trajectory equals a classical KF trajectory") {
    const auto d = plants::discretize(plants::make_cruise({}), 0.01);
    const Eigen::MatrixXd Q = 0.1 * Eigen::MatrixXd::Identity(1, 1);
    const Eigen::MatrixXd R = 0.5 * Eigen::MatrixXd::Identity(1, 1);
    const auto model = plants::as_nonlinear(d, Q, R);
    const auto params = UtParams<double>::make(1);

    simnet::NormalSampler rng(123);
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd u = (Eigen::VectorXd(1) << 500.0).finished();
    oracles::KalmanState kf{Eigen::VectorXd::Zero(1), 50.0 * Eigen::MatrixXd::Identity(1, 1)};
    UkfEstimate<double> est{kf.x, kf.P};
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        x_true = model.f(x_true, u);
        const Eigen::VectorXd y = model.h(x_true) + std::sqrt(0.5) * rng.normal_vector(1);
        kf = oracles::kalman_step(kf, u, y, d.F, d.G, d.C, Q, R);
        const auto pred = time_update<double>(est, u, model, params);
        est = measurement_update<double>(pred.estimate, y, model, params);
        worst = std::max(worst, (est.x - kf.x).lpNorm<Eigen::Infinity>());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("ut parameter validation") {
    CHECK_THROWS_AS(UtParams<double>::make(2, 1e-5), InvalidParameterError);
    CHECK_THROWS_AS(UtParams<double>::make(2, 1.5), InvalidParameterError);
    CHECK_THROWS_AS(UtParams<double>::make(0), InvalidParameterError);
    // kappa pushing L + lambda to zero is rejected.
    CHECK_THROWS_AS(UtParams<double>::make(2, 1.0, 2.0, -2.0), InvalidParameterError);
    const auto p = UtParams<float>::make(3, 1e-2f);
    CHECK(p.L == 3);
}
