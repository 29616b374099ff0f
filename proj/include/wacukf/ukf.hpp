#pragma once

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "wacukf/nonlinear_model.hpp"

namespace wacukf::ukf {

/// Unscented-transform parameters. lambda = alpha^2 (L + kappa) - L controls
/// the sigma spread; L + lambda must stay positive so the square roots are real.
template <typename Scalar>
struct UtParams {
    Scalar alpha{static_cast<Scalar>(1e-3)};
    Scalar beta{2};
    Scalar kappa{0};
    Index L{};
    Scalar lambda{};

    static UtParams make(Index state_dim, Scalar alpha = static_cast<Scalar>(1e-3),
                         Scalar beta = Scalar(2), Scalar kappa = Scalar(0)) {
        if (state_dim < 1) throw InvalidParameterError("ut params: state dimension must be >= 1");
        if (alpha < static_cast<Scalar>(1e-4) || alpha > Scalar(1))
            throw InvalidParameterError("ut params: alpha must lie in [1e-4, 1]");
        UtParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.kappa = kappa;
        p.L = state_dim;
        p.lambda = alpha * alpha * (Scalar(state_dim) + kappa) - Scalar(state_dim);
        if (!(Scalar(state_dim) + p.lambda > Scalar(0)))
            throw InvalidParameterError("ut params: L + lambda must be positive");
        return p;
    }
};

/// Coupled state estimate and error covariance.
template <typename Scalar>
struct UkfEstimate {
    VectorX<Scalar> x;
    MatrixX<Scalar> P;
};

/// The 2L+1 sigma points (columns) with mean and covariance weights.
/// `P` is the covariance the set actually encodes: the generating matrix, or
/// its jittered rescue when the plain factorization failed.
template <typename Scalar>
struct SigmaSet {
    MatrixX<Scalar> points;
    VectorX<Scalar> Wm;
    VectorX<Scalar> Wc;
    MatrixX<Scalar> P;
};

namespace detail {

template <typename Scalar>
MatrixX<Scalar> cholesky_with_jitter(MatrixX<Scalar>& P) {
    Eigen::LLT<MatrixX<Scalar>> llt(P);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // One retry with diagonal jitter; silent repeated jitter would mask divergence.
    MatrixX<Scalar> jittered =
        P + static_cast<Scalar>(1e-9) * MatrixX<Scalar>::Identity(P.rows(), P.cols());
    Eigen::LLT<MatrixX<Scalar>> retry(jittered);
    if (retry.info() == Eigen::Success) {
        P = std::move(jittered);
        return retry.matrixL();
    }
    throw CovarianceNotPsdError("sigma_points: covariance is not positive semi-definite");
}

} // namespace detail

/// Sigma points around (x_mean, P):
///   chi_0 = x_mean, chi_i = x_mean +/- column i of sqrt((L + lambda) P)
/// with the Wan - van der Merwe weights.
template <typename Scalar>
SigmaSet<Scalar> sigma_points(const VectorX<Scalar>& x_mean, const MatrixX<Scalar>& P,
                              const UtParams<Scalar>& params) {
    const Index L = params.L;
    if (x_mean.size() != L || P.rows() != L || P.cols() != L)
        throw DimensionError("sigma_points: estimate dimension does not match UT parameters");

    SigmaSet<Scalar> set;
    set.P = P;
    const MatrixX<Scalar> root = detail::cholesky_with_jitter<Scalar>(set.P);
    const Scalar spread = std::sqrt(Scalar(L) + params.lambda);

    set.points.resize(L, 2 * L + 1);
    set.points.col(0) = x_mean;
    for (Index i = 0; i < L; ++i) {
        const VectorX<Scalar> offset = spread * root.col(i);
        set.points.col(1 + i) = x_mean + offset;
        set.points.col(1 + L + i) = x_mean - offset;
    }

    const Scalar denom = Scalar(L) + params.lambda;
    set.Wm = VectorX<Scalar>::Constant(2 * L + 1, Scalar(1) / (Scalar(2) * denom));
    set.Wc = set.Wm;
    set.Wm(0) = params.lambda / denom;
    set.Wc(0) = params.lambda / denom + (Scalar(1) - params.alpha * params.alpha + params.beta);
    return set;
}

/// Weighted mean of a point set (columns).
template <typename Scalar>
VectorX<Scalar> weighted_mean(const MatrixX<Scalar>& points, const VectorX<Scalar>& w) {
    return points * w;
}

/// Weighted outer-product spread of two point sets about their means.
template <typename Scalar>
MatrixX<Scalar> weighted_cross_covariance(const MatrixX<Scalar>& a, const VectorX<Scalar>& mean_a,
                                          const MatrixX<Scalar>& b, const VectorX<Scalar>& mean_b,
                                          const VectorX<Scalar>& w) {
    const MatrixX<Scalar> da = a.colwise() - mean_a;
    const MatrixX<Scalar> db = b.colwise() - mean_b;
    return da * w.asDiagonal() * db.transpose();
}

template <typename Scalar>
struct Prediction {
    UkfEstimate<Scalar> estimate;  ///< predicted mean and covariance (Q included)
    SigmaSet<Scalar> propagated;   ///< the f-propagated sigma set
};

/// Time update: propagate the sigma set through f, form the predicted mean
/// and covariance, and add the process noise.
template <typename Scalar>
Prediction<Scalar> time_update(const UkfEstimate<Scalar>& est, const VectorX<Scalar>& u,
                               const plants::NonlinearModel<Scalar>& model,
                               const UtParams<Scalar>& params) {
    SigmaSet<Scalar> set = sigma_points<Scalar>(est.x, est.P, params);
    for (Index i = 0; i < set.points.cols(); ++i) {
        const VectorX<Scalar> propagated = model.f(set.points.col(i), u);
        if (propagated.size() != model.state_dim)
            throw DimensionError("time_update: f returned a wrong-sized state");
        if (!propagated.allFinite()) {
            Index bad = 0;
            for (Index s = 0; s < propagated.size(); ++s)
                if (!std::isfinite(propagated(s))) { bad = s; break; }
            throw NumericalError("time_update: f produced a non-finite value for state " +
                                 std::to_string(bad));
        }
        set.points.col(i) = propagated;
    }
    Prediction<Scalar> pred;
    pred.estimate.x = weighted_mean<Scalar>(set.points, set.Wm);
    pred.estimate.P = weighted_cross_covariance<Scalar>(set.points, pred.estimate.x, set.points,
                                                        pred.estimate.x, set.Wc) +
                      model.Q;
    pred.estimate.P = (Scalar(0.5) * (pred.estimate.P + pred.estimate.P.transpose())).eval();
    pred.propagated = std::move(set);
    return pred;
}

/// Measurement update: redraw sigma points from the predicted estimate (the
/// process noise must be reflected in their spread), push them through h,
/// and apply the gain W = Kxy S^{-1}.
template <typename Scalar>
UkfEstimate<Scalar> measurement_update(const UkfEstimate<Scalar>& predicted,
                                       const VectorX<Scalar>& y,
                                       const plants::NonlinearModel<Scalar>& model,
                                       const UtParams<Scalar>& params) {
    if (y.size() != model.output_dim)
        throw DimensionError("measurement_update: measurement dimension mismatch");

    const SigmaSet<Scalar> set = sigma_points<Scalar>(predicted.x, predicted.P, params);
    MatrixX<Scalar> outputs(model.output_dim, set.points.cols());
    for (Index i = 0; i < set.points.cols(); ++i) {
        const VectorX<Scalar> yi = model.h(set.points.col(i));
        if (yi.size() != model.output_dim)
            throw DimensionError("measurement_update: h returned a wrong-sized output");
        outputs.col(i) = yi;
    }

    const VectorX<Scalar> y_hat = weighted_mean<Scalar>(outputs, set.Wm);
    MatrixX<Scalar> S =
        weighted_cross_covariance<Scalar>(outputs, y_hat, outputs, y_hat, set.Wc) + model.R;
    S = (Scalar(0.5) * (S + S.transpose())).eval();
    const MatrixX<Scalar> Kxy =
        weighted_cross_covariance<Scalar>(set.points, predicted.x, outputs, y_hat, set.Wc);

    Eigen::LLT<MatrixX<Scalar>> S_chol(S);
    if (S_chol.info() != Eigen::Success)
        throw InnovationSingularError(
            "measurement_update: innovation covariance is singular (R must be positive definite)");
    const MatrixX<Scalar> W = S_chol.solve(Kxy.transpose()).transpose();

    UkfEstimate<Scalar> updated;
    updated.x = predicted.x + W * (y - y_hat);
    // Subtract from the covariance the sigma set encodes so a jitter rescue
    // cannot push P below zero.
    updated.P = set.P - W * S * W.transpose();
    updated.P = (Scalar(0.5) * (updated.P + updated.P.transpose())).eval();
    if (!updated.x.allFinite())
        throw NumericalError("measurement_update: estimate became non-finite");
    return updated;
}

} // namespace wacukf::ukf
