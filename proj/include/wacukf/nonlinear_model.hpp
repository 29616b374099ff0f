#pragma once

#include <functional>
#include <utility>

#include "wacukf/errors.hpp"
#include "wacukf/types.hpp"

namespace wacukf::plants {

/// Discrete-time propagation/measurement pair consumed by the filter:
///
///   x_{k+1} = f(x_k, u_k) + q_k,   q_k ~ N(0, Q)
///   y_k     = h(x_k) + r_k,        r_k ~ N(0, R)
///
/// Linear plants wrap f(x,u) = F x + G u, h(x) = C x; user-supplied nonlinear
/// f and h fit the same interface.
template <typename Scalar>
struct NonlinearModel {
    using StateFn = std::function<VectorX<Scalar>(const VectorX<Scalar>&, const VectorX<Scalar>&)>;
    using OutputFn = std::function<VectorX<Scalar>(const VectorX<Scalar>&)>;

    StateFn f;
    OutputFn h;
    MatrixX<Scalar> Q; ///< process-noise covariance, n x n
    MatrixX<Scalar> R; ///< measurement-noise covariance, p x p
    Scalar ts{};       ///< sampling period, s

    Index state_dim{};
    Index input_dim{};
    Index output_dim{};
};

template <typename Scalar>
void validate(const NonlinearModel<Scalar>& m) {
    if (!(m.ts > Scalar(0))) throw InvalidParameterError("nonlinear model: ts must be positive");
    if (m.Q.rows() != m.state_dim || m.Q.cols() != m.state_dim)
        throw DimensionError("nonlinear model: Q must be state_dim x state_dim");
    if (m.R.rows() != m.output_dim || m.R.cols() != m.output_dim)
        throw DimensionError("nonlinear model: R must be output_dim x output_dim");
    const Scalar qs = std::max(Scalar(1), m.Q.template lpNorm<Eigen::Infinity>());
    const Scalar rs = std::max(Scalar(1), m.R.template lpNorm<Eigen::Infinity>());
    if (!m.Q.isApprox(m.Q.transpose(), Scalar(1e-12)))
        throw InvalidParameterError("nonlinear model: Q must be symmetric");
    if (!m.R.isApprox(m.R.transpose(), Scalar(1e-12)))
        throw InvalidParameterError("nonlinear model: R must be symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eq(m.Q);
    if (eq.eigenvalues().minCoeff() < Scalar(-1e-10) * qs)
        throw CovarianceNotPsdError("nonlinear model: Q is not positive semi-definite");
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> er(m.R);
    if (er.eigenvalues().minCoeff() < Scalar(-1e-10) * rs)
        throw CovarianceNotPsdError("nonlinear model: R is not positive semi-definite");
    if (!m.f || !m.h) throw InvalidParameterError("nonlinear model: f and h must be set");
}

} // namespace wacukf::plants
