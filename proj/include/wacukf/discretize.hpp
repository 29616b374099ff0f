#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "wacukf/nonlinear_model.hpp"
#include "wacukf/state_space.hpp"

namespace wacukf::plants {

/// Zero-order-hold sample of a continuous model:
///
///   x_{k+1} = F x_k + G u_k,   y_k = C x_k + D u_k
template <typename Scalar>
struct DiscreteModel {
    MatrixX<Scalar> F;
    MatrixX<Scalar> G;
    MatrixX<Scalar> C;
    MatrixX<Scalar> D;
    Scalar ts{};
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;

    Index num_states() const { return F.rows(); }
    Index num_inputs() const { return G.cols(); }
    Index num_outputs() const { return C.rows(); }
};

/// Exact ZOH discretization. F = exp(A ts) and G = (integral of exp(A tau)) B
/// come out of one scaling-and-squaring matrix exponential of the augmented
/// block [[A, B], [0, 0]] * ts.
template <typename Scalar>
DiscreteModel<Scalar> discretize(const StateSpaceModel<Scalar>& m, Scalar ts) {
    validate(m);
    if (!(ts > Scalar(0))) throw InvalidParameterError("discretize: ts must be positive");
    const Index n = m.num_states();
    const Index q = m.num_inputs();
    MatrixX<Scalar> aug = MatrixX<Scalar>::Zero(n + q, n + q);
    aug.topLeftCorner(n, n) = m.A;
    aug.topRightCorner(n, q) = m.B;
    MatrixX<Scalar> e = (aug * ts).exp();
    DiscreteModel<Scalar> d;
    d.F = e.topLeftCorner(n, n);
    d.G = e.topRightCorner(n, q);
    d.C = m.C;
    d.D = m.D;
    d.ts = ts;
    d.state_names = m.state_names;
    d.input_names = m.input_names;
    d.output_names = m.output_names;
    return d;
}

/// Wraps the sampled linear plant as the filter-facing interface with the
/// given noise covariances.
template <typename Scalar, typename QDerived, typename RDerived>
NonlinearModel<Scalar> as_nonlinear(const DiscreteModel<Scalar>& d,
                                    const Eigen::MatrixBase<QDerived>& Q,
                                    const Eigen::MatrixBase<RDerived>& R) {
    NonlinearModel<Scalar> m;
    m.state_dim = d.num_states();
    m.input_dim = d.num_inputs();
    m.output_dim = d.num_outputs();
    m.ts = d.ts;
    m.Q = Q;
    m.R = R;
    m.f = [F = d.F, G = d.G](const VectorX<Scalar>& x, const VectorX<Scalar>& u) -> VectorX<Scalar> {
        return F * x + G * u;
    };
    m.h = [C = d.C](const VectorX<Scalar>& x) -> VectorX<Scalar> { return C * x; };
    validate(m);
    return m;
}

} // namespace wacukf::plants
