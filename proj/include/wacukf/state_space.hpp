#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wacukf/errors.hpp"
#include "wacukf/types.hpp"

namespace wacukf::plants {

/// Continuous-time LTI model
///
///   dx/dt = A x + B u
///       y = C x + D u
///
/// with label lists so downstream traces carry stable column names.
/// Instances are immutable after construction and safe to share across
/// concurrent simulation runs.
template <typename Scalar>
struct StateSpaceModel {
    MatrixX<Scalar> A;
    MatrixX<Scalar> B;
    MatrixX<Scalar> C;
    MatrixX<Scalar> D;
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;

    Index num_states() const { return A.rows(); }
    Index num_inputs() const { return B.cols(); }
    Index num_outputs() const { return C.rows(); }
};

/// Checks dimension consistency and finiteness; throws DimensionError /
/// InvalidParameterError on violation.
template <typename Scalar>
void validate(const StateSpaceModel<Scalar>& m) {
    const Index n = m.A.rows();
    const Index p = m.C.rows();
    const Index q = m.B.cols();
    if (m.A.cols() != n) throw DimensionError("state matrix A must be square");
    if (m.B.rows() != n) throw DimensionError("input matrix B must have one row per state");
    if (m.C.cols() != n) throw DimensionError("output matrix C must have one column per state");
    if (m.D.rows() != p || m.D.cols() != q)
        throw DimensionError("feedthrough D must be outputs x inputs");
    if (!m.A.allFinite() || !m.B.allFinite() || !m.C.allFinite() || !m.D.allFinite())
        throw InvalidParameterError("state-space matrices must be finite");
    if (!m.state_names.empty() && static_cast<Index>(m.state_names.size()) != n)
        throw DimensionError("state label count mismatch");
    if (!m.input_names.empty() && static_cast<Index>(m.input_names.size()) != q)
        throw DimensionError("input label count mismatch");
    if (!m.output_names.empty() && static_cast<Index>(m.output_names.size()) != p)
        throw DimensionError("output label count mismatch");
}

/// Frequency response C (sI - A)^{-1} B + D at one complex frequency.
template <typename Scalar>
MatrixX<std::complex<Scalar>> frequency_response(const StateSpaceModel<Scalar>& m,
                                                 std::complex<Scalar> s) {
    using Complex = std::complex<Scalar>;
    const Index n = m.num_states();
    MatrixX<Complex> resolvent = s * MatrixX<Complex>::Identity(n, n) - m.A.template cast<Complex>();
    return m.C.template cast<Complex>() * resolvent.inverse() * m.B.template cast<Complex>() +
           m.D.template cast<Complex>();
}

/// Static gain C (-A)^{-1} B + D; only defined when A is invertible.
template <typename Scalar>
MatrixX<Scalar> dc_gain(const StateSpaceModel<Scalar>& m) {
    Eigen::FullPivLU<MatrixX<Scalar>> lu(-m.A);
    if (!lu.isInvertible())
        throw NumericalError("dc_gain: system matrix is singular (pole at the origin)");
    return m.C * lu.solve(m.B) + m.D;
}

} // namespace wacukf::plants
