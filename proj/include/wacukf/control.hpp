#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wacukf/discretize.hpp"
#include "wacukf/state_space.hpp"

namespace wacukf::control {

/// Static state feedback u = Nbar * r - K * x applied to one input channel.
template <typename Scalar>
struct StateFeedbackLaw {
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> K;
    Scalar Nbar{1};
    Index actuated_input_index{0};
};

template <typename Scalar>
bool is_stable_continuous(const MatrixX<Scalar>& A) {
    Eigen::EigenSolver<MatrixX<Scalar>> es(A);
    return (es.eigenvalues().real().array() < Scalar(0)).all();
}

template <typename Scalar>
bool is_stable_discrete(const MatrixX<Scalar>& F) {
    Eigen::EigenSolver<MatrixX<Scalar>> es(F);
    return (es.eigenvalues().array().abs() < Scalar(1)).all();
}

namespace detail {

/// Real monic polynomial coefficients (ascending, without the leading 1)
/// from a root set that must be closed under conjugation.
template <typename Scalar>
std::vector<Scalar> real_polynomial_from_roots(std::vector<std::complex<Scalar>> roots) {
    using Complex = std::complex<Scalar>;
    // Pair up complex roots with their conjugates.
    std::vector<Complex> pending = roots;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (std::abs(pending[i].imag()) == Scalar(0)) continue;
        const Complex want = std::conj(pending[i]);
        bool found = false;
        for (std::size_t j = i + 1; j < pending.size(); ++j) {
            const Scalar scale = std::max(Scalar(1), std::abs(want));
            if (std::abs(pending[j] - want) <= Scalar(1e-9) * scale) {
                pending[j] = Complex(0, 0);
                pending[i] = Complex(0, 0);
                found = true;
                break;
            }
        }
        if (!found)
            throw InvalidSpecError("complex poles must come in conjugate pairs");
    }
    std::vector<Complex> coeffs{Complex(1, 0)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(coeffs.size() + 1, Complex(0, 0));
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i + 1] += coeffs[i];
            next[i] -= coeffs[i] * r;
        }
        coeffs = std::move(next);
    }
    std::vector<Scalar> real_coeffs(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) real_coeffs[i] = coeffs[i].real();
    return real_coeffs;
}

} // namespace detail

/// Single-input pole placement via Ackermann's formula. `poles` must contain
/// exactly n values closed under conjugation; returns the 1 x n gain K such
/// that eig(A - B(:,input_index) K) equals the requested poles.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> place_poles(const MatrixX<Scalar>& A,
                                                     const MatrixX<Scalar>& B,
                                                     std::vector<std::complex<Scalar>> poles,
                                                     Index input_index = 0) {
    const Index n = A.rows();
    if (A.cols() != n) throw DimensionError("place_poles: A must be square");
    if (input_index < 0 || input_index >= B.cols())
        throw InvalidSpecError("place_poles: input index out of range");
    if (static_cast<Index>(poles.size()) != n)
        throw InvalidSpecError("place_poles: pole count must equal the state dimension");

    const VectorX<Scalar> b = B.col(input_index);
    MatrixX<Scalar> ctrb(n, n);
    VectorX<Scalar> col = b;
    for (Index i = 0; i < n; ++i) {
        ctrb.col(i) = col;
        col = A * col;
    }
    Eigen::FullPivLU<MatrixX<Scalar>> lu(ctrb);
    if (!lu.isInvertible())
        throw ControllabilityError("place_poles: (A, B(:,idx)) is not controllable");

    const std::vector<Scalar> coeffs = detail::real_polynomial_from_roots<Scalar>(poles);
    // Horner evaluation of the desired characteristic polynomial at A.
    MatrixX<Scalar> phi = A + coeffs[n - 1] * MatrixX<Scalar>::Identity(n, n);
    for (Index i = n - 2; i >= 0; --i)
        phi = phi * A + coeffs[i] * MatrixX<Scalar>::Identity(n, n);

    VectorX<Scalar> en = VectorX<Scalar>::Zero(n);
    en(n - 1) = Scalar(1);
    const VectorX<Scalar> z = ctrb.transpose().fullPivLu().solve(en);
    return z.transpose() * phi;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> place_poles(const plants::StateSpaceModel<Scalar>& model,
                                                     const std::vector<std::complex<Scalar>>& poles,
                                                     Index input_index = 0) {
    return place_poles<Scalar>(model.A, model.B, poles, input_index);
}

/// Reference precompensator for the tracked SISO pair: solves
///
///   [A b; c d] [Nx; Nu] = [0; 1],   Nbar = Nu + K Nx
///
/// so the closed loop (A - b K) x + b Nbar r has unity static gain from r to
/// the tracked output.
template <typename Scalar>
Scalar precompensator(const plants::StateSpaceModel<Scalar>& model,
                      const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>& K, Index input_index = 0,
                      Index output_index = 0) {
    const Index n = model.num_states();
    if (K.cols() != n) throw DimensionError("precompensator: K must be 1 x n");
    if (input_index < 0 || input_index >= model.num_inputs())
        throw InvalidSpecError("precompensator: input index out of range");
    if (output_index < 0 || output_index >= model.num_outputs())
        throw InvalidSpecError("precompensator: output index out of range");

    MatrixX<Scalar> aug(n + 1, n + 1);
    aug.topLeftCorner(n, n) = model.A;
    aug.topRightCorner(n, 1) = model.B.col(input_index);
    aug.bottomLeftCorner(1, n) = model.C.row(output_index);
    aug(n, n) = model.D(output_index, input_index);
    Eigen::FullPivLU<MatrixX<Scalar>> lu(aug);
    if (!lu.isInvertible())
        throw PrecompensationInfeasibleError(
            "precompensator: plant has a transmission zero at the origin for this output");
    VectorX<Scalar> rhs = VectorX<Scalar>::Zero(n + 1);
    rhs(n) = Scalar(1);
    const VectorX<Scalar> N = lu.solve(rhs);
    const Scalar Nu = N(n);
    return Nu + K.dot(N.head(n));
}

/// Unity-DC reference gain for a sampled closed loop x+ = (F - g K) x + g Nbar r.
template <typename Scalar>
Scalar precompensator_discrete(const plants::DiscreteModel<Scalar>& model,
                               const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>& K,
                               Index input_index = 0, Index output_index = 0) {
    const Index n = model.num_states();
    const VectorX<Scalar> g = model.G.col(input_index);
    const MatrixX<Scalar> closed = MatrixX<Scalar>::Identity(n, n) - (model.F - g * K);
    Eigen::FullPivLU<MatrixX<Scalar>> lu(closed);
    if (!lu.isInvertible())
        throw PrecompensationInfeasibleError("precompensator: closed loop has a pole at z = 1");
    const Scalar dc = model.C.row(output_index) * lu.solve(g);
    if (dc == Scalar(0))
        throw PrecompensationInfeasibleError("precompensator: zero static gain to tracked output");
    return Scalar(1) / dc;
}

namespace detail {

/// PBH rank test: every eigenvalue of A with Re >= 0 must keep [A - wI, B]
/// at full row rank.
template <typename Scalar>
bool pbh_stabilizable(const MatrixX<Scalar>& A, const MatrixX<Scalar>& B) {
    using Complex = std::complex<Scalar>;
    const Index n = A.rows();
    Eigen::EigenSolver<MatrixX<Scalar>> es(A);
    for (Index k = 0; k < n; ++k) {
        const Complex w = es.eigenvalues()(k);
        if (w.real() < Scalar(-1e-9)) continue;
        MatrixX<Complex> pencil(n, n + B.cols());
        pencil.leftCols(n) = A.template cast<Complex>() - w * MatrixX<Complex>::Identity(n, n);
        pencil.rightCols(B.cols()) = B.template cast<Complex>();
        Eigen::JacobiSVD<MatrixX<Complex>> svd(pencil);
        const Scalar tol = Scalar(1e-10) * std::max(Scalar(1), svd.singularValues()(0));
        if (svd.singularValues()(n - 1) <= tol) return false;
    }
    return true;
}

/// Symmetric PSD square root via spectral factorization.
template <typename Scalar>
MatrixX<Scalar> psd_sqrt(const MatrixX<Scalar>& M) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(M);
    VectorX<Scalar> d = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace detail

/// Solves the continuous algebraic Riccati equation
///
///   A' P + P A - P B Rw^{-1} B' P + Qw = 0
///
/// with the matrix-sign iteration on the Hamiltonian, then extracts the
/// stabilizing solution from its stable invariant subspace.
template <typename Scalar>
MatrixX<Scalar> solve_care(const MatrixX<Scalar>& A, const MatrixX<Scalar>& B,
                           const MatrixX<Scalar>& Qw, const MatrixX<Scalar>& Rw) {
    const Index n = A.rows();
    if (A.cols() != n || B.rows() != n) throw DimensionError("solve_care: A/B dimension mismatch");
    if (Qw.rows() != n || Qw.cols() != n) throw DimensionError("solve_care: Qw must be n x n");
    if (Rw.rows() != B.cols() || Rw.cols() != B.cols())
        throw DimensionError("solve_care: Rw must be m x m");
    if (!Qw.isApprox(Qw.transpose(), Scalar(1e-10)))
        throw InvalidParameterError("solve_care: Qw must be symmetric");
    Eigen::LLT<MatrixX<Scalar>> R_chol(Rw);
    if (R_chol.info() != Eigen::Success)
        throw InvalidParameterError("solve_care: Rw must be positive definite");
    if (!detail::pbh_stabilizable<Scalar>(A, B))
        throw ControllabilityError("solve_care: (A, B) is not stabilizable");
    const MatrixX<Scalar> Qsqrt = detail::psd_sqrt<Scalar>(Qw);
    if (!detail::pbh_stabilizable<Scalar>(A.transpose(), Qsqrt.transpose()))
        throw ControllabilityError("solve_care: (A, Qw^(1/2)) is not detectable");

    MatrixX<Scalar> H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = A;
    H.topRightCorner(n, n) = B * R_chol.solve(B.transpose());
    H.bottomLeftCorner(n, n) = Qw;
    H.bottomRightCorner(n, n) = -A.transpose();

    MatrixX<Scalar> Z = H;
    const Scalar p = Scalar(2 * n);
    Scalar relative_step = Scalar(1);
    for (int iteration = 0; iteration < 200 && relative_step > Scalar(1e-14); ++iteration) {
        const MatrixX<Scalar> Z_old = Z;
        const Scalar ck = std::pow(std::abs(Z.determinant()), Scalar(-1) / p);
        Z *= ck;
        Z = Z - Scalar(0.5) * (Z - Z.inverse());
        relative_step = (Z - Z_old).norm() / std::max(Scalar(1), Z.norm());
    }

    MatrixX<Scalar> lhs(2 * n, n), rhs(2 * n, n);
    const MatrixX<Scalar> eye = MatrixX<Scalar>::Identity(n, n);
    lhs.topRows(n) = Z.topRightCorner(n, n);
    lhs.bottomRows(n) = Z.bottomRightCorner(n, n) + eye;
    rhs.topRows(n) = Z.topLeftCorner(n, n) + eye;
    rhs.bottomRows(n) = Z.bottomLeftCorner(n, n);
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    MatrixX<Scalar> P = svd.solve(rhs);
    P = Scalar(0.5) * (P + P.transpose());

    const MatrixX<Scalar> residual =
        A.transpose() * P + P * A - P * B * R_chol.solve(B.transpose() * P) + Qw;
    const Scalar scale = std::max(Scalar(1), P.norm() * std::max(Scalar(1), A.norm()));
    if (!(residual.norm() < Scalar(1e-9) * scale))
        throw NumericalError("solve_care: Riccati iteration did not converge");
    return P;
}

/// LQR gain K = Rw^{-1} B' P with P from solve_care.
template <typename Scalar>
MatrixX<Scalar> lqr_gain(const plants::StateSpaceModel<Scalar>& model, const MatrixX<Scalar>& Qw,
                         const MatrixX<Scalar>& Rw) {
    const MatrixX<Scalar> P = solve_care<Scalar>(model.A, model.B, Qw, Rw);
    return Rw.llt().solve(model.B.transpose() * P);
}

// ---------------------------------------------------------------------------
// Classical controller forms
// ---------------------------------------------------------------------------

template <typename Scalar>
struct PidGains {
    Scalar kp{}, ki{}, kd{};
    Scalar ts{}; ///< sampling period, s
};

template <typename Scalar>
void validate(const PidGains<Scalar>& g) {
    if (g.kp < Scalar(0) || g.ki < Scalar(0) || g.kd < Scalar(0))
        throw InvalidParameterError("pid: gains must be non-negative");
    if (g.kp == Scalar(0) && g.ki == Scalar(0) && g.kd == Scalar(0))
        throw InvalidParameterError("pid: at least one gain must be nonzero");
    if (!(g.ts > Scalar(0))) throw InvalidParameterError("pid: ts must be positive");
}

template <typename Scalar>
struct PidState {
    Scalar integral{};
    Scalar prev_error{};
};

/// One discrete PID evaluation: trapezoidal integral accumulation and
/// backward-difference derivative (unfiltered).
template <typename Scalar>
std::pair<Scalar, PidState<Scalar>> pid_control(const PidGains<Scalar>& g, Scalar error,
                                                const PidState<Scalar>& state) {
    PidState<Scalar> next;
    next.integral = state.integral + g.ts / Scalar(2) * (error + state.prev_error);
    next.prev_error = error;
    const Scalar derivative = (error - state.prev_error) / g.ts;
    const Scalar u = g.kp * error + g.ki * next.integral + g.kd * derivative;
    return {u, next};
}

enum class CompensatorKind { lag, lead };

/// First-order compensator K (s + z0) / (s + p0).
template <typename Scalar>
struct CompensatorTF {
    Scalar z0{}, p0{}, K{1};
    CompensatorKind kind{CompensatorKind::lag};
};

template <typename Scalar>
void validate(const CompensatorTF<Scalar>& c) {
    if (c.kind == CompensatorKind::lag) {
        if (!(c.z0 > c.p0 && c.p0 > Scalar(0)))
            throw InvalidParameterError("lag compensator requires z0 > p0 > 0");
    } else {
        if (!(c.p0 > c.z0 && c.z0 > Scalar(0)))
            throw InvalidParameterError("lead compensator requires p0 > z0 > 0");
    }
}

template <typename Scalar>
struct CompensatorState {
    Scalar prev_error{};
    Scalar prev_output{};
};

/// One step of the bilinear-transformed compensator at sampling period ts.
template <typename Scalar>
std::pair<Scalar, CompensatorState<Scalar>> compensator_apply(const CompensatorTF<Scalar>& c,
                                                              Scalar error,
                                                              const CompensatorState<Scalar>& state,
                                                              Scalar ts) {
    if (!(ts > Scalar(0))) throw InvalidParameterError("compensator: ts must be positive");
    const Scalar a0 = Scalar(2) + c.p0 * ts;
    const Scalar a1 = c.p0 * ts - Scalar(2);
    const Scalar b0 = c.K * (Scalar(2) + c.z0 * ts);
    const Scalar b1 = c.K * (c.z0 * ts - Scalar(2));
    const Scalar u = (b0 * error + b1 * state.prev_error - a1 * state.prev_output) / a0;
    return {u, CompensatorState<Scalar>{error, u}};
}

template <typename Scalar>
struct DesignSpecs {
    Scalar rise_time{};  ///< s
    Scalar overshoot{};  ///< fraction in (0, 1)
};

/// Second-order design rules: minimal natural frequency 1.8 / tr and the
/// damping ratio bound from the overshoot fraction.
template <typename Scalar>
std::pair<Scalar, Scalar> design_specs_to_params(const DesignSpecs<Scalar>& specs) {
    if (!(specs.rise_time > Scalar(0)))
        throw InvalidParameterError("design specs: rise time must be positive");
    if (!(specs.overshoot > Scalar(0) && specs.overshoot < Scalar(1)))
        throw InvalidParameterError("design specs: overshoot must be in (0, 1)");
    const Scalar omega_n = Scalar(1.8) / specs.rise_time;
    const Scalar ln_mp = std::log(specs.overshoot);
    const Scalar pi2 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
    const Scalar zeta = std::sqrt(ln_mp * ln_mp / (pi2 + ln_mp * ln_mp));
    return {omega_n, zeta};
}

} // namespace wacukf::control
