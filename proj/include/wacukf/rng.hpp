#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "wacukf/errors.hpp"
#include "wacukf/types.hpp"

namespace wacukf::simnet {

/// Seeded standard-normal stream: mt19937_64 bits mapped to (0, 1] and fed
/// through Box-Muller. One global stream per simulation run; vectors consume
/// draws component by component, so the draw order is fully documented by the
/// call order.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // 53 random mantissa bits; +1 keeps the value strictly positive for the log.
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    VectorX<double> normal_vector(Index n) {
        VectorX<double> z(n);
        for (Index i = 0; i < n; ++i) z(i) = normal();
        return z;
    }

  private:
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

/// Factor S with S S' = cov for a symmetric PSD matrix: plain Cholesky when
/// the matrix is positive definite, pivoted LDL^T with clamped diagonal for
/// the semi-definite case (e.g. rank-deficient output-weighted Q).
inline MatrixX<double> psd_factor(const MatrixX<double>& cov) {
    if (cov.rows() != cov.cols()) throw DimensionError("psd_factor: covariance must be square");
    const double scale = std::max(1.0, cov.lpNorm<Eigen::Infinity>());
    if (!cov.isApprox(cov.transpose(), 1e-12))
        throw CovarianceNotPsdError("psd_factor: covariance must be symmetric");
    Eigen::LLT<MatrixX<double>> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::LDLT<MatrixX<double>> ldlt(cov);
    if (ldlt.info() != Eigen::Success)
        throw CovarianceNotPsdError("psd_factor: factorization failed");
    VectorX<double> d = ldlt.vectorD();
    if (d.minCoeff() < -1e-10 * scale)
        throw CovarianceNotPsdError("psd_factor: covariance is not positive semi-definite");
    d = d.cwiseMax(0.0).cwiseSqrt();
    MatrixX<double> L = ldlt.matrixL();
    return ldlt.transpositionsP().transpose() * (L * d.asDiagonal());
}

/// Draws one sample from N(0, cov) as S z with z standard normal.
inline VectorX<double> gaussian_noise(const MatrixX<double>& cov, NormalSampler& rng) {
    const MatrixX<double> S = psd_factor(cov);
    return S * rng.normal_vector(cov.rows());
}

} // namespace wacukf::simnet
