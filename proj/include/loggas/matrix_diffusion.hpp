#pragma once

// Self-adjoint matrix diffusion whose spectrum realizes the particle SDE:
//   X <- X + sqrt(2/(beta N)) dB - V'(X)/2 dt
// for real symmetric (beta = 1) and complex Hermitian (beta = 2) matrices, with
// V' applied spectrally and dB the self-adjoint Gaussian increment calibrated so
// that every unit vector u has Var(u* dB u) = dt.

#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "loggas/errors.hpp"
#include "loggas/potential.hpp"
#include "loggas/rng.hpp"

namespace loggas {

template <typename Scalar>
struct MatrixState {
    static_assert(std::is_same_v<Scalar, double> || std::is_same_v<Scalar, std::complex<double>>,
                  "MatrixState supports double (beta=1) and complex<double> (beta=2)");

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x;
    double time = 0.0;

    std::size_t n() const { return static_cast<std::size_t>(x.rows()); }

    static constexpr double beta() { return std::is_same_v<Scalar, double> ? 1.0 : 2.0; }

    static MatrixState zero(std::size_t n) {
        if (n == 0) throw invalid_argument("MatrixState: dimension must be positive");
        MatrixState s;
        s.x = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(static_cast<Eigen::Index>(n),
                                                                          static_cast<Eigen::Index>(n));
        return s;
    }

    static MatrixState diagonal(const std::vector<double>& d) {
        MatrixState s = zero(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            s.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = Scalar(d[i]);
        return s;
    }
};

using SymmetricState = MatrixState<double>;                // beta = 1
using HermitianState = MatrixState<std::complex<double>>;  // beta = 2

namespace detail {

// exact conjugate mirror of the upper triangle; diagonal forced real
template <typename Scalar>
void rehermitize(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<Scalar, std::complex<double>>) m(i, i) = Scalar(m(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if constexpr (std::is_same_v<Scalar, std::complex<double>>)
                m(j, i) = std::conj(m(i, j));
            else
                m(j, i) = m(i, j);
        }
    }
}

inline bool affine_derivative(const Potential& v, double& a, double& b) {
    // true if V'(x) = a + b x exactly, so the spectral map is an affine matrix map
    switch (v.kind()) {
        case PotentialKind::quadratic:
            a = 0.0;
            b = 2.0 * v.theta();
            return true;
        case PotentialKind::polynomial: {
            const auto& c = v.coeffs();
            if (c.size() > 3) return false;
            a = c.size() > 1 ? c[1] : 0.0;
            b = c.size() > 2 ? 2.0 * c[2] : 0.0;
            return true;
        }
        default:
            return false;
    }
}

} // namespace detail

// -V'(X)/2 with V' applied spectrally (exact for polynomial V).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_drift(const MatrixState<Scalar>& state,
                                                                   const Potential& v) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (v.kind() == PotentialKind::abs_power || v.kind() == PotentialKind::poly_log)
        throw invalid_argument("matrix_drift: potential must be polynomial");
    if (v.is_zero()) return Mat::Zero(state.x.rows(), state.x.cols());
    double a = 0.0, b = 0.0;
    if (detail::affine_derivative(v, a, b)) {
        Mat out = (-0.5 * b) * state.x;
        for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) += Scalar(-0.5 * a);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(state.x);
    if (es.info() != Eigen::Success) throw error("matrix_drift: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = -0.5 * v.deriv(lam(i));
    Mat out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    detail::rehermitize(out);
    return out;
}

// One Euler-Maruyama step of the matrix diffusion. The Gaussian increment is
// drawn in fixed entry order (row by row: diagonal, then the upper off-diagonal
// entries), so trajectories are reproducible for a given stream.
template <typename Scalar>
MatrixState<Scalar> matrix_step(const MatrixState<Scalar>& state, const Potential& v, double dt, Rng& rng,
                                bool zero_noise = false) {
    if (!(dt > 0.0)) throw invalid_argument("matrix_step: dt must be positive");
    const std::size_t n = state.n();
    MatrixState<Scalar> next = state;
    next.x += dt * matrix_drift(state, v);

    if (!zero_noise) {
        const double amp = std::sqrt(2.0 / (MatrixState<Scalar>::beta() * static_cast<double>(n)));
        const double sd_diag = amp * std::sqrt(dt);
        const double sd_off = amp * std::sqrt(0.5 * dt);
        for (Eigen::Index i = 0; i < state.x.rows(); ++i) {
            next.x(i, i) += Scalar(sd_diag * rng.normal());
            for (Eigen::Index j = i + 1; j < state.x.cols(); ++j) {
                if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
                    const double re = sd_off * rng.normal();
                    const double im = sd_off * rng.normal();
                    next.x(i, j) += Scalar(re, im);
                } else {
                    next.x(i, j) += sd_off * rng.normal();
                }
            }
        }
    }
    detail::rehermitize(next.x);
    for (Eigen::Index i = 0; i < next.x.rows(); ++i)
        for (Eigen::Index j = 0; j < next.x.cols(); ++j)
            if (!std::isfinite(std::abs(next.x(i, j))))
                throw error("matrix_step: non-finite entry");
    next.time = state.time + dt;
    return next;
}

// Nondecreasing eigenvalues.
template <typename Scalar>
std::vector<double> spectrum(const MatrixState<Scalar>& state) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::SelfAdjointEigenSolver<Mat> es(state.x, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw error("spectrum: eigendecomposition failed");
    const Eigen::VectorXd lam = es.eigenvalues();
    return std::vector<double>(lam.data(), lam.data() + lam.size());
}

} // namespace loggas
