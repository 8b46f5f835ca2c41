#pragma once

// Dense Hermitian kernels: eigendecomposition, unitary exponential, PSD root.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <type_traits>

#include <Eigen/Dense>

#include "tfim/errors.hpp"

namespace tfim {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;       // ascending
    DenseMatrix<Scalar> eigenvectors;  // columns orthonormal

    Eigen::Index size() const { return eigenvalues.size(); }

    DenseMatrix<Scalar> reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
    }
};

struct UnitaryPropagator {
    Eigen::MatrixXcd matrix;
    double dt = 0.0;
    std::uint64_t fingerprint = 0;
};

namespace detail {

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <class Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
    return max_abs((a - a.adjoint()).eval());
}

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
        h ^= p[k];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace detail

// Hash of the matrix entries, used as a propagator/decomposition cache key.
template <class Derived>
std::uint64_t fingerprint(const Eigen::MatrixBase<Derived>& a) {
    const auto m = a.eval();
    const Eigen::Index rows = m.rows();
    std::uint64_t h = detail::fnv1a(&rows, sizeof rows);
    return detail::fnv1a(m.data(), sizeof(typename Derived::Scalar) * static_cast<std::size_t>(m.size()), h);
}

// Eigenpairs of a dense Hermitian matrix (Householder tridiagonalization and
// implicit symmetric QR via Eigen). Degenerate subspaces get an arbitrary
// orthonormal basis; propagators built from it do not depend on that choice.
template <class Derived>
SpectralDecomposition<typename Derived::Scalar> eig_hermitian(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols()) throw ConfigError("eig_hermitian: matrix is not square");
    const double scale = std::max(1.0, detail::max_abs(a));
    const double defect = detail::hermiticity_defect(a);
    if (defect > 1e-12 * scale) {
        std::ostringstream msg;
        msg << "eig_hermitian: input not Hermitian (max |A - A^H| = " << defect << ")";
        throw NumericalError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(a.eval(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eig_hermitian: no convergence";
        if (solver.eigenvectors().size() == a.size()) {
            const DenseMatrix<Scalar> r = solver.eigenvectors() * solver.eigenvalues().asDiagonal() *
                                              solver.eigenvectors().adjoint() - a;
            msg << " (residual " << detail::max_abs(r) << ")";
        }
        throw NumericalError(msg.str());
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Phases exp(-i E dt) for each eigenvalue.
inline Eigen::VectorXcd phase_factors(const Eigen::VectorXd& energies, double dt) {
    Eigen::VectorXcd ph(energies.size());
    for (Eigen::Index k = 0; k < energies.size(); ++k) ph[k] = std::polar(1.0, -energies[k] * dt);
    return ph;
}

template <class Scalar>
UnitaryPropagator expm_unitary(const SpectralDecomposition<Scalar>& dec, double dt,
                               std::uint64_t fp = 0) {
    UnitaryPropagator u;
    if constexpr (std::is_same_v<Scalar, double>) {
        // Real eigenvectors: U = V cos(E dt) V^T - i V sin(E dt) V^T.
        const Eigen::ArrayXd arg = -dec.eigenvalues.array() * dt;
        const Eigen::MatrixXd& v = dec.eigenvectors;
        const Eigen::MatrixXd re = v * arg.cos().matrix().asDiagonal() * v.transpose();
        const Eigen::MatrixXd im = v * arg.sin().matrix().asDiagonal() * v.transpose();
        u.matrix = re.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
    } else {
        const Eigen::VectorXcd ph = phase_factors(dec.eigenvalues, dt);
        u.matrix = dec.eigenvectors * ph.asDiagonal() * dec.eigenvectors.adjoint();
    }
    u.dt = dt;
    u.fingerprint = fp;
    return u;
}

template <class Derived>
UnitaryPropagator expm_unitary(const Eigen::MatrixBase<Derived>& h, double dt) {
    return expm_unitary(eig_hermitian(h), dt, fingerprint(h));
}

// Principal square root of a Hermitian PSD matrix. Eigenvalues in
// [-1e-8, 0) are treated as roundoff and clipped to zero.
template <class Derived>
DenseMatrix<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& rho) {
    const auto dec = eig_hermitian(rho);
    if (dec.size() > 0 && dec.eigenvalues.minCoeff() < -1e-8) {
        std::ostringstream msg;
        msg << "psd_sqrt: matrix is not positive semidefinite (min eigenvalue " << dec.eigenvalues.minCoeff() << ")";
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXd roots = dec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return dec.eigenvectors * roots.asDiagonal() * dec.eigenvectors.adjoint();
}

} // namespace tfim
