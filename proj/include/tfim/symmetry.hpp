#pragma once

// C6 x Z2 sector decomposition of the wheel7 Hilbert space. The twelve
// one-dimensional irreps are labelled (m, n): spin-flip eigenvalue (-1)^m,
// m in {1,2}; rotation eigenvalue exp(i n pi/3), n in {1..6}.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfim/errors.hpp"
#include "tfim/evolution.hpp"
#include "tfim/lattice.hpp"
#include "tfim/operators.hpp"

namespace tfim {

struct SymmetrySector {
    int m = 2; // parity eigenvalue (-1)^m
    int n = 6; // rotation eigenvalue exp(i n pi / 3)

    double parity() const { return (m % 2 == 0) ? 1.0 : -1.0; }
    cplx rotation_eigenvalue() const { return std::polar(1.0, n * std::numbers::pi / 3.0); }
    std::string label() const { return "(" + std::to_string(m) + "," + std::to_string(n) + ")"; }

    friend bool operator==(const SymmetrySector&, const SymmetrySector&) = default;
};

struct SectorBasis {
    SymmetrySector sector;
    Eigen::MatrixXcd isometry; // 128 x d, orthonormal columns
    SpinLattice lattice;

    Eigen::Index dim() const { return isometry.cols(); }
};

// Character projector of one sector applied to basis vector e_b.
inline Eigen::VectorXcd project_basis_vector(const PermutationOperator& rot, const SymmetrySector& s, Index b) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rot.dim()));
    Index img = b;
    for (int k = 0; k < 6; ++k) {
        const cplx chi_rot = std::conj(std::pow(s.rotation_eigenvalue(), k));
        for (int p = 0; p < 2; ++p) {
            const double chi_par = p == 0 ? 1.0 : s.parity();
            const double act_par = p == 0 ? 1.0 : parity_of(b);
            v[img] += chi_rot * chi_par * act_par / 12.0;
        }
        img = rot.image(img);
    }
    return v;
}

// Dense character projector (1/12) sum_g chi*(g) g, for checks.
inline Eigen::MatrixXcd sector_projector(const SpinLattice& lat, const SymmetrySector& s) {
    const PermutationOperator rot = rotation_operator(lat, rotation_permutation(lat));
    Eigen::MatrixXcd proj(lat.dim(), lat.dim());
    for (Index b = 0; b < lat.dim(); ++b) proj.col(b) = project_basis_vector(rot, s, b);
    return proj;
}

namespace detail {

inline void check_symmetry_commutes(const SpinLattice& lat, const PermutationOperator& rot) {
    const HamiltonianTerms terms(lat);
    const Eigen::MatrixXd r = rot.to_dense();
    const Eigen::MatrixXd par = parity_operator(lat.n_sites()).to_dense();
    const Eigen::MatrixXd sz = terms.sz.asDiagonal();
    const double defect = std::max({max_abs((r * terms.coupling - terms.coupling * r).eval()),
                                    max_abs((r * sz - sz * r).eval()),
                                    max_abs((par * terms.coupling - terms.coupling * par).eval())});
    if (defect > 1e-12) throw NumericalError("symmetry operators do not commute with the Hamiltonian");
}

} // namespace detail

// Modified Gram-Schmidt on the projected basis vectors; vectors whose
// residual norm falls below 1e-8 are dropped as linearly dependent.
inline std::vector<SectorBasis> build_sector_bases(const SpinLattice& lat) {
    const PermutationOperator rot = rotation_operator(lat, rotation_permutation(lat));
    detail::check_symmetry_commutes(lat, rot);
    std::vector<SectorBasis> out;
    for (int m = 1; m <= 2; ++m) {
        for (int n = 1; n <= 6; ++n) {
            const SymmetrySector s{m, n};
            std::vector<Eigen::VectorXcd> cols;
            for (Index b = 0; b < lat.dim(); ++b) {
                Eigen::VectorXcd v = project_basis_vector(rot, s, b);
                for (const auto& q : cols) v -= q.dot(v) * q;
                const double nv = v.norm();
                if (nv < 1e-8) continue;
                v /= nv;
                for (const auto& q : cols) v -= q.dot(v) * q; // second pass
                cols.push_back(v.normalized());
            }
            SectorBasis basis;
            basis.sector = s;
            basis.lattice = lat;
            basis.isometry.resize(static_cast<Eigen::Index>(lat.dim()), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c) basis.isometry.col(static_cast<Eigen::Index>(c)) = cols[c];
            out.push_back(std::move(basis));
        }
    }
    return out;
}

// Pi^H H Pi. Throws when H does not map the sector into itself.
inline Eigen::MatrixXcd sector_reduced_hamiltonian(const SparseHermitianOperator& h, const SectorBasis& basis) {
    if (h.dim() != static_cast<std::size_t>(basis.isometry.rows())) throw ConfigError("sector basis dimension mismatch");
    Eigen::MatrixXcd hp(basis.isometry.rows(), basis.isometry.cols());
    for (Eigen::Index c = 0; c < basis.isometry.cols(); ++c) hp.col(c) = h.apply(basis.isometry.col(c));
    Eigen::MatrixXcd reduced = basis.isometry.adjoint() * hp;
    const double leak = detail::max_abs((hp - basis.isometry * reduced).eval());
    if (leak > 1e-9) throw NumericalError("Hamiltonian leaks out of sector " + basis.sector.label());
    return 0.5 * (reduced + reduced.adjoint());
}

inline std::vector<double> sector_weights(const StateVector& psi, const std::vector<SectorBasis>& bases) {
    std::vector<double> w;
    w.reserve(bases.size());
    for (const auto& b : bases) w.push_back((b.isometry.adjoint() * psi).squaredNorm());
    return w;
}

// Index of the sector holding the state (weight >= 1 - 1e-10).
inline std::size_t locate_sector(const StateVector& psi, const std::vector<SectorBasis>& bases) {
    const auto w = sector_weights(psi, bases);
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k] >= 1.0 - 1e-10) return k;
    throw ConfigError("state is not confined to a single symmetry sector");
}

// h -> J K_s - h Z_s on one sector, with the two pieces reduced once.
class SectorBuilder {
public:
    SectorBuilder(const SectorBasis& basis, double J) : J_(J) {
        const SparseHermitianOperator coupling = build_hamiltonian(basis.lattice, 1.0, 0.0);
        coupling_ = sector_reduced_hamiltonian(coupling, basis);
        sz_ = sector_reduced_hamiltonian(total_sz(basis.lattice.n_sites()), basis);
    }

    Eigen::MatrixXcd operator()(double h) const {
        Eigen::MatrixXcd m = J_ * coupling_ - h * sz_;
        return 0.5 * (m + m.adjoint());
    }

private:
    double J_;
    Eigen::MatrixXcd coupling_;
    Eigen::MatrixXcd sz_;
};

// Projection stepper restricted to one sector; samples are lifted back to the
// full space.
inline StateTrajectory evolve_projection_in_sector(const SectorBasis& basis, double J,
                                                   const PiecewiseConstantField& pcf, const StateVector& psi0,
                                                   const SampleOptions& opts) {
    if (psi0.size() != basis.isometry.rows()) throw ConfigError("state dimension does not match the sector basis");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) throw ConfigError("initial state is not normalized");
    const Eigen::VectorXcd c0 = basis.isometry.adjoint() * psi0;
    if (c0.squaredNorm() < 1.0 - 1e-10)
        throw ConfigError("initial state leaks out of sector " + basis.sector.label());
    detail::check_pairs(basis.lattice, opts.pairs);
    StateTrajectory traj;
    auto record = detail::state_recorder(traj, opts);
    auto sink = [&](double t, double h, const Eigen::MatrixXcd& c) { record(t, h, basis.isometry * c); };
    propagate_projection<cplx>(SectorBuilder(basis, J), pcf, c0, opts.every, sink);
    return traj;
}

} // namespace tfim
