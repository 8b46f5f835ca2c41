#pragma once

// Two-site reduced density matrices and the Wootters concurrence.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tfim/errors.hpp"
#include "tfim/numkernel.hpp"
#include "tfim/operators.hpp"

namespace tfim {

struct SitePair {
    int i = 0;
    int j = 0;
    friend bool operator==(const SitePair&, const SitePair&) = default;
    friend auto operator<=>(const SitePair&, const SitePair&) = default;
};

inline std::string pair_label(const SitePair& p) {
    return "(" + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
}

// 4x4 block in the basis |s_i s_j>, site i the more significant bit, s = 0 up.
struct TwoQubitDensity {
    Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
    SitePair pair;
};

namespace detail {

inline void check_pair(int n_sites, int i, int j) {
    if (i == j) throw ConfigError("reduced density matrix needs two distinct sites");
    if (i < 1 || j < 1 || i > n_sites || j > n_sites) throw ConfigError("site index out of range");
}

inline int n_sites_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) throw ConfigError("state dimension is not a power of two");
    return n;
}

struct PairBits {
    Index mi, mj;
    Index with(Index rest, int q) const { return rest | ((q & 2) ? mi : 0) | ((q & 1) ? mj : 0); }
    int code(Index b) const { return ((b & mi) ? 2 : 0) | ((b & mj) ? 1 : 0); }
};

} // namespace detail

// Accumulates w * Tr_{rest} |psi><psi| into out (no normalization).
template <class Derived>
void accumulate_two_site(const Eigen::MatrixBase<Derived>& psi, int i, int j, double w, Eigen::Matrix4cd& out) {
    const detail::PairBits pb{basis::site_mask(i), basis::site_mask(j)};
    const Index clear = ~(pb.mi | pb.mj);
    const auto dim = static_cast<Index>(psi.size());
    for (Index b = 0; b < dim; ++b) {
        if ((b & (pb.mi | pb.mj)) != 0) continue; // visit each "rest" once
        const Index rest = b & clear;
        std::array<cplx, 4> amp;
        for (int q = 0; q < 4; ++q) amp[q] = psi[pb.with(rest, q)];
        for (int q = 0; q < 4; ++q)
            for (int r = 0; r < 4; ++r) out(q, r) += w * amp[q] * std::conj(amp[r]);
    }
}

template <class Derived>
TwoQubitDensity reduce_two_site(const Eigen::MatrixBase<Derived>& psi, int i, int j) {
    detail::check_pair(detail::n_sites_for_dim(psi.size()), i, j);
    TwoQubitDensity out;
    out.pair = {i, j};
    accumulate_two_site(psi, i, j, 1.0, out.matrix);
    return out;
}

// Partial trace of a full 2^N x 2^N density matrix.
inline TwoQubitDensity reduce_two_site_density(const Eigen::MatrixXcd& rho, int i, int j) {
    if (rho.rows() != rho.cols()) throw ConfigError("density matrix is not square");
    detail::check_pair(detail::n_sites_for_dim(rho.rows()), i, j);
    const detail::PairBits pb{basis::site_mask(i), basis::site_mask(j)};
    TwoQubitDensity out;
    out.pair = {i, j};
    for (Index b = 0; b < static_cast<Index>(rho.rows()); ++b) {
        if ((b & (pb.mi | pb.mj)) != 0) continue;
        for (int q = 0; q < 4; ++q)
            for (int r = 0; r < 4; ++r) out.matrix(q, r) += rho(pb.with(b, q), pb.with(b, r));
    }
    return out;
}

inline const Eigen::Matrix4d& sigma_yy() {
    static const Eigen::Matrix4d m = [] {
        Eigen::Matrix4d y;
        y << 0, 0, 0, -1,
             0, 0, 1, 0,
             0, 1, 0, 0,
            -1, 0, 0, 0;
        return y;
    }();
    return m;
}

inline Eigen::Matrix4cd spin_flipped(const Eigen::Matrix4cd& rho) {
    return sigma_yy() * rho.conjugate() * sigma_yy();
}

inline void validate_two_qubit(const Eigen::Matrix4cd& rho) {
    const double tr_err = std::abs(rho.trace() - cplx(1.0, 0.0));
    const double herm = detail::hermiticity_defect(rho);
    if (tr_err > 1e-9 || herm > 1e-10) {
        std::ostringstream msg;
        msg << "two-qubit density invalid: |tr - 1| = " << tr_err << ", hermiticity defect = " << herm;
        throw NumericalError(msg.str());
    }
}

// Eigenvalues e1 >= e2 >= e3 >= e4 of R = sqrt(sqrt(rho) rho~ sqrt(rho)).
inline Eigen::Vector4d wootters_eigenvalues(const Eigen::Matrix4cd& rho) {
    const Eigen::Matrix4cd sq = psd_sqrt(rho);
    Eigen::Matrix4cd m = sq * spin_flipped(rho) * sq;
    m = (0.5 * (m + m.adjoint())).eval();
    Eigen::Matrix4cd r = psd_sqrt(m);
    r = (0.5 * (r + r.adjoint())).eval();
    Eigen::Vector4d ev = eig_hermitian(r).eigenvalues;
    std::sort(ev.data(), ev.data() + 4, std::greater<>());
    return ev;
}

inline double concurrence(const Eigen::Matrix4cd& rho) {
    validate_two_qubit(rho);
    const Eigen::Vector4d e = wootters_eigenvalues(rho);
    return std::clamp(e[0] - e[1] - e[2] - e[3], 0.0, 1.0);
}

inline double concurrence(const TwoQubitDensity& rho) { return concurrence(rho.matrix); }

inline double binary_entropy(double x) {
    auto term = [](double p) { return p <= 0.0 ? 0.0 : -p * std::log2(p); };
    return term(x) + term(1.0 - x);
}

inline double entanglement_of_formation(double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("concurrence must lie in [0, 1]");
    return binary_entropy(0.5 * (1.0 - std::sqrt(1.0 - c * c)));
}

} // namespace tfim
