#pragma once

// Many-body operators on the 2^N computational basis.
//
// Basis convention: site k occupies bit (k-1) of the basis index b. Spin up
// (sigma^z = +1) at site k iff that bit is 0, so b = 0 is the all-up state.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tfim/errors.hpp"
#include "tfim/lattice.hpp"

namespace tfim {

using cplx = std::complex<double>;
using Index = std::uint32_t;

namespace basis {

inline constexpr Index site_mask(int site) { return Index{1} << (site - 1); }

inline constexpr bool is_up(Index b, int site) { return (b & site_mask(site)) == 0; }

inline int n_down(Index b) { return std::popcount(b); }

inline int n_up(Index b, int n_sites) { return n_sites - n_down(b); }

// sigma^z eigenvalue per site, +1 = up. spins[k-1] is site k.
inline std::vector<int> to_spins(Index b, int n_sites) {
    std::vector<int> s(n_sites);
    for (int k = 1; k <= n_sites; ++k) s[k - 1] = is_up(b, k) ? 1 : -1;
    return s;
}

inline Index from_spins(const std::vector<int>& spins) {
    Index b = 0;
    for (std::size_t k = 0; k < spins.size(); ++k)
        if (spins[k] < 0) b |= Index{1} << k;
    return b;
}

} // namespace basis

struct Triplet {
    Index row = 0;
    Index col = 0;
    double value = 0.0;
};

// Real symmetric operator stored as coordinate triples, no explicit zeros.
class SparseHermitianOperator {
public:
    SparseHermitianOperator() = default;
    SparseHermitianOperator(std::size_t dim, std::vector<Triplet> entries)
        : dim_(dim), entries_(std::move(entries)) {
        if (dim_ == 0 || !std::has_single_bit(dim_)) throw ConfigError("operator dimension must be a power of two");
    }

    std::size_t dim() const { return dim_; }
    const std::vector<Triplet>& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const auto& t : entries_) m(t.row, t.col) += t.value;
        return m;
    }

    template <class Derived>
    Eigen::VectorXcd apply(const Eigen::MatrixBase<Derived>& v) const {
        if (static_cast<std::size_t>(v.size()) != dim_)
            throw ConfigError("operator/vector dimension mismatch");
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
        for (const auto& t : entries_) out[t.row] += t.value * v[t.col];
        return out;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Triplet> entries_;
};

// H = -J sum_edges sx_i sx_j - h sum_i sz_i
inline SparseHermitianOperator build_hamiltonian(const SpinLattice& lat, double J, double h) {
    if (!std::isfinite(J) || !std::isfinite(h)) throw ConfigError("J and h must be finite");
    const int n = lat.n_sites();
    const std::size_t dim = lat.dim();
    std::vector<Triplet> entries;
    entries.reserve(dim * (lat.edges().size() + 1));
    for (Index b = 0; b < dim; ++b) {
        const double diag = -h * (basis::n_up(b, n) - basis::n_down(b));
        if (diag != 0.0) entries.push_back({b, b, diag});
        if (J == 0.0) continue;
        for (const Edge& e : lat.edges()) {
            const Index flipped = b ^ basis::site_mask(e.i) ^ basis::site_mask(e.j);
            entries.push_back({flipped, b, -J});
        }
    }
    return {dim, std::move(entries)};
}

inline SparseHermitianOperator total_sz(int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    std::vector<Triplet> entries;
    for (Index b = 0; b < dim; ++b) {
        const int sz = basis::n_up(b, n_sites) - basis::n_down(b);
        if (sz != 0) entries.push_back({b, b, static_cast<double>(sz)});
    }
    return {dim, std::move(entries)};
}

// Global spin flip symmetry: prod_i sz_i, entry (-1)^(#down).
inline SparseHermitianOperator parity_operator(int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    std::vector<Triplet> entries;
    entries.reserve(dim);
    for (Index b = 0; b < dim; ++b) entries.push_back({b, b, (basis::n_down(b) % 2 == 0) ? 1.0 : -1.0});
    return {dim, std::move(entries)};
}

inline double parity_of(Index b) { return (basis::n_down(b) % 2 == 0) ? 1.0 : -1.0; }

// Unitary that relabels sites: R|b> = |b'> where site perm(k) of b' holds
// the spin that site k holds in b.
class PermutationOperator {
public:
    PermutationOperator() = default;
    explicit PermutationOperator(std::vector<Index> image) : image_(std::move(image)) {}

    std::size_t dim() const { return image_.size(); }
    Index image(Index b) const { return image_[b]; }
    const std::vector<Index>& images() const { return image_; }

    template <class Derived>
    Eigen::VectorXcd apply(const Eigen::MatrixBase<Derived>& v) const {
        if (static_cast<std::size_t>(v.size()) != dim()) throw ConfigError("operator/vector dimension mismatch");
        Eigen::VectorXcd out(dim());
        for (Index b = 0; b < dim(); ++b) out[image_[b]] = v[b];
        return out;
    }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
        for (Index b = 0; b < dim(); ++b) m(image_[b], b) = 1.0;
        return m;
    }

    PermutationOperator compose(const PermutationOperator& other) const {
        std::vector<Index> img(dim());
        for (Index b = 0; b < dim(); ++b) img[b] = image_[other.image_[b]];
        return PermutationOperator(std::move(img));
    }

private:
    std::vector<Index> image_;
};

inline PermutationOperator rotation_operator(const SpinLattice& lat, const SitePermutation& perm) {
    if (perm.size() != lat.n_sites()) throw ConfigError("permutation size does not match lattice");
    if (!perm.is_bijection()) throw ConfigError("site map is not a bijection");
    const int n = lat.n_sites();
    std::vector<Index> image(lat.dim());
    for (Index b = 0; b < lat.dim(); ++b) {
        Index out = 0;
        for (int k = 1; k <= n; ++k)
            if (!basis::is_up(b, k)) out |= basis::site_mask(perm(k));
        image[b] = out;
    }
    return PermutationOperator(std::move(image));
}

template <class Derived>
Eigen::VectorXcd apply_operator(const SparseHermitianOperator& op, const Eigen::MatrixBase<Derived>& v) {
    return op.apply(v);
}

// The two field-independent pieces of H, dense: H(h) = J*coupling - h*sz.
// coupling = -sum_edges sx sx.
struct HamiltonianTerms {
    Eigen::MatrixXd coupling;
    Eigen::VectorXd sz;

    explicit HamiltonianTerms(const SpinLattice& lat)
        : coupling(build_hamiltonian(lat, 1.0, 0.0).to_dense()), sz(lat.dim()) {
        for (Index b = 0; b < lat.dim(); ++b) sz[b] = basis::n_up(b, lat.n_sites()) - basis::n_down(b);
    }

    Eigen::MatrixXd dense(double J, double h) const {
        Eigen::MatrixXd m = J * coupling;
        m.diagonal() -= h * sz;
        return m;
    }
};

} // namespace tfim
