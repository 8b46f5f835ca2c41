#pragma once

// Propagation of pure states and thermal ensembles through a piecewise
// constant field: the chained-propagator ("matrix") stepper and the
// eigenbasis-projection stepper.

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "tfim/errors.hpp"
#include "tfim/lattice.hpp"
#include "tfim/numkernel.hpp"
#include "tfim/operators.hpp"
#include "tfim/schedules.hpp"
#include "tfim/trajectory.hpp"
#include "tfim/two_qubit.hpp"

namespace tfim {

// Field values equal to within this quantum share a cached decomposition.
inline constexpr double kFieldQuantum = 1e-12;

inline std::int64_t field_key(double h) { return std::llround(h / kFieldQuantum); }

// Small FIFO cache of segment decompositions, owned by one evolution run.
template <class Scalar>
class DecompositionCache {
public:
    explicit DecompositionCache(std::size_t capacity = 8) : capacity_(capacity) {}

    template <class Builder>
    const SpectralDecomposition<Scalar>& get(double h, Builder&& build) {
        const auto key = field_key(h);
        for (auto& [k, dec] : entries_)
            if (k == key) {
                ++hits_;
                return dec;
            }
        ++misses_;
        if (entries_.size() >= capacity_) entries_.pop_front();
        entries_.emplace_back(key, eig_hermitian(build(h)));
        return entries_.back().second;
    }

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::size_t capacity_;
    std::deque<std::pair<std::int64_t, SpectralDecomposition<Scalar>>> entries_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

// Called at every sample with (t, field, block of states as columns).
using SampleSink = std::function<void(double, double, const Eigen::MatrixXcd&)>;

namespace detail {

inline void check_block(const Eigen::MatrixXcd& psi, Eigen::Index dim) {
    if (psi.rows() != dim) throw ConfigError("initial state dimension does not match the Hilbert space");
    for (Eigen::Index c = 0; c < psi.cols(); ++c)
        if (std::abs(psi.col(c).norm() - 1.0) > 1e-9) throw ConfigError("initial state is not normalized");
}

// V * C with V real or complex.
template <class Scalar>
Eigen::MatrixXcd lift(const DenseMatrix<Scalar>& v, const Eigen::MatrixXcd& c) {
    if constexpr (std::is_same_v<Scalar, double>) {
        Eigen::MatrixXcd out(v.rows(), c.cols());
        out.real() = v * c.real();
        out.imag() = v * c.imag();
        return out;
    } else {
        return v * c;
    }
}

// V^H * psi with V real or complex.
template <class Scalar>
Eigen::MatrixXcd project(const DenseMatrix<Scalar>& v, const Eigen::MatrixXcd& psi) {
    if constexpr (std::is_same_v<Scalar, double>) {
        Eigen::MatrixXcd out(v.cols(), psi.cols());
        out.real() = v.transpose() * psi.real();
        out.imag() = v.transpose() * psi.imag();
        return out;
    } else {
        return v.adjoint() * psi;
    }
}

} // namespace detail

// Projection stepper on a block of states. Within a run of equal field values
// the state is carried as eigenbasis coefficients and only phases advance.
template <class Scalar, class Builder>
void propagate_projection(Builder&& build, const PiecewiseConstantField& pcf, const Eigen::MatrixXcd& psi0,
                          std::size_t sample_every, const SampleSink& sink,
                          DecompositionCache<Scalar>* shared_cache = nullptr) {
    if (pcf.empty()) throw ConfigError("piecewise field has no segments");
    if (sample_every == 0) throw ConfigError("sample_every must be positive");
    DecompositionCache<Scalar> local;
    DecompositionCache<Scalar>& cache = shared_cache ? *shared_cache : local;

    sink(pcf.t_start(), pcf.initial_field, psi0);
    Eigen::MatrixXcd coeffs;
    const SpectralDecomposition<Scalar>* active = nullptr;
    std::int64_t active_key = 0;
    for (std::size_t k = 0; k < pcf.size(); ++k) {
        const double h = pcf.values[k];
        if (active == nullptr || field_key(h) != active_key) {
            const Eigen::MatrixXcd psi = active ? detail::lift(active->eigenvectors, coeffs) : psi0;
            active = &cache.get(h, build);
            active_key = field_key(h);
            coeffs = detail::project(active->eigenvectors, psi);
        }
        coeffs = phase_factors(active->eigenvalues, pcf.duration(k)).asDiagonal() * coeffs;
        if ((k + 1) % sample_every == 0) sink(pcf.times[k] + pcf.duration(k), h, detail::lift(active->eigenvectors, coeffs));
    }
}

// Chained propagator U(t_i) = exp(-i H(t_i) dt) U(t_{i-1}), rebuilt from a
// fresh decomposition every segment.
template <class Scalar, class Builder>
void propagate_matrix(Builder&& build, const PiecewiseConstantField& pcf, const Eigen::MatrixXcd& psi0,
                      std::size_t sample_every, const SampleSink& sink) {
    if (pcf.empty()) throw ConfigError("piecewise field has no segments");
    if (sample_every == 0) throw ConfigError("sample_every must be positive");
    const Eigen::Index dim = psi0.rows();
    sink(pcf.t_start(), pcf.initial_field, psi0);
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(dim, dim);
    for (std::size_t k = 0; k < pcf.size(); ++k) {
        const double h = pcf.values[k];
        const UnitaryPropagator step = expm_unitary(eig_hermitian(build(h)), pcf.duration(k));
        total = step.matrix * total;
        if ((k + 1) % sample_every == 0) sink(pcf.times[k] + pcf.duration(k), h, total * psi0);
    }
}

namespace detail {

inline SampleSink state_recorder(StateTrajectory& traj, const SampleOptions& opts) {
    traj.pairs = opts.pairs;
    traj.reduced.assign(opts.pairs.size(), {});
    return [&traj, &opts](double t, double h, const Eigen::MatrixXcd& psi) {
        traj.times.push_back(t);
        traj.fields.push_back(h);
        if (opts.store_states) traj.states.emplace_back(psi.col(0));
        for (std::size_t p = 0; p < opts.pairs.size(); ++p)
            traj.reduced[p].push_back(reduce_two_site(psi.col(0), opts.pairs[p].i, opts.pairs[p].j).matrix);
    };
}

inline void check_pairs(const SpinLattice& lat, const std::vector<SitePair>& pairs) {
    for (const auto& p : pairs) {
        if (!lat.valid_site(p.i) || !lat.valid_site(p.j)) throw ConfigError("pair " + pair_label(p) + " out of range");
        if (p.i == p.j) throw ConfigError("pair " + pair_label(p) + " repeats a site");
    }
}

} // namespace detail

// Full-space Hamiltonian builder h -> dense H(J, h).
class FullSpaceBuilder {
public:
    FullSpaceBuilder(const SpinLattice& lat, double J) : terms_(std::make_shared<HamiltonianTerms>(lat)), J_(J) {}
    Eigen::MatrixXd operator()(double h) const { return terms_->dense(J_, h); }

private:
    std::shared_ptr<const HamiltonianTerms> terms_;
    double J_;
};

inline StateTrajectory evolve_matrix_stepper(const SpinLattice& lat, double J, const PiecewiseConstantField& pcf,
                                             const StateVector& psi0, const SampleOptions& opts) {
    detail::check_block(psi0, static_cast<Eigen::Index>(lat.dim()));
    detail::check_pairs(lat, opts.pairs);
    StateTrajectory traj;
    propagate_matrix<double>(FullSpaceBuilder(lat, J), pcf, psi0, opts.every, detail::state_recorder(traj, opts));
    return traj;
}

inline StateTrajectory evolve_projection_stepper(const SpinLattice& lat, double J, const PiecewiseConstantField& pcf,
                                                 const StateVector& psi0, const SampleOptions& opts,
                                                 DecompositionCache<double>* cache = nullptr) {
    detail::check_block(psi0, static_cast<Eigen::Index>(lat.dim()));
    detail::check_pairs(lat, opts.pairs);
    StateTrajectory traj;
    propagate_projection<double>(FullSpaceBuilder(lat, J), pcf, psi0, opts.every, detail::state_recorder(traj, opts),
                                 cache);
    return traj;
}

// Ground state of H(J, h). A (near-)degenerate ground multiplet (splitting
// below 1e-10) is resolved to its even-parity, rotation-symmetric member: the
// projection of the uniform even-parity basis combination. Phase fixed so the
// overlap with that combination (or else the largest component) is positive.
inline StateVector ground_state(const SpinLattice& lat, double J, double h) {
    const auto dec = eig_hermitian(HamiltonianTerms(lat).dense(J, h));
    const Eigen::Index dim = dec.size();
    Eigen::Index mult = 1;
    while (mult < dim && dec.eigenvalues[mult] - dec.eigenvalues[0] < 1e-10) ++mult;

    Eigen::VectorXd even(dim);
    for (Index b = 0; b < static_cast<Index>(dim); ++b) even[b] = parity_of(b) > 0 ? 1.0 : 0.0;

    Eigen::VectorXd g = dec.eigenvectors.col(0);
    if (mult > 1) {
        const Eigen::MatrixXd q = dec.eigenvectors.leftCols(mult);
        Eigen::VectorXd cand = q * (q.transpose() * even);
        if (cand.norm() > 1e-8) {
            g = cand.normalized();
        } else {
            // No overlap with the uniform combination: take the parity +1 state.
            Eigen::MatrixXd pq = q.transpose() * (even.asDiagonal() * q) * 2.0 - Eigen::MatrixXd::Identity(mult, mult);
            const auto pdec = eig_hermitian(pq);
            g = (q * pdec.eigenvectors.col(mult - 1)).normalized();
        }
    }
    double ref = g.dot(even);
    if (std::abs(ref) < 1e-12) {
        Eigen::Index imax;
        g.cwiseAbs().maxCoeff(&imax);
        ref = g[imax];
    }
    if (ref < 0) g = -g;
    return g.cast<cplx>();
}

struct ThermalEnsemble {
    double beta = 0.0;
    double field = 0.0;           // field the ensemble was prepared in
    Eigen::VectorXd weights;      // renormalized Boltzmann weights of retained states
    Eigen::VectorXd energies;     // of retained states
    Eigen::MatrixXd states;       // retained eigenvectors as columns
    double log_partition = 0.0;   // ln Z over all states
    double cutoff = 1.0 - 1e-10;
    double retained_weight = 1.0; // cumulative weight before renormalization

    Eigen::Index size() const { return weights.size(); }
};

// rho(t0) = sum_i exp(-beta E_i(a)) |phi_i><phi_i| / Z, truncated to the
// lowest states carrying at least `cutoff` of the weight. beta may be +inf.
inline ThermalEnsemble thermal_initial_state(const SpinLattice& lat, double J, double a, double beta,
                                             double cutoff = 1.0 - 1e-10) {
    if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
    if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ConfigError("weight cutoff must lie in (0, 1]");
    const auto dec = eig_hermitian(HamiltonianTerms(lat).dense(J, a));
    const Eigen::Index dim = dec.size();
    const double e0 = dec.eigenvalues[0];
    Eigen::VectorXd w(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double gap = dec.eigenvalues[k] - e0;
        if (std::isinf(beta)) w[k] = gap < 1e-10 ? 1.0 : 0.0;
        else w[k] = std::exp(-beta * gap);
    }
    const double zs = w.sum();
    w /= zs;
    Eigen::Index keep = 0;
    double acc = 0.0;
    while (keep < dim && acc < cutoff) acc += w[keep++];
    // keep a degenerate partner of the last retained state together with it
    while (keep < dim && w[keep] > 0.0 && std::abs(dec.eigenvalues[keep] - dec.eigenvalues[keep - 1]) < 1e-10)
        acc += w[keep++];

    ThermalEnsemble ens;
    ens.beta = beta;
    ens.field = a;
    ens.cutoff = cutoff;
    ens.retained_weight = acc;
    ens.weights = w.head(keep) / acc;
    ens.energies = dec.eigenvalues.head(keep);
    ens.states = dec.eigenvectors.leftCols(keep);
    ens.log_partition = std::isinf(beta) ? std::numeric_limits<double>::infinity() * (e0 > 0 ? -1 : 1)
                                         : -beta * e0 + std::log(zs);
    return ens;
}

// Evolves every retained eigenstate with the projection stepper and sums the
// weighted two-site reductions; the full density matrix is never formed.
inline DensityTrajectory evolve_thermal(const ThermalEnsemble& ens, const SpinLattice& lat, double J,
                                        const PiecewiseConstantField& pcf, const std::vector<SitePair>& pairs,
                                        std::size_t sample_every) {
    if (std::abs(ens.field - pcf.initial_field) > 1e-12)
        throw ConfigError("thermal ensemble field does not match the schedule's initial field");
    if (ens.states.rows() != static_cast<Eigen::Index>(lat.dim()))
        throw ConfigError("ensemble dimension does not match the lattice");
    detail::check_pairs(lat, pairs);
    DensityTrajectory traj;
    traj.pairs = pairs;
    traj.reduced.assign(pairs.size(), {});
    const Eigen::MatrixXcd psi0 = ens.states.cast<cplx>();
    auto sink = [&](double t, double h, const Eigen::MatrixXcd& psi) {
        traj.times.push_back(t);
        traj.fields.push_back(h);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
            for (Eigen::Index c = 0; c < psi.cols(); ++c)
                accumulate_two_site(psi.col(c), pairs[p].i, pairs[p].j, ens.weights[c], rho);
            traj.reduced[p].push_back(rho);
        }
    };
    propagate_projection<double>(FullSpaceBuilder(lat, J), pcf, psi0, sample_every, sink);
    return traj;
}

} // namespace tfim
