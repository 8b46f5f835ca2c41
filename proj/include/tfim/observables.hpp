#pragma once

// Time series of pairwise concurrence / entanglement of formation, window
// averages, and the ground-state concurrence sweep over lambda = h/J.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tfim/evolution.hpp"
#include "tfim/trajectory.hpp"
#include "tfim/two_qubit.hpp"

namespace tfim {

struct ConcurrenceSeries {
    std::vector<double> times;
    std::vector<double> fields;
    std::vector<SitePair> pairs;
    std::vector<std::vector<double>> concurrence; // [pair][sample]
    std::vector<std::vector<double>> formation;   // [pair][sample]

    std::size_t pair_index(const SitePair& p) const {
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (pairs[k] == p || (pairs[k].i == p.j && pairs[k].j == p.i)) return k;
        throw ConfigError("pair " + pair_label(p) + " not in series");
    }
    const std::vector<double>& of(const SitePair& p) const { return concurrence[pair_index(p)]; }
};

namespace detail {

inline std::vector<Eigen::Matrix4cd> reduced_for(const std::vector<SitePair>& have,
                                                 const std::vector<std::vector<Eigen::Matrix4cd>>& reduced,
                                                 const SitePair& want) {
    for (std::size_t k = 0; k < have.size(); ++k) {
        if (have[k] == want) return reduced[k];
        if (have[k].i == want.j && have[k].j == want.i) {
            // swap the two qubits: |s_i s_j> -> |s_j s_i>
            Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
            swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
            std::vector<Eigen::Matrix4cd> out;
            for (const auto& m : reduced[k]) out.push_back(swap * m * swap);
            return out;
        }
    }
    return {};
}

inline ConcurrenceSeries series_from_reduced(const std::vector<double>& times, const std::vector<double>& fields,
                                             const std::vector<SitePair>& pairs,
                                             const std::vector<std::vector<Eigen::Matrix4cd>>& per_pair) {
    ConcurrenceSeries s;
    s.times = times;
    s.fields = fields;
    s.pairs = pairs;
    for (const auto& mats : per_pair) {
        std::vector<double> c, e;
        c.reserve(mats.size());
        e.reserve(mats.size());
        for (const auto& m : mats) {
            c.push_back(concurrence(m));
            e.push_back(entanglement_of_formation(c.back()));
        }
        s.concurrence.push_back(std::move(c));
        s.formation.push_back(std::move(e));
    }
    return s;
}

} // namespace detail

inline ConcurrenceSeries concurrence_trajectory(const StateTrajectory& traj, const std::vector<SitePair>& pairs) {
    std::vector<std::vector<Eigen::Matrix4cd>> per_pair;
    for (const auto& p : pairs) {
        auto red = detail::reduced_for(traj.pairs, traj.reduced, p);
        if (red.empty() && traj.size() > 0) {
            if (traj.states.size() != traj.size())
                throw ConfigError("pair " + pair_label(p) + " was not recorded and states were not stored");
            for (const auto& psi : traj.states) red.push_back(reduce_two_site(psi, p.i, p.j).matrix);
        }
        per_pair.push_back(std::move(red));
    }
    return detail::series_from_reduced(traj.times, traj.fields, pairs, per_pair);
}

inline ConcurrenceSeries concurrence_trajectory(const DensityTrajectory& traj, const std::vector<SitePair>& pairs) {
    std::vector<std::vector<Eigen::Matrix4cd>> per_pair;
    for (const auto& p : pairs) {
        auto red = detail::reduced_for(traj.pairs, traj.reduced, p);
        if (red.empty() && traj.size() > 0) throw ConfigError("pair " + pair_label(p) + " was not recorded");
        per_pair.push_back(std::move(red));
    }
    return detail::series_from_reduced(traj.times, traj.fields, pairs, per_pair);
}

// Trapezoidal mean of values over the samples with t in [t_lo, t_hi].
inline double time_average(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                           double t_hi) {
    if (times.size() != values.size()) throw ConfigError("time_average: size mismatch");
    if (!(t_hi > t_lo)) throw ConfigError("time_average: empty window");
    const double eps = 1e-9 * std::max(1.0, std::abs(t_hi));
    double area = 0.0, span = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        if (times[k] < t_lo - eps || times[k + 1] > t_hi + eps) continue;
        const double w = times[k + 1] - times[k];
        area += 0.5 * w * (values[k] + values[k + 1]);
        span += w;
        ++used;
    }
    if (used == 0 || span <= 0.0) throw ConfigError("time_average: window contains fewer than two samples");
    return area / span;
}

inline double time_average(const ConcurrenceSeries& s, const SitePair& p, double t_lo, double t_hi) {
    return time_average(s.times, s.of(p), t_lo, t_hi);
}

struct SweepCurve {
    SitePair pair;
    std::vector<double> concurrence;
    double argmax_lambda = 0.0;
    double max_concurrence = 0.0;
    double steepest_lambda = 0.0; // midpoint of the interval with max dC/dlambda
    double max_slope = 0.0;
};

struct SweepResult {
    std::vector<double> lambdas;
    std::vector<double> fields;
    std::vector<SweepCurve> curves;
};

inline SweepResult ground_state_sweep(const SpinLattice& lat, double J, const std::vector<double>& h_grid,
                                      const std::vector<SitePair>& pairs) {
    if (h_grid.empty()) throw ConfigError("sweep grid is empty");
    if (J == 0.0) throw ConfigError("sweep needs J != 0 to define lambda = h/J");
    for (std::size_t k = 1; k < h_grid.size(); ++k)
        if (!(h_grid[k] > h_grid[k - 1])) throw ConfigError("sweep grid must be strictly ascending");
    detail::check_pairs(lat, pairs);
    SweepResult out;
    out.fields = h_grid;
    for (double h : h_grid) out.lambdas.push_back(h / J);
    out.curves.resize(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) out.curves[p].pair = pairs[p];
    for (double h : h_grid) {
        const StateVector g = ground_state(lat, J, h);
        for (std::size_t p = 0; p < pairs.size(); ++p)
            out.curves[p].concurrence.push_back(concurrence(reduce_two_site(g, pairs[p].i, pairs[p].j)));
    }
    for (auto& c : out.curves) {
        const auto it = std::max_element(c.concurrence.begin(), c.concurrence.end());
        c.max_concurrence = *it;
        c.argmax_lambda = out.lambdas[static_cast<std::size_t>(it - c.concurrence.begin())];
        c.max_slope = -std::numeric_limits<double>::infinity();
        c.steepest_lambda = out.lambdas.front();
        for (std::size_t k = 0; k + 1 < out.lambdas.size(); ++k) {
            const double slope = (c.concurrence[k + 1] - c.concurrence[k]) / (out.lambdas[k + 1] - out.lambdas[k]);
            if (slope > c.max_slope) {
                c.max_slope = slope;
                c.steepest_lambda = 0.5 * (out.lambdas[k] + out.lambdas[k + 1]);
            }
        }
        if (out.lambdas.size() < 2) c.max_slope = 0.0;
    }
    return out;
}

} // namespace tfim
