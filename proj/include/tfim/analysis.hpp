#pragma once

// Diagnostics layered on the engines: ergodicity, thermal critical
// temperature, golden-rule adiabaticity, and the engine benchmark.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tfim/evolution.hpp"
#include "tfim/observables.hpp"
#include "tfim/schedules.hpp"
#include "tfim/symmetry.hpp"

namespace tfim {

// Runs body(k) for k in [0, n) on up to `workers` threads; each index owns
// its state. Exceptions propagate to the caller.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = std::thread::hardware_concurrency()) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t k = next++; k < n; k = next++) body(k);
        }));
    for (auto& j : jobs) j.get();
}

// ---------------------------------------------------------------- ergodicity

struct ErgodicityReport {
    SitePair pair;
    double late_average = 0.0;
    double equilibrium = 0.0; // ground-state concurrence at the final field
    double absolute_gap = 0.0;
    double relative_gap = 0.0; // absolute / equilibrium; +inf if equilibrium is 0 and gap is not
    double window_start = 0.0;
    double window_end = 0.0;
};

inline ErgodicityReport ergodicity_gap(const ConcurrenceSeries& series, const SitePair& pair, const SpinLattice& lat,
                                       double J, double final_field, double window_fraction = 0.3) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw ConfigError("window fraction must lie in (0, 1]");
    if (series.times.size() < 2) throw ConfigError("trajectory too short for an ergodicity window");
    ErgodicityReport r;
    r.pair = pair;
    r.window_end = series.times.back();
    r.window_start = r.window_end - window_fraction * (r.window_end - series.times.front());
    std::size_t in_window = 0;
    for (double t : series.times)
        if (t >= r.window_start - 1e-12) ++in_window;
    if (in_window < 3) throw ConfigError("ergodicity window holds fewer than three samples");
    r.late_average = time_average(series, pair, r.window_start, r.window_end);
    r.equilibrium = concurrence(reduce_two_site(ground_state(lat, J, final_field), pair.i, pair.j));
    r.absolute_gap = std::abs(r.late_average - r.equilibrium);
    if (r.equilibrium > 0.0) r.relative_gap = r.absolute_gap / r.equilibrium;
    else r.relative_gap = r.absolute_gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
}

// Field the schedule settles to, where one exists.
inline std::optional<double> final_field(const FieldSchedule& s) {
    switch (s.kind) {
    case FieldKind::Constant: return s.a;
    case FieldKind::Step:
    case FieldKind::Exponential:
    case FieldKind::Tanh: return s.b;
    case FieldKind::Sinusoidal: return std::nullopt;
    }
    return std::nullopt;
}

// --------------------------------------------------------------- golden rule

struct Excitation {
    double energy = 0.0;      // E_n - E_0
    std::string sector;       // symmetry label, "-" without symmetry data
    bool same_sector = true;  // connected to the ground state by S^z
    double sz_element = 0.0;  // |<n|S^z|0>|
    double spectral_density = 0.0;
    double probability = 0.0; // P_0n
};

struct GoldenRuleReport {
    double field = 0.0;
    double omega = 0.0;
    double ground_energy = 0.0;
    std::string ground_sector = "-";
    double gap = 0.0;        // E_1 - E_0 over the whole spectrum
    double sector_gap = 0.0; // first excitation in the ground-state sector
    double ratio = 0.0;      // omega / sector_gap
    bool adiabatic = false;
    double total_probability = 0.0;
    std::vector<Excitation> excitations; // ascending in energy, ground excluded
};

inline constexpr double kAdiabaticRatio = 0.1;

namespace detail {

struct Level {
    double energy;
    std::size_t sector;
    Eigen::VectorXcd vec; // in the sector's coordinates (or full space)
};

} // namespace detail

// P_0n ~ |<n|S^z|0>|^2 * amplitude^2 * |g(E_n - E_0)|^2 from the ground state
// of H(a). On wheel7 levels are resolved per C6 x Z2 sector, so states outside
// the ground sector carry S^z element exactly zero.
inline GoldenRuleReport golden_rule_report(const SpinLattice& lat, double J, double a, const FieldSchedule& schedule) {
    detail::require_spectral_kind(schedule);
    GoldenRuleReport rep;
    rep.field = a;
    rep.omega = schedule.omega;

    std::vector<detail::Level> levels;
    std::vector<Eigen::MatrixXcd> sz_blocks;
    std::vector<std::string> labels;
    std::size_t ground_sector = 0;
    if (is_wheel7(lat)) {
        const auto bases = build_sector_bases(lat);
        const SparseHermitianOperator sz = total_sz(lat.n_sites());
        ground_sector = locate_sector(ground_state(lat, J, a), bases);
        for (std::size_t s = 0; s < bases.size(); ++s) {
            if (bases[s].dim() == 0) continue;
            const auto dec = eig_hermitian(SectorBuilder(bases[s], J)(a));
            for (Eigen::Index k = 0; k < dec.size(); ++k)
                levels.push_back({dec.eigenvalues[k], s, dec.eigenvectors.col(k)});
            sz_blocks.push_back(s == ground_sector ? sector_reduced_hamiltonian(sz, bases[s]) : Eigen::MatrixXcd());
            labels.push_back(bases[s].sector.label());
        }
        // sz_blocks/labels are indexed by position among non-empty sectors
        std::vector<std::size_t> pos(bases.size(), 0);
        std::size_t p = 0;
        for (std::size_t s = 0; s < bases.size(); ++s)
            if (bases[s].dim() > 0) pos[s] = p++;
        for (auto& l : levels) l.sector = pos[l.sector];
        ground_sector = pos[ground_sector];
    } else {
        const auto dec = eig_hermitian(HamiltonianTerms(lat).dense(J, a));
        for (Eigen::Index k = 0; k < dec.size(); ++k)
            levels.push_back({dec.eigenvalues[k], 0, dec.eigenvectors.col(k).cast<cplx>()});
        sz_blocks.push_back(total_sz(lat.n_sites()).to_dense().cast<cplx>());
        labels.push_back("-");
    }
    std::stable_sort(levels.begin(), levels.end(), [](const auto& x, const auto& y) { return x.energy < y.energy; });

    // ground: lowest level in the ground sector
    std::size_t g = 0;
    while (levels[g].sector != ground_sector) ++g;
    const detail::Level ground = levels[g];
    rep.ground_energy = ground.energy;
    rep.ground_sector = labels[ground_sector];
    const double amp2 = switch_amplitude(schedule) * switch_amplitude(schedule);

    bool found_gap = false, found_sector_gap = false;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (k == g) continue;
        const auto& l = levels[k];
        Excitation ex;
        ex.energy = std::max(0.0, l.energy - ground.energy);
        ex.sector = labels[l.sector];
        ex.same_sector = l.sector == ground_sector;
        if (ex.same_sector) ex.sz_element = std::abs(l.vec.dot(sz_blocks[ground_sector] * ground.vec));
        ex.spectral_density = spectral_density(schedule, ex.energy);
        ex.probability = ex.sz_element * ex.sz_element * amp2 * ex.spectral_density;
        rep.total_probability += ex.probability;
        if (!found_gap) {
            rep.gap = ex.energy;
            found_gap = true;
        }
        if (ex.same_sector && !found_sector_gap) {
            rep.sector_gap = ex.energy;
            found_sector_gap = true;
        }
        rep.excitations.push_back(std::move(ex));
    }
    rep.ratio = rep.sector_gap > 0.0 ? rep.omega / rep.sector_gap : std::numeric_limits<double>::infinity();
    rep.adiabatic = rep.omega <= kAdiabaticRatio * rep.sector_gap;
    return rep;
}

// ------------------------------------------------------------- thermal scans

struct ThermalScanSpec {
    double field = 1.0;                     // initial (or constant) field a
    std::optional<FieldSchedule> schedule;  // absent: equilibrium at t = 0
    std::vector<double> kt_grid;
    std::vector<SitePair> pairs{{1, 4}};
    double threshold = 1e-3;
    double dt = 0.01;
    double t_end = 50.0;
    std::size_t sample_every = 10;
    double window_fraction = 0.3;
    double cutoff = 1.0 - 1e-10;
};

struct ThermalScan {
    std::vector<double> kt;
    std::vector<SitePair> pairs;
    std::vector<std::vector<double>> concurrence;    // [pair][kT]
    std::vector<std::optional<double>> critical_kt;  // T* per pair
    std::vector<std::size_t> retained_states;        // per kT
    double gap = 0.0;                                // E_1 - E_0 of H(a)
};

// Two-site concurrence at the given kT (equilibrium or late-window average).
inline std::vector<double> thermal_point(const SpinLattice& lat, double J, const ThermalScanSpec& spec, double kt,
                                         std::size_t* retained = nullptr) {
    const bool pure = kt == 0.0;
    std::vector<double> out;
    if (!spec.schedule) {
        std::vector<Eigen::Matrix4cd> rhos(spec.pairs.size(), Eigen::Matrix4cd::Zero());
        if (pure) {
            const StateVector g = ground_state(lat, J, spec.field);
            for (std::size_t p = 0; p < spec.pairs.size(); ++p)
                accumulate_two_site(g, spec.pairs[p].i, spec.pairs[p].j, 1.0, rhos[p]);
            if (retained) *retained = 1;
        } else {
            const auto ens = thermal_initial_state(lat, J, spec.field, 1.0 / kt, spec.cutoff);
            for (std::size_t p = 0; p < spec.pairs.size(); ++p)
                for (Eigen::Index c = 0; c < ens.size(); ++c)
                    accumulate_two_site(ens.states.col(c).cast<cplx>().eval(), spec.pairs[p].i, spec.pairs[p].j,
                                        ens.weights[c], rhos[p]);
            if (retained) *retained = static_cast<std::size_t>(ens.size());
        }
        for (const auto& r : rhos) out.push_back(concurrence(r));
        return out;
    }
    const double t0 = std::min(0.0, spec.schedule->t0);
    const auto pcf = discretize(*spec.schedule, t0, spec.t_end, spec.dt);
    ConcurrenceSeries series;
    if (pure) {
        SampleOptions opts{spec.sample_every, spec.pairs, false};
        series = concurrence_trajectory(
            evolve_projection_stepper(lat, J, pcf, ground_state(lat, J, pcf.initial_field), opts), spec.pairs);
        if (retained) *retained = 1;
    } else {
        const auto ens = thermal_initial_state(lat, J, pcf.initial_field, 1.0 / kt, spec.cutoff);
        series = concurrence_trajectory(evolve_thermal(ens, lat, J, pcf, spec.pairs, spec.sample_every), spec.pairs);
        if (retained) *retained = static_cast<std::size_t>(ens.size());
    }
    const double hi = series.times.back();
    const double lo = hi - spec.window_fraction * (hi - series.times.front());
    for (const auto& p : spec.pairs) out.push_back(time_average(series, p, lo, hi));
    return out;
}

inline ThermalScan critical_temperature_scan(const SpinLattice& lat, double J, const ThermalScanSpec& spec) {
    if (spec.kt_grid.empty()) throw ConfigError("kT grid is empty");
    for (std::size_t k = 0; k < spec.kt_grid.size(); ++k) {
        if (spec.kt_grid[k] < 0.0) throw ConfigError("kT must be non-negative");
        if (k > 0 && !(spec.kt_grid[k] > spec.kt_grid[k - 1])) throw ConfigError("kT grid must be ascending");
    }
    detail::check_pairs(lat, spec.pairs);
    if (spec.schedule && std::abs(initial_field(*spec.schedule, std::min(0.0, spec.schedule->t0)) - spec.field) > 1e-12)
        throw ConfigError("scan field does not match the schedule's initial field");
    ThermalScan scan;
    scan.kt = spec.kt_grid;
    scan.pairs = spec.pairs;
    std::vector<std::vector<double>> per_kt(spec.kt_grid.size());
    scan.retained_states.assign(spec.kt_grid.size(), 0);
    parallel_for(spec.kt_grid.size(),
                 [&](std::size_t k) { per_kt[k] = thermal_point(lat, J, spec, spec.kt_grid[k], &scan.retained_states[k]); });
    scan.concurrence.assign(spec.pairs.size(), std::vector<double>(spec.kt_grid.size()));
    for (std::size_t k = 0; k < spec.kt_grid.size(); ++k)
        for (std::size_t p = 0; p < spec.pairs.size(); ++p) scan.concurrence[p][k] = per_kt[k][p];
    for (std::size_t p = 0; p < spec.pairs.size(); ++p) {
        std::optional<double> tstar;
        for (std::size_t k = 0; k < scan.kt.size(); ++k)
            if (scan.concurrence[p][k] < spec.threshold) {
                tstar = scan.kt[k];
                break;
            }
        scan.critical_kt.push_back(tstar);
    }
    const auto dec = eig_hermitian(HamiltonianTerms(lat).dense(J, spec.field));
    scan.gap = dec.eigenvalues[1] - dec.eigenvalues[0];
    return scan;
}

// ----------------------------------------------------------------- benchmark

struct BenchmarkCase {
    std::string name;
    FieldSchedule schedule;
    double dt = 0.01;
    double t_end = 50.0;
};

struct BenchmarkRow {
    std::string name;
    std::size_t segments = 0;
    double matrix_seconds = 0.0;     // median wall time
    double projection_seconds = 0.0; // median wall time
    double speedup = 0.0;
    double residual = 0.0;           // max sampled state difference
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;
};

inline double max_state_difference(const StateTrajectory& x, const StateTrajectory& y) {
    if (x.states.size() != y.states.size()) throw NumericalError("trajectories have different sample counts");
    double d = 0.0;
    for (std::size_t k = 0; k < x.states.size(); ++k) d = std::max(d, (x.states[k] - y.states[k]).norm());
    return d;
}

namespace detail {
template <class F>
double median_seconds(F&& f, int reps) {
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}
} // namespace detail

inline constexpr double kEngineTolerance = 1e-8;

// Times both engines on identical discretizations, sequentially. Output
// equivalence is verified first; a mismatch aborts with NumericalError.
inline std::vector<BenchmarkRow> benchmark_engines(const SpinLattice& lat, double J,
                                                   const std::vector<BenchmarkCase>& cases, int repetitions = 5) {
    if (repetitions < 1) throw ConfigError("benchmark needs at least one repetition");
    std::vector<BenchmarkRow> rows;
    for (const auto& c : cases) {
        const auto pcf = discretize(c.schedule, std::min(0.0, c.schedule.t0), c.t_end, c.dt);
        const StateVector psi0 = ground_state(lat, J, pcf.initial_field);
        const std::size_t every = std::max<std::size_t>(1, pcf.size() / 20);
        SampleOptions verify{every, {}, true};
        const auto m = evolve_matrix_stepper(lat, J, pcf, psi0, verify);
        DecompositionCache<double> cache;
        const auto p = evolve_projection_stepper(lat, J, pcf, psi0, verify, &cache);
        BenchmarkRow row;
        row.name = c.name;
        row.segments = pcf.size();
        row.residual = max_state_difference(m, p);
        row.cache_hits = cache.hits();
        row.cache_misses = cache.misses();
        if (!(row.residual <= kEngineTolerance))
            throw NumericalError("benchmark \"" + c.name + "\": engines disagree (residual " +
                                 std::to_string(row.residual) + ")");
        SampleOptions timed{pcf.size(), {}, false};
        row.matrix_seconds = detail::median_seconds([&] { evolve_matrix_stepper(lat, J, pcf, psi0, timed); }, repetitions);
        row.projection_seconds =
            detail::median_seconds([&] { evolve_projection_stepper(lat, J, pcf, psi0, timed); }, repetitions);
        row.speedup = row.matrix_seconds / row.projection_seconds;
        rows.push_back(row);
    }
    return rows;
}

} // namespace tfim
