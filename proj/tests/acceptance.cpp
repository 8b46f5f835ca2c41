// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "tfim/analysis.hpp"
#include "tfim/runner.hpp"

using namespace tfim;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double ground_c(const SpinLattice& lat, double h, SitePair p) {
    return concurrence(reduce_two_site(ground_state(lat, 1.0, h), p.i, p.j));
}

Eigen::VectorXcd random_state(std::size_t dim, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = {g(rng), g(rng)};
    return v.normalized();
}

ConcurrenceSeries pure_run(const SpinLattice& lat, const FieldSchedule& s, double dt, double t_end, std::size_t every,
                           const std::vector<SitePair>& pairs) {
    const auto pcf = discretize(s, 0.0, t_end, dt);
    return concurrence_trajectory(
        evolve_projection_stepper(lat, 1.0, pcf, ground_state(lat, 1.0, pcf.initial_field), {every, pairs, false}), pairs);
}

// --------------------------------------------------------------------------

void sweep_maximum(const SpinLattice& lat) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = Grid{0.0, 6.0, 0.01}.values();
    const auto r = ground_state_sweep(lat, 1.0, grid, {{1, 4}, {1, 2}});
    const double secs = seconds_since(t0);
    const double a14 = r.curves[0].argmax_lambda, a12 = r.curves[1].argmax_lambda;
    const bool ok = std::abs(a14 - 2.61) <= 0.1 && std::abs(a12 - 2.46) <= 0.1 && secs < 60;
    report(1, "sweep maximum", ok,
           fmt("argmax C(1,4) = %.2f (target 2.61 +- 0.1), argmax C(1,2) = %.2f (target 2.46 +- 0.1), %zu points in %.1f s",
               a14, a12, grid.size(), secs));
}

void engine_equivalence(const SpinLattice& lat) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> field(0.2, 3.0), rate(0.1, 2.0), phase(0.0, 2 * std::numbers::pi),
        start(0.0, 1.0), span(2.0, 5.0);
    const FieldKind kinds[] = {FieldKind::Step, FieldKind::Exponential, FieldKind::Tanh, FieldKind::Sinusoidal};
    double worst = 0.0;
    std::size_t segments = 0;
    for (int k = 0; k < 10; ++k) {
        FieldSchedule s;
        s.kind = kinds[k % 4];
        s.a = field(rng);
        s.b = field(rng);
        s.omega = rate(rng);
        s.phi = s.kind == FieldKind::Sinusoidal ? phase(rng) : 0.0;
        s.t0 = start(rng);
        const auto pcf = discretize(s, 0.0, span(rng), 0.01);
        segments += pcf.size();
        const auto psi0 = ground_state(lat, 1.0, pcf.initial_field);
        const SampleOptions opts{1, {}, true};
        const auto m = evolve_matrix_stepper(lat, 1.0, pcf, psi0, opts);
        const auto p = evolve_projection_stepper(lat, 1.0, pcf, psi0, opts);
        worst = std::max(worst, max_state_difference(m, p));
    }
    const double secs = seconds_since(t0);
    report(2, "engine equivalence", worst <= 1e-8 && secs < 300,
           fmt("max state discrepancy %.2e over 10 schedules (%zu segments, all kinds), %.1f s", worst, segments, secs));
}

void ergodicity(const SpinLattice& lat) {
    std::string detail;
    bool ok = true;
    for (const auto& s : {FieldSchedule::exponential(1, 2, 0.1), FieldSchedule::tanh(1, 2, 0.1)}) {
        const auto c = pure_run(lat, s, 0.01, 100.0, 10, {{1, 4}});
        const auto r = ergodicity_gap(c, {1, 4}, lat, 1.0, 2.0, 0.3);
        ok = ok && r.relative_gap <= 0.05;
        detail += fmt("%s: late avg %.5f vs equilibrium %.5f (gap %.2f%%); ", kind_name(s.kind).c_str(), r.late_average,
                      r.equilibrium, 100 * r.relative_gap);
    }
    report(3, "ergodicity", ok, detail + "tolerance 5%");
}

void step_oscillation(const SpinLattice& lat) {
    const auto c = pure_run(lat, FieldSchedule::step(1, 2), 0.01, 40.0, 1, {{1, 4}});
    const auto& v = c.of({1, 4});
    const double lo_all = *std::min_element(v.begin(), v.end()), hi_all = *std::max_element(v.begin(), v.end());
    const double w0 = 0.7 * 40.0;
    double lo = 1, hi = 0;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (c.times[k] >= w0) {
            lo = std::min(lo, v[k]);
            hi = std::max(hi, v[k]);
        }
    const double avg = time_average(c, {1, 4}, w0, 40.0);
    const double eq1 = ground_c(lat, 1.0, {1, 4});
    const bool ok = hi_all - lo_all >= 0.05 && avg > eq1 && avg > lo && avg < hi;
    report(4, "step-field oscillation", ok,
           fmt("peak-to-peak %.4f (>= 0.05); late avg %.5f, equilibrium at h=1 %.5f, window range [%.5f, %.5f]",
               hi_all - lo_all, avg, eq1, lo, hi));
}

struct Spectrum {
    double dominant = 0.0;      // angular frequency of the largest non-DC bin
    double drive_fraction = 0.0; // power within +-10% of the drive
};

Spectrum power_spectrum(const std::vector<double>& values, double sample_dt, double drive) {
    std::vector<double> x(values.begin(), values.end() - 1); // drop the duplicate endpoint of the last period
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.fwd(out, x);
    const double n = static_cast<double>(x.size());
    Spectrum s;
    double total = 0.0, band = 0.0, best = -1.0;
    for (std::size_t k = 1; k <= x.size() / 2; ++k) {
        const double w = 2 * std::numbers::pi * static_cast<double>(k) / (n * sample_dt);
        const double p = std::norm(out[k]);
        total += p;
        if (std::abs(w - drive) <= 0.1 * drive) band += p;
        if (p > best) {
            best = p;
            s.dominant = w;
        }
    }
    s.drive_fraction = band / total;
    return s;
}

Spectrum sinusoidal_spectrum(const SpinLattice& lat, const std::vector<SectorBasis>& bases, double a, double omega) {
    const auto s = FieldSchedule::sinusoidal(a, omega, std::numbers::pi / 2);
    const double dt = 0.02, t_end = 10 * 2 * std::numbers::pi / omega;
    const auto pcf = discretize(s, 0.0, t_end, dt);
    const auto psi0 = ground_state(lat, 1.0, pcf.initial_field);
    const auto& basis = bases[locate_sector(psi0, bases)];
    const auto c = concurrence_trajectory(evolve_projection_in_sector(basis, 1.0, pcf, psi0, {1, {{1, 2}}, false}), {{1, 2}});
    return power_spectrum(c.of({1, 2}), dt, omega);
}

void sinusoidal_following(const SpinLattice& lat, const std::vector<SectorBasis>& bases) {
    const auto slow = sinusoidal_spectrum(lat, bases, 1.0, 0.1);
    const auto fast = sinusoidal_spectrum(lat, bases, 5.0, 0.5);
    const bool follow = std::abs(slow.dominant - 0.1) <= 0.01;
    const bool broken = 1.0 - fast.drive_fraction >= 0.25;
    report(5, "adiabatic following vs breaking", follow && broken,
           fmt("a=1 w=0.1: dominant %.4f (drive 0.1 +- 10%%), %.1f%% power at drive; a=5 w=0.5: %.1f%% power off the "
               "drive (>= 25%%)",
               slow.dominant, 100 * slow.drive_fraction, 100 * (1 - fast.drive_fraction)));
}

void thermal_death(const SpinLattice& lat) {
    const auto t0 = std::chrono::steady_clock::now();
    ThermalScanSpec spec;
    spec.field = 1.0;
    spec.schedule = FieldSchedule::step(1, 2);
    spec.kt_grid = Grid{0.0, 2.5, 0.25}.values();
    const auto scan = critical_temperature_scan(lat, 1.0, spec);
    const auto tstar = scan.critical_kt[0];

    ThermalScanSpec eq;
    eq.kt_grid = Grid{0.0, 30.0, 0.25}.values();
    eq.field = 2.6;
    const auto low = critical_temperature_scan(lat, 1.0, eq);
    eq.field = 15.0;
    const auto high = critical_temperature_scan(lat, 1.0, eq);
    const double secs = seconds_since(t0);

    const bool in_band = tstar && *tstar >= 1.5 && *tstar <= 2.0;
    const bool crossover = low.critical_kt[0] && high.critical_kt[0] && *high.critical_kt[0] > *low.critical_kt[0] &&
                           high.concurrence[0][0] < low.concurrence[0][0];
    std::string curve;
    for (std::size_t k = 0; k < scan.kt.size(); ++k) curve += fmt(" %.2f:%.4f", scan.kt[k], scan.concurrence[0][k]);
    report(6, "thermal death", in_band && crossover && secs < 600,
           fmt("T* = %s (target [1.5, 2.0]); late-window C(1,4) by kT:%s; equilibrium T*(a=15) = %s vs T*(a=2.6) = %s, "
               "C(kT=0) %.4f vs %.4f; %.1f s",
               tstar ? fmt("%.2f", *tstar).c_str() : "none", curve.c_str(),
               high.critical_kt[0] ? fmt("%.2f", *high.critical_kt[0]).c_str() : "none",
               low.critical_kt[0] ? fmt("%.2f", *low.critical_kt[0]).c_str() : "none", high.concurrence[0][0],
               low.concurrence[0][0], secs));
}

void golden_rule(const SpinLattice& lat) {
    double closed = 0.0, numeric = 0.0;
    for (double w : {0.1, 1.0}) {
        const auto s = FieldSchedule::exponential(1, 2, w);
        for (double wp = 0.0; wp <= 10.0 + 1e-12; wp += 0.25) {
            const double exact = 1.0 / (wp * wp + w * w);
            closed = std::max(closed, std::abs(spectral_density(s, wp) - exact) / exact);
            numeric = std::max(numeric, std::abs(spectral_density_numeric(s, wp) - exact) / exact);
        }
    }
    const auto slow = golden_rule_report(lat, 1.0, 1.0, FieldSchedule::exponential(1, 2, 0.1));
    const auto fast = golden_rule_report(lat, 1.0, 1.0, FieldSchedule::exponential(1, 2, 10.0));
    double cross = 0.0;
    int n_cross = 0;
    for (const auto* r : {&slow, &fast})
        for (const auto& e : r->excitations)
            if (!e.same_sector) {
                cross = std::max(cross, e.probability);
                ++n_cross;
            }
    const bool ok = closed <= 1e-6 && numeric <= 1e-6 && cross == 0.0 && slow.adiabatic && !fast.adiabatic;
    report(7, "golden rule", ok,
           fmt("spectral density rel. error closed form %.1e, quadrature %.1e; max cross-sector P_0n = %g over %d states; "
               "verdict w=0.1 %s (w/gap %.3f), w=10 %s (w/gap %.2f)",
               closed, numeric, cross, n_cross, slow.adiabatic ? "adiabatic" : "non-adiabatic", slow.ratio,
               fast.adiabatic ? "adiabatic" : "non-adiabatic", fast.ratio));
}

void symmetry(const SpinLattice& lat, const std::vector<SectorBasis>& bases) {
    Eigen::Index total = 0;
    for (const auto& b : bases) total += b.dim();
    double cross = 0.0;
    for (double h : {0.0, 1.0, 2.61}) {
        const Eigen::MatrixXcd hm = build_hamiltonian(lat, 1.0, h).to_dense().cast<cplx>();
        for (std::size_t a = 0; a < bases.size(); ++a)
            for (std::size_t b = 0; b < bases.size(); ++b)
                if (a != b) cross = std::max(cross, (bases[a].isometry.adjoint() * hm * bases[b].isometry).cwiseAbs().maxCoeff());
    }
    std::mt19937 rng(4);
    const auto psi = random_state(128, rng);
    const auto pcf = discretize(FieldSchedule::exponential(1, 2, 0.5), 0.0, 5.0, 0.01);
    const auto traj = evolve_projection_stepper(lat, 1.0, pcf, psi, {10, {}, true});
    const auto w0 = sector_weights(psi, bases);
    double drift = 0.0;
    for (const auto& s : traj.states) {
        const auto w = sector_weights(s, bases);
        for (std::size_t k = 0; k < w.size(); ++k) drift = std::max(drift, std::abs(w[k] - w0[k]));
    }
    const auto g = ground_state(lat, 1.0, 1.0);
    const auto& basis = bases[locate_sector(g, bases)];
    const SampleOptions opts{1, {}, true};
    const auto pcf2 = discretize(FieldSchedule::exponential(1, 2, 0.1), 0.0, 5.0, 0.01);
    const double restricted = max_state_difference(evolve_projection_stepper(lat, 1.0, pcf2, g, opts),
                                                   evolve_projection_in_sector(basis, 1.0, pcf2, g, opts));
    const bool ok = bases.size() == 12 && total == 128 && cross <= 1e-10 && drift <= 1e-10 && restricted <= 1e-8;
    report(8, "symmetry", ok,
           fmt("%zu sectors, dims sum %ld; max cross-sector |H| %.1e; sector-weight drift %.1e; sector %s (dim %ld) vs "
               "full evolution %.1e",
               bases.size(), static_cast<long>(total), cross, drift, basis.sector.label().c_str(),
               static_cast<long>(basis.dim()), restricted));
}

void benchmark(const SpinLattice& lat) {
    const auto rows = benchmark_engines(lat, 1.0, {{"step_5000", FieldSchedule::step(1, 2), 0.01, 50.0}}, 3);
    const auto& r = rows.front();
    report(9, "benchmark", r.segments == 5000 && r.speedup >= 2.0 && r.residual <= 1e-8,
           fmt("%zu segments: matrix %.2f s, projection %.4f s (median of 3), speedup %.0fx (>= 2), residual %.1e, "
               "cache %zu hits / %zu misses",
               r.segments, r.matrix_seconds, r.projection_seconds, r.speedup, r.residual, r.cache_hits, r.cache_misses));
}

// Concurrence from the eigenvalues of the non-Hermitian rho * rho~.
double brute_force_concurrence(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = yy(3, 0) = -1;
    yy(1, 2) = yy(2, 1) = 1;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * (yy * rho.conjugate() * yy));
    std::vector<double> lam;
    for (int k = 0; k < 4; ++k) lam.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[k].real())));
    std::sort(lam.rbegin(), lam.rend());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

void property_suites(const SpinLattice& lat) {
    Eigen::Vector4cd phi(1, 0, 0, 1);
    phi /= std::sqrt(2.0);
    const Eigen::Matrix4cd bell = phi * phi.adjoint();
    Eigen::Matrix4cd product = Eigen::Matrix4cd::Zero();
    product(1, 1) = 1;
    const Eigen::Matrix4cd werner = 0.5 * bell + 0.5 * Eigen::Matrix4cd::Identity() / 4;
    const double c_bell = concurrence(bell), c_prod = concurrence(product), c_w = concurrence(werner);
    const double c_w_brute = brute_force_concurrence(werner);
    const bool oracles = std::abs(c_bell - 1) < 1e-9 && c_prod < 1e-12 && std::abs(c_w - 0.25) < 1e-10 &&
                         std::abs(c_w_brute - 0.25) < 1e-12;

    std::mt19937 rng(31);
    std::normal_distribution<double> g;
    double lu = 0.0;
    for (int k = 0; k < 50; ++k) {
        Eigen::Matrix4cd m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = {g(rng), g(rng)};
        Eigen::Matrix4cd rho = m * m.adjoint();
        rho /= rho.trace().real();
        Eigen::Matrix2cd a, b;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) a(r, c) = {g(rng), g(rng)}, b(r, c) = {g(rng), g(rng)};
        const Eigen::Matrix2cd ua = Eigen::HouseholderQR<Eigen::Matrix2cd>(a).householderQ();
        const Eigen::Matrix2cd ub = Eigen::HouseholderQR<Eigen::Matrix2cd>(b).householderQ();
        Eigen::Matrix4cd u;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) u.block<2, 2>(2 * r, 2 * c) = ua(r, c) * ub;
        lu = std::max(lu, std::abs(concurrence(rho) - concurrence(Eigen::Matrix4cd(u * rho * u.adjoint()))));
    }

    // norm / trace / positivity along an evolved trajectory
    const auto pcf = discretize(FieldSchedule::exponential(1, 2, 0.1), 0.0, 10.0, 0.01);
    const std::vector<SitePair> pairs{{1, 2}, {1, 4}, {1, 7}};
    const auto traj = evolve_projection_stepper(lat, 1.0, pcf, ground_state(lat, 1.0, 1.0), {10, pairs, true});
    double norm_err = 0.0, trace_err = 0.0, min_eig = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        norm_err = std::max(norm_err, std::abs(traj.states[k].norm() - 1));
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto& r = traj.reduced[p][k];
            trace_err = std::max(trace_err, std::abs(r.trace().real() - 1));
            min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(r).eigenvalues().minCoeff());
        }
    }
    const auto thermal = thermal_initial_state(lat, 1.0, 1.0, 1.0);
    const auto dens = evolve_thermal(thermal, lat, 1.0, discretize(FieldSchedule::step(1, 2), 0, 10, 0.01), pairs, 10);
    for (const auto& series : dens.reduced)
        for (const auto& r : series) {
            trace_err = std::max(trace_err, std::abs(r.trace().real() - 1));
            min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(r).eigenvalues().minCoeff());
        }

    // dt halving
    RunConfig cfg;
    cfg.schedule = FieldSchedule::exponential(1, 2, 0.1);
    cfg.t_end = 10.0;
    cfg.pairs = {{1, 4}, {1, 2}};
    const auto conv = simulate_converged(cfg, lat);

    const bool ok = oracles && lu <= 1e-8 && norm_err <= 1e-10 && trace_err <= 1e-10 && min_eig >= -1e-10 &&
                    conv.converged && conv.max_deviation <= 1e-4;
    report(10, "property suites", ok,
           fmt("Bell %.6f, product %.1e, Werner(0.5) %.6f (brute force %.6f); local-unitary max change %.1e; norm err "
               "%.1e, trace err %.1e, min eigenvalue %.1e; dt halving deviation %.1e after %d halving(s)",
               c_bell, c_prod, c_w, c_w_brute, lu, norm_err, trace_err, min_eig, conv.max_deviation, conv.halvings));
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto lat = build_wheel7();
    const auto bases = build_sector_bases(lat);
    auto guarded = [](int id, const char* title, auto&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            report(id, title, false, std::string("exception: ") + e.what());
        }
    };
    guarded(1, "sweep maximum", [&] { sweep_maximum(lat); });
    guarded(2, "engine equivalence", [&] { engine_equivalence(lat); });
    guarded(3, "ergodicity", [&] { ergodicity(lat); });
    guarded(4, "step-field oscillation", [&] { step_oscillation(lat); });
    guarded(5, "adiabatic following vs breaking", [&] { sinusoidal_following(lat, bases); });
    guarded(6, "thermal death", [&] { thermal_death(lat); });
    guarded(7, "golden rule", [&] { golden_rule(lat); });
    guarded(8, "symmetry", [&] { symmetry(lat, bases); });
    guarded(9, "benchmark", [&] { benchmark(lat); });
    guarded(10, "property suites", [&] { property_suites(lat); });
    std::printf("%d of 10 criteria passed in %.0f s\n", 10 - failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
