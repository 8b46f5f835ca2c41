#pragma once

// Run configurations and the pipelines behind the command-line subcommands:
// each writes a CSV, a summary JSON and an echo of the normalized config.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfim/analysis.hpp"
#include "tfim/evolution.hpp"
#include "tfim/lattice.hpp"
#include "tfim/observables.hpp"
#include "tfim/schedules.hpp"
#include "tfim/symmetry.hpp"

namespace tfim {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

enum class Engine { Matrix, Projection, Sector };

inline std::string engine_name(Engine e) {
    switch (e) {
    case Engine::Matrix: return "matrix";
    case Engine::Projection: return "projection";
    case Engine::Sector: return "sector";
    }
    return "projection";
}

inline Engine parse_engine(const std::string& s) {
    if (s == "matrix") return Engine::Matrix;
    if (s == "projection") return Engine::Projection;
    if (s == "sector") return Engine::Sector;
    throw ConfigError("unknown engine \"" + s + "\" (expected matrix|projection|sector)");
}

struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> values() const {
        if (!(step > 0.0)) throw ConfigError("grid step must be positive");
        if (stop < start) throw ConfigError("grid stop must not precede start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        std::vector<double> v;
        for (std::size_t k = 0; k <= n; ++k) v.push_back(start + static_cast<double>(k) * step);
        return v;
    }
};

struct RunConfig {
    std::string lattice = "wheel7"; // preset name or path to an edge-list JSON
    double J = 1.0;
    FieldSchedule schedule = FieldSchedule::step(1.0, 2.0);
    double dt = 0.01;
    double t_end = 50.0;
    std::size_t sample_every = 10;
    std::vector<SitePair> pairs{{1, 4}};
    Engine engine = Engine::Projection;
    double kt = 0.0; // 0 = zero temperature
    double cutoff = 1.0 - 1e-10;
    std::string out = "out";
    std::uint64_t seed = 0;
    bool check_convergence = true;
    double convergence_tol = 1e-4;
    int max_halvings = 4;
    double window_fraction = 0.3;
    bool golden_rule = false;
    // sweep
    std::optional<std::vector<double>> h_grid;
    // thermal-scan
    std::optional<std::vector<double>> kt_grid;
    double threshold = 1e-3;
    std::string thermal_mode = "evolved"; // or "equilibrium"
    // bench
    std::vector<BenchmarkCase> bench_cases;
    int repetitions = 5;
};

// "1,4;1,2" -> {(1,4), (1,2)}
inline std::vector<SitePair> parse_pairs(const std::string& text) {
    std::vector<SitePair> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.empty()) continue;
        const auto comma = item.find(',');
        if (comma == std::string::npos) throw ConfigError("pair \"" + item + "\" must look like i,j");
        try {
            out.push_back({std::stoi(item.substr(0, comma)), std::stoi(item.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ConfigError("pair \"" + item + "\" must look like i,j");
        }
    }
    if (out.empty()) throw ConfigError("no pairs given");
    return out;
}

namespace detail {

inline std::vector<double> grid_from_json(const json& j, const char* what) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object()) return Grid{j.at("start").get<double>(), j.at("stop").get<double>(), j.at("step").get<double>()}.values();
    throw ConfigError(std::string(what) + " must be a list or {start, stop, step}");
}

} // namespace detail

inline RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
        if (j.contains("lattice")) {
            if (j["lattice"].is_string()) c.lattice = j["lattice"].get<std::string>();
            else throw ConfigError("\"lattice\" must be a preset name or a path");
        }
        if (j.contains("J")) c.J = j["J"].get<double>();
        if (j.contains("schedule")) c.schedule = schedule_from_json(j["schedule"]);
        if (j.contains("dt")) c.dt = j["dt"].get<double>();
        if (j.contains("t_end")) c.t_end = j["t_end"].get<double>();
        if (j.contains("sample_every")) {
            const auto se = j["sample_every"].get<long long>();
            if (se < 1) throw ConfigError("sample_every must be at least 1");
            c.sample_every = static_cast<std::size_t>(se);
        }
        if (j.contains("pairs")) {
            c.pairs.clear();
            for (const auto& p : j["pairs"]) {
                if (!p.is_array() || p.size() != 2) throw ConfigError("each pair must be [i, j]");
                c.pairs.push_back({p[0].get<int>(), p[1].get<int>()});
            }
        }
        if (j.contains("engine")) c.engine = parse_engine(j["engine"].get<std::string>());
        if (j.contains("kT")) c.kt = j["kT"].get<double>();
        if (j.contains("beta")) {
            const double beta = j["beta"].get<double>();
            if (!(beta > 0.0)) throw ConfigError("beta must be positive");
            c.kt = 1.0 / beta;
        }
        if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<double>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("check_convergence")) c.check_convergence = j["check_convergence"].get<bool>();
        if (j.contains("convergence_tol")) c.convergence_tol = j["convergence_tol"].get<double>();
        if (j.contains("max_halvings")) c.max_halvings = j["max_halvings"].get<int>();
        if (j.contains("window_fraction")) c.window_fraction = j["window_fraction"].get<double>();
        if (j.contains("golden_rule")) c.golden_rule = j["golden_rule"].get<bool>();
        if (j.contains("h_grid")) c.h_grid = detail::grid_from_json(j["h_grid"], "h_grid");
        if (j.contains("kt_grid")) c.kt_grid = detail::grid_from_json(j["kt_grid"], "kt_grid");
        if (j.contains("threshold")) c.threshold = j["threshold"].get<double>();
        if (j.contains("thermal_mode")) c.thermal_mode = j["thermal_mode"].get<std::string>();
        if (j.contains("repetitions")) c.repetitions = j["repetitions"].get<int>();
        if (j.contains("bench")) {
            for (const auto& b : j["bench"]) {
                BenchmarkCase bc;
                bc.name = b.value("name", "case" + std::to_string(c.bench_cases.size()));
                bc.schedule = schedule_from_json(b.at("schedule"));
                bc.dt = b.value("dt", c.dt);
                bc.t_end = b.value("t_end", c.t_end);
                c.bench_cases.push_back(bc);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

// Normal form: every key, fixed order, numbers as doubles.
inline json config_to_json(const RunConfig& c) {
    json j = json::object();
    j["lattice"] = c.lattice;
    j["J"] = c.J;
    j["schedule"] = schedule_to_json(c.schedule);
    j["dt"] = c.dt;
    j["t_end"] = c.t_end;
    j["sample_every"] = c.sample_every;
    json pairs = json::array();
    for (const auto& p : c.pairs) pairs.push_back({p.i, p.j});
    j["pairs"] = pairs;
    j["engine"] = engine_name(c.engine);
    j["kT"] = c.kt;
    j["cutoff"] = c.cutoff;
    j["out"] = c.out;
    j["seed"] = c.seed;
    j["check_convergence"] = c.check_convergence;
    j["convergence_tol"] = c.convergence_tol;
    j["max_halvings"] = c.max_halvings;
    j["window_fraction"] = c.window_fraction;
    j["golden_rule"] = c.golden_rule;
    if (c.h_grid) j["h_grid"] = *c.h_grid;
    if (c.kt_grid) j["kt_grid"] = *c.kt_grid;
    j["threshold"] = c.threshold;
    j["thermal_mode"] = c.thermal_mode;
    j["repetitions"] = c.repetitions;
    if (!c.bench_cases.empty()) {
        json b = json::array();
        for (const auto& bc : c.bench_cases)
            b.push_back({{"name", bc.name}, {"schedule", schedule_to_json(bc.schedule)}, {"dt", bc.dt}, {"t_end", bc.t_end}});
        j["bench"] = b;
    }
    return j;
}

inline SpinLattice resolve_lattice(const std::string& spec) {
    if (spec == "wheel7") return build_wheel7();
    if (spec.rfind("chain", 0) == 0 && spec.size() > 5 && spec.find('/') == std::string::npos &&
        !std::filesystem::exists(spec)) {
        try {
            return build_chain(std::stoi(spec.substr(5)));
        } catch (const std::invalid_argument&) {
        }
    }
    std::ifstream in(spec);
    if (!in) throw ConfigError("unknown lattice \"" + spec + "\" (not a preset and not a readable file)");
    try {
        return lattice_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("lattice file " + spec + ": " + e.what());
    }
}

inline void validate(const RunConfig& c, const SpinLattice& lat) {
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be positive");
    if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end must be positive");
    if (!(c.kt >= 0.0) || !std::isfinite(c.kt)) throw ConfigError("kT must be non-negative");
    if (!std::isfinite(c.J)) throw ConfigError("J must be finite");
    if (c.max_halvings < 0) throw ConfigError("max_halvings must be non-negative");
    if (c.thermal_mode != "evolved" && c.thermal_mode != "equilibrium")
        throw ConfigError("thermal_mode must be \"evolved\" or \"equilibrium\"");
    detail::check_pairs(lat, c.pairs);
}

// ------------------------------------------------------------------ output

inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Column names such as C(1,4) carry a comma, so they are quoted.
inline std::string csv_field(const std::string& name) {
    return name.find(',') == std::string::npos ? name : "\"" + name + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        else if (ch == ',' && !quoted) out.emplace_back();
        else out.back() += ch;
    }
    return out;
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct OutputBundle {
    std::filesystem::path csv;
    std::filesystem::path summary;
    std::filesystem::path config;
    json summary_json;
    int exit_code = 0;
};

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text;
}

inline OutputBundle finish(const RunConfig& c, const std::string& csv_name, const std::string& csv_text, json summary,
                           std::chrono::steady_clock::time_point started) {
    std::filesystem::create_directories(c.out);
    OutputBundle b;
    b.csv = std::filesystem::path(c.out) / csv_name;
    b.summary = std::filesystem::path(c.out) / "summary.json";
    b.config = std::filesystem::path(c.out) / "config.json";
    summary["version"] = kVersion;
    summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_text(b.csv, csv_text);
    write_text(b.summary, summary.dump(2) + "\n");
    write_text(b.config, config_to_json(c).dump(2) + "\n");
    b.summary_json = std::move(summary);
    return b;
}

inline std::string series_csv(const ConcurrenceSeries& s) {
    std::string out = "t,h";
    for (const auto& p : s.pairs) out += "," + csv_field("C" + pair_label(p)) + "," + csv_field("E" + pair_label(p));
    out += "\n";
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        out += fmt12(s.times[k]) + "," + fmt12(s.fields[k]);
        for (std::size_t p = 0; p < s.pairs.size(); ++p)
            out += "," + fmt12(s.concurrence[p][k]) + "," + fmt12(s.formation[p][k]);
        out += "\n";
    }
    return out;
}

inline json golden_rule_json(const GoldenRuleReport& g) {
    return {{"field", g.field},
            {"omega", g.omega},
            {"ground_energy", g.ground_energy},
            {"ground_sector", g.ground_sector},
            {"gap", g.gap},
            {"sector_gap", g.sector_gap},
            {"ratio", number_or_null(g.ratio)},
            {"verdict", g.adiabatic ? "adiabatic" : "non-adiabatic"},
            {"total_probability", g.total_probability}};
}

} // namespace detail

// One evolution at the configured dt (no convergence loop).
inline ConcurrenceSeries simulate(const RunConfig& c, const SpinLattice& lat, double dt, std::size_t sample_every) {
    const auto pcf = discretize(c.schedule, 0.0, c.t_end, dt);
    if (c.kt > 0.0) {
        const auto ens = thermal_initial_state(lat, c.J, pcf.initial_field, 1.0 / c.kt, c.cutoff);
        return concurrence_trajectory(evolve_thermal(ens, lat, c.J, pcf, c.pairs, sample_every), c.pairs);
    }
    const StateVector psi0 = ground_state(lat, c.J, pcf.initial_field);
    const SampleOptions opts{sample_every, c.pairs, false};
    switch (c.engine) {
    case Engine::Matrix: return concurrence_trajectory(evolve_matrix_stepper(lat, c.J, pcf, psi0, opts), c.pairs);
    case Engine::Projection:
        return concurrence_trajectory(evolve_projection_stepper(lat, c.J, pcf, psi0, opts), c.pairs);
    case Engine::Sector: {
        const auto bases = build_sector_bases(lat);
        const auto& basis = bases[locate_sector(psi0, bases)];
        return concurrence_trajectory(evolve_projection_in_sector(basis, c.J, pcf, psi0, opts), c.pairs);
    }
    }
    throw ConfigError("unknown engine");
}

inline double max_concurrence_deviation(const ConcurrenceSeries& a, const ConcurrenceSeries& b) {
    if (a.times.size() != b.times.size()) throw NumericalError("convergence check: sample counts differ");
    double d = 0.0;
    for (std::size_t p = 0; p < a.pairs.size(); ++p)
        for (std::size_t k = 0; k < a.times.size(); ++k)
            d = std::max(d, std::abs(a.concurrence[p][k] - b.concurrence[p][k]));
    return d;
}

struct ConvergedSeries {
    ConcurrenceSeries series;
    bool checked = false;
    bool converged = true;
    double final_dt = 0.0;
    int halvings = 0;
    double max_deviation = 0.0;
};

// Reruns at dt/2 until consecutive runs agree within the tolerance.
inline ConvergedSeries simulate_converged(const RunConfig& c, const SpinLattice& lat) {
    ConvergedSeries out;
    out.final_dt = c.dt;
    out.series = simulate(c, lat, c.dt, c.sample_every);
    if (!c.check_convergence) return out;
    out.checked = true;
    double dt = c.dt;
    std::size_t every = c.sample_every;
    for (int k = 0; k <= c.max_halvings; ++k) {
        auto finer = simulate(c, lat, dt / 2, every * 2);
        out.max_deviation = max_concurrence_deviation(out.series, finer);
        out.series = std::move(finer);
        dt /= 2;
        every *= 2;
        out.final_dt = dt;
        out.halvings = k + 1;
        if (out.max_deviation <= c.convergence_tol) return out;
    }
    out.converged = false;
    return out;
}

inline OutputBundle run(const RunConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    const SpinLattice lat = resolve_lattice(c.lattice);
    validate(c, lat);
    if (c.kt > 0.0 && c.engine != Engine::Projection)
        throw ConfigError("thermal runs use the projection engine; drop --engine or set it to projection");

    const auto evo_start = std::chrono::steady_clock::now();
    const ConvergedSeries res = simulate_converged(c, lat);
    const double evo_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - evo_start).count();
    const ConcurrenceSeries& s = res.series;

    json summary;
    summary["command"] = "run";
    summary["engine"] = engine_name(c.engine);
    summary["initial_field"] = initial_field(c.schedule, 0.0);
    summary["kT"] = c.kt;
    summary["samples"] = s.times.size();
    summary["dt_convergence"] = {{"checked", res.checked},
                                 {"converged", res.converged},
                                 {"final_dt", res.final_dt},
                                 {"halvings", res.halvings},
                                 {"max_deviation", res.max_deviation}};
    json avg = json::object();
    for (const auto& p : s.pairs) avg["C" + pair_label(p)] = time_average(s, p, s.times.front(), s.times.back());
    summary["time_average"] = avg;
    if (const auto b = final_field(c.schedule); b && s.times.size() >= 10) {
        json erg = json::array();
        for (const auto& p : s.pairs) {
            const auto r = ergodicity_gap(s, p, lat, c.J, *b, c.window_fraction);
            erg.push_back({{"pair", pair_label(p)},
                           {"late_average", r.late_average},
                           {"equilibrium", r.equilibrium},
                           {"absolute_gap", r.absolute_gap},
                           {"relative_gap", number_or_null(r.relative_gap)},
                           {"window", {r.window_start, r.window_end}}});
        }
        summary["ergodicity"] = erg;
    }
    if (c.golden_rule)
        summary["golden_rule"] = detail::golden_rule_json(golden_rule_report(lat, c.J, initial_field(c.schedule, 0.0), c.schedule));
    summary["timing"] = {{"evolution_s", evo_seconds}};

    OutputBundle b = detail::finish(c, "trajectory.csv", detail::series_csv(s), summary, started);
    if (!res.converged) b.exit_code = 3;
    return b;
}

inline OutputBundle sweep(const RunConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    const SpinLattice lat = resolve_lattice(c.lattice);
    validate(c, lat);
    if (!c.h_grid) throw ConfigError("sweep needs \"h_grid\" in the config");
    const SweepResult r = ground_state_sweep(lat, c.J, *c.h_grid, c.pairs);

    std::string csv = "lambda,h";
    for (const auto& p : c.pairs) csv += "," + csv_field("C" + pair_label(p)) + "," + csv_field("E" + pair_label(p));
    csv += "\n";
    for (std::size_t k = 0; k < r.lambdas.size(); ++k) {
        csv += fmt12(r.lambdas[k]) + "," + fmt12(r.fields[k]);
        for (const auto& curve : r.curves)
            csv += "," + fmt12(curve.concurrence[k]) + "," + fmt12(entanglement_of_formation(curve.concurrence[k]));
        csv += "\n";
    }
    json curves = json::array();
    for (const auto& curve : r.curves)
        curves.push_back({{"pair", pair_label(curve.pair)},
                          {"argmax_lambda", curve.argmax_lambda},
                          {"max_concurrence", curve.max_concurrence},
                          {"steepest_lambda", curve.steepest_lambda},
                          {"max_slope", curve.max_slope}});
    json summary{{"command", "sweep"}, {"points", r.lambdas.size()}, {"curves", curves}};
    return detail::finish(c, "sweep.csv", csv, summary, started);
}

inline OutputBundle thermal_scan_cmd(const RunConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    const SpinLattice lat = resolve_lattice(c.lattice);
    validate(c, lat);
    ThermalScanSpec spec;
    spec.field = initial_field(c.schedule, 0.0);
    if (c.thermal_mode == "evolved") spec.schedule = c.schedule;
    spec.kt_grid = c.kt_grid ? *c.kt_grid : Grid{0.0, 2.5, 0.25}.values();
    spec.pairs = c.pairs;
    spec.threshold = c.threshold;
    spec.dt = c.dt;
    spec.t_end = c.t_end;
    spec.sample_every = c.sample_every;
    spec.window_fraction = c.window_fraction;
    spec.cutoff = c.cutoff;
    const ThermalScan scan = critical_temperature_scan(lat, c.J, spec);

    std::string csv = "kT,retained_states";
    for (const auto& p : c.pairs) csv += "," + csv_field("C" + pair_label(p));
    csv += "\n";
    for (std::size_t k = 0; k < scan.kt.size(); ++k) {
        csv += fmt12(scan.kt[k]) + "," + std::to_string(scan.retained_states[k]);
        for (std::size_t p = 0; p < c.pairs.size(); ++p) csv += "," + fmt12(scan.concurrence[p][k]);
        csv += "\n";
    }
    json tstar = json::object();
    for (std::size_t p = 0; p < c.pairs.size(); ++p)
        tstar["C" + pair_label(c.pairs[p])] = scan.critical_kt[p] ? json(*scan.critical_kt[p]) : json(nullptr);
    json summary{{"command", "thermal-scan"}, {"mode", c.thermal_mode}, {"field", spec.field},
                 {"threshold", c.threshold},  {"critical_kT", tstar},    {"gap", scan.gap}};
    return detail::finish(c, "thermal_scan.csv", csv, summary, started);
}

inline OutputBundle golden_rule_cmd(const RunConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    const SpinLattice lat = resolve_lattice(c.lattice);
    validate(c, lat);
    const GoldenRuleReport g = golden_rule_report(lat, c.J, initial_field(c.schedule, 0.0), c.schedule);
    std::string csv = "n,energy,sector,same_sector,sz_element,spectral_density,probability\n";
    for (std::size_t k = 0; k < g.excitations.size(); ++k) {
        const auto& e = g.excitations[k];
        csv += std::to_string(k + 1) + "," + fmt12(e.energy) + "," + "\"" + e.sector + "\"," +
               (e.same_sector ? "1" : "0") + "," + fmt12(e.sz_element) + "," + fmt12(e.spectral_density) + "," +
               fmt12(e.probability) + "\n";
    }
    json summary = detail::golden_rule_json(g);
    summary["command"] = "golden-rule";
    return detail::finish(c, "golden_rule.csv", csv, summary, started);
}

inline std::vector<BenchmarkCase> default_bench_suite() {
    return {{"step_5000", FieldSchedule::step(1.0, 2.0), 0.01, 50.0},
            {"exp_500", FieldSchedule::exponential(1.0, 2.0, 0.1), 0.01, 5.0}};
}

inline OutputBundle bench_cmd(const RunConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    const SpinLattice lat = resolve_lattice(c.lattice);
    validate(c, lat);
    const auto cases = c.bench_cases.empty() ? default_bench_suite() : c.bench_cases;
    const auto rows = benchmark_engines(lat, c.J, cases, c.repetitions);
    std::string csv = "name,segments,matrix_s,projection_s,speedup,residual,cache_hits,cache_misses\n";
    json jrows = json::array();
    for (const auto& r : rows) {
        csv += r.name + "," + std::to_string(r.segments) + "," + fmt12(r.matrix_seconds) + "," +
               fmt12(r.projection_seconds) + "," + fmt12(r.speedup) + "," + fmt12(r.residual) + "," +
               std::to_string(r.cache_hits) + "," + std::to_string(r.cache_misses) + "\n";
        jrows.push_back({{"name", r.name},
                         {"segments", r.segments},
                         {"matrix_s", r.matrix_seconds},
                         {"projection_s", r.projection_seconds},
                         {"speedup", r.speedup},
                         {"residual", r.residual},
                         {"repetitions", c.repetitions}});
    }
    json summary{{"command", "bench"}, {"cases", jrows}};
    return detail::finish(c, "bench.csv", csv, summary, started);
}

// gnuplot script for a CSV written by one of the commands: first column on
// x, every concurrence column as a line.
inline std::string gnuplot_script(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw ConfigError("cannot read " + csv.string());
    std::string header;
    std::getline(in, header);
    const auto cols = split_csv_line(header);
    if (cols.size() < 2) throw ConfigError(csv.string() + " has fewer than two columns");
    std::string plot;
    for (std::size_t k = 1; k < cols.size(); ++k) {
        const bool wanted = cols[k].rfind("C(", 0) == 0 || cols[k] == "probability" || cols[k] == "speedup";
        if (!wanted) continue;
        if (!plot.empty()) plot += ", \\\n     ";
        plot += "'" + csv.filename().string() + "' every ::1 using 1:" + std::to_string(k + 1) + " with lines title '" + cols[k] + "'";
    }
    if (plot.empty()) plot = "'" + csv.filename().string() + "' every ::1 using 1:2 with lines title '" + cols[1] + "'";
    std::string s;
    s += "set datafile separator ','\n";
    s += "set key top right\n";
    s += "set terminal pngcairo size 900,600\n";
    s += "set output '" + csv.stem().string() + ".png'\n";
    s += "set xlabel '" + cols[0] + "'\n";
    s += "set ylabel 'concurrence'\n";
    s += "plot " + plot + "\n";
    return s;
}

// Writes plot_<stem>.gp next to every known CSV in the output directory.
inline std::vector<std::filesystem::path> plots_cmd(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    for (const char* name : {"trajectory.csv", "sweep.csv", "thermal_scan.csv", "golden_rule.csv", "bench.csv"}) {
        const auto csv = dir / name;
        if (!std::filesystem::exists(csv)) continue;
        const auto gp = dir / ("plot_" + csv.stem().string() + ".gp");
        detail::write_text(gp, gnuplot_script(csv));
        written.push_back(gp);
    }
    if (written.empty()) throw ConfigError("no CSV outputs found in " + dir.string());
    return written;
}

} // namespace tfim
