#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfim/runner.hpp"

namespace {

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::string> engine;
    std::optional<std::string> sector;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> pairs;
    std::optional<double> kt;
    std::optional<std::uint64_t> seed;
};

tfim::RunConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw tfim::ConfigError("cannot read config " + path);
    tfim::json j;
    try {
        j = tfim::json::parse(in);
    } catch (const tfim::json::exception& e) {
        throw tfim::ConfigError("config " + path + ": " + e.what());
    }
    return tfim::config_from_json(j);
}

void apply(tfim::RunConfig& c, const Overrides& o) {
    if (o.out) c.out = *o.out;
    if (o.engine) c.engine = tfim::parse_engine(*o.engine);
    if (o.sector) {
        if (*o.sector != "auto") throw tfim::ConfigError("--sector only accepts \"auto\"");
        c.engine = tfim::Engine::Sector;
    }
    if (o.dt) c.dt = *o.dt;
    if (o.t_end) c.t_end = *o.t_end;
    if (o.pairs) c.pairs = tfim::parse_pairs(*o.pairs);
    if (o.kt) c.kt = *o.kt;
    if (o.seed) c.seed = *o.seed;
}

int dispatch(const std::string& cmd, const tfim::RunConfig& c) {
    tfim::OutputBundle b;
    if (cmd == "run") b = tfim::run(c);
    else if (cmd == "sweep") b = tfim::sweep(c);
    else if (cmd == "thermal-scan") b = tfim::thermal_scan_cmd(c);
    else if (cmd == "golden-rule") b = tfim::golden_rule_cmd(c);
    else if (cmd == "bench") b = tfim::bench_cmd(c);
    else throw tfim::ConfigError("unknown command " + cmd);
    if (b.exit_code == 3) std::cerr << "error: dt halving exhausted without convergence (" << c.out << ")\n";
    return b.exit_code;
}

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const tfim::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const tfim::UnsupportedError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const tfim::NumericalError& err) {
        std::cerr << "numerical error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise entanglement dynamics of the 7-site transverse Ising model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tfim::kVersion));

    std::vector<std::string> configs;
    Overrides o;
    const std::vector<std::string> commands{"run", "sweep", "thermal-scan", "golden-rule", "bench"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", configs, "JSON run configuration (repeat for batch mode)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--engine", o.engine, "matrix|projection|sector");
        sub->add_option("--sector", o.sector, "\"auto\": evolve inside the initial state's symmetry sector");
        sub->add_option("--dt", o.dt, "time step");
        sub->add_option("--t-end", o.t_end, "final time");
        sub->add_option("--pairs", o.pairs, "site pairs, e.g. \"1,4;1,2\"");
        sub->add_option("--kt", o.kt, "temperature kT (0 = ground state)");
        sub->add_option("--seed", o.seed, "random seed");
    }
    std::string plot_dir;
    auto* plots = app.add_subcommand("plots", "write gnuplot scripts for the CSVs in a directory");
    plots->add_option("--out", plot_dir, "directory holding command outputs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (plots->parsed()) {
        try {
            for (const auto& p : tfim::plots_cmd(plot_dir)) std::cout << p.string() << "\n";
            return 0;
        } catch (...) {
            return exit_code_for(std::current_exception());
        }
    }

    std::string cmd;
    for (auto* sub : app.get_subcommands()) cmd = sub->get_name();

    if (configs.size() <= 1) {
        try {
            auto c = load_config(configs.empty() ? "" : configs.front());
            apply(c, o);
            return dispatch(cmd, c);
        } catch (...) {
            return exit_code_for(std::current_exception());
        }
    }

    // Batch: each config gets its own subdirectory under --out (or its own "out").
    std::vector<int> codes(configs.size(), 0);
    std::mutex log;
    tfim::parallel_for(configs.size(), [&](std::size_t k) {
        try {
            auto c = load_config(configs[k]);
            Overrides local = o;
            if (o.out) local.out = (std::filesystem::path(*o.out) / std::filesystem::path(configs[k]).stem()).string();
            apply(c, local);
            codes[k] = dispatch(cmd, c);
        } catch (...) {
            std::lock_guard<std::mutex> lock(log);
            std::cerr << configs[k] << ": ";
            codes[k] = exit_code_for(std::current_exception());
        }
    });
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}
