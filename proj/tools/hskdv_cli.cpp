#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hskdv/runner.hpp"

namespace {

std::string fmt(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchic insensitizing control for coupled KdV cascades"};
    app.require_subcommand(1, 1);

    std::string config_path, out;
    std::vector<std::string> sets;
    std::optional<double> eps, s, amplitude, tau;
    std::optional<int> grid_n, grid_m;
    std::optional<std::uint64_t> seed;
    bool zero_control = false;

    for (const auto& name : hskdv::subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "key = value config file")->required();
        sub->add_option("--eps", eps, "HUM penalty");
        sub->add_option("--grid-n", grid_n, "interior nodes");
        sub->add_option("--grid-m", grid_m, "time steps");
        sub->add_option("--seed", seed);
        sub->add_option("--s", s, "Carleman parameter");
        sub->add_option("--amplitude", amplitude, "xi1/xi2 amplitude");
        sub->add_option("--tau", tau, "perturbation size");
        sub->add_option("--set", sets, "override any key, key=value (repeatable)");
        sub->add_option("--out", out, "output root");
        sub->add_flag("--zero-control", zero_control, "insensitize: skip control synthesis");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hskdv::kExitConfig;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();

    hskdv::Overrides ov;
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "config error: --set expects key=value, got '" << kv << "'\n";
            return hskdv::kExitConfig;
        }
        ov[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (eps) ov["eps"] = fmt(*eps);
    if (s) ov["s"] = fmt(*s);
    if (amplitude) ov["amplitude"] = fmt(*amplitude);
    if (tau) ov["tau"] = fmt(*tau);
    if (grid_n) ov["N"] = std::to_string(*grid_n);
    if (grid_m) ov["M"] = std::to_string(*grid_m);
    if (seed) ov["seed"] = std::to_string(*seed);
    if (zero_control) ov["zero_control"] = "1";

    hskdv::ExperimentConfig cfg;
    try {
        cfg = hskdv::load_config(config_path, ov);
    } catch (const hskdv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return hskdv::kExitConfig;
    }
    return hskdv::run(cmd, cfg, hskdv::output_root(out));
}
