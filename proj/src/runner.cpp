#include "hskdv/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "hskdv/norms.hpp"
#include "hskdv/sentinel_audit.hpp"
#include "hskdv/sources.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hskdv {

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"simulate", "cascade", "control-linear", "picard",
                                               "control-nonlinear", "insensitize", "audit-weights",
                                               "audit-observability"};
    return s;
}

std::string output_root(const std::string& explicit_root) {
    if (!explicit_root.empty()) return explicit_root;
    if (const char* e = std::getenv("HSKDV_OUTPUT_ROOT"); e && *e) return e;
    return "runs";
}

namespace {

std::string g17(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

// json cannot hold inf/nan; keep them readable as strings
json jnum(double d) {
    if (std::isfinite(d)) return d;
    if (std::isnan(d)) return "nan";
    return d > 0 ? "inf" : "-inf";
}

class RunDir {
public:
    RunDir(const std::string& root, const std::string& cmd, const ExperimentConfig& cfg) : cmd_(cmd), cfg_(cfg) {
        dir_ = fs::path(root) / (cmd + "-" + cfg.hash());
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("output: cannot create '" + dir_.string() + "': " + ec.message());
        summary_.open(dir_ / "summary.jsonl", std::ios::trunc);
        std::ofstream(dir_ / "config.txt") << cfg.canonical();
    }
    ~RunDir() {
        json m;
        m["subcommand"] = cmd_;
        m["config_hash"] = cfg_.hash();
        m["seed"] = cfg_.seed;
        m["config"] = cfg_.canonical();
        m["files"] = files_;
        std::ofstream(dir_ / "manifest.json") << m.dump(2) << "\n";
    }

    std::ofstream csv(const std::string& name) {
        files_.push_back(name);
        std::ofstream f(dir_ / name, std::ios::trunc);
        if (!f) throw ConfigError("output: cannot write " + (dir_ / name).string());
        return f;
    }

    void record(const json& j) { summary_ << j.dump() << "\n"; }

    void field(const std::string& name, const Field& y, const Problem& pb) {
        auto f = csv(name);
        f << "t";
        for (double x : pb.grid.x) f << "," << g17(x);
        f << "\n";
        for (int k = 0; k < y.rows(); ++k) {
            f << g17(pb.tgrid.t[k]);
            for (int j = 0; j < y.cols(); ++j) f << "," << g17(y(k, j));
            f << "\n";
        }
    }

    std::string path() const { return dir_.string(); }

private:
    std::string cmd_;
    const ExperimentConfig& cfg_;
    fs::path dir_;
    std::ofstream summary_;
    std::vector<std::string> files_{"summary.jsonl", "config.txt", "manifest.json"};
};

std::pair<Field, Field> make_xi(const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    const double a = source_rate(c, w);
    return {admissible_source(pb, c.amplitude, c.xi1_center, c.source_width, a),
            admissible_source(pb, c.amplitude, c.xi2_center, c.source_width, a)};
}

const KdvOperatorSpec& field_spec(const std::string& name) {
    static const std::map<std::string, KdvOperatorSpec> m = {
        {"u", ops::u}, {"v", ops::v}, {"p", ops::p}, {"q", ops::q},
        {"eta", ops::eta}, {"psi", ops::psi}, {"zeta", ops::zeta}, {"theta", ops::theta}};
    const auto it = m.find(name);
    if (it == m.end()) throw ConfigError("config: key 'sim_field' must name one of u v p q eta psi zeta theta");
    return it->second;
}

void pq0_csv(RunDir& rd, const Problem& pb, const CascadeState& ctrl, const CascadeState* free_state) {
    auto f = rd.csv("pq0.csv");
    f << "x,p0,q0" << (free_state ? ",p0_uncontrolled,q0_uncontrolled" : "") << "\n";
    for (int j = 0; j <= pb.grid.N + 1; ++j) {
        f << g17(pb.grid.x[j]) << "," << g17(ctrl.p(0, j)) << "," << g17(ctrl.q(0, j));
        if (free_state) f << "," << g17(free_state->p(0, j)) << "," << g17(free_state->q(0, j));
        f << "\n";
    }
}

void controls_csv(RunDir& rd, const Problem& pb, const ControlPair& h) {
    auto f = rd.csv("controls.csv");
    f << "t,x,h1,h2\n";
    for (int k = 0; k <= pb.tgrid.M; ++k)
        for (int j = 1; j <= pb.grid.N; ++j) {
            if (pb.m_omega[j] == 0) continue;
            f << g17(pb.tgrid.t[k]) << "," << g17(pb.grid.x[j]) << "," << g17(h.h1(k, j)) << ","
              << g17(h.h2(k, j)) << "\n";
        }
}

void cmd_simulate(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    const auto& spec = field_spec(c.sim_field);
    const auto init = bump_profile(pb.grid, c.sim_center, c.sim_width);
    const Field src = admissible_source(pb, c.sim_source_amplitude, c.sim_center, c.sim_width, source_rate(c, w));
    const Field y = solve_linear_kdv(spec, pb.grid, pb.tgrid, init, src, pb.theta);
    rd.field("field.csv", y, pb);
    const int M = pb.tgrid.M;
    double worst = 0;
    for (int s = 0; s < M; ++s) {
        const int a = spec.dir == Direction::Forward ? s : M - s, b = spec.dir == Direction::Forward ? s + 1 : M - s - 1;
        const double na = l2_norm(y.row(a), pb.grid), nb = l2_norm(y.row(b), pb.grid);
        worst = std::max(worst, (nb - na) / std::max(na, 1e-300));
    }
    rd.record({{"record", "simulate"},
               {"field", c.sim_field},
               {"a", spec.a},
               {"bc", to_string(spec.bc)},
               {"direction", to_string(spec.dir)},
               {"norm_start", l2_norm(init, pb.grid)},
               {"norm_end", l2_norm(y.row(spec.dir == Direction::Forward ? M : 0), pb.grid)},
               {"max_relative_growth_per_step", worst}});
}

void cmd_cascade(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    const auto zero = pb.zero_slice();
    if (c.cascade_system == "extended") {
        auto [xi1, xi2] = make_xi(c, pb, w);
        Sources f = zero_sources(pb);
        f[0] = xi1;
        f[1] = xi2;
        f[2] = admissible_source(pb, c.f3_amplitude, c.f3_center, c.source_width, source_rate(c, w));
        const auto st = solve_extended_linear(pb, zero, zero, {pb.zeros(), pb.zeros()}, f);
        rd.field("u.csv", st.u, pb);
        rd.field("v.csv", st.v, pb);
        rd.field("p.csv", st.p, pb);
        rd.field("q.csv", st.q, pb);
        rd.record({{"record", "cascade"}, {"system", "extended"}, {"pq0_norm", pq0_norm(pb, st)},
                   {"pq_max_t", pq_max_t(pb, st)}});
    } else {
        auto z0 = bump_profile(pb.grid, c.sim_center, c.sim_width);
        project_unit(z0, pb.grid);
        const auto ad = solve_adjoint(pb, z0, zero, zero_sources(pb));
        rd.field("eta.csv", ad.eta, pb);
        rd.field("psi.csv", ad.psi, pb);
        rd.field("zeta.csv", ad.zeta, pb);
        rd.field("theta.csv", ad.theta, pb);
        rd.record({{"record", "cascade"}, {"system", "adjoint"},
                   {"zeta_T_norm", l2_norm(ad.zeta.row(pb.tgrid.M), pb.grid)},
                   {"eta_0_norm", l2_norm(ad.eta.row(0), pb.grid)}});
    }
    const auto dual = duality_pairing_check(pb, c.trials, c.seed);
    rd.record({{"record", "duality"}, {"trials", c.trials}, {"max_defect", dual.max_defect}});
}

void e_report(RunDir& rd, const Problem& pb, const CascadeState& st, const ControlPair& h, const WeightSet& w) {
    for (const auto& e : space_E_report(pb, st, h, w))
        rd.record({{"record", "space_E"}, {"name", e.name}, {"log10", jnum(e.log10_value)}, {"value", jnum(e.value)},
                   {"non_decay", e.non_decay}});
}

void cmd_control_linear(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    Sources f = zero_sources(pb);
    f[2] = admissible_source(pb, c.f3_amplitude, c.f3_center, c.source_width, source_rate(c, w));
    const auto res = synthesize_null_control(pb, f, hum_config(c));
    const auto zero = pb.zero_slice();
    const auto free_state = solve_extended_linear(pb, zero, zero, {pb.zeros(), pb.zeros()}, f);
    controls_csv(rd, pb, res.h);
    pq0_csv(rd, pb, res.state, &free_state);
    const auto& r = res.report;
    rd.record({{"record", "control-linear"},
               {"eps", c.eps},
               {"pq0_norm", r.pq0_norm},
               {"pq0_uncontrolled", r.pq0_uncontrolled},
               {"baseline_max_t", r.baseline_max_t},
               {"ratio_to_baseline", r.pq0_norm / r.baseline_max_t},
               {"ratio_to_uncontrolled_pq0", r.pq0_norm / r.pq0_uncontrolled},
               {"cg_iterations", r.iterations},
               {"cg_residual", r.residual}});
    e_report(rd, pb, res.state, res.h, w);
}

void cmd_picard(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    auto [xi1, xi2] = make_xi(c, pb, w);
    const auto zero = pb.zero_slice();
    const ControlPair none{pb.zeros(), pb.zeros()};
    const auto res = picard_solve_nonlinear(pb, zero, zero, none, xi1, xi2, picard_config(c));
    auto f = rd.csv("history.csv");
    f << "iteration,increment,ball_norm,ratio\n";
    const auto rat = res.history.ratios();
    for (int i = 0; i < res.history.iterations(); ++i)
        f << i + 1 << "," << g17(res.history.increments[i]) << "," << g17(res.history.ball_norms[i]) << ","
          << (i > 0 ? g17(rat[i - 1]) : "") << "\n";
    const auto rY = residual_Y(pb, res.state, none, &xi1, &xi2);
    json rn = json::array();
    for (const auto& r : rY) rn.push_back(residual_norm(pb, r));
    rd.record({{"record", "picard"}, {"iterations", res.history.iterations()}, {"residual_norms", rn},
               {"state_norm", state_norm(pb, res.state)}});
}

void cmd_control_nonlinear(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    auto [xi1, xi2] = make_xi(c, pb, w);
    const auto res = nonlinear_null_control(pb, xi1, xi2, hum_config(c), picard_config(c), outer_config(c));
    auto f = rd.csv("history.csv");
    f << "round,pq0,control_change,cg_iterations,picard_iterations\n";
    for (std::size_t i = 0; i < res.rounds.size(); ++i) {
        const auto& r = res.rounds[i];
        f << i + 1 << "," << g17(r.pq0) << "," << g17(r.control_change) << "," << r.cg_iterations << ","
          << r.picard_iterations << "\n";
    }
    controls_csv(rd, pb, res.h);
    pq0_csv(rd, pb, res.state, nullptr);
    rd.record({{"record", "control-nonlinear"},
               {"rounds", res.rounds.size()},
               {"pq0_norm", res.rounds.back().pq0},
               {"pq0_uncontrolled", res.pq0_uncontrolled},
               {"baseline_max_t", res.baseline_max_t},
               {"ratio_to_baseline", res.rounds.back().pq0 / res.baseline_max_t}});
}

void cmd_insensitize(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    auto [xi1, xi2] = make_xi(c, pb, w);
    const auto pic = picard_config(c);
    ControlPair h{pb.zeros(), pb.zeros()};
    if (!c.zero_control) h = nonlinear_null_control(pb, xi1, xi2, hum_config(c), pic, outer_config(c)).h;
    const ControlPair none{pb.zeros(), pb.zeros()};
    Rng rng(c.seed);
    auto f = rd.csv("insensitize.csv");
    f << "trial,lhs,rhs,defect,uncontrolled_derivative,ratio\n";
    double worst = 0;
    for (int t = 0; t < c.trials; ++t) {
        const auto pert = make_perturbation(pb.grid, rng, c.tau);
        const auto d = duality_identity_check(pb, h, xi1, xi2, pert, pic);
        const double d0 = c.zero_control ? d.lhs : insensitivity_derivative(pb, none, xi1, xi2, pert, pic);
        const double ratio = std::abs(d.lhs) / std::abs(d0);
        worst = std::max(worst, ratio);
        f << t << "," << g17(d.lhs) << "," << g17(d.rhs) << "," << g17(d.defect) << "," << g17(d0) << ","
          << g17(ratio) << "\n";
        rd.record({{"record", "insensitize"}, {"trial", t}, {"derivative", d.lhs}, {"duality_rhs", d.rhs},
                   {"defect", d.defect}, {"uncontrolled_derivative", d0}});
    }
    rd.record({{"record", "insensitize-summary"}, {"zero_control", c.zero_control}, {"tau", c.tau},
               {"max_ratio_to_uncontrolled", jnum(worst)}});
}

void cmd_audit_weights(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    {
        auto f = rd.csv("beta.csv");
        f << "x,beta\n";
        for (int j = 0; j <= pb.grid.N + 1; ++j) f << g17(pb.grid.x[j]) << "," << g17(w.beta[j]) << "\n";
    }
    {
        auto f = rd.csv("temporal.csv");
        f << "t,xi,phi_star,phi_hat,gap_ratio,frakZ,frakS_star,frakS_hat\n";
        for (int k = 0; k <= pb.tgrid.M; ++k) {
            const double gap = (36 * w.phi_star[k] - 35 * w.phi_hat[k]) / w.xi[k];
            f << g17(pb.tgrid.t[k]) << "," << g17(w.xi[k]) << "," << g17(w.phi_star[k]) << "," << g17(w.phi_hat[k])
              << "," << (std::isfinite(w.xi[k]) ? g17(gap) : "") << "," << g17(w.frakZ[k]) << ","
              << g17(w.frakS_star[k]) << "," << g17(w.frakS_hat[k]) << "\n";
        }
    }
    const auto gap = weight_gap_check(w);
    const auto bc = check_beta(w, pb.grid, c.omega0.a, c.omega0.b);
    rd.record({{"record", "weights"}, {"K1", w.K1}, {"K2", w.K2}, {"M_const", w.M_const}, {"beta_max", w.beta_max},
               {"c0", gap.c0}, {"gap_ok", gap.ok}, {"beta_x0", bc.beta_x0}, {"beta_xL", bc.beta_xL},
               {"min_abs_beta_x_outside", bc.min_abs_beta_x_outside},
               {"max_beta_xx_outside", bc.max_beta_xx_outside}, {"beta_ok", bc.ok},
               {"source_rate", source_rate(c, w)}});
}

void ratio_csv(RunDir& rd, const std::string& name, const RatioStats& st) {
    auto f = rd.csv(name);
    f << "trial,lhs,rhs,ratio\n";
    for (std::size_t i = 0; i < st.ratio.size(); ++i)
        f << i << "," << g17(st.lhs[i]) << "," << g17(st.rhs[i]) << "," << g17(st.ratio[i]) << "\n";
}

void cmd_audit_observability(RunDir& rd, const ExperimentConfig& c, const Problem& pb, const WeightSet& w) {
    const auto car = carleman_ratio_audit(pb, w, c.ensemble, c.seed);
    const auto obs = observability_ratio_audit(pb, w, c.ensemble, c.seed);
    ratio_csv(rd, "carleman.csv", car);
    ratio_csv(rd, "observability.csv", obs);
    const double full = c.omega0.b - c.omega0.a;
    const std::vector<double> widths = {full, 0.5 * full, 0.25 * full, pb.grid.dx};
    const auto trend = observability_trend(pb, w, widths, std::min(c.ensemble, 5), c.seed);
    auto f = rd.csv("trend.csv");
    f << "omega0_width,max_ratio,median_ratio\n";
    for (const auto& r : trend) f << g17(r.width) << "," << g17(r.max_ratio) << "," << g17(r.median_ratio) << "\n";
    rd.record({{"record", "carleman"}, {"s", c.s}, {"max_ratio", car.max_ratio}, {"median_ratio", car.median_ratio},
               {"skipped", car.skipped}, {"all_finite", car.all_finite}});
    rd.record({{"record", "observability"}, {"s", c.s}, {"max_ratio", obs.max_ratio},
               {"median_ratio", obs.median_ratio}, {"skipped", obs.skipped}, {"all_finite", obs.all_finite}});
}

} // namespace

std::string run_command(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& root) {
    using Fn = void (*)(RunDir&, const ExperimentConfig&, const Problem&, const WeightSet&);
    static const std::map<std::string, Fn> table = {
        {"simulate", cmd_simulate},
        {"cascade", cmd_cascade},
        {"control-linear", cmd_control_linear},
        {"picard", cmd_picard},
        {"control-nonlinear", cmd_control_nonlinear},
        {"insensitize", cmd_insensitize},
        {"audit-weights", cmd_audit_weights},
        {"audit-observability", cmd_audit_observability},
    };
    const auto it = table.find(subcommand);
    if (it == table.end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
    const Problem pb = make_problem(cfg);
    const WeightSet w = make_weights(cfg, pb);
    RunDir rd(root, subcommand, cfg);
    it->second(rd, cfg, pb, w);
    return rd.path();
}

int run(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& root) {
    try {
        const auto dir = run_command(subcommand, cfg, root);
        std::cout << dir << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        for (double h : e.history) std::cerr << "  " << h << "\n";
        return kExitConvergence;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace hskdv
