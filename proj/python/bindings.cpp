#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hskdv/config.hpp"
#include "hskdv/runner.hpp"
#include "hskdv/sentinel_audit.hpp"
#include "hskdv/sources.hpp"

namespace py = pybind11;
using namespace hskdv;

namespace {

py::array_t<double> to_numpy(const Field& f) {
    py::array_t<double> a({f.rows(), f.cols()});
    std::copy(f.data().begin(), f.data().end(), a.mutable_data());
    return a;
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
    py::array_t<double> a(py::ssize_t(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

ExperimentConfig cfg_from(const std::string& text, const Overrides& ov) { return parse_config(text, ov); }

} // namespace

PYBIND11_MODULE(_hskdv, m) {
    m.doc() = "coupled KdV cascade: solvers, null controls, sentinel checks";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    m.attr("subcommands") = subcommands();

    m.def("canonical_config", [](const std::string& text, const Overrides& ov) { return cfg_from(text, ov).canonical(); },
          py::arg("text"), py::arg("overrides") = Overrides{});
    m.def("config_hash", [](const std::string& text, const Overrides& ov) { return cfg_from(text, ov).hash(); },
          py::arg("text"), py::arg("overrides") = Overrides{});

    m.def(
        "run",
        [](const std::string& sub, const std::string& text, const Overrides& ov, const std::string& root) {
            const auto cfg = cfg_from(text, ov);
            py::gil_scoped_release nogil;
            return run_command(sub, cfg, output_root(root));
        },
        py::arg("subcommand"), py::arg("config_text"), py::arg("overrides") = Overrides{}, py::arg("root") = "",
        "run a subcommand, returns the run directory");

    m.def(
        "simulate",
        [](const std::string& text, const Overrides& ov) {
            const auto cfg = cfg_from(text, ov);
            const auto pb = make_problem(cfg);
            const std::map<std::string, KdvOperatorSpec> specs = {
                {"u", ops::u}, {"v", ops::v}, {"p", ops::p}, {"q", ops::q},
                {"eta", ops::eta}, {"psi", ops::psi}, {"zeta", ops::zeta}, {"theta", ops::theta}};
            const auto it = specs.find(cfg.sim_field);
            if (it == specs.end()) throw ConfigError("config: key 'sim_field' must name one of the eight fields");
            const auto init = bump_profile(pb.grid, cfg.sim_center, cfg.sim_width);
            const Field y = solve_linear_kdv(it->second, pb.grid, pb.tgrid, init, pb.zeros(), pb.theta);
            return py::make_tuple(to_numpy(pb.tgrid.t), to_numpy(pb.grid.x), to_numpy(y));
        },
        py::arg("config_text"), py::arg("overrides") = Overrides{}, "unforced scalar solve from a bump, returns (t, x, y)");

    m.def(
        "weight_gap",
        [](const std::string& text, const Overrides& ov) {
            const auto cfg = cfg_from(text, ov);
            const auto pb = make_problem(cfg);
            return weight_gap_check(make_weights(cfg, pb)).c0;
        },
        py::arg("config_text"), py::arg("overrides") = Overrides{});

    m.def(
        "duality_defect",
        [](const std::string& text, const Overrides& ov) {
            const auto cfg = cfg_from(text, ov);
            return duality_pairing_check(make_problem(cfg), cfg.trials, cfg.seed).max_defect;
        },
        py::arg("config_text"), py::arg("overrides") = Overrides{});

    m.def(
        "control_linear",
        [](const std::string& text, const Overrides& ov) {
            const auto cfg = cfg_from(text, ov);
            const auto pb = make_problem(cfg);
            const auto w = make_weights(cfg, pb);
            Sources f = zero_sources(pb);
            f[2] = admissible_source(pb, cfg.f3_amplitude, cfg.f3_center, cfg.source_width, source_rate(cfg, w));
            const auto r = synthesize_null_control(pb, f, hum_config(cfg));
            py::dict d;
            d["pq0_norm"] = r.report.pq0_norm;
            d["pq0_uncontrolled"] = r.report.pq0_uncontrolled;
            d["baseline_max_t"] = r.report.baseline_max_t;
            d["iterations"] = r.report.iterations;
            d["h1"] = to_numpy(r.h.h1);
            d["h2"] = to_numpy(r.h.h2);
            d["p0"] = to_numpy(std::vector<double>(r.state.p.row(0).begin(), r.state.p.row(0).end()));
            return d;
        },
        py::arg("config_text"), py::arg("overrides") = Overrides{});
}
