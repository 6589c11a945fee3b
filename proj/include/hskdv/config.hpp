#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hskdv/cascade.hpp"
#include "hskdv/control.hpp"
#include "hskdv/nonlinear.hpp"
#include "hskdv/weights.hpp"

namespace hskdv {

struct ExperimentConfig {
    // geometry and grids
    double L = 1.0;
    Interval omega{0.45, 0.8}, obs{0.2, 0.6}, omega0{0.48, 0.56};
    int N = 64, M = 128;
    double T = 0.5;
    double theta = 0.5;
    // weights
    double s = 1.0;
    // control
    double eps = 1e-6, cg_tol = 1e-10;
    int cg_max = 500;
    bool precond = false;
    // nonlinear
    double R = 1.0, picard_tol = 1e-13;
    int picard_max = 50;
    int outer_max = 10;
    double outer_tol = 1e-6, target_ratio = 1e-3;
    // sources: A exp(-a/t) bump(center, width); a = 0 picks the smallest admissible rate plus 10%
    double amplitude = 1e-3;       // xi1, xi2
    double f3_amplitude = 1e-2;    // linear control run
    double source_rate = 0.0;
    double xi1_center = 0.3, xi2_center = 0.7, f3_center = 0.4, source_width = 0.15;
    // sentinel
    double tau = 1e-3;
    int trials = 5;
    bool zero_control = false;
    // audits
    int ensemble = 20;
    std::uint64_t seed = 1;
    // simulate / cascade
    std::string sim_field = "u";
    double sim_center = 0.3, sim_width = 0.15, sim_source_amplitude = 0.0;
    std::string cascade_system = "extended";

    // canonical key = value text, the thing that gets hashed and archived
    std::string canonical() const;
    std::string hash() const;
};

using Overrides = std::map<std::string, std::string>;

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});
void validate_geometry(const ExperimentConfig& c);

Problem make_problem(const ExperimentConfig& c);
WeightSet make_weights(const ExperimentConfig& c, const Problem& pb);
HumConfig hum_config(const ExperimentConfig& c);
PicardConfig picard_config(const ExperimentConfig& c);
OuterConfig outer_config(const ExperimentConfig& c);
double source_rate(const ExperimentConfig& c, const WeightSet& w);

} // namespace hskdv
