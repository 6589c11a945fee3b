#pragma once

#include <array>
#include <span>
#include <vector>

#include "hskdv/cascade.hpp"
#include "hskdv/control.hpp"

namespace hskdv {

struct PicardConfig {
    double R = 1.0;         // ball radius in the working norm
    double tol = 1e-13;     // increment tolerance
    int max_iter = 50;
};

struct PicardHistory {
    std::vector<double> increments;   // working norm of iterate differences
    std::vector<double> ball_norms;   // working norm of each iterate
    std::vector<double> ratios() const;
    int iterations() const { return int(increments.size()); }
};

struct PicardResult {
    CascadeState state;
    PicardHistory history;
};

// frozen nonlinear sources of the map Lambda at a given iterate (xi not included)
Sources nonlinear_sources(const Problem& pb, const CascadeState& s);

// sum of yq_norm over u, v, p, q
double state_norm(const Problem& pb, const CascadeState& s);

PicardResult picard_solve_nonlinear(const Problem& pb, std::span<const double> u0, std::span<const double> v0,
                                    const ControlPair& h, const Field& xi1, const Field& xi2,
                                    const PicardConfig& cfg);

struct OuterConfig {
    int max_rounds = 10;
    double target_ratio = 1e-3;   // ||(p(0),q(0))|| <= target_ratio * baseline
    double control_tol = 1e-6;    // relative change of the control between rounds
};

struct OuterRound {
    double pq0 = 0;
    double control_change = 0;
    int cg_iterations = 0;
    int picard_iterations = 0;
};

struct NonlinearControlResult {
    ControlPair h;
    CascadeState state;
    std::vector<OuterRound> rounds;
    double baseline_max_t = 0;       // uncontrolled nonlinear run, max_t ||(p,q)||
    double pq0_uncontrolled = 0;
};

NonlinearControlResult nonlinear_null_control(const Problem& pb, const Field& xi1, const Field& xi2,
                                              const HumConfig& hum, const PicardConfig& pic,
                                              const OuterConfig& outer = {});

// discrete residual of the nonlinear extended system; data xi1, xi2 are moved to the left when given
std::array<Field, 4> residual_Y(const Problem& pb, const CascadeState& s, const ControlPair& h,
                                const Field* xi1 = nullptr, const Field* xi2 = nullptr);

// L2(0,T;L2) over the interval residuals
double residual_norm(const Problem& pb, const Field& r);

struct AmplitudeProbe {
    double last_convergent = 0;
    double first_divergent = 0;
    std::vector<std::pair<double, bool>> probes;
};

// bisection in log-amplitude for the largest amplitude at which Picard still converges
// for data amplitude * (xi1_shape, xi2_shape)
AmplitudeProbe bisect_divergence_amplitude(const Problem& pb, const Field& xi1_shape, const Field& xi2_shape,
                                           const PicardConfig& cfg, double lo, double hi, int rounds);

} // namespace hskdv
