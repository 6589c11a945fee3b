#pragma once

#include <span>
#include <string>
#include <vector>

#include "hskdv/cascade.hpp"
#include "hskdv/weights.hpp"

namespace hskdv {

struct HumConfig {
    double eps = 1e-6;
    double cg_tol = 1e-10;   // relative to ||b||
    int cg_max = 500;
    double s = 1.0;          // only used by reports
    bool precond = false;    // diagonal mass scaling
};

struct HumReport {
    double pq0_norm = 0;             // controlled ||(p(0),q(0))||
    double pq0_uncontrolled = 0;
    double baseline_max_t = 0;       // max_t ||(p,q)|| of the uncontrolled run
    int iterations = 0;
    double residual = 0;             // final relative CG residual
    std::vector<double> residual_history;
    std::vector<double> functional_history;
};

struct HumResult {
    ControlPair h;
    CascadeState state;
    HumReport report;
    std::vector<double> zeta0, theta0;   // minimizer, N+2 each
};

// adjoint data Phi = (zeta0, theta0) as 2N interior values
std::vector<double> pack(std::span<const double> zeta0, std::span<const double> theta0, const Problem& pb);
void unpack(std::span<const double> phi, std::vector<double>& zeta0, std::vector<double>& theta0, const Problem& pb);
double phi_dot(std::span<const double> a, std::span<const double> b, const Problem& pb);

ControlPair controls_from_adjoint(const Problem& pb, const AdjointState& ad);

// Phi -> (p(0), q(0)) driven by the controls 1_w (eta, psi); symmetric PSD
std::vector<double> gramian_apply(const Problem& pb, std::span<const double> phi);
// (p(0), q(0)) of the uncontrolled run with sources f
std::vector<double> free_response(const Problem& pb, const Sources& f);

double hum_functional(const Problem& pb, const Sources& f, double eps, std::span<const double> phi);
std::vector<double> hum_gradient(const Problem& pb, const Sources& f, double eps, std::span<const double> phi);

double pq0_norm(const Problem& pb, const CascadeState& s);
double pq_max_t(const Problem& pb, const CascadeState& s);

HumResult synthesize_null_control(const Problem& pb, const Sources& f, const HumConfig& cfg);

struct ENormEntry {
    std::string name;
    double log10_value = 0;   // -inf for an exact zero
    double value = 0;         // may be inf when the log is beyond double range
    bool non_decay = false;   // dominated by the first interior time sample
};

std::vector<ENormEntry> space_E_report(const Problem& pb, const CascadeState& state, const ControlPair& h,
                                       const WeightSet& w);

} // namespace hskdv
