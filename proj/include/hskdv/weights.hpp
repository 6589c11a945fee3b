#pragma once

#include <optional>
#include <vector>

#include "hskdv/discretization.hpp"

namespace hskdv {

struct WeightConfig {
    double l0 = 0.48, l1 = 0.56;   // omega0
    double s = 1.0;
    double T = 0.5;
    std::optional<double> K1_override;   // only for probing the gap condition
};

// temporal vectors have M+1 entries; xi, frakZ, phi* etc are +inf where the
// weight is singular (t_0, and t_M for xi-based ones)
struct WeightSet {
    double K1 = 0, K2 = 0, M_const = 0, s = 1, T = 0, l_half = 0;
    double beta_max = 1;         // max(beta(0), beta(L))
    std::vector<double> beta;    // N+2
    std::vector<double> xi;
    std::vector<double> frakZ;
    Field phi;                   // xi * beta
    Field frakS;                 // frakZ * beta
    std::vector<double> phi_star, phi_hat, frakS_star, frakS_hat;
    double c0 = 0;               // filled by weight_gap_check
};

WeightSet build_weights(const WeightConfig& cfg, const Grid1D& g, const TimeGrid& tg);

struct GapResult {
    double c0 = 0;
    bool ok = false;
};
GapResult weight_gap_check(const WeightSet& w);

// discrete shape checks on beta
struct BetaChecks {
    double beta_x0 = 0, beta_xL = 0;   // one-sided
    double min_abs_beta_x_outside = 0; // reported, the constant c is never asserted
    double max_beta_xx_outside = 0;    // must be < 0
    bool ok = false;
};
BetaChecks check_beta(const WeightSet& w, const Grid1D& g, double l0, double l1);

// exp(a*s*S* + b*s*S^) * Z^p
struct WeightRecipe {
    double a_star = 0;
    double b_hat = 0;
    double z_pow = 0;
};

// log of the recipe at every time node; -inf / +inf at t_0 by continuous extension
std::vector<double> log_weight_expr(const WeightSet& w, const WeightRecipe& r, bool allow_blowup = false);
// plain values; recipes that blow up at t -> 0 are rejected unless allow_blowup
std::vector<double> eval_weight_expr(const WeightSet& w, const WeightRecipe& r, bool allow_blowup = false);
// true when the recipe grows without bound as t -> 0+
bool recipe_blows_up(const WeightSet& w, const WeightRecipe& r);

} // namespace hskdv
