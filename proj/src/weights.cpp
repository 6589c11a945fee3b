#include "hskdv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace hskdv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

WeightSet build_weights(const WeightConfig& cfg, const Grid1D& g, const TimeGrid& tg) {
    if (!(cfg.l0 > 0 && cfg.l0 < cfg.l1 && cfg.l1 < g.L)) {
        std::ostringstream os;
        os << "weights: omega0 = (" << cfg.l0 << ", " << cfg.l1 << ") must sit strictly inside (0, " << g.L << ")";
        throw ConfigError(os.str());
    }
    if (!(cfg.s > 0)) throw ConfigError("weights: s must be positive");
    if (std::abs(cfg.T - tg.T) > 1e-12 * tg.T) throw ConfigError("weights: T does not match the time grid");

    WeightSet w;
    w.s = cfg.s;
    w.T = tg.T;
    w.l_half = 0.5 * (cfg.l0 + cfg.l1);
    w.K2 = 4.0 / ((cfg.l1 - cfg.l0) * (cfg.l1 - cfg.l0));
    const double lh = w.l_half;
    w.M_const = std::max(1.0 - std::exp(-w.K2 * lh * lh), 1.0 - std::exp(-w.K2 * (g.L - lh) * (g.L - lh)));
    w.K1 = cfg.K1_override ? *cfg.K1_override : 1.0 / (70.0 * w.M_const);
    if (w.K1 < 0) throw ConfigError("weights: K1 must be non-negative");

    const int N = g.N, M = tg.M;
    w.beta.resize(N + 2);
    for (int j = 0; j <= N + 1; ++j) {
        const double d = g.x[j] - lh;
        w.beta[j] = 1.0 + w.K1 * (1.0 - std::exp(-w.K2 * d * d));
    }
    // the continuous max of beta is at an end point, and both ends are nodes
    w.beta_max = std::max(w.beta[0], w.beta[N + 1]);

    const double T = tg.T;
    w.xi.assign(M + 1, kInf);
    w.frakZ.assign(M + 1, kInf);
    for (int k = 1; k <= M; ++k) {
        const double t = tg.t[k];
        if (k < M) w.xi[k] = 1.0 / (t * (T - t));
        w.frakZ[k] = (t <= 0.5 * T * (1 + 1e-14)) ? 1.0 / (t * (T - t)) : 4.0 / (T * T);
    }
    w.phi = Field(M + 1, N + 2, kInf);
    w.frakS = Field(M + 1, N + 2, kInf);
    w.phi_star.assign(M + 1, kInf);
    w.phi_hat.assign(M + 1, kInf);
    w.frakS_star.assign(M + 1, kInf);
    w.frakS_hat.assign(M + 1, kInf);
    for (int k = 1; k <= M; ++k) {
        for (int j = 0; j <= N + 1; ++j) {
            if (k < M) w.phi(k, j) = w.xi[k] * w.beta[j];
            w.frakS(k, j) = w.frakZ[k] * w.beta[j];
        }
        // min beta = beta(l_half) = 1 whether or not l_half is a node
        if (k < M) {
            w.phi_star[k] = w.xi[k];
            w.phi_hat[k] = w.xi[k] * w.beta_max;
        }
        w.frakS_star[k] = w.frakZ[k];
        w.frakS_hat[k] = w.frakZ[k] * w.beta_max;
    }
    w.c0 = weight_gap_check(w).c0;
    return w;
}

GapResult weight_gap_check(const WeightSet& w) {
    GapResult r;
    r.c0 = kInf;
    for (std::size_t k = 1; k + 1 < w.xi.size(); ++k)
        r.c0 = std::min(r.c0, (36.0 * w.phi_star[k] - 35.0 * w.phi_hat[k]) / w.xi[k]);
    r.ok = r.c0 > 0;
    return r;
}

BetaChecks check_beta(const WeightSet& w, const Grid1D& g, double l0, double l1) {
    BetaChecks c;
    // beta - 1 - K1 = -K1 e with e = exp(-K2 d^2); far from omega0 beta rounds to a constant,
    // so the differences are taken on e where they stay representable.
    // end points use the 3-point one-sided second difference: e changes by ~1e4 per cell there
    // and the 4-point one loses the sign
    const int n = g.N + 1;
    std::vector<double> e(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double d = g.x[j] - w.l_half;
        e[j] = std::exp(-w.K2 * d * d);
    }
    const double h = g.dx, k = -w.K1;
    c.beta_x0 = k * (e[1] - e[0]) / h;
    c.beta_xL = k * (e[n] - e[n - 1]) / h;
    c.min_abs_beta_x_outside = kInf;
    c.max_beta_xx_outside = -kInf;
    for (int j = 0; j <= n; ++j) {
        const double x = g.x[j];
        if (x >= l0 && x <= l1) continue;
        double bx, bxx;
        if (j == 0) {
            bx = c.beta_x0;
            bxx = k * (e[0] - 2 * e[1] + e[2]) / (h * h);
        } else if (j == n) {
            bx = c.beta_xL;
            bxx = k * (e[n] - 2 * e[n - 1] + e[n - 2]) / (h * h);
        } else {
            bx = k * (e[j + 1] - e[j - 1]) / (2 * h);
            bxx = k * (e[j + 1] - 2 * e[j] + e[j - 1]) / (h * h);
        }
        c.min_abs_beta_x_outside = std::min(c.min_abs_beta_x_outside, std::abs(bx));
        c.max_beta_xx_outside = std::max(c.max_beta_xx_outside, bxx);
    }
    c.ok = c.beta_x0 < 0 && c.beta_xL > 0 && c.max_beta_xx_outside < 0 && *std::min_element(w.beta.begin(), w.beta.end()) > 0;
    return c;
}

bool recipe_blows_up(const WeightSet& w, const WeightRecipe& r) {
    // near t = 0 both S* and S^ behave like 1/(tT), with S^ = beta_max S*
    const double c = r.a_star + r.b_hat * w.beta_max;
    const double scale = std::abs(r.a_star) + std::abs(r.b_hat) * w.beta_max;
    if (c > 1e-13 * scale) return true;
    if (c < -1e-13 * scale) return false;
    return r.z_pow > 0;
}

std::vector<double> log_weight_expr(const WeightSet& w, const WeightRecipe& r, bool allow_blowup) {
    const bool up = recipe_blows_up(w, r);
    if (up && !allow_blowup) {
        std::ostringstream os;
        os << "weights: recipe exp(" << r.a_star << " s S* + " << r.b_hat << " s S^) Z^" << r.z_pow
           << " blows up as t -> 0";
        throw ConfigError(os.str());
    }
    const std::size_t n = w.frakZ.size();
    std::vector<double> out(n);
    const double c = r.a_star + r.b_hat * w.beta_max;
    const double scale = std::abs(r.a_star) + std::abs(r.b_hat) * w.beta_max;
    if (up)
        out[0] = kInf;
    else if (c < -1e-13 * scale || r.z_pow < 0)
        out[0] = -kInf;
    else
        out[0] = 0.0;   // exponent cancels and no Z power
    for (std::size_t k = 1; k < n; ++k)
        out[k] = w.s * (r.a_star * w.frakS_star[k] + r.b_hat * w.frakS_hat[k]) + r.z_pow * std::log(w.frakZ[k]);
    return out;
}

std::vector<double> eval_weight_expr(const WeightSet& w, const WeightRecipe& r, bool allow_blowup) {
    auto out = log_weight_expr(w, r, allow_blowup);
    for (double& v : out) v = std::exp(v);
    return out;
}

} // namespace hskdv
