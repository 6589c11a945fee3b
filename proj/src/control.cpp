#include "hskdv/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hskdv/norms.hpp"

namespace hskdv {

std::vector<double> pack(std::span<const double> zeta0, std::span<const double> theta0, const Problem& pb) {
    const int N = pb.grid.N;
    std::vector<double> phi(2 * N);
    for (int j = 0; j < N; ++j) {
        phi[j] = zeta0[j + 1];
        phi[N + j] = theta0[j + 1];
    }
    return phi;
}

void unpack(std::span<const double> phi, std::vector<double>& zeta0, std::vector<double>& theta0, const Problem& pb) {
    const int N = pb.grid.N;
    zeta0.assign(N + 2, 0.0);
    theta0.assign(N + 2, 0.0);
    for (int j = 0; j < N; ++j) {
        zeta0[j + 1] = phi[j];
        theta0[j + 1] = phi[N + j];
    }
}

double phi_dot(std::span<const double> a, std::span<const double> b, const Problem& pb) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * pb.grid.dx;
}

ControlPair controls_from_adjoint(const Problem& pb, const AdjointState& ad) {
    return {masked(ad.eta, pb.m_omega), masked(ad.psi, pb.m_omega)};
}

std::vector<double> gramian_apply(const Problem& pb, std::span<const double> phi) {
    std::vector<double> z0, th0;
    unpack(phi, z0, th0, pb);
    const auto f0 = zero_sources(pb);
    const auto ad = solve_adjoint(pb, z0, th0, f0);
    const auto zero = pb.zero_slice();
    const auto st = solve_extended_linear(pb, zero, zero, {ad.eta, ad.psi}, f0);
    return pack(st.p.row(0), st.q.row(0), pb);
}

std::vector<double> free_response(const Problem& pb, const Sources& f) {
    const auto zero = pb.zero_slice();
    const auto st = solve_extended_linear(pb, zero, zero, {pb.zeros(), pb.zeros()}, f);
    return pack(st.p.row(0), st.q.row(0), pb);
}

double hum_functional(const Problem& pb, const Sources& f, double eps, std::span<const double> phi) {
    std::vector<double> z0, th0;
    unpack(phi, z0, th0, pb);
    const auto ad = solve_adjoint(pb, z0, th0, zero_sources(pb));
    double J = 0.5 * st_pair_masked(ad.eta, ad.eta, pb.m_omega, pb) +
               0.5 * st_pair_masked(ad.psi, ad.psi, pb.m_omega, pb) + 0.5 * eps * phi_dot(phi, phi, pb);
    J += st_pair(f[0], ad.eta, pb) + st_pair(f[1], ad.psi, pb) + st_pair(f[2], ad.zeta, pb) +
         st_pair(f[3], ad.theta, pb);
    return J;
}

std::vector<double> hum_gradient(const Problem& pb, const Sources& f, double eps, std::span<const double> phi) {
    auto g = gramian_apply(pb, phi);
    const auto b = free_response(pb, f);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += eps * phi[i] + b[i];
    return g;
}

double pq0_norm(const Problem& pb, const CascadeState& s) {
    const double a = l2_norm(s.p.row(0), pb.grid), b = l2_norm(s.q.row(0), pb.grid);
    return std::sqrt(a * a + b * b);
}

double pq_max_t(const Problem& pb, const CascadeState& s) {
    double m = 0;
    for (int k = 0; k <= pb.tgrid.M; ++k) {
        const double a = l2_norm(s.p.row(k), pb.grid), b = l2_norm(s.q.row(k), pb.grid);
        m = std::max(m, std::sqrt(a * a + b * b));
    }
    return m;
}

HumResult synthesize_null_control(const Problem& pb, const Sources& f, const HumConfig& cfg) {
    if (!(cfg.eps > 0)) throw ConfigError("control: eps must be positive");
    if (!(cfg.cg_tol > 0 && cfg.cg_tol < 1)) throw ConfigError("control: cg_tol must lie in (0,1)");
    if (cfg.cg_max < 1) throw ConfigError("control: cg_max must be >= 1");

    HumResult res;
    const auto zero = pb.zero_slice();
    const ControlPair none{pb.zeros(), pb.zeros()};
    const auto free_state = solve_extended_linear(pb, zero, zero, none, f);
    res.report.pq0_uncontrolled = pq0_norm(pb, free_state);
    res.report.baseline_max_t = pq_max_t(pb, free_state);
    const auto b = pack(free_state.p.row(0), free_state.q.row(0), pb);
    const std::size_t n = b.size();

    std::vector<double> x(n, 0.0);
    const double bnorm = std::sqrt(phi_dot(b, b, pb));
    if (bnorm > 0) {
        // mass diagonal is dx on every unknown
        const double minv = cfg.precond ? 1.0 / pb.grid.dx : 1.0;
        std::vector<double> r(n), z(n), d(n), Ad(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = -b[i];
        for (std::size_t i = 0; i < n; ++i) z[i] = minv * r[i];
        d = z;
        double rz = phi_dot(r, z, pb);
        bool done = false;
        for (int it = 1; it <= cfg.cg_max; ++it) {
            Ad = gramian_apply(pb, d);
            for (std::size_t i = 0; i < n; ++i) Ad[i] += cfg.eps * d[i];
            const double dAd = phi_dot(d, Ad, pb);
            if (!(dAd > 0) || !std::isfinite(dAd)) throw NumericError("control: CG curvature lost positivity");
            const double alpha = rz / dAd;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * d[i];
                r[i] -= alpha * Ad[i];
            }
            const double rel = std::sqrt(phi_dot(r, r, pb)) / bnorm;
            std::vector<double> bmr(n);
            for (std::size_t i = 0; i < n; ++i) bmr[i] = b[i] - r[i];
            res.report.functional_history.push_back(0.5 * phi_dot(x, bmr, pb));
            res.report.residual_history.push_back(rel);
            res.report.iterations = it;
            res.report.residual = rel;
            if (!std::isfinite(rel)) throw NumericError("control: non-finite CG residual");
            if (rel <= cfg.cg_tol) {
                done = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) z[i] = minv * r[i];
            const double rz_new = phi_dot(r, z, pb);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
        }
        if (!done) {
            std::ostringstream os;
            os << "control: CG stalled at relative residual " << res.report.residual << " after " << cfg.cg_max
               << " iterations";
            throw ConvergenceError(os.str(), res.report.residual_history);
        }
    }
    unpack(x, res.zeta0, res.theta0, pb);
    const auto ad = solve_adjoint(pb, res.zeta0, res.theta0, zero_sources(pb));
    res.h = controls_from_adjoint(pb, ad);
    res.state = solve_extended_linear(pb, zero, zero, res.h, f);
    res.report.pq0_norm = pq0_norm(pb, res.state);
    return res;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ENormEntry finish(const std::string& name, double log_norm, bool non_decay) {
    ENormEntry e;
    e.name = name;
    e.log10_value = log_norm / std::log(10.0);
    e.value = std::exp(log_norm);
    e.non_decay = non_decay;
    return e;
}

// weighted L2 in time of per-node squared norms; t_0 carries weight 0
ENormEntry weighted_l2(const std::string& name, const std::vector<double>& logw, const std::vector<double>& nsq,
                       const TimeGrid& tg) {
    double acc = kNegInf, best = kNegInf;
    int arg = -1;
    for (int k = 1; k <= tg.M; ++k) {
        if (!(nsq[k] > 0)) continue;
        const double q = (k == tg.M) ? 0.5 : 1.0;
        const double term = 2 * logw[k] + std::log(nsq[k] * q * tg.dt);
        acc = log_add(acc, term);
        if (term > best) best = term, arg = k;
    }
    return finish(name, 0.5 * acc, arg == 1);
}

ENormEntry weighted_linf(const std::string& name, const std::vector<double>& logw, const std::vector<double>& nsq,
                         const TimeGrid& tg) {
    double best = kNegInf;
    int arg = -1;
    for (int k = 1; k <= tg.M; ++k) {
        if (!(nsq[k] > 0)) continue;
        const double term = logw[k] + 0.5 * std::log(nsq[k]);
        if (term > best) best = term, arg = k;
    }
    return finish(name, best, arg == 1);
}

// L1 in time over intervals, interval weight from its finite end values
ENormEntry weighted_l1_intervals(const std::string& name, const std::vector<double>& logw, const Field& r,
                                 const Grid1D& g, const TimeGrid& tg) {
    double acc = kNegInf, best = kNegInf;
    int arg = -1;
    for (int k = 0; k < tg.M; ++k) {
        const double n = l2_norm(r.row(k), g);
        if (!(n > 0)) continue;
        const double a = logw[k], b = logw[k + 1];
        double lw;
        if (std::isfinite(a) && std::isfinite(b))
            lw = 0.5 * (a + b);
        else
            lw = std::isfinite(a) ? a : b;
        const double term = lw + std::log(n * tg.dt);
        acc = log_add(acc, term);
        if (term > best) best = term, arg = k;
    }
    return finish(name, acc, arg == 0);
}

} // namespace

std::vector<ENormEntry> space_E_report(const Problem& pb, const CascadeState& st, const ControlPair& h,
                                       const WeightSet& w) {
    const auto& g = pb.grid;
    const auto& tg = pb.tgrid;
    const int M = tg.M;
    const auto lw_hm1 = log_weight_expr(w, {6, -5, -6.5}, true);
    const auto lw_h = log_weight_expr(w, {18, -17, -28.5}, true);
    const auto lw_state = log_weight_expr(w, {18, -17, -30.5}, true);
    const auto lw_res = log_weight_expr(w, {0, 1, -0.5}, true);

    const HMinus1 hm1(g);
    const std::pair<const char*, const Field*> fields[4] = {{"u", &st.u}, {"v", &st.v}, {"p", &st.p}, {"q", &st.q}};
    std::vector<ENormEntry> out;
    std::vector<double> nsq(M + 1);

    for (auto [nm, f] : fields) {
        for (int k = 0; k <= M; ++k) nsq[k] = hm1.norm_sq(f->row(k));
        out.push_back(weighted_l2(std::string("state_L2Hm1_") + nm, lw_hm1, nsq, tg));
    }
    const std::pair<const char*, const Field*> ctrl[2] = {{"h1", &h.h1}, {"h2", &h.h2}};
    for (auto [nm, f] : ctrl) {
        const Field fm = masked(*f, pb.m_omega);
        for (int k = 0; k <= M; ++k) {
            const double n = l2_norm(fm.row(k), g);
            nsq[k] = n * n;
        }
        out.push_back(weighted_l2(std::string("control_L2_") + nm, lw_h, nsq, tg));
    }
    for (auto [nm, f] : fields) {
        for (int k = 0; k <= M; ++k) {
            const double n = l2_norm(f->row(k), g);
            nsq[k] = n * n;
        }
        out.push_back(weighted_linf(std::string("state_LinfL2_") + nm, lw_state, nsq, tg));
    }
    for (auto [nm, f] : fields) {
        for (int k = 0; k <= M; ++k) nsq[k] = h1_norm_sq(f->row(k), g);
        out.push_back(weighted_l2(std::string("state_L2H1_") + nm, lw_state, nsq, tg));
    }
    const Field ru = kdv_residual(ops::u, g, tg, st.u, masked(h.h1, pb.m_omega), pb.theta);
    const Field rv = kdv_residual(ops::v, g, tg, st.v, masked(h.h2, pb.m_omega), pb.theta);
    const Field rp = kdv_residual(ops::p, g, tg, st.p, masked(st.u, pb.m_obs), pb.theta);
    const Field rq = kdv_residual(ops::q, g, tg, st.q, masked(st.v, pb.m_obs), pb.theta);
    out.push_back(weighted_l1_intervals("residual_L1L2_u", lw_res, ru, g, tg));
    out.push_back(weighted_l1_intervals("residual_L1L2_v", lw_res, rv, g, tg));
    out.push_back(weighted_l1_intervals("residual_L1L2_p", lw_res, rp, g, tg));
    out.push_back(weighted_l1_intervals("residual_L1L2_q", lw_res, rq, g, tg));
    return out;
}

} // namespace hskdv
