#include "hskdv/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "hskdv/sources.hpp"

namespace hskdv {

Problem make_problem(double L, int N, double T, int M, Interval omega, Interval obs, Interval omega0,
                     double theta) {
    Problem pb;
    pb.grid = make_grid(L, N);
    pb.tgrid = make_time_grid(T, M);
    pb.omega = omega;
    pb.obs = obs;
    pb.omega0 = omega0;
    pb.m_omega = indicator_mask(omega.a, omega.b, pb.grid);
    pb.m_obs = indicator_mask(obs.a, obs.b, pb.grid);
    pb.m_omega0 = indicator_mask(omega0.a, omega0.b, pb.grid);
    if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("theta must lie in [1/2, 1]");
    pb.theta = theta;
    return pb;
}

Sources zero_sources(const Problem& pb) { return {pb.zeros(), pb.zeros(), pb.zeros(), pb.zeros()}; }

namespace {

Field add_masked(const Field& base, const Field& x, std::span<const double> mask) {
    Field out = base;
    for (int k = 0; k < out.rows(); ++k) {
        auto o = out.row(k);
        auto r = x.row(k);
        for (int j = 0; j < out.cols(); ++j) o[j] += mask[j] * r[j];
    }
    return out;
}

} // namespace

CascadeState solve_extended_linear(const Problem& pb, std::span<const double> u0, std::span<const double> v0,
                                   const ControlPair& h, const Sources& f) {
    const auto& g = pb.grid;
    const auto& tg = pb.tgrid;
    CascadeState s;
    s.u = solve_linear_kdv(ops::u, g, tg, u0, add_masked(f[0], h.h1, pb.m_omega), pb.theta);
    s.v = solve_linear_kdv(ops::v, g, tg, v0, add_masked(f[1], h.h2, pb.m_omega), pb.theta);
    const auto zero = pb.zero_slice();
    s.p = solve_linear_kdv(ops::p, g, tg, zero, add_masked(f[2], s.u, pb.m_obs), pb.theta);
    s.q = solve_linear_kdv(ops::q, g, tg, zero, add_masked(f[3], s.v, pb.m_obs), pb.theta);
    return s;
}

AdjointState solve_adjoint_masked(const Problem& pb, std::span<const double> zeta0, std::span<const double> theta0,
                                  const Sources& g, std::span<const double> obs_mask) {
    const auto& gr = pb.grid;
    const auto& tg = pb.tgrid;
    AdjointState a;
    a.zeta = solve_linear_kdv(ops::zeta, gr, tg, zeta0, g[2], pb.theta);
    a.theta = solve_linear_kdv(ops::theta, gr, tg, theta0, g[3], pb.theta);
    const auto zero = pb.zero_slice();
    a.eta = solve_linear_kdv(ops::eta, gr, tg, zero, add_masked(g[0], a.zeta, obs_mask), pb.theta);
    a.psi = solve_linear_kdv(ops::psi, gr, tg, zero, add_masked(g[1], a.theta, obs_mask), pb.theta);
    return a;
}

AdjointState solve_adjoint(const Problem& pb, std::span<const double> zeta0, std::span<const double> theta0,
                           const Sources& g) {
    return solve_adjoint_masked(pb, zeta0, theta0, g, pb.m_obs);
}

double slice_dot(std::span<const double> a, std::span<const double> b, const Problem& pb) {
    double s = 0;
    for (int j = 1; j <= pb.grid.N; ++j) s += a[j] * b[j];
    return s * pb.grid.dx;
}

double st_pair_masked(const Field& a, const Field& b, std::span<const double> mask, const Problem& pb,
                      TimeRule rule) {
    const int M = pb.tgrid.M, N = pb.grid.N;
    double total = 0;
    if (rule == TimeRule::IntervalAverage) {
        for (int k = 0; k < M; ++k) {
            double s = 0;
            for (int j = 1; j <= N; ++j)
                s += mask[j] * 0.25 * (a(k, j) + a(k + 1, j)) * (b(k, j) + b(k + 1, j));
            total += s;
        }
    } else {
        for (int k = 0; k <= M; ++k) {
            double wk = 1.0;
            if (rule == TimeRule::Trapezoid && (k == 0 || k == M)) wk = 0.5;
            if (rule == TimeRule::Rectangle && k == M) wk = 0.0;
            double s = 0;
            for (int j = 1; j <= N; ++j) s += mask[j] * a(k, j) * b(k, j);
            total += wk * s;
        }
    }
    return total * pb.tgrid.dt * pb.grid.dx;
}

double st_pair(const Field& a, const Field& b, const Problem& pb, TimeRule rule) {
    const std::vector<double> ones(pb.grid.N + 2, 1.0);
    return st_pair_masked(a, b, ones, pb, rule);
}

DualityReport duality_pairing_check(const Problem& pb, int trials, std::uint64_t seed, TimeRule rule) {
    if (trials < 1) throw ConfigError("duality check: trials must be >= 1");
    DualityReport rep;
    Rng rng(seed);
    const auto f0 = zero_sources(pb);
    const auto zero = pb.zero_slice();
    for (int t = 0; t < trials; ++t) {
        ControlPair h{random_field(pb, rng), random_field(pb, rng)};
        const auto z0 = random_slice(pb.grid, rng);
        const auto th0 = random_slice(pb.grid, rng);
        const auto st = solve_extended_linear(pb, zero, zero, h, f0);
        const auto ad = solve_adjoint(pb, z0, th0, f0);
        const double lhs = slice_dot(st.p.row(0), z0, pb) + slice_dot(st.q.row(0), th0, pb);
        const double rhs = st_pair_masked(h.h1, ad.eta, pb.m_omega, pb, rule) +
                           st_pair_masked(h.h2, ad.psi, pb.m_omega, pb, rule);
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        const double d = scale > 0 ? std::abs(lhs - rhs) / scale : 0.0;
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.defect.push_back(d);
        rep.max_defect = std::max(rep.max_defect, d);
    }
    return rep;
}

} // namespace hskdv
