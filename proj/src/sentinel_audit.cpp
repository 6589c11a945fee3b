#include "hskdv/sentinel_audit.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "hskdv/norms.hpp"

namespace hskdv {

PerturbationSpec make_perturbation(const Grid1D& g, Rng& rng, double tau) {
    PerturbationSpec p;
    p.uhat0 = random_unit_slice(g, rng);
    p.vhat0 = random_unit_slice(g, rng);
    p.tau = tau;
    return p;
}

PerturbationSpec make_perturbation(const Grid1D& g, std::vector<double> uhat0, std::vector<double> vhat0,
                                   double tau) {
    if (int(uhat0.size()) != g.N + 2 || int(vhat0.size()) != g.N + 2)
        throw ConfigError("perturbation: profiles need N+2 entries");
    if (!(tau > 0)) throw ConfigError("perturbation: tau must be positive");
    // the data only need to be L2; the Dirichlet entries are dropped, the
    // derivative condition is carried by the ghost closure of the solver
    project_unit(uhat0, g);
    project_unit(vhat0, g);
    return {std::move(uhat0), std::move(vhat0), tau};
}

double sentinel_value(const Problem& pb, const Field& u, const Field& v) {
    return 0.5 * st_pair_masked(u, u, pb.m_obs, pb) + 0.5 * st_pair_masked(v, v, pb.m_obs, pb);
}

namespace {

CascadeState run(const Problem& pb, std::span<const double> u0, std::span<const double> v0, const ControlPair& h,
                 const Field& xi1, const Field& xi2, const PicardConfig& pic, Dynamics dyn) {
    if (dyn == Dynamics::Linear) {
        Sources f = zero_sources(pb);
        f[0] = xi1;
        f[1] = xi2;
        return solve_extended_linear(pb, u0, v0, h, f);
    }
    return picard_solve_nonlinear(pb, u0, v0, h, xi1, xi2, pic).state;
}

std::vector<double> scaled(const std::vector<double>& a, double s) {
    std::vector<double> out(a);
    for (double& x : out) x *= s;
    return out;
}

} // namespace

double insensitivity_derivative(const Problem& pb, const ControlPair& h, const Field& xi1, const Field& xi2,
                                const PerturbationSpec& pert, const PicardConfig& pic, Dynamics dyn) {
    const double tau = pert.tau;
    const auto sp = run(pb, scaled(pert.uhat0, tau), scaled(pert.vhat0, tau), h, xi1, xi2, pic, dyn);
    const auto sm = run(pb, scaled(pert.uhat0, -tau), scaled(pert.vhat0, -tau), h, xi1, xi2, pic, dyn);
    return (sentinel_value(pb, sp.u, sp.v) - sentinel_value(pb, sm.u, sm.v)) / (2 * tau);
}

DualityIdentity duality_identity_check(const Problem& pb, const ControlPair& h, const Field& xi1, const Field& xi2,
                                       const PerturbationSpec& pert, const PicardConfig& pic, Dynamics dyn) {
    DualityIdentity d;
    d.lhs = insensitivity_derivative(pb, h, xi1, xi2, pert, pic, dyn);
    const auto zero = pb.zero_slice();
    const auto st = run(pb, zero, zero, h, xi1, xi2, pic, dyn);
    d.rhs = slice_dot(st.p.row(0), pert.uhat0, pb) + slice_dot(st.q.row(0), pert.vhat0, pb);
    d.defect = std::abs(d.lhs - d.rhs);
    return d;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_exp(double lw) { return lw == -kInf ? 0.0 : std::exp(lw); }

double h3_norm_sq(std::span<const double> z, const Grid1D& g, const BandedMatrix& D3) {
    const int N = g.N;
    const double h = g.dx;
    double s = h1_norm_sq(z, g);
    for (int j = 1; j <= N; ++j) {
        const double zxx = (z[j + 1] - 2 * z[j] + z[j - 1]) / (h * h);
        s += zxx * zxx * h;
    }
    std::vector<double> in(z.begin() + 1, z.begin() + 1 + N), out(N);
    D3.multiply(in, out);
    for (double v : out) s += v * v * h;
    return s;
}

// sum over cells of w_cell * ((z_{j+1}-z_j)/dx)^2 dx
double grad_sq(std::span<const double> z, const Grid1D& g) { return h1_seminorm_sq(z, g); }

} // namespace

double carleman_I(const Problem& pb, const WeightSet& w, const Field& z, Bc bc) {
    const auto& g = pb.grid;
    const auto& tg = pb.tgrid;
    const int N = g.N;
    const double s = w.s, h = g.dx;
    const BandedMatrix D3 = assemble_d3(g, bc);
    double total = 0;
    for (int k = 1; k < tg.M; ++k) {
        const double xi = w.xi[k];
        const double lxi = std::log(xi);
        double a = 0, b = 0, c = 0;
        for (int j = 1; j <= N; ++j) {
            const double e = -2 * s * w.phi(k, j);
            a += safe_exp(e + 5 * lxi) * z(k, j) * z(k, j) * h;
            const double zxx = (z(k, j + 1) - 2 * z(k, j) + z(k, j - 1)) / (h * h);
            c += safe_exp(e + lxi) * zxx * zxx * h;
        }
        for (int j = 0; j <= N; ++j) {
            const double e = -2 * s * xi * 0.5 * (w.beta[j] + w.beta[j + 1]);
            const double zx = (z(k, j + 1) - z(k, j)) / h;
            b += safe_exp(e + 3 * lxi) * zx * zx * h;
        }
        const double d = safe_exp(-2 * s * w.phi_hat[k] - 3 * lxi) * h3_norm_sq(z.row(k), g, D3);
        total += tg.dt * (std::pow(s, 5) * a + std::pow(s, 3) * b + s * c + s * d);
    }
    return total;
}

AuditMember random_audit_member(const Problem& pb, Rng& rng) {
    AuditMember m;
    m.zeta0 = random_unit_slice(pb.grid, rng);
    m.theta0 = random_unit_slice(pb.grid, rng);
    for (auto& gi : m.g) gi = random_smooth_field(pb, rng);
    return m;
}

std::pair<double, double> carleman_sides(const Problem& pb, const WeightSet& w, const AuditMember& m) {
    const auto ad = solve_adjoint(pb, m.zeta0, m.theta0, m.g);
    const double lhs = carleman_I(pb, w, ad.eta, ops::eta.bc) + carleman_I(pb, w, ad.psi, ops::psi.bc) +
                       carleman_I(pb, w, ad.zeta, ops::zeta.bc) + carleman_I(pb, w, ad.theta, ops::theta.bc);
    const auto& g = pb.grid;
    const double s = w.s;
    double rhs = 0;
    for (int k = 1; k < pb.tgrid.M; ++k) {
        const double lxi = std::log(w.xi[k]);
        const double wg = safe_exp(-12 * s * w.phi_star[k] + 10 * s * w.phi_hat[k] + 13 * lxi);
        const double wo = safe_exp(-36 * s * w.phi_star[k] + 34 * s * w.phi_hat[k] + 57 * lxi);
        double gx = 0;
        for (const auto& gi : m.g) gx += grad_sq(gi.row(k), g);
        double obs = 0;
        for (int j = 1; j <= g.N; ++j)
            obs += pb.m_omega0[j] * (ad.eta(k, j) * ad.eta(k, j) + ad.psi(k, j) * ad.psi(k, j)) * g.dx;
        rhs += pb.tgrid.dt * (std::pow(s, 5) * wg * gx + std::pow(s, 25) * wo * obs);
    }
    return {lhs, rhs};
}

std::pair<double, double> observability_sides(const Problem& pb, const WeightSet& w, const AuditMember& m) {
    const auto ad = solve_adjoint(pb, m.zeta0, m.theta0, m.g);
    const auto& g = pb.grid;
    const auto& tg = pb.tgrid;
    const int M = tg.M;
    const double s = w.s;
    const double zT = l2_norm(ad.zeta.row(M), g), thT = l2_norm(ad.theta.row(M), g);
    double lhs = zT * zT + thT * thT;
    const Field* comps[4] = {&ad.eta, &ad.psi, &ad.zeta, &ad.theta};
    for (const Field* c : comps) {
        double sup = 0;
        for (int k = 1; k <= M; ++k) {
            const double n = l2_norm(c->row(k), g);
            sup = std::max(sup, safe_exp(-2 * s * w.frakS_hat[k] + std::log(w.frakZ[k])) * n * n);
        }
        lhs += sup;
    }
    double rhs = 0;
    for (int k = 1; k <= M; ++k) {
        const double q = (k == M ? 0.5 : 1.0) * tg.dt;
        const double lz = std::log(w.frakZ[k]);
        double gsum = 0;
        for (const Field* c : comps) gsum += grad_sq(c->row(k), g);
        lhs += q * safe_exp(-2 * s * w.frakS_hat[k] + 3 * lz) * gsum;
        double gx = 0;
        for (const auto& gi : m.g) gx += grad_sq(gi.row(k), g);
        double obs = 0;
        for (int j = 1; j <= g.N; ++j)
            obs += pb.m_omega0[j] * (ad.eta(k, j) * ad.eta(k, j) + ad.psi(k, j) * ad.psi(k, j)) * g.dx;
        rhs += q * (safe_exp(-12 * s * w.frakS_star[k] + 10 * s * w.frakS_hat[k] + 13 * lz) * gx +
                    safe_exp(-36 * s * w.frakS_star[k] + 34 * s * w.frakS_hat[k] + 57 * lz) * obs);
    }
    return {lhs, rhs};
}

namespace {

template <class Sides>
RatioStats audit(const Problem& pb, const WeightSet& w, int ensemble, std::uint64_t seed, Sides sides) {
    if (ensemble < 1) throw ConfigError("audit: ensemble must be >= 1");
    Rng rng(seed);
    std::vector<AuditMember> members;
    for (int i = 0; i < ensemble; ++i) members.push_back(random_audit_member(pb, rng));
    std::vector<std::future<std::pair<double, double>>> fut;
    for (const auto& m : members) fut.push_back(std::async(std::launch::async, [&, mp = &m] { return sides(pb, w, *mp); }));
    RatioStats st;
    std::vector<double> good;
    for (auto& f : fut) {
        const auto [l, r] = f.get();
        st.lhs.push_back(l);
        st.rhs.push_back(r);
        if (!(r > 0)) {
            st.ratio.push_back(std::numeric_limits<double>::quiet_NaN());
            ++st.skipped;
            continue;
        }
        const double q = l / r;
        st.ratio.push_back(q);
        if (!std::isfinite(q)) st.all_finite = false;
        good.push_back(q);
    }
    if (!good.empty()) {
        std::sort(good.begin(), good.end());
        st.max_ratio = good.back();
        const std::size_t n = good.size();
        st.median_ratio = n % 2 ? good[n / 2] : 0.5 * (good[n / 2 - 1] + good[n / 2]);
    }
    return st;
}

} // namespace

RatioStats carleman_ratio_audit(const Problem& pb, const WeightSet& w, int ensemble, std::uint64_t seed) {
    return audit(pb, w, ensemble, seed, carleman_sides);
}

RatioStats observability_ratio_audit(const Problem& pb, const WeightSet& w, int ensemble, std::uint64_t seed) {
    return audit(pb, w, ensemble, seed, observability_sides);
}

std::vector<TrendRow> observability_trend(const Problem& pb, const WeightSet& w, const std::vector<double>& widths,
                                          int ensemble, std::uint64_t seed) {
    std::vector<TrendRow> rows;
    const double c = 0.5 * (pb.omega0.a + pb.omega0.b);
    for (double wd : widths) {
        Problem p2 = pb;
        p2.omega0 = {c - 0.5 * wd, c + 0.5 * wd};
        p2.m_omega0 = indicator_mask(p2.omega0.a, p2.omega0.b, p2.grid);
        WeightConfig wc{p2.omega0.a, p2.omega0.b, w.s, w.T, std::nullopt};
        const WeightSet w2 = build_weights(wc, p2.grid, p2.tgrid);
        const auto st = observability_ratio_audit(p2, w2, ensemble, seed);
        rows.push_back({wd, st.max_ratio, st.median_ratio});
    }
    return rows;
}

} // namespace hskdv
