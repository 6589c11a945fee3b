#include "hskdv/nonlinear.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "hskdv/norms.hpp"

namespace hskdv {

std::vector<double> PicardHistory::ratios() const {
    std::vector<double> r;
    for (std::size_t i = 1; i < increments.size(); ++i)
        r.push_back(increments[i - 1] > 0 ? increments[i] / increments[i - 1] : 0.0);
    return r;
}

Sources nonlinear_sources(const Problem& pb, const CascadeState& s) {
    const auto& g = pb.grid;
    Sources f;
    f[0] = nonlinear_term(s.u, s.u, 3.0, g) + nonlinear_term(s.v, s.v, -6.0, g);
    f[1] = nonlinear_term(s.u, s.v, -3.0, g);
    f[2] = nonlinear_term(s.p, s.u, 3.0, g) + nonlinear_term(s.q, s.v, -3.0, g);
    f[3] = nonlinear_term(s.p, s.v, -6.0, g);
    return f;
}

double state_norm(const Problem& pb, const CascadeState& s) {
    const auto& g = pb.grid;
    const auto& tg = pb.tgrid;
    return yq_norm(s.u, g, tg) + yq_norm(s.v, g, tg) + yq_norm(s.p, g, tg) + yq_norm(s.q, g, tg);
}

namespace {
CascadeState diff(const CascadeState& a, const CascadeState& b) { return {a.u - b.u, a.v - b.v, a.p - b.p, a.q - b.q}; }
} // namespace

PicardResult picard_solve_nonlinear(const Problem& pb, std::span<const double> u0, std::span<const double> v0,
                                    const ControlPair& h, const Field& xi1, const Field& xi2,
                                    const PicardConfig& cfg) {
    if (!(cfg.R > 0)) throw ConfigError("picard: R must be positive");
    if (!(cfg.tol > 0)) throw ConfigError("picard: tol must be positive");
    if (cfg.max_iter < 1) throw ConfigError("picard: max_iter must be >= 1");

    PicardResult res;
    CascadeState prev{pb.zeros(), pb.zeros(), pb.zeros(), pb.zeros()};
    for (int it = 1; it <= cfg.max_iter; ++it) {
        Sources f = nonlinear_sources(pb, prev);
        f[0] += xi1;
        f[1] += xi2;
        CascadeState next = solve_extended_linear(pb, u0, v0, h, f);
        const double ball = state_norm(pb, next);
        const double inc = state_norm(pb, diff(next, prev));
        res.history.ball_norms.push_back(ball);
        res.history.increments.push_back(inc);
        if (!std::isfinite(ball) || !std::isfinite(inc)) {
            throw ConvergenceError("picard: non-finite iterate at iteration " + std::to_string(it),
                                   res.history.increments);
        }
        if (ball > 2 * cfg.R) {
            std::ostringstream os;
            os << "picard: iterate left the ball, norm " << ball << " > 2R = " << 2 * cfg.R << " at iteration " << it;
            throw ConvergenceError(os.str(), res.history.increments);
        }
        prev = std::move(next);
        if (inc <= cfg.tol) {
            res.state = std::move(prev);
            return res;
        }
    }
    std::ostringstream os;
    os << "picard: no convergence in " << cfg.max_iter << " iterations, last increment "
       << res.history.increments.back();
    throw ConvergenceError(os.str(), res.history.increments);
}

namespace {
double pair_norm(const Problem& pb, const ControlPair& h) {
    const double a = l2l2_norm(h.h1, pb.grid, pb.tgrid), b = l2l2_norm(h.h2, pb.grid, pb.tgrid);
    return std::sqrt(a * a + b * b);
}
} // namespace

NonlinearControlResult nonlinear_null_control(const Problem& pb, const Field& xi1, const Field& xi2,
                                              const HumConfig& hum, const PicardConfig& pic,
                                              const OuterConfig& outer) {
    if (outer.max_rounds < 1) throw ConfigError("outer: max_rounds must be >= 1");
    NonlinearControlResult res;
    const auto zero = pb.zero_slice();
    ControlPair h{pb.zeros(), pb.zeros()};
    auto free_run = picard_solve_nonlinear(pb, zero, zero, h, xi1, xi2, pic);
    res.baseline_max_t = pq_max_t(pb, free_run.state);
    res.pq0_uncontrolled = pq0_norm(pb, free_run.state);
    CascadeState S = std::move(free_run.state);

    std::vector<double> pq_hist;
    for (int round = 1; round <= outer.max_rounds; ++round) {
        Sources f = nonlinear_sources(pb, S);
        f[0] += xi1;
        f[1] += xi2;
        HumResult lin = synthesize_null_control(pb, f, hum);
        auto run = picard_solve_nonlinear(pb, zero, zero, lin.h, xi1, xi2, pic);

        const ControlPair dh{lin.h.h1 - h.h1, lin.h.h2 - h.h2};
        const double hn = pair_norm(pb, lin.h);
        OuterRound r;
        r.control_change = hn > 0 ? pair_norm(pb, dh) / hn : 0.0;
        r.pq0 = pq0_norm(pb, run.state);
        r.cg_iterations = lin.report.iterations;
        r.picard_iterations = run.history.iterations();
        res.rounds.push_back(r);
        pq_hist.push_back(r.pq0);
        if (!std::isfinite(r.pq0)) throw ConvergenceError("outer: non-finite terminal norm", pq_hist);

        h = std::move(lin.h);
        S = std::move(run.state);
        if (r.pq0 <= outer.target_ratio * res.baseline_max_t && r.control_change <= outer.control_tol) {
            res.h = std::move(h);
            res.state = std::move(S);
            return res;
        }
    }
    std::ostringstream os;
    os << "outer: no convergence in " << outer.max_rounds << " rounds, last ||(p(0),q(0))|| = " << pq_hist.back();
    throw ConvergenceError(os.str(), pq_hist);
}

std::array<Field, 4> residual_Y(const Problem& pb, const CascadeState& s, const ControlPair& h, const Field* xi1,
                                const Field* xi2) {
    const auto& g = pb.grid;
    const auto& tg = pb.tgrid;
    Sources f = nonlinear_sources(pb, s);
    f[0] += masked(h.h1, pb.m_omega);
    f[1] += masked(h.h2, pb.m_omega);
    f[2] += masked(s.u, pb.m_obs);
    f[3] += masked(s.v, pb.m_obs);
    if (xi1) f[0] += *xi1;
    if (xi2) f[1] += *xi2;
    return {kdv_residual(ops::u, g, tg, s.u, f[0], pb.theta), kdv_residual(ops::v, g, tg, s.v, f[1], pb.theta),
            kdv_residual(ops::p, g, tg, s.p, f[2], pb.theta), kdv_residual(ops::q, g, tg, s.q, f[3], pb.theta)};
}

double residual_norm(const Problem& pb, const Field& r) {
    double s = 0;
    for (int k = 0; k < pb.tgrid.M; ++k) {
        const double n = l2_norm(r.row(k), pb.grid);
        s += n * n;
    }
    return std::sqrt(s * pb.tgrid.dt);
}

AmplitudeProbe bisect_divergence_amplitude(const Problem& pb, const Field& xi1_shape, const Field& xi2_shape,
                                           const PicardConfig& cfg, double lo, double hi, int rounds) {
    if (!(lo > 0 && hi > lo)) throw ConfigError("bisection: need 0 < lo < hi");
    const auto zero = pb.zero_slice();
    auto converges = [&](double A) {
        try {
            picard_solve_nonlinear(pb, zero, zero, {pb.zeros(), pb.zeros()}, A * xi1_shape, A * xi2_shape, cfg);
            return true;
        } catch (const ConvergenceError&) {
            return false;
        }
    };
    AmplitudeProbe out;
    const bool ok_lo = converges(lo), ok_hi = converges(hi);
    out.probes.push_back({lo, ok_lo});
    out.probes.push_back({hi, ok_hi});
    if (!ok_lo) throw ConvergenceError("bisection: lower amplitude already diverges", {});
    if (ok_hi) throw ConvergenceError("bisection: upper amplitude still converges", {});
    // three probes per round, run side by side
    for (int r = 0; r < rounds; ++r) {
        double a[3];
        std::future<bool> fut[3];
        for (int i = 0; i < 3; ++i) {
            a[i] = lo * std::pow(hi / lo, (i + 1) / 4.0);
            fut[i] = std::async(std::launch::async, converges, a[i]);
        }
        bool ok[3];
        for (int i = 0; i < 3; ++i) {
            ok[i] = fut[i].get();
            out.probes.push_back({a[i], ok[i]});
        }
        double nlo = lo, nhi = hi;
        for (int i = 2; i >= 0; --i)
            if (!ok[i]) nhi = a[i];
        for (int i = 0; i < 3; ++i)
            if (ok[i] && a[i] < nhi) nlo = a[i];
        lo = nlo;
        hi = nhi;
    }
    out.last_convergent = lo;
    out.first_divergent = hi;
    return out;
}

} // namespace hskdv
