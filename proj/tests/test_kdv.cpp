#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "hskdv/kdv.hpp"
#include "hskdv/norms.hpp"
#include "hskdv/sources.hpp"
#include "support.hpp"

using namespace hskdv;

namespace {

std::vector<double> apply_d(const BandedMatrix& D, const std::vector<double>& full) {
    const int n = D.n;
    std::vector<double> in(full.begin() + 1, full.begin() + 1 + n), out(n);
    D.multiply(in, out);
    return out;
}

// max nodal error of the cubic-in-x manufactured solution (1+t) x^2 (1-x), LEFT, a = -1/2
double mms_error(int N, int M, const std::function<double(double, double)>& exact,
                 const std::function<double(double, double)>& src) {
    const auto pb = support::small(N, M, 0.5);
    const auto init = support::sample(pb.grid, [&](double x) { return exact(0.0, x); });
    const Field f = support::sample(pb, src);
    const Field y = solve_linear_kdv(ops::u, pb.grid, pb.tgrid, init, f);
    double e = 0;
    for (int k = 0; k <= M; ++k)
        for (int j = 1; j <= N; ++j) e = std::max(e, std::abs(y(k, j) - exact(pb.tgrid.t[k], pb.grid.x[j])));
    return e;
}

} // namespace

TEST_CASE("third difference matrices against the dense reference") {
    const auto g = make_grid(1.0, 8);
    for (auto [bc, key] : {std::pair{Bc::Left, "LEFT"}, std::pair{Bc::Right, "RIGHT"}}) {
        const auto D = assemble_d3(g, bc);
        const auto& ref = support::oracle()["d3"][key];
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(D.get(i, j) == doctest::Approx(ref[i][j].get<double>()).epsilon(1e-13));
    }
}

TEST_CASE("third difference on polynomials and sines") {
    const auto g = make_grid(1.0, 40);
    const auto D = assemble_d3(g, Bc::Left);
    const auto cube = apply_d(D, support::sample(g, [](double x) { return x * x * x; }, false));
    for (int i = 4; i < 36; ++i) CHECK(cube[i] == doctest::Approx(6.0).epsilon(1e-9));
    const auto c = apply_d(D, std::vector<double>(42, 1.0));
    for (int i = 4; i < 36; ++i) CHECK(std::abs(c[i]) < 1e-9);

    const auto g2 = make_grid(1.0, 199);
    const auto D2 = assemble_d3(g2, Bc::Right);
    const auto s = apply_d(D2, support::sample(g2, [](double x) { return std::sin(std::numbers::pi * x); }));
    CHECK(std::abs(s[99]) < 1e-3);   // x_100 = 0.5
}

TEST_CASE("RIGHT is minus the transpose of LEFT and both are dissipative") {
    const auto g = make_grid(1.0, 20);
    const auto L = assemble_d3(g, Bc::Left);
    const auto R = assemble_d3(g, Bc::Right);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) CHECK(R.get(i, j) == -L.get(j, i));
    // symmetric part of D is -1/(2dx^3) at the two corners only
    const double h3 = g.dx * g.dx * g.dx;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double sym = 0.5 * (L.get(i, j) + L.get(j, i));
            const bool corner = (i == j) && (i == 0 || i == 19);
            CHECK(sym * h3 == doctest::Approx(corner ? -0.5 : 0.0));
        }
}

TEST_CASE("scalar marches against the dense reference") {
    const auto& ref = support::oracle()["scalar"];
    const int N = ref["N"], M = ref["M"];
    const double T = ref["T"];
    const auto pb = support::small(N, M, T);
    const auto init = support::sample(pb.grid, [](double x) { return std::sin(std::numbers::pi * x) * (1 + x); });
    const Field src = support::sample(pb, [](double t, double x) { return (1 + t) * x * (1 - x) * std::cos(3 * x); });
    const std::pair<const char*, KdvOperatorSpec> specs[8] = {
        {"u", ops::u}, {"v", ops::v}, {"p", ops::p}, {"q", ops::q},
        {"eta", ops::eta}, {"psi", ops::psi}, {"zeta", ops::zeta}, {"theta", ops::theta}};
    for (const auto& [name, spec] : specs) {
        CAPTURE(name);
        const Field y = solve_linear_kdv(spec, pb.grid, pb.tgrid, init, src);
        const int kend = spec.dir == Direction::Forward ? M : 0;
        const auto& r = ref["end_slice"][name];
        CHECK(support::max_diff_interior(y.row(kend), r) < 1e-12 * support::max_abs_json(r));
        CHECK(y(kend, 0) == 0.0);
        CHECK(y(kend, N + 1) == 0.0);
    }
}

TEST_CASE("zero data gives zero") {
    const auto pb = support::small(16, 8, 0.1);
    for (const auto& spec : ops::all) {
        const Field y = solve_linear_kdv(spec, pb.grid, pb.tgrid, pb.zero_slice(), pb.zeros());
        CHECK(max_abs(y) == 0.0);
    }
}

TEST_CASE("manufactured solutions converge") {
    const double a = ops::u.a;
    // cubic: the ghost closure is not exact on it, the boundary rows carry an O(1) consistency error
    auto cubic = [](double t, double x) { return (1 + t) * x * x * (1 - x); };
    auto cubic_src = [a](double t, double x) { return x * x * (1 - x) + a * (1 + t) * (-6.0); };
    // smooth profile with u(0)=u(1)=u_x(0)=0
    auto sm = [](double t, double x) { return std::cos(t) * x * x * (1 - x) * std::exp(x); };
    auto sm_src = [a](double t, double x) {
        const double g = x * x * (1 - x) * std::exp(x);
        // d^3/dx^3 [(x^2 - x^3) e^x] = e^x (x^2 - x^3 + 3(2x - 3x^2) + 3(2 - 6x) - 6)
        const double d3 = std::exp(x) * (x * x - x * x * x + 6 * x - 9 * x * x + 6 - 18 * x - 6);
        return -std::sin(t) * g + a * std::cos(t) * d3;
    };
    std::vector<double> ec, es;
    for (int lev = 0; lev < 3; ++lev) {
        const int N = 16 << lev, M = 16 << lev;
        ec.push_back(mms_error(N, M, cubic, cubic_src));
        es.push_back(mms_error(N, M, sm, sm_src));
    }
    for (int i = 0; i + 1 < 3; ++i) {
        MESSAGE("level " << i << ": cubic " << ec[i] << " -> " << ec[i + 1] << ", smooth " << es[i] << " -> "
                         << es[i + 1]);
        CHECK(ec[i + 1] < ec[i]);
        CHECK(std::log2(es[i] / es[i + 1]) >= 1.0);
    }
}

TEST_CASE("energy decay for every operator") {
    const auto pb = support::small(48, 96, 0.5);
    Rng rng(7);
    for (const auto& spec : ops::all) {
        CAPTURE(to_string(spec.bc));
        CAPTURE(spec.a);
        const auto init = random_unit_slice(pb.grid, rng);
        const Field y = solve_linear_kdv(spec, pb.grid, pb.tgrid, init, pb.zeros());
        const int M = pb.tgrid.M;
        for (int s = 0; s < M; ++s) {
            const int ka = spec.dir == Direction::Forward ? s : M - s;
            const int kb = spec.dir == Direction::Forward ? s + 1 : M - s - 1;
            CHECK(l2_norm(y.row(kb), pb.grid) <= l2_norm(y.row(ka), pb.grid) * (1 + 1e-8));
        }
    }
}

TEST_CASE("residual of a solve vanishes") {
    const auto pb = support::small(24, 20, 0.2);
    Rng rng(3);
    const auto init = random_unit_slice(pb.grid, rng);
    const Field f = random_smooth_field(pb, rng);
    for (const auto& spec : {ops::u, ops::p}) {
        const Field y = solve_linear_kdv(spec, pb.grid, pb.tgrid, init, f);
        const Field r = kdv_residual(spec, pb.grid, pb.tgrid, y, f);
        CHECK(max_abs(r) < 1e-9 * max_abs(y) / pb.tgrid.dt);
    }
}

TEST_CASE("bad inputs") {
    const auto pb = support::small(16, 8, 0.1);
    auto bad = pb.zero_slice();
    bad[0] = 1.0;
    bad[5] = 1.0;
    CHECK_THROWS_AS(solve_linear_kdv(ops::u, pb.grid, pb.tgrid, bad, pb.zeros()), ConfigError);
    CHECK_THROWS_AS(assemble_operator(ops::u, pb.grid, 0.01, 0.3), ConfigError);
    CHECK_THROWS_AS(solve_linear_kdv(ops::u, pb.grid, pb.tgrid, pb.zero_slice(), Field(3, 3)), ConfigError);
}

TEST_CASE("nonlinear transport term") {
    const auto pb = support::small(32, 6, 0.1);
    CHECK(max_abs(nonlinear_term(pb.zeros(), support::sample(pb, [](double, double x) { return x; }), 3.0,
                                 pb.grid)) == 0.0);
    const Field X = support::sample(pb, [](double, double x) { return x; });
    const Field n = nonlinear_term(X, X, -6.0, pb.grid);
    // the sampled field is zero at x = L, so the last interior node is left out
    for (int j = 1; j < 32; ++j) CHECK(n(3, j) == doctest::Approx(-6.0 * pb.grid.x[j]).epsilon(1e-12));
    CHECK(n(3, 0) == 0.0);

    // sum_k dt ||y1 D y2|| <= C0 ||y1||_{L2H1} ||y2||_{L2H1}, C0 stable in N
    std::vector<double> c0;
    for (int N : {32, 64, 128}) {
        const auto p2 = support::small(N, 20, 0.5);
        const Field y1 = support::sample(p2, [](double t, double x) { return (1 + t) * std::sin(3 * x) * x * (1 - x); });
        const Field y2 = support::sample(p2, [](double t, double x) { return std::cos(2 * t) * std::sin(5 * x) * x * (1 - x); });
        const Field nl = nonlinear_term(y1, y2, 1.0, p2.grid);
        double lhs = 0;
        for (int k = 0; k <= 20; ++k) lhs += p2.tgrid.dt * l2_norm(nl.row(k), p2.grid);
        auto l2h1 = [&](const Field& y) {
            double s = 0;
            for (int k = 0; k <= 20; ++k) s += p2.tgrid.dt * h1_norm_sq(y.row(k), p2.grid);
            return std::sqrt(s);
        };
        c0.push_back(lhs / (l2h1(y1) * l2h1(y2)));
    }
    CHECK(c0[2] / c0[0] < 1.05);
    CHECK(c0[2] / c0[0] > 0.95);
}
