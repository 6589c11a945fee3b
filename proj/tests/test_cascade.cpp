#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "hskdv/cascade.hpp"
#include "hskdv/sources.hpp"
#include "support.hpp"

using namespace hskdv;

namespace {

constexpr double kPi = std::numbers::pi;

struct Inputs {
    std::vector<double> u0, v0;
    ControlPair h;
    Sources f;
};

Inputs reference_inputs(const Problem& pb) {
    Inputs in;
    in.u0 = support::sample(pb.grid, [](double x) { return std::sin(kPi * x); });
    in.v0 = support::sample(pb.grid, [](double x) { return std::sin(2 * kPi * x) * x; });
    in.h = {support::sample(pb, [](double t, double x) { return std::cos(20 * t) * x; }),
            support::sample(pb, [](double t, double x) { return (1 + t) * x * x; })};
    in.f = {support::sample(pb, [](double t, double x) { return t * std::sin(3 * x); }),
            support::sample(pb, [](double, double) { return 0.5; }),
            support::sample(pb, [](double t, double x) { return x * (1 + 10 * t); }),
            support::sample(pb, [](double t, double x) { return std::cos(x) * t; })};
    return in;
}

double rel_slice(std::span<const double> a, const nlohmann::json& ref) {
    return support::max_diff_interior(a, ref) / support::max_abs_json(ref);
}

} // namespace

TEST_CASE("zero inputs give the zero state") {
    const auto pb = support::small(16, 10, 0.1);
    const auto z = pb.zero_slice();
    const auto s = solve_extended_linear(pb, z, z, {pb.zeros(), pb.zeros()}, zero_sources(pb));
    CHECK(max_abs(s.u) + max_abs(s.v) + max_abs(s.p) + max_abs(s.q) == 0.0);
    const auto a = solve_adjoint(pb, z, z, zero_sources(pb));
    CHECK(max_abs(a.eta) + max_abs(a.psi) + max_abs(a.zeta) + max_abs(a.theta) == 0.0);
}

TEST_CASE("f3 alone only drives p") {
    const auto pb = support::small(20, 12, 0.1);
    Sources f = zero_sources(pb);
    f[2] = support::sample(pb, [](double t, double x) { return std::sin(4 * x) * (1 + t); });
    const auto z = pb.zero_slice();
    const auto s = solve_extended_linear(pb, z, z, {pb.zeros(), pb.zeros()}, f);
    CHECK(max_abs(s.u) == 0.0);
    CHECK(max_abs(s.v) == 0.0);
    CHECK(max_abs(s.q) == 0.0);
    const Field p = solve_linear_kdv(ops::p, pb.grid, pb.tgrid, z, f[2]);
    CHECK(max_abs(s.p - p) == 0.0);
    for (int j = 0; j <= pb.grid.N + 1; ++j) CHECK(s.p(pb.tgrid.M, j) == 0.0);
}

TEST_CASE("cascade and adjoint against the dense reference") {
    const auto& ref = support::oracle()["cascade"];
    const auto pb = support::small(ref["N"], ref["M"], ref["T"]);
    const auto in = reference_inputs(pb);
    const auto s = solve_extended_linear(pb, in.u0, in.v0, in.h, in.f);
    const int M = pb.tgrid.M;
    CHECK(rel_slice(s.u.row(M), ref["uT"]) < 1e-12);
    CHECK(rel_slice(s.v.row(M), ref["vT"]) < 1e-12);
    CHECK(rel_slice(s.p.row(0), ref["p0"]) < 1e-12);
    CHECK(rel_slice(s.q.row(0), ref["q0"]) < 1e-12);

    const auto& aref = support::oracle()["adjoint"];
    const auto z0 = support::sample(pb.grid, [](double x) { return std::sin(kPi * x); });
    const auto t0 = support::sample(pb.grid, [](double x) { return std::sin(2 * kPi * x); });
    const auto a = solve_adjoint(pb, z0, t0, zero_sources(pb));
    CHECK(rel_slice(a.eta.row(0), aref["eta0"]) < 1e-12);
    CHECK(rel_slice(a.psi.row(0), aref["psi0"]) < 1e-12);
    CHECK(rel_slice(a.zeta.row(M), aref["zetaT"]) < 1e-12);
    CHECK(rel_slice(a.theta.row(M), aref["thetaT"]) < 1e-12);
}

TEST_CASE("superposition") {
    const auto pb = support::small(24, 16, 0.2);
    Rng rng(11);
    auto draw = [&] {
        Inputs in;
        in.u0 = random_unit_slice(pb.grid, rng);
        in.v0 = random_unit_slice(pb.grid, rng);
        in.h = {random_field(pb, rng), random_field(pb, rng)};
        for (auto& f : in.f) f = random_field(pb, rng);
        return in;
    };
    const auto a = draw(), b = draw();
    Inputs c;
    for (int j = 0; j < int(a.u0.size()); ++j) {
        c.u0.push_back(a.u0[j] - 2 * b.u0[j]);
        c.v0.push_back(a.v0[j] - 2 * b.v0[j]);
    }
    c.h = {a.h.h1 - 2.0 * b.h.h1, a.h.h2 - 2.0 * b.h.h2};
    for (int i = 0; i < 4; ++i) c.f[i] = a.f[i] - 2.0 * b.f[i];
    const auto sa = solve_extended_linear(pb, a.u0, a.v0, a.h, a.f);
    const auto sb = solve_extended_linear(pb, b.u0, b.v0, b.h, b.f);
    const auto sc = solve_extended_linear(pb, c.u0, c.v0, c.h, c.f);
    const Field* fa[4] = {&sa.u, &sa.v, &sa.p, &sa.q};
    const Field* fb[4] = {&sb.u, &sb.v, &sb.p, &sb.q};
    const Field* fc[4] = {&sc.u, &sc.v, &sc.p, &sc.q};
    for (int i = 0; i < 4; ++i) {
        const Field lin = *fa[i] - 2.0 * *fb[i];
        CHECK(max_abs(lin - *fc[i]) <= 1e-10 * max_abs(*fc[i]));
    }
}

TEST_CASE("adjoint coupling and dissipativity") {
    const auto pb = support::small(32, 40, 0.2);
    auto z0 = bump_profile(pb.grid, 0.4, 0.1);
    const auto zero = pb.zero_slice();
    const std::vector<double> no_obs(pb.grid.N + 2, 0.0);
    const auto cut = solve_adjoint_masked(pb, z0, zero, zero_sources(pb), no_obs);
    CHECK(max_abs(cut.eta) == 0.0);
    const auto a = solve_adjoint(pb, z0, zero, zero_sources(pb));
    CHECK(max_abs(a.eta) > 0.0);
    CHECK(max_abs(a.psi) == 0.0);

    Rng rng(5);
    const auto r0 = random_unit_slice(pb.grid, rng);
    const auto r1 = random_unit_slice(pb.grid, rng);
    const auto b = solve_adjoint(pb, r0, r1, zero_sources(pb));
    for (int k = 0; k < pb.tgrid.M; ++k) {
        CHECK(l2_norm(b.zeta.row(k + 1), pb.grid) <= l2_norm(b.zeta.row(k), pb.grid) * (1 + 1e-12));
        CHECK(l2_norm(b.theta.row(k + 1), pb.grid) <= l2_norm(b.theta.row(k), pb.grid) * (1 + 1e-12));
    }
}

TEST_CASE("discrete duality") {
    const auto pb = support::desk();
    const auto rep = duality_pairing_check(pb, 5, 1);
    CHECK(rep.defect.size() == 5);
    CHECK(rep.max_defect <= 1e-8);
    // another time rule is not the transpose and must show up
    const auto bad = duality_pairing_check(pb, 5, 1, TimeRule::Rectangle);
    MESSAGE("interval-average defect " << rep.max_defect << ", rectangle defect " << bad.max_defect);
    CHECK(bad.max_defect > 1e3 * rep.max_defect);
    CHECK(bad.max_defect > 1e-6);
    CHECK_THROWS_AS(duality_pairing_check(pb, 0, 1), ConfigError);
}

TEST_CASE("pairing rules agree on smooth fields") {
    const auto pb = support::small(40, 200, 0.5);
    const Field a = support::sample(pb, [](double t, double x) { return std::cos(t) * x; });
    const Field b = support::sample(pb, [](double t, double x) { return t * x * x; });
    const double ia = st_pair(a, b, pb);
    const double tr = st_pair(a, b, pb, TimeRule::Trapezoid);
    CHECK(ia == doctest::Approx(tr).epsilon(1e-4));
    // homogeneous in each argument
    CHECK(st_pair(2.0 * a, b, pb) == doctest::Approx(2 * ia).epsilon(1e-14));
}
