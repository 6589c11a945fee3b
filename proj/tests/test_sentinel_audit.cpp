#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hskdv/control.hpp"
#include "hskdv/sentinel_audit.hpp"
#include "hskdv/sources.hpp"
#include "hskdv/weights.hpp"
#include "support.hpp"

using namespace hskdv;

namespace {

constexpr double kRate = 2.2314285714285713;

std::pair<Field, Field> sources(const Problem& pb, double A) {
    return {admissible_source(pb, A, 0.3, 0.15, kRate), admissible_source(pb, A, 0.7, 0.15, kRate)};
}

WeightSet weights(const Problem& pb, double s = 1.0) {
    return build_weights({pb.omega0.a, pb.omega0.b, s, pb.tgrid.T, std::nullopt}, pb.grid, pb.tgrid);
}

} // namespace

TEST_CASE("sentinel quadrature") {
    const auto pb = support::small(99, 20, 0.5);   // 0.2 and 0.6 are nodes
    CHECK(sentinel_value(pb, pb.zeros(), pb.zeros()) == 0.0);
    Field one(pb.tgrid.M + 1, pb.grid.N + 2, 1.0);
    CHECK(std::abs(sentinel_value(pb, one, pb.zeros()) - 0.1) < 1e-10);
    Rng rng(2);
    const Field u = random_field(pb, rng), v = random_field(pb, rng);
    const double j = sentinel_value(pb, u, v);
    CHECK(sentinel_value(pb, -3.0 * u, -3.0 * v) == doctest::Approx(9 * j).epsilon(1e-12));
}

TEST_CASE("perturbations") {
    const auto pb = support::desk();
    Rng rng(4);
    const auto p = make_perturbation(pb.grid, rng, 1e-3);
    CHECK(l2_norm(p.uhat0, pb.grid) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(l2_norm(p.vhat0, pb.grid) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p.uhat0.front() == 0.0);
    CHECK(p.vhat0.back() == 0.0);
    // merely L2 data: the Dirichlet entries are dropped before normalizing
    const auto q = make_perturbation(pb.grid, std::vector<double>(66, 1.0), std::vector<double>(66, 2.0), 1e-2);
    CHECK(q.uhat0.front() == 0.0);
    CHECK(l2_norm(q.vhat0, pb.grid) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(make_perturbation(pb.grid, std::vector<double>(3), std::vector<double>(66), 1e-2), ConfigError);
    CHECK_THROWS_AS(make_perturbation(pb.grid, std::vector<double>(66, 1.0), std::vector<double>(66, 1.0), 0.0),
                    ConfigError);
}

TEST_CASE("linear first variation matches the duality pairing") {
    const auto pb = support::desk();
    auto [x1, x2] = sources(pb, 1e-3);
    Rng rng(8);
    const ControlPair none{pb.zeros(), pb.zeros()};
    for (int t = 0; t < 3; ++t) {
        const auto pert = make_perturbation(pb.grid, rng, 1e-3);
        const auto d = duality_identity_check(pb, none, x1, x2, pert, {}, Dynamics::Linear);
        CHECK(d.defect <= 1e-5 * std::max({std::abs(d.lhs), std::abs(d.rhs), 1.0}));
        // the linear sentinel is quadratic in tau, so the centered difference is exact up to roundoff
        CHECK(d.defect <= 1e-6 * std::abs(d.rhs) + 1e-15);
    }
    const auto zero = duality_identity_check(pb, none, pb.zeros(), pb.zeros(), make_perturbation(pb.grid, rng, 1e-3),
                                             {}, Dynamics::Linear);
    CHECK(zero.rhs == 0.0);
    CHECK(std::abs(zero.lhs) < 1e-15);
}

TEST_CASE("uncontrolled derivative stays away from zero and is odd") {
    const auto pb = support::desk();
    auto [x1, x2] = sources(pb, 1.0);
    const ControlPair none{pb.zeros(), pb.zeros()};
    Rng rng(12);
    for (int t = 0; t < 3; ++t) {
        // tau = 1e-4 keeps the tau^2 remainder (~6e-12 here) well under the derivative
        auto pert = make_perturbation(pb.grid, rng, 1e-4);
        const auto d = duality_identity_check(pb, none, x1, x2, pert, {});
        CHECK(std::abs(d.rhs) > 1e-11);
        CHECK(d.defect <= 0.05 * std::abs(d.rhs));
        for (double& v : pert.uhat0) v = -v;
        for (double& v : pert.vhat0) v = -v;
        const double dm = insensitivity_derivative(pb, none, x1, x2, pert, {});
        CHECK(std::abs(d.lhs + dm) <= 1e-3 * std::abs(d.lhs));
    }
}

TEST_CASE("nonlinear duality defect shrinks with tau") {
    const auto pb = support::desk();
    auto [x1, x2] = sources(pb, 1.0);
    const ControlPair none{pb.zeros(), pb.zeros()};
    Rng rng(14);
    auto pert = make_perturbation(pb.grid, rng, 1e-2);
    std::vector<double> defect;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        pert.tau = tau;
        defect.push_back(duality_identity_check(pb, none, x1, x2, pert, {}).defect);
    }
    MESSAGE("defects " << defect[0] << " " << defect[1] << " " << defect[2]);
    CHECK(std::log10(defect[0] / defect[1]) >= 1.0);
    CHECK(std::log10(defect[1] / defect[2]) >= 1.0);
}

TEST_CASE("Carleman and observability audits") {
    const auto pb = support::desk();
    const auto w = weights(pb);
    AuditMember zero{pb.zero_slice(), pb.zero_slice(), zero_sources(pb)};
    const auto [cl, cr] = carleman_sides(pb, w, zero);
    CHECK(cl == 0.0);
    CHECK(cr == 0.0);
    const auto [ol, orr] = observability_sides(pb, w, zero);
    CHECK(ol == 0.0);
    CHECK(orr == 0.0);

    const auto c = carleman_ratio_audit(pb, w, 20, 1);
    const auto o = observability_ratio_audit(pb, w, 20, 1);
    CHECK(c.ratio.size() == 20);
    CHECK(c.all_finite);
    CHECK(o.all_finite);
    CHECK(c.skipped == 0);
    CHECK(c.max_ratio >= c.median_ratio);
    CHECK(c.max_ratio > 0);

    // same seed, same numbers
    const auto c2 = carleman_ratio_audit(pb, w, 20, 1);
    CHECK(c2.max_ratio == c.max_ratio);

    const auto c_s2 = carleman_ratio_audit(pb, weights(pb, 2.0), 20, 1);
    MESSAGE("carleman max ratio at s=1 " << c.max_ratio << ", s=2 " << c_s2.max_ratio);
    CHECK(c_s2.all_finite);
    CHECK_THROWS_AS(carleman_ratio_audit(pb, w, 0, 1), ConfigError);
}

TEST_CASE("observability degrades as omega0 shrinks") {
    const auto pb = support::desk();
    const auto rows = observability_trend(pb, weights(pb), {0.08, 0.04, 0.02}, 5, 3);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) MESSAGE("width " << r.width << " max ratio " << r.max_ratio);
    CHECK(rows[2].max_ratio > rows[0].max_ratio);
}
