#pragma once

#include <cstdint>
#include <vector>

#include "hskdv/cascade.hpp"
#include "hskdv/nonlinear.hpp"
#include "hskdv/sources.hpp"
#include "hskdv/weights.hpp"

namespace hskdv {

struct PerturbationSpec {
    std::vector<double> uhat0, vhat0;   // unit L2, zero ends
    double tau = 1e-3;
};

PerturbationSpec make_perturbation(const Grid1D& g, Rng& rng, double tau);
// normalizes and projects supplied profiles
PerturbationSpec make_perturbation(const Grid1D& g, std::vector<double> uhat0, std::vector<double> vhat0, double tau);

// 1/2 <<1_O u, u>> + 1/2 <<1_O v, v>>
double sentinel_value(const Problem& pb, const Field& u, const Field& v);

enum class Dynamics { Linear, Nonlinear };

// (J(+tau) - J(-tau)) / (2 tau) with initial data (+-tau uhat0, +-tau vhat0)
double insensitivity_derivative(const Problem& pb, const ControlPair& h, const Field& xi1, const Field& xi2,
                                const PerturbationSpec& pert, const PicardConfig& pic,
                                Dynamics dyn = Dynamics::Nonlinear);

struct DualityIdentity {
    double lhs = 0, rhs = 0, defect = 0;
};

// lhs: the finite difference above; rhs: <p(0), uhat0> + <q(0), vhat0> at unperturbed data
DualityIdentity duality_identity_check(const Problem& pb, const ControlPair& h, const Field& xi1, const Field& xi2,
                                       const PerturbationSpec& pert, const PicardConfig& pic,
                                       Dynamics dyn = Dynamics::Nonlinear);

struct RatioStats {
    std::vector<double> lhs, rhs, ratio;   // ratio is nan for skipped members
    int skipped = 0;
    double max_ratio = 0, median_ratio = 0;
    bool all_finite = true;
};

// I(z,s) for one state, xi-based weights, zero weight at t_0 and t_M
double carleman_I(const Problem& pb, const WeightSet& w, const Field& z, Bc bc);

struct AuditMember {
    std::vector<double> zeta0, theta0;
    Sources g;
};
AuditMember random_audit_member(const Problem& pb, Rng& rng);

std::pair<double, double> carleman_sides(const Problem& pb, const WeightSet& w, const AuditMember& m);
std::pair<double, double> observability_sides(const Problem& pb, const WeightSet& w, const AuditMember& m);

RatioStats carleman_ratio_audit(const Problem& pb, const WeightSet& w, int ensemble, std::uint64_t seed);
RatioStats observability_ratio_audit(const Problem& pb, const WeightSet& w, int ensemble, std::uint64_t seed);

// observability ratios as omega0 shrinks towards a single cell around its midpoint
struct TrendRow {
    double width = 0;
    double max_ratio = 0, median_ratio = 0;
};
std::vector<TrendRow> observability_trend(const Problem& pb, const WeightSet& w, const std::vector<double>& widths,
                                          int ensemble, std::uint64_t seed);

} // namespace hskdv
