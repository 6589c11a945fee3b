#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hskdv/discretization.hpp"
#include "hskdv/kdv.hpp"

namespace hskdv {

struct Interval {
    double a = 0, b = 0;
};

// grids, masks and the time scheme shared by every cascade solve
struct Problem {
    Grid1D grid;
    TimeGrid tgrid;
    Interval omega{0.45, 0.8}, obs{0.2, 0.6}, omega0{0.48, 0.56};
    std::vector<double> m_omega, m_obs, m_omega0;
    double theta = 0.5;

    Field zeros() const { return Field(grid, tgrid); }
    std::vector<double> zero_slice() const { return std::vector<double>(grid.N + 2, 0.0); }
};

Problem make_problem(double L, int N, double T, int M, Interval omega, Interval obs, Interval omega0,
                     double theta = 0.5);

// fixed coefficient table of the extended system and its adjoint
namespace ops {
inline constexpr KdvOperatorSpec u{-0.5, Bc::Left, Direction::Forward};
inline constexpr KdvOperatorSpec v{1.0, Bc::Right, Direction::Forward};
inline constexpr KdvOperatorSpec p{0.5, Bc::Right, Direction::Backward};
inline constexpr KdvOperatorSpec q{-1.0, Bc::Left, Direction::Backward};
inline constexpr KdvOperatorSpec eta{0.5, Bc::Right, Direction::Backward};
inline constexpr KdvOperatorSpec psi{-1.0, Bc::Left, Direction::Backward};
inline constexpr KdvOperatorSpec zeta{-0.5, Bc::Left, Direction::Forward};
inline constexpr KdvOperatorSpec theta{1.0, Bc::Right, Direction::Forward};
inline constexpr std::array<KdvOperatorSpec, 8> all{u, v, p, q, eta, psi, zeta, theta};
} // namespace ops

struct ControlPair {
    Field h1, h2;
};

struct CascadeState {
    Field u, v, p, q;
};

struct AdjointState {
    Field eta, psi, zeta, theta;
};

using Sources = std::array<Field, 4>;
Sources zero_sources(const Problem& pb);

CascadeState solve_extended_linear(const Problem& pb, std::span<const double> u0, std::span<const double> v0,
                                   const ControlPair& h, const Sources& f);

AdjointState solve_adjoint(const Problem& pb, std::span<const double> zeta0, std::span<const double> theta0,
                           const Sources& g);

// same solve with the observation mask replaced (used to check decoupling)
AdjointState solve_adjoint_masked(const Problem& pb, std::span<const double> zeta0, std::span<const double> theta0,
                                  const Sources& g, std::span<const double> obs_mask);

enum class TimeRule {
    IntervalAverage,   // sum_k dt <(a_k+a_{k+1})/2, (b_k+b_{k+1})/2>, the one that transposes exactly
    Trapezoid,
    Rectangle,
};

// space-time pairing, dx * sum over interior nodes in space
double st_pair(const Field& a, const Field& b, const Problem& pb, TimeRule rule = TimeRule::IntervalAverage);
double st_pair_masked(const Field& a, const Field& b, std::span<const double> mask, const Problem& pb,
                      TimeRule rule = TimeRule::IntervalAverage);
double slice_dot(std::span<const double> a, std::span<const double> b, const Problem& pb);

struct DualityReport {
    double max_defect = 0;
    std::vector<double> lhs, rhs, defect;
};

// random (h1,h2) against random (zeta0,theta0): <(p0,q0),(zeta0,theta0)> = <<1_w h, (eta,psi)>>
DualityReport duality_pairing_check(const Problem& pb, int trials, std::uint64_t seed,
                                    TimeRule rule = TimeRule::IntervalAverage);

} // namespace hskdv
