#pragma once

#include <span>
#include <vector>

#include "hskdv/discretization.hpp"

namespace hskdv {

// forward differences over the N+1 cells
double h1_seminorm_sq(std::span<const double> y, const Grid1D& g);
double h1_norm_sq(std::span<const double> y, const Grid1D& g);

// <y, (-Lap)^{-1} y> with the Dirichlet three-point Laplacian
class HMinus1 {
public:
    explicit HMinus1(const Grid1D& g);
    double norm_sq(std::span<const double> y) const;

private:
    Grid1D g_;
    BandedLU lu_;
};

// trapezoid in time of ||y_k||^2, then sqrt
double l2l2_norm(const Field& y, const Grid1D& g, const TimeGrid& tg);
double linf_l2_norm(const Field& y, const Grid1D& g);
// max_t L2 + L2(H1); the working norm for fixed-point increments
double yq_norm(const Field& y, const Grid1D& g, const TimeGrid& tg);

// log(exp(a) + exp(b)) without overflow
double log_add(double a, double b);

} // namespace hskdv
