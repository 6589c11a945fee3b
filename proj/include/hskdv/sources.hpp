#pragma once

#include <random>
#include <vector>

#include "hskdv/cascade.hpp"

namespace hskdv {

using Rng = std::mt19937_64;

// smooth compactly supported bump exp(-1/(1-r^2)), scaled to peak 1
std::vector<double> bump_profile(const Grid1D& g, double center, double width);

// exp(-a/t) scaled to 1 at t = T, exactly 0 at t = 0
std::vector<double> admissible_time_profile(const TimeGrid& tg, double rate);

// A exp(-a/t) sigma(x)
Field admissible_source(const Problem& pb, double amplitude, double center, double width, double rate);

// smallest rate keeping exp(s S^) Z^{-1/2} xi bounded is s*beta_max/T; we add 10%
double default_source_rate(double s, double beta_max, double T);

// white noise on interior nodes
std::vector<double> random_slice(const Grid1D& g, Rng& rng);
Field random_field(const Problem& pb, Rng& rng);

// low sine modes with 1/k^2 decay, unit trapezoid L2 norm
std::vector<double> random_unit_slice(const Grid1D& g, Rng& rng, int modes = 6);
// smooth in t and x, vanishing at x = 0, L
Field random_smooth_field(const Problem& pb, Rng& rng, int modes = 4);

// zero the Dirichlet ends and rescale to unit norm
void project_unit(std::vector<double>& f, const Grid1D& g);

} // namespace hskdv
