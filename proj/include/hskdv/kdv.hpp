#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hskdv/discretization.hpp"

namespace hskdv {

// LEFT: y(0)=y(L)=0, y_x(0)=0.  RIGHT: y(0)=y(L)=0, y_x(L)=0.
enum class Bc { Left, Right };
enum class Direction { Forward, Backward };

// forward:  y_t + a y_xxx = f,  y(0) given
// backward: -y_t + a y_xxx = f, y(T) given
struct KdvOperatorSpec {
    double a = 1.0;
    Bc bc = Bc::Left;
    Direction dir = Direction::Forward;
};

std::string to_string(Bc bc);
std::string to_string(Direction d);

// third-derivative matrix on the N interior unknowns (Dirichlet ends eliminated)
BandedMatrix assemble_d3(const Grid1D& g, Bc bc);

// (I/dt + theta a D3, I/dt - (1-theta) a D3)
std::pair<BandedMatrix, BandedMatrix> assemble_operator(const KdvOperatorSpec& spec, const Grid1D& g, double dt,
                                                        double theta = 0.5);

// init is y(0) for forward, y(T) for backward; N+2 entries with zero ends
Field solve_linear_kdv(const KdvOperatorSpec& spec, const Grid1D& g, const TimeGrid& tg,
                       std::span<const double> init, const Field& source, double theta = 0.5);

// discrete residual of the theta-scheme; row k holds the interval (t_k, t_{k+1}), last row zero
Field kdv_residual(const KdvOperatorSpec& spec, const Grid1D& g, const TimeGrid& tg, const Field& y,
                   const Field& source, double theta = 0.5);

// coeff * y1 * D1(y2), centered, zero boundary columns
Field nonlinear_term(const Field& y1, const Field& y2, double coeff, const Grid1D& g);

// centered first difference of one slice, zero at the two boundary entries
void d1_slice(std::span<const double> y, std::span<double> out, double dx);

} // namespace hskdv
