#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hskdv/errors.hpp"

namespace hskdv {

struct Grid1D {
    double L = 0;
    int N = 0;        // interior nodes
    double dx = 0;
    std::vector<double> x;   // N+2 nodes, x[0]=0, x[N+1]=L
};

struct TimeGrid {
    double T = 0;
    int M = 0;
    double dt = 0;
    std::vector<double> t;   // M+1 nodes
};

Grid1D make_grid(double L, int N);
TimeGrid make_time_grid(double T, int M);

// (M+1) x (N+2) row-major samples; row k is time t_k
class Field {
public:
    Field() = default;
    Field(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols), v_(std::size_t(rows) * cols, fill) {}
    Field(const Grid1D& g, const TimeGrid& tg) : Field(tg.M + 1, g.N + 2) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int k, int j) { return v_[std::size_t(k) * cols_ + j]; }
    double operator()(int k, int j) const { return v_[std::size_t(k) * cols_ + j]; }
    std::span<double> row(int k) { return {v_.data() + std::size_t(k) * cols_, std::size_t(cols_)}; }
    std::span<const double> row(int k) const { return {v_.data() + std::size_t(k) * cols_, std::size_t(cols_)}; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// multiply every row by a spatial weight (masks)
Field masked(const Field& f, std::span<const double> mask);
double max_abs(const Field& f);

// square band matrix, row-major band storage: entry (i,j) at band[i*(kl+ku+1) + (j-i+kl)]
struct BandedMatrix {
    int n = 0, kl = 0, ku = 0;
    std::vector<double> band;

    BandedMatrix() = default;
    BandedMatrix(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_), band(std::size_t(n_) * (kl_ + ku_ + 1), 0.0) {}
    int width() const { return kl + ku + 1; }
    bool in_band(int i, int j) const { return j - i <= ku && i - j <= kl; }
    double get(int i, int j) const { return in_band(i, j) ? band[std::size_t(i) * width() + (j - i + kl)] : 0.0; }
    double& at(int i, int j);
    // y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    BandedMatrix transpose() const;
    static BandedMatrix identity(int n);
};

// LU factors (LAPACK gbtrf) kept for repeated solves with the same matrix
class BandedLU {
public:
    BandedLU() = default;
    explicit BandedLU(const BandedMatrix& A);
    // in place: b <- A^{-1} b
    void solve_inplace(std::span<double> b) const;
    int size() const { return n_; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
};

std::vector<double> solve_banded(const BandedMatrix& A, std::span<const double> rhs);

// composite trapezoid, slice has N+2 entries
double l2_norm(std::span<const double> f, const Grid1D& g);
double l2_dot(std::span<const double> a, std::span<const double> b, const Grid1D& g);

// 1 strictly inside (a,b), 1/2 on a node sitting exactly on an end, 0 elsewhere; boundary nodes always 0
std::vector<double> indicator_mask(double a, double b, const Grid1D& g);

} // namespace hskdv
