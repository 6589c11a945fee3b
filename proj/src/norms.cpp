#include "hskdv/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hskdv {

double h1_seminorm_sq(std::span<const double> y, const Grid1D& g) {
    double s = 0;
    for (int j = 0; j <= g.N; ++j) {
        const double d = (y[j + 1] - y[j]) / g.dx;
        s += d * d;
    }
    return s * g.dx;
}

double h1_norm_sq(std::span<const double> y, const Grid1D& g) {
    const double l2 = l2_norm(y, g);
    return l2 * l2 + h1_seminorm_sq(y, g);
}

namespace {
BandedMatrix neg_laplacian(const Grid1D& g) {
    BandedMatrix A(g.N, 1, 1);
    const double h2 = g.dx * g.dx;
    for (int i = 0; i < g.N; ++i) {
        A.at(i, i) = 2.0 / h2;
        if (i > 0) A.at(i, i - 1) = -1.0 / h2;
        if (i + 1 < g.N) A.at(i, i + 1) = -1.0 / h2;
    }
    return A;
}
} // namespace

HMinus1::HMinus1(const Grid1D& g) : g_(g), lu_(neg_laplacian(g)) {}

double HMinus1::norm_sq(std::span<const double> y) const {
    std::vector<double> w(y.begin() + 1, y.begin() + 1 + g_.N);
    lu_.solve_inplace(w);
    double s = 0;
    for (int j = 0; j < g_.N; ++j) s += y[j + 1] * w[j];
    return s * g_.dx;
}

double l2l2_norm(const Field& y, const Grid1D& g, const TimeGrid& tg) {
    double s = 0;
    for (int k = 0; k <= tg.M; ++k) {
        const double n = l2_norm(y.row(k), g);
        s += ((k == 0 || k == tg.M) ? 0.5 : 1.0) * n * n;
    }
    return std::sqrt(s * tg.dt);
}

double linf_l2_norm(const Field& y, const Grid1D& g) {
    double m = 0;
    for (int k = 0; k < y.rows(); ++k) m = std::max(m, l2_norm(y.row(k), g));
    return m;
}

double yq_norm(const Field& y, const Grid1D& g, const TimeGrid& tg) {
    double s = 0;
    for (int k = 0; k <= tg.M; ++k) s += ((k == 0 || k == tg.M) ? 0.5 : 1.0) * h1_norm_sq(y.row(k), g);
    return linf_l2_norm(y, g) + std::sqrt(s * tg.dt);
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

} // namespace hskdv
