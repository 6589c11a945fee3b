#include "hskdv/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

namespace hskdv {

Grid1D make_grid(double L, int N) {
    if (!(L > 0) || !std::isfinite(L))
        throw ConfigError("grid: length L must be positive, got " + std::to_string(L));
    if (N < 8)
        throw ConfigError("grid: need N >= 8 interior nodes, got " + std::to_string(N));
    Grid1D g;
    g.L = L;
    g.N = N;
    g.dx = L / (N + 1);
    g.x.resize(N + 2);
    for (int j = 0; j <= N + 1; ++j) g.x[j] = j * g.dx;
    g.x[N + 1] = L;
    return g;
}

TimeGrid make_time_grid(double T, int M) {
    if (!(T > 0) || !std::isfinite(T))
        throw ConfigError("time grid: horizon T must be positive, got " + std::to_string(T));
    if (M < 2)
        throw ConfigError("time grid: need M >= 2 steps, got " + std::to_string(M));
    TimeGrid tg;
    tg.T = T;
    tg.M = M;
    tg.dt = T / M;
    tg.t.resize(M + 1);
    for (int k = 0; k <= M; ++k) tg.t[k] = k * tg.dt;
    tg.t[M] = T;
    return tg;
}

Field& Field::operator+=(const Field& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}
Field& Field::operator-=(const Field& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}
Field& Field::operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
}
Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field masked(const Field& f, std::span<const double> mask) {
    Field out = f;
    for (int k = 0; k < f.rows(); ++k)
        for (int j = 0; j < f.cols(); ++j) out(k, j) *= mask[j];
    return out;
}

double max_abs(const Field& f) {
    double m = 0;
    for (double x : f.data()) m = std::max(m, std::abs(x));
    return m;
}

double& BandedMatrix::at(int i, int j) {
    if (!in_band(i, j)) throw NumericError("banded: entry outside band");
    return band[std::size_t(i) * width() + (j - i + kl)];
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    const int w = width();
    for (int i = 0; i < n; ++i) {
        double s = 0;
        const int j0 = std::max(0, i - kl), j1 = std::min(n - 1, i + ku);
        const double* r = band.data() + std::size_t(i) * w + kl - i;
        for (int j = j0; j <= j1; ++j) s += r[j] * x[j];
        y[i] = s;
    }
}

BandedMatrix BandedMatrix::transpose() const {
    BandedMatrix t(n, ku, kl);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) t.at(j, i) = get(i, j);
    return t;
}

BandedMatrix BandedMatrix::identity(int n) {
    BandedMatrix I(n, 0, 0);
    for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
    return I;
}

BandedLU::BandedLU(const BandedMatrix& A) : n_(A.n), kl_(A.kl), ku_(A.ku) {
    if (n_ <= 0) throw NumericError("banded: empty matrix");
    ldab_ = 2 * kl_ + ku_ + 1;
    ab_.assign(std::size_t(ldab_) * n_, 0.0);
    ipiv_.assign(n_, 0);
    std::vector<double> rowmax(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) {
            const double a = A.get(i, j);
            ab_[std::size_t(j) * ldab_ + kl_ + ku_ + i - j] = a;
            rowmax[i] = std::max(rowmax[i], std::abs(a));
        }
    for (int i = 0; i < n_; ++i)
        if (rowmax[i] == 0.0) {
            std::ostringstream os;
            os << "banded: row " << i << " is identically zero";
            throw NumericError(os.str());
        }

    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    if (info < 0) throw NumericError("banded: dgbtrf rejected argument " + std::to_string(-info));

    // pivots against the row scale; a zero pivot shows up as info > 0 too
    for (int j = 0; j < n_; ++j) {
        const double piv = ab_[std::size_t(j) * ldab_ + kl_ + ku_];
        if (!(std::abs(piv) > 1e-14 * rowmax[j])) {
            std::ostringstream os;
            os << "banded: pivot " << j << " = " << piv << " vs row max " << rowmax[j]
               << " (info " << info << ")";
            throw NumericError(os.str());
        }
    }
}

void BandedLU::solve_inplace(std::span<double> b) const {
    if (int(b.size()) != n_) throw NumericError("banded: rhs size mismatch");
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                                           ipiv_.data(), b.data(), n_);
    if (info != 0) throw NumericError("banded: dgbtrs failed, info " + std::to_string(info));
}

std::vector<double> solve_banded(const BandedMatrix& A, std::span<const double> rhs) {
    BandedLU lu(A);
    std::vector<double> x(rhs.begin(), rhs.end());
    lu.solve_inplace(x);
    for (double v : x)
        if (!std::isfinite(v)) throw NumericError("banded: non-finite solution");
    return x;
}

double l2_dot(std::span<const double> a, std::span<const double> b, const Grid1D& g) {
    const int n = g.N + 1;
    double s = 0.5 * (a[0] * b[0] + a[n] * b[n]);
    for (int j = 1; j < n; ++j) s += a[j] * b[j];
    return s * g.dx;
}

double l2_norm(std::span<const double> f, const Grid1D& g) {
    return std::sqrt(std::max(0.0, l2_dot(f, f, g)));
}

std::vector<double> indicator_mask(double a, double b, const Grid1D& g) {
    if (!(a < b)) {
        std::ostringstream os;
        os << "mask: interval (" << a << ", " << b << ") is empty or inverted";
        throw ConfigError(os.str());
    }
    if (a < 0 || b > g.L + 1e-12 * g.L) {
        std::ostringstream os;
        os << "mask: interval (" << a << ", " << b << ") leaves [0, " << g.L << "]";
        throw ConfigError(os.str());
    }
    std::vector<double> m(g.N + 2, 0.0);
    const double snap = 1e-9 * g.dx;
    for (int j = 1; j <= g.N; ++j) {
        const double x = g.x[j];
        if (std::abs(x - a) <= snap || std::abs(x - b) <= snap)
            m[j] = 0.5;
        else if (x > a && x < b)
            m[j] = 1.0;
    }
    return m;
}

} // namespace hskdv
