#include "hskdv/kdv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hskdv {

std::string to_string(Bc bc) { return bc == Bc::Left ? "LEFT" : "RIGHT"; }
std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

BandedMatrix assemble_d3(const Grid1D& g, Bc bc) {
    const int n = g.N;
    if (n < 8) throw ConfigError("kdv: grid too small for the third-difference stencil");
    const double h3 = g.dx * g.dx * g.dx;
    BandedMatrix D(n, 2, 2);
    static constexpr int off[4] = {-2, -1, 1, 2};
    static constexpr double c[4] = {-0.5, 1.0, -1.0, 0.5};
    for (int i = 0; i < n; ++i)
        for (int q = 0; q < 4; ++q) {
            const int j = i + off[q];
            if (j >= 0 && j < n) D.at(i, j) = c[q] / h3;
        }
    // ghosts: mirror y_{-1} = y_1 at x=0 (y_x(0)=0), y_{N+2} = -y_N at x=L (Dirichlet only)
    D.at(0, 0) += -0.5 / h3;
    D.at(n - 1, n - 1) += -0.5 / h3;
    if (bc == Bc::Left) return D;
    // the RIGHT variant is the mirror image, which equals minus the transpose
    BandedMatrix R = D.transpose();
    for (double& v : R.band) v = -v;
    return R;
}

std::pair<BandedMatrix, BandedMatrix> assemble_operator(const KdvOperatorSpec& spec, const Grid1D& g, double dt,
                                                        double theta) {
    if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("kdv: theta must lie in [1/2, 1]");
    if (!(dt > 0)) throw ConfigError("kdv: dt must be positive");
    const BandedMatrix D = assemble_d3(g, spec.bc);
    BandedMatrix A = D, B = D;
    for (std::size_t i = 0; i < D.band.size(); ++i) {
        A.band[i] = theta * spec.a * D.band[i];
        B.band[i] = -(1.0 - theta) * spec.a * D.band[i];
    }
    for (int i = 0; i < D.n; ++i) {
        A.at(i, i) += 1.0 / dt;
        B.at(i, i) += 1.0 / dt;
    }
    return {std::move(A), std::move(B)};
}

Field solve_linear_kdv(const KdvOperatorSpec& spec, const Grid1D& g, const TimeGrid& tg,
                       std::span<const double> init, const Field& source, double theta) {
    const int N = g.N, M = tg.M;
    if (int(init.size()) != N + 2) throw ConfigError("kdv: initial slice must have N+2 entries");
    if (source.rows() != M + 1 || source.cols() != N + 2) throw ConfigError("kdv: source shape mismatch");
    double scale = 0;
    for (double v : init) scale = std::max(scale, std::abs(v));
    if (std::abs(init[0]) > 1e-14 * scale || std::abs(init[N + 1]) > 1e-14 * scale)
        throw ConfigError("kdv: initial/terminal data violate the Dirichlet ends");

    auto [Aimp, Bexp] = assemble_operator(spec, g, tg.dt, theta);
    const BandedLU lu(Aimp);

    Field y(M + 1, N + 2);
    std::vector<double> cur(N), rhs(N);
    const bool fwd = spec.dir == Direction::Forward;
    const int k0 = fwd ? 0 : M;
    for (int j = 0; j < N; ++j) cur[j] = init[j + 1];
    for (int j = 0; j < N; ++j) y(k0, j + 1) = cur[j];

    for (int step = 0; step < M; ++step) {
        const int kold = fwd ? step : M - step;
        const int knew = fwd ? step + 1 : M - step - 1;
        Bexp.multiply(cur, rhs);
        const auto fo = source.row(kold);
        const auto fn = source.row(knew);
        for (int j = 0; j < N; ++j) rhs[j] += theta * fn[j + 1] + (1.0 - theta) * fo[j + 1];
        lu.solve_inplace(rhs);
        for (int j = 0; j < N; ++j) {
            if (!std::isfinite(rhs[j])) {
                std::ostringstream os;
                os << "kdv: non-finite value at step " << step << ", node " << j + 1;
                throw NumericError(os.str());
            }
            y(knew, j + 1) = rhs[j];
        }
        std::swap(cur, rhs);
    }
    return y;
}

void d1_slice(std::span<const double> y, std::span<double> out, double dx) {
    const std::size_t n = y.size();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (y[j + 1] - y[j - 1]) / (2 * dx);
}

Field nonlinear_term(const Field& y1, const Field& y2, double coeff, const Grid1D& g) {
    if (y1.rows() != y2.rows() || y1.cols() != y2.cols()) throw ConfigError("nonlinear_term: shape mismatch");
    Field out(y1.rows(), y1.cols());
    std::vector<double> d(y1.cols());
    for (int k = 0; k < y1.rows(); ++k) {
        d1_slice(y2.row(k), d, g.dx);
        auto o = out.row(k);
        auto a = y1.row(k);
        for (int j = 1; j + 1 < y1.cols(); ++j) o[j] = coeff * a[j] * d[j];
    }
    return out;
}

Field kdv_residual(const KdvOperatorSpec& spec, const Grid1D& g, const TimeGrid& tg, const Field& y,
                   const Field& source, double theta) {
    const int N = g.N, M = tg.M;
    const BandedMatrix D = assemble_d3(g, spec.bc);
    const bool fwd = spec.dir == Direction::Forward;
    Field r(M + 1, N + 2);
    std::vector<double> mix(N), dy(N);
    for (int k = 0; k < M; ++k) {
        const int kn = fwd ? k + 1 : k, ko = fwd ? k : k + 1;
        for (int j = 0; j < N; ++j) mix[j] = theta * y(kn, j + 1) + (1 - theta) * y(ko, j + 1);
        D.multiply(mix, dy);
        for (int j = 0; j < N; ++j) {
            const double f = theta * source(kn, j + 1) + (1 - theta) * source(ko, j + 1);
            r(k, j + 1) = (y(kn, j + 1) - y(ko, j + 1)) / tg.dt + spec.a * dy[j] - f;
        }
    }
    return r;
}

} // namespace hskdv
