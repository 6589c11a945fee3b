#include "hskdv/sources.hpp"

#include <cmath>
#include <numbers>

namespace hskdv {

std::vector<double> bump_profile(const Grid1D& g, double center, double width) {
    if (!(width > 0)) throw ConfigError("bump: width must be positive");
    std::vector<double> s(g.N + 2, 0.0);
    for (int j = 1; j <= g.N; ++j) {
        const double r = (g.x[j] - center) / width;
        if (std::abs(r) < 1) s[j] = std::exp(1.0 - 1.0 / (1.0 - r * r));
    }
    return s;
}

std::vector<double> admissible_time_profile(const TimeGrid& tg, double rate) {
    if (!(rate >= 0)) throw ConfigError("source: decay rate must be non-negative");
    std::vector<double> p(tg.M + 1, 0.0);
    for (int k = 1; k <= tg.M; ++k) p[k] = std::exp(-rate / tg.t[k] + rate / tg.T);
    return p;
}

Field admissible_source(const Problem& pb, double amplitude, double center, double width, double rate) {
    const auto s = bump_profile(pb.grid, center, width);
    const auto p = admissible_time_profile(pb.tgrid, rate);
    Field f = pb.zeros();
    for (int k = 0; k <= pb.tgrid.M; ++k)
        for (int j = 1; j <= pb.grid.N; ++j) f(k, j) = amplitude * p[k] * s[j];
    return f;
}

double default_source_rate(double s, double beta_max, double T) { return 1.1 * s * beta_max / T; }

std::vector<double> random_slice(const Grid1D& g, Rng& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> f(g.N + 2, 0.0);
    for (int j = 1; j <= g.N; ++j) f[j] = nd(rng);
    return f;
}

Field random_field(const Problem& pb, Rng& rng) {
    std::normal_distribution<double> nd;
    Field f = pb.zeros();
    for (int k = 0; k <= pb.tgrid.M; ++k)
        for (int j = 1; j <= pb.grid.N; ++j) f(k, j) = nd(rng);
    return f;
}

void project_unit(std::vector<double>& f, const Grid1D& g) {
    f.front() = 0.0;
    f.back() = 0.0;
    const double n = l2_norm(f, g);
    if (!(n > 0)) throw NumericError("perturbation: zero profile cannot be normalized");
    for (double& v : f) v /= n;
}

std::vector<double> random_unit_slice(const Grid1D& g, Rng& rng, int modes) {
    std::normal_distribution<double> nd;
    std::vector<double> f(g.N + 2, 0.0);
    for (int m = 1; m <= modes; ++m) {
        const double c = nd(rng) / (m * m);
        for (int j = 1; j <= g.N; ++j) f[j] += c * std::sin(m * std::numbers::pi * g.x[j] / g.L);
    }
    project_unit(f, g);
    return f;
}

Field random_smooth_field(const Problem& pb, Rng& rng, int modes) {
    std::normal_distribution<double> nd;
    Field f = pb.zeros();
    const double pi = std::numbers::pi;
    for (int m = 1; m <= modes; ++m) {
        const double a = nd(rng) / (m * m), b = nd(rng) / (m * m), c = nd(rng) / (m * m);
        for (int k = 0; k <= pb.tgrid.M; ++k) {
            const double tt = pb.tgrid.t[k] / pb.tgrid.T;
            const double amp = a + b * std::cos(pi * tt) + c * std::sin(pi * tt);
            for (int j = 1; j <= pb.grid.N; ++j) f(k, j) += amp * std::sin(m * pi * pb.grid.x[j] / pb.grid.L);
        }
    }
    return f;
}

} // namespace hskdv
