#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hskdv/cascade.hpp"

namespace support {

inline const nlohmann::json& oracle() {
    static const nlohmann::json j = [] {
        std::ifstream f(std::string(HSKDV_TEST_DATA) + "/oracle.json");
        return nlohmann::json::parse(f);
    }();
    return j;
}

inline hskdv::Problem desk() {
    return hskdv::make_problem(1.0, 64, 0.5, 128, {0.45, 0.8}, {0.2, 0.6}, {0.48, 0.56});
}

inline hskdv::Problem small(int N, int M, double T) {
    return hskdv::make_problem(1.0, N, T, M, {0.45, 0.8}, {0.2, 0.6}, {0.48, 0.56});
}

// samples g(x) on all nodes; ends forced to zero when asked
inline std::vector<double> sample(const hskdv::Grid1D& g, const std::function<double(double)>& f, bool zero_ends = true) {
    std::vector<double> v(g.N + 2);
    for (int j = 0; j <= g.N + 1; ++j) v[j] = f(g.x[j]);
    if (zero_ends) v.front() = v.back() = 0.0;
    return v;
}

inline hskdv::Field sample(const hskdv::Problem& pb, const std::function<double(double, double)>& f) {
    hskdv::Field y = pb.zeros();
    for (int k = 0; k <= pb.tgrid.M; ++k)
        for (int j = 1; j <= pb.grid.N; ++j) y(k, j) = f(pb.tgrid.t[k], pb.grid.x[j]);
    return y;
}

// largest |a_j - b_j| over interior nodes against a json list of interior values
inline double max_diff_interior(std::span<const double> a, const nlohmann::json& ref) {
    double m = 0;
    for (std::size_t j = 0; j < ref.size(); ++j) m = std::max(m, std::abs(a[j + 1] - ref[j].get<double>()));
    return m;
}

inline double max_abs_json(const nlohmann::json& ref) {
    double m = 0;
    for (const auto& v : ref) m = std::max(m, std::abs(v.get<double>()));
    return m;
}

} // namespace support
