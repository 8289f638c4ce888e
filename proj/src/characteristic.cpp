#include "kinreg/characteristic.hpp"

#include "kinreg/core.hpp"

#include <algorithm>
#include <cmath>

namespace kinreg {

std::vector<double> chord_nodes(double length, int uniform_cells, int end_levels) {
    if (!(length >= 0)) throw ArgumentError("chord_nodes: negative length");
    std::vector<double> t;
    for (int k = 0; k <= uniform_cells; ++k) t.push_back(length * k / uniform_cells);
    double gap = 1.0 / uniform_cells;
    for (int k = 0; k < end_levels; ++k) {
        gap *= 0.5;
        t.push_back(length * (1.0 - gap));
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [&](double a, double b) { return b - a <= 1e-14 * length; }), t.end());
    return t;
}

void exp_fitted_weights(const std::vector<double>& nodes, double a, std::vector<double>& w) {
    const std::size_t n = nodes.size();
    w.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = nodes[k + 1] - nodes[k];
        if (h <= 0) continue;
        const double u = a * h;
        double left, right;
        if (u < 1e-3) {
            left = 0.5 - u / 6.0 + u * u / 24.0;
            right = 0.5 - u / 3.0 + u * u / 8.0;
        } else {
            const double em = std::expm1(-u);
            left = (u + em) / (u * u);
            right = (-em - u * (1.0 + em)) / (u * u);
        }
        const double damp = std::exp(-a * nodes[k]) * h;
        w[k] += damp * left;
        w[k + 1] += damp * right;
    }
}

}  // namespace kinreg
