#pragma once

#include <vector>

namespace kinreg {

// Nodes on [0, L] for integrals along a backward characteristic: sixteen
// uniform cells plus geometric refinement toward the far end, where the ray
// approaches the boundary.
std::vector<double> chord_nodes(double length, int uniform_cells = 16, int end_levels = 6);

// Weights w with  int_0^L e^{-a l} g(l) dl = sum_k w_k g(l_k)  exactly when g
// is piecewise linear on the nodes (a >= 0).
void exp_fitted_weights(const std::vector<double>& nodes, double a, std::vector<double>& w);

}  // namespace kinreg
