#pragma once

#include "kinreg/transport.hpp"

namespace kinreg {

// d0 * 2^{-k/2}, k = 0..rungs-1.
std::vector<double> default_ladder(int rungs = 8, double d0 = 0.2);

struct RegularityOptions {
    double epsilon = 0.05;
    double epsilon_prime = 0.05;
    double exponent_slack = 0.2;
    double h_exponent_slack = 0.15;
    double ratio_slack = 10.0;
    // Advisory H ladder below the nominal one; empty disables it.
    std::vector<double> deep_ladder = default_ladder(8, 0.025);
    double fd_fraction = 0.1;    // central-difference step as a fraction of d_x
    double stability = 0.1;      // allowed relative change when the step is halved
    double min_speed = 0.5;      // interior gradient: velocity nodes with |zeta| >= this
    double decay_a = 0.4;        // Gaussian weight exponent in the I estimates
    int n_points = 4;            // wall points whose inward normals carry the ladder
    int velocity_stride = 8;     // H and II use every stride-th grid velocity
    int ii_velocities = 3;
    int n_pairs = 10;
    int n_anchors = 4;  // wall sweeps: anchors per separation
    double pair_min = 1e-3, pair_max = 0.3;
    int min_points = 8;
    unsigned seed = 1;
};

// log y = log C + p log x by least squares; 95% t-interval on p.
struct ExponentFit {
    double constant = 0, exponent = 0, ci_low = 0, ci_high = 0;
    int n = 0;
};
ExponentFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// A point at distance d from the wall on the inward normal through `wall`.
struct LadderPoint {
    Vec3 wall, x;
    double d = 0;
    int rung = 0;
};
std::vector<LadderPoint> ladder_points(const ConvexDomain& domain, const std::vector<double>& ladder, int n_points,
                                       unsigned seed);

Vec3 fd_gradient(const std::function<double(const Vec3&)>& fn, const Vec3& x, double h);

// sup over velocity nodes (|zeta| >= min_speed) of |d_x f| and |d_zeta f| on
// the ladder, with f evaluated from the integral equation. Rungs whose sup
// changes by more than `stability` under step halving are dropped; the
// finest rung only enters an advisory fit.
// Reports: interior_grad_x, interior_grad_x_finest (advisory), interior_grad_zeta (advisory).
std::vector<ModulusReport> probe_interior_gradient(const TransportSolution& sol, const std::vector<LadderPoint>& points,
                                                   const RegularityOptions& opt = {});

// d_x I against d_x^{-1} e^{-a|zeta|^2/2} on the ladder, and the N-weighted
// Hoelder form on pairs. Reports: I_gradient, I_holder_N.
std::vector<ModulusReport> probe_I_derivative(const ConvexDomain& domain, const KineticModel& model,
                                              const VelocityGrid& grid, const WallFlux& psi,
                                              const BoundaryTemperature& T, const std::vector<LadderPoint>& points,
                                              const RegularityOptions& opt = {});

// Reports: H_gradient, II_gradient, II_gradient_speed_weighted and, when
// opt.deep_ladder is set, H_gradient_deep (advisory) on the same wall points.
std::vector<ModulusReport> probe_II_and_H(const ConvexDomain& domain, const KineticModel& model,
                                          const VelocityGrid& grid, const WallFlux& psi,
                                          const BoundaryTemperature& T, const std::vector<LadderPoint>& points,
                                          const RegularityOptions& opt = {});

// Pair sweeps on a converged solution. Reports: Df_modulus, G_modulus,
// III_holder, kdI_holder, boundary_holder_speed_{low,mid,high}.
std::vector<ModulusReport> probe_moduli(const TransportSolution& sol, const RegularityOptions& opt = {});

// Status from boundedness of the ratio sequence (max <= slack * median).
void judge_boundedness(ModulusReport& rep, const RegularityOptions& opt);
// Status from the upper confidence bound of the fitted exponent.
void judge_exponent(ModulusReport& rep, double limit, const RegularityOptions& opt);

}  // namespace kinreg
