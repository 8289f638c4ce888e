#pragma once

#include "kinreg/core.hpp"

#include <vector>

namespace kinreg {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre rule on [a, b] with n nodes (Golub-Welsch).
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre over consecutive breakpoints.
Rule1D composite_gauss(const std::vector<double>& breaks, int per_cell);

struct SphereRule {
    std::vector<Vec3> dirs;
    std::vector<double> w;  // sums to 4*pi
    std::size_t size() const { return dirs.size(); }
};

// Lebedev rules of 6, 14, 26 and 50 points (exact to degree 3, 5, 7, 11).
SphereRule lebedev(int npts);
bool lebedev_supported(int npts);
int lebedev_degree(int npts);

// Gauss in cos(theta) about `axis` times uniform azimuth.
SphereRule product_sphere_rule(int n_polar, int n_azimuth, const Vec3& axis = Vec3::UnitZ());

// Directions on the half sphere {omega . n > 0}: Gauss in mu = omega . n on
// (0, 1) times uniform azimuth. Weights sum to 2*pi.
SphereRule hemisphere_rule(int n_polar, int n_azimuth, const Vec3& n);

// Half-space velocity rule: hemisphere directions times radial Gauss nodes on
// [0, zeta_max] carrying the rho^2 Jacobian. Nodes are stored direction-major
// so callers can share one exit ray per direction.
struct HalfSpaceRule {
    SphereRule dirs;
    Rule1D radial;  // weights include rho^2
    int n_dir() const { return static_cast<int>(dirs.size()); }
    int n_rad() const { return static_cast<int>(radial.size()); }
};
HalfSpaceRule half_space_rule(int n_radial, int n_polar, int n_azimuth, double zeta_max, const Vec3& n);

}  // namespace kinreg
