#pragma once

#include "kinreg/domain.hpp"

namespace kinreg {

struct RayHit {
    double tau_minus = 0;   // backward travel time
    Vec3 exit_point;        // x - tau_minus * zeta
    double normal_component = 0;  // |n(p) . zeta| / |zeta|
    double length = 0;      // |x - exit_point|
};

RayHit exit_ray(const ConvexDomain& domain, const Vec3& x, const Vec3& zeta);

// Nearest boundary point (multi-start Lagrange-Newton).
Vec3 project_to_boundary(const ConvexDomain& domain, const Vec3& x);
double boundary_distance(const ConvexDomain& domain, const Vec3& x);

// Surface geodesic from p0 with initial direction v/|v| and arclength |v|.
Vec3 exp_map(const ConvexDomain& domain, const Vec3& p0, const Vec3& v);
// Same, with an explicit number of integration steps (for convergence studies).
Vec3 exp_map_steps(const ConvexDomain& domain, const Vec3& p0, const Vec3& v, int steps);

}  // namespace kinreg
