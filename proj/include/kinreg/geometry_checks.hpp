#pragma once

#include "kinreg/checks.hpp"
#include "kinreg/mesh.hpp"
#include "kinreg/ray.hpp"

#include <random>

namespace kinreg {

using Rng = std::mt19937_64;

Vec3 random_unit(Rng& rng);
Vec3 random_boundary_point(const ConvexDomain& domain, Rng& rng);
// s * radial_point(u) with u uniform on the sphere and s^3 uniform on [0, (1 - margin)^3].
Vec3 random_interior_point(const ConvexDomain& domain, Rng& rng, double margin = 0.02);
Vec3 random_tangent(const Vec3& n, Rng& rng);

// ------------------------------------------------------------ log bound

struct InverseSquareRow {
    double d = 0;
    double integral = 0;
    double ratio = 0;  // integral / (|ln d| + 1)
};

double sphere_inverse_square_integral(double a);
double inverse_square_integral(const BoundaryMesh& mesh, const Vec3& x);
// Uses the given mesh; throws ResolutionError if the mesh spacing near the
// projection of x is not below d_x / 4.
std::vector<InverseSquareRow> check_inverse_square(const ConvexDomain& domain, const BoundaryMesh& mesh,
                                                   const std::vector<Vec3>& x_samples);
// Builds a mesh focused on the projection of each sample.
std::vector<InverseSquareRow> check_inverse_square_focused(const ConvexDomain& domain,
                                                           const std::vector<Vec3>& x_samples, int per_panel = 8,
                                                           int n_azimuth = 64);
double ratio_spread(const std::vector<InverseSquareRow>& rows);

// ------------------------------------------------------------ exponential map

struct ExpMapSample {
    Vec3 p0, x, v;
};
std::vector<ExpMapSample> sample_expmap(const ConvexDomain& domain, int n, unsigned seed);
CheckTable check_expmap_inequality(const ConvexDomain& domain, const std::vector<ExpMapSample>& samples);

struct GeodesicPair {
    Vec3 x, y, v;  // y = Exp_x(v)
};
std::vector<GeodesicPair> sample_geodesic_pairs(const ConvexDomain& domain, int n, unsigned seed);
// Rows geodesic_nx, geodesic_ny, geodesic_nyv; rhs is 4b.
CheckTable check_geodesic_normals(const ConvexDomain& domain, const std::vector<GeodesicPair>& pairs);

// ------------------------------------------------------------ sqrt bounds

struct SqrtSample {
    Vec3 x;  // boundary point
    Vec3 y;  // interior point with d_y <= R0
};
std::vector<SqrtSample> sample_sqrt(const ConvexDomain& domain, int n, unsigned seed);
CheckTable check_sqrt_bounds(const ConvexDomain& domain, const std::vector<SqrtSample>& samples);

// ------------------------------------------------------------ chords and rays

struct ChordSample {
    Vec3 x, zeta;
    double t = 0;
};
std::vector<ChordSample> sample_chords(const ConvexDomain& domain, int n, unsigned seed);
CheckTable check_chord_distance(const ConvexDomain& domain, const std::vector<ChordSample>& samples);

struct RaySample {
    Vec3 x, zeta;
};
std::vector<RaySample> sample_rays(const ConvexDomain& domain, int n, unsigned seed);
// Strict rows: Dtau_x, Dp_x, Dtau_zeta, Dp_zeta, tau_lower. The row
// Dp_zeta_stated carries the looser stated form tau (1 + 1/(N|zeta|)) and is
// advisory: it is not implied by the exact derivative when N < 1 - 1/|zeta|.
CheckTable check_ray_derivative_bounds(const ConvexDomain& domain, const std::vector<RaySample>& samples,
                                       double grazing_cutoff = 1e-3);

struct DifferenceSample {
    Vec3 x, y, zeta;
};
std::vector<DifferenceSample> sample_differences(const ConvexDomain& domain, int n, unsigned seed);
CheckTable check_exit_point_difference(const ConvexDomain& domain, const std::vector<DifferenceSample>& samples,
                                       double grazing_cutoff = 1e-3);

}  // namespace kinreg
