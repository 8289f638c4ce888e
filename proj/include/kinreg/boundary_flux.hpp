#pragma once

#include "kinreg/checks.hpp"
#include "kinreg/field.hpp"

#include <functional>

namespace kinreg {

// Half-space velocity rule at a boundary point: Gauss in mu = omega . n times
// uniform azimuth, radial Gauss on [0, zeta_max]. n_radial = 0 takes the
// velocity grid's radial count, so the radial nodes coincide with grid speeds.
struct FluxQuadSpec {
    int n_polar = 8;
    int n_azimuth = 16;
    int n_radial = 0;
};

// Quadrature for the surface forms of B_psi and B_T: a boundary mesh focused
// on x, and a composite rule for the speed integral.
struct SurfaceFormSpec {
    int per_panel = 8;
    int n_azimuth = 48;
    int n_speed = 8;  // Gauss nodes per speed panel
};

// Quadrature for the volume form of D_f: hemisphere directions about n(x),
// radially graded shells from x, and Gauss nodes in speed.
struct VolumeFormSpec {
    int n_polar = 12;
    int n_azimuth = 24;
    int per_shell = 4;
    int n_speed = 24;
};

// psi(x) = 2 sqrt(pi) int_{zeta.n>0} f(zeta) |zeta.n| sqrt(M) dzeta.
double psi_moment(const ConvexDomain& domain, const VelocityGrid& grid, const std::function<double(const Vec3&)>& f,
                  const Vec3& x, const FluxQuadSpec& quad = {});

double B_T(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
           const BoundaryTemperature& T, const Vec3& x, const FluxQuadSpec& quad = {});
double B_psi_velocity_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                           const std::function<double(const Vec3&)>& psi, const Vec3& x,
                           const FluxQuadSpec& quad = {});
double D_f_velocity_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                         const CollisionSource& kf, const Vec3& x, const FluxQuadSpec& quad = {});

// (2/pi) int psi(y) [(x-y).n(x)] |(x-y).n(y)| |x-y|^-4 J(|x-y|) dA(y) with
// J(r) = int rho^3 e^{-rho^2} e^{-nu(rho) r / rho} drho.
double B_psi_surface_form(const ConvexDomain& domain, const KineticModel& model,
                          const std::function<double(const Vec3&)>& psi, const Vec3& x,
                          const SurfaceFormSpec& spec = {});
// Same with T(y) and J_T(r) = int rho^3 (rho^2 - 2) e^{-rho^2} e^{-nu r / rho} drho.
double B_T_surface_form(const ConvexDomain& domain, const KineticModel& model, const BoundaryTemperature& T,
                        const Vec3& x, const SurfaceFormSpec& spec = {});

double D_f_volume_form(const ConvexDomain& domain, const KineticModel& model, const CollisionSource& kf,
                       const Vec3& x, double zeta_max = 6.0, const VolumeFormSpec& spec = {});

// Linear pieces of psi = B_T + B_psi[psi] + D_f on a mesh, all in the velocity
// form: B_psi as a mesh x mesh matrix, B_T as a vector, and D_f either through
// a collision source or as a dense map from nodal K f values.
class FluxOperator {
public:
    FluxOperator(std::shared_ptr<const ConvexDomain> domain, const KineticModel& model,
                 std::shared_ptr<const VelocityGrid> grid, std::shared_ptr<const BoundaryMesh> mesh,
                 const FluxQuadSpec& quad = {});

    const MatX& b_psi() const { return bpsi_; }
    VecX b_t(const BoundaryTemperature& T) const;
    VecX d_f(const CollisionSource& kf) const;
    // Dense map D with D_f = D * vec(Kf), vec taken node-major (row-major
    // n_nodes x n_velocities storage).
    RowMatX d_f_matrix(const VolumeNodes& nodes, const ShepardInterpolator& interp) const;

    const BoundaryMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const BoundaryMesh> mesh_ptr() const { return mesh_; }
    std::shared_ptr<const SurfaceInterpolator> interpolator() const { return interp_; }
    // Largest row sum of the B_psi matrix; 1 signals the neutral mode.
    double b_psi_row_sum_max() const;

private:
    struct Ray {
        Vec3 omega;
        double prefactor = 0;  // 2 sqrt(pi) w_dir mu (speed weights applied separately)
        double length = 0;
        Vec3 exit_point;
    };
    std::shared_ptr<const ConvexDomain> domain_;
    KineticModel model_;
    std::shared_ptr<const VelocityGrid> grid_;
    std::shared_ptr<const BoundaryMesh> mesh_;
    std::shared_ptr<const SurfaceInterpolator> interp_;
    std::vector<double> rho_, w_rho_, nu_;  // speed nodes (weights with rho^2)
    std::vector<std::vector<Ray>> rays_;    // per mesh node
    MatX bpsi_;
};

struct FluxSolveOptions {
    double tol = 1e-10;
    int max_iters = 500;
    double anchor = 0.0;  // mesh-mean of psi used when the neutral mode is present
};

struct FluxSolveResult {
    WallFlux psi;
    int iterations = 0;
    bool anchored = false;
    std::vector<double> history;
    double lipschitz = 0;  // observed contraction factor
};

// Jacobi iteration psi <- B_T + B_psi psi + D_f on the mesh values.
FluxSolveResult solve_wall_flux(const FluxOperator& op, const VecX& bt, const VecX& df,
                                const FluxSolveOptions& options = {}, const VecX* initial = nullptr);
FluxSolveResult solve_wall_flux(const FluxOperator& op, const BoundaryTemperature& T, const CollisionSource& kf,
                                const FluxSolveOptions& options = {});

// Boundary pairs at n separations log-spaced in [s_min, s_max], swept from
// each of n_anchors random wall points along a fixed tangent.
struct BoundaryPair {
    Vec3 x0, x1;
};
std::vector<BoundaryPair> boundary_pairs(const ConvexDomain& domain, int n, double s_min, double s_max,
                                         unsigned seed, int n_anchors = 1);

// |D_f(x0) - D_f(x1)| against |x0 - x1| (1 + |ln |x0 - x1||); pairs with
// equal separation are merged into one sample (largest ratio).
ModulusReport check_Df_modulus(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                               const CollisionSource& kf, const std::vector<BoundaryPair>& pairs,
                               const FluxQuadSpec& quad = {});

struct GradientSample {
    Vec3 x, tangent;
};
struct GradBRow {
    std::string quantity;  // B_T, B_psi or D_f
    int sample_id = 0;
    double h = 0;
    double quotient = 0;  // |F(x+h) - F(x-h)| / (2h)
};
struct GradBReport {
    std::vector<GradBRow> rows;
    // Per quantity: max quotient at h, h/2, h/4 and the relative spread.
    struct Summary {
        std::string quantity;
        double q_h = 0, q_h2 = 0, q_h4 = 0;
        bool stable = false;
    };
    std::vector<Summary> summary;
    bool all_stable() const;
};
std::vector<GradientSample> sample_tangents(const ConvexDomain& domain, int n, unsigned seed);
// Tangential central differences with displaced points re-projected onto the
// boundary; h is taken as h_rel * diameter.
GradBReport check_grad_B_bounded(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                                 const BoundaryTemperature& T, const WallFlux& psi, const CollisionSource& kf,
                                 const std::vector<GradientSample>& samples, double h_rel = 1e-3,
                                 const FluxQuadSpec& quad = {});

}  // namespace kinreg
