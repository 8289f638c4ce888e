#pragma once

#include "kinreg/boundary_flux.hpp"

namespace kinreg {

// Incoming wall data (psi(x) + T(x)(|zeta|^2 - 2)) sqrt M(zeta). Requires
// zeta . n(x) < 0.
double boundary_value(const ConvexDomain& domain, const WallFlux& psi, const BoundaryTemperature& T, const Vec3& x,
                      const Vec3& zeta);

struct RayEval {
    double value = 0;
    bool grazing = false;  // N below the grid's cutoff; boundary term only
};

// One application of the integral equation at (x, zeta): the damped boundary
// term plus int_0^tau e^{-nu s} K f(x - s zeta, zeta) ds.
RayEval evaluate_f(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                   const WallFlux& psi, const BoundaryTemperature& T, const CollisionSource& kf, const Vec3& x,
                   const Vec3& zeta);

struct PicardOptions {
    double tol = 1e-6;  // max-norm update relative to max |f|
    int max_iters = 400;
    double anchor = 0.0;  // volume mean of the density
    FluxSolveOptions flux;
    FluxQuadSpec flux_quad;
    int n_probes = 100;
    unsigned seed = 1;
    const RowMatX* initial = nullptr;  // warm start, n_nodes x n_velocities
};

struct ProbeResidual {
    Vec3 x;
    int velocity = 0;
    double f = 0, rhs = 0;
};

struct TransportSolution {
    std::shared_ptr<const ConvexDomain> domain;
    KineticModel model;
    std::shared_ptr<const VelocityGrid> grid;
    BoundaryTemperature T;
    DistributionField f;
    std::shared_ptr<FieldSource> kf;
    WallFlux psi;

    int iterations = 0;
    std::vector<double> update_history;
    std::vector<int> flux_iterations;
    double anchored_mass = 0;
    double contraction = 0;  // median ratio of successive updates over the tail
    std::vector<ProbeResidual> probes;
    double probe_residual_max = 0;
    int grazing_pairs = 0;

    double density(int node) const;
};

// Picard iteration of the integral equation on volume nodes x velocity nodes,
// with a wall-flux solve before every sweep and the mean density held at the
// anchor. Throws ConvergenceError with the update history on failure.
TransportSolution picard_solve(std::shared_ptr<const ConvexDomain> domain, const KineticModel& model,
                               std::shared_ptr<const VelocityGrid> grid, std::shared_ptr<const VolumeNodes> nodes,
                               std::shared_ptr<const BoundaryMesh> mesh, const BoundaryTemperature& T,
                               const PicardOptions& options = {});

// Convenience wrapper: 12 x 24 boundary mesh and the given number of volume nodes.
TransportSolution picard_solve(std::shared_ptr<const ConvexDomain> domain, const KineticModel& model,
                               const VelocityGridSpec& grid, const BoundaryTemperature& T, int n_volume = 600,
                               const PicardOptions& options = {});

// Wall data along a ray: I(x, zeta) = f_b(p, zeta) e^{-nu tau}.
double damped_boundary_term(const ConvexDomain& domain, const KineticModel& model, const WallFlux& psi,
                            const BoundaryTemperature& T, const Vec3& x, const Vec3& zeta);

// H(x, zeta) = int k(zeta, zeta') I(x, zeta') dzeta'.
double H_eval(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid, const WallFlux& psi,
              const BoundaryTemperature& T, const Vec3& x, const Vec3& zeta);

struct GVolumeSpec {
    int n_polar = 12;
    int n_azimuth = 24;
    int speed_per_panel = 12;
};

// G(x0, zeta) = int k(zeta, zeta') int_0^tau' e^{-nu' s} K f(x0 - s zeta', zeta') ds dzeta'
// written over y in the domain and the speed rho: directions about x0, chords
// to the wall and Gauss in rho. The kernel singularity at zeta' = zeta is
// subtracted with a Gaussian and integrated separately on the centred rule.
double G_volume_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                     const CollisionSource& kf, const Vec3& x0, const Vec3& zeta, const GVolumeSpec& spec = {});
// The same G with the centred velocity rule and one chord per velocity node.
double G_velocity_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                       const CollisionSource& kf, const Vec3& x0, const Vec3& zeta);

struct Decomposition {
    double I = 0, II = 0, III = 0;
    bool grazing = false;
    double sum() const { return I + II + III; }
};

enum class ThirdTerm { VolumeForm, VelocityForm };

// f = I + II + III with II = int e^{-nu s} H(x - s zeta, zeta) ds and
// III = int e^{-nu s} G(x - s zeta, zeta) ds.
Decomposition decompose_I_II_III(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                                 const WallFlux& psi, const BoundaryTemperature& T, const CollisionSource& kf,
                                 const Vec3& x, const Vec3& zeta, ThirdTerm third = ThirdTerm::VolumeForm);

// int_0^tau e^{-nu s} g(x - s zeta) ds with the chord rule used throughout.
double ray_integral(const ConvexDomain& domain, const KineticModel& model, const Vec3& x, const Vec3& zeta,
                    const std::function<double(const Vec3&)>& g);

}  // namespace kinreg
