#pragma once

#include "kinreg/collision.hpp"
#include "kinreg/mesh.hpp"
#include "kinreg/spatial.hpp"

#include <functional>
#include <memory>

namespace kinreg {

// Wall temperature perturbation T(x). Linear: t0 + slope . x. Bump:
// t0 + amplitude * exp(-|x - center|^2 / width^2).
struct BoundaryTemperature {
    enum class Kind { Constant, Linear, Bump };
    Kind kind = Kind::Constant;
    double t0 = 0.0;
    Vec3 slope = Vec3::Zero();
    double amplitude = 0.0;
    Vec3 center = Vec3::Zero();
    double width = 1.0;

    static BoundaryTemperature constant(double t0);
    static BoundaryTemperature linear(double t0, const Vec3& slope);
    static BoundaryTemperature bump(double t0, double amplitude, const Vec3& center, double width);

    double operator()(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
    bool is_constant() const;
    void validate() const;
};

std::string to_string(BoundaryTemperature::Kind k);
BoundaryTemperature::Kind temperature_kind(const std::string& name);

// psi on the nodes of a boundary mesh, with MLS interpolation to other
// boundary points.
struct WallFlux {
    std::shared_ptr<const BoundaryMesh> mesh;
    std::shared_ptr<const SurfaceInterpolator> interp;
    VecX values;

    double at(const Vec3& p) const;
    int size() const { return static_cast<int>(values.size()); }
};

WallFlux make_wall_flux(std::shared_ptr<const ConvexDomain> domain, std::shared_ptr<const BoundaryMesh> mesh,
                        VecX values);
WallFlux constant_wall_flux(std::shared_ptr<const ConvexDomain> domain, std::shared_ptr<const BoundaryMesh> mesh,
                            double value);

// f(x, zeta) on volume nodes x velocity nodes; Shepard in x and the grid's
// velocity basis (acting on f / sqrt M) in zeta.
struct DistributionField {
    std::shared_ptr<const VolumeNodes> nodes;
    std::shared_ptr<const VelocityGrid> grid;
    std::shared_ptr<const ShepardInterpolator> interp;
    RowMatX values;  // n_nodes x n_velocities

    double at(const Vec3& x, const Vec3& zeta) const;
    double at_node_velocity(const Vec3& x, int m) const;
    double max_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

DistributionField make_field(std::shared_ptr<const VolumeNodes> nodes, std::shared_ptr<const VelocityGrid> grid,
                             std::shared_ptr<const ShepardInterpolator> interp = nullptr);
DistributionField sample_field(std::shared_ptr<const VolumeNodes> nodes, std::shared_ptr<const VelocityGrid> grid,
                               const std::function<double(const Vec3&, const Vec3&)>& f);

// K restricted to the grid: (K f)(zeta_m) = sum_m' W(m, m') f(zeta_m').
class DiscreteCollision {
public:
    DiscreteCollision(const KineticModel& model, std::shared_ptr<const VelocityGrid> grid);
    const MatX& matrix() const { return w_; }
    RowMatX apply(const RowMatX& f) const { return f * w_.transpose(); }
    // Row r with (K f)(zeta) = r . f_nodes for an arbitrary zeta.
    VecX row(const Vec3& zeta) const;
    const KineticModel& model() const { return model_; }
    const VelocityGrid& grid() const { return *grid_; }

private:
    KineticModel model_;
    std::shared_ptr<const VelocityGrid> grid_;
    std::vector<double> sqrt_m_;  // sqrt M at the nodes
    MatX w_;
};

// Source term K(f)(y, zeta) for the transport integrals.
class CollisionSource {
public:
    virtual ~CollisionSource() = default;
    virtual double at(const Vec3& y, const Vec3& zeta) const = 0;
    // out[k] = K f(y, rhos[k] * omega).
    using Profile = std::function<void(const Vec3& y, double* out)>;
    virtual Profile along(const Vec3& omega, const std::vector<double>& rhos) const;
};

class AnalyticSource final : public CollisionSource {
public:
    explicit AnalyticSource(std::function<double(const Vec3&, const Vec3&)> fn) : fn_(std::move(fn)) {}
    double at(const Vec3& y, const Vec3& zeta) const override { return fn_(y, zeta); }

private:
    std::function<double(const Vec3&, const Vec3&)> fn_;
};

// Wraps nodal values of K f.
class FieldSource final : public CollisionSource {
public:
    explicit FieldSource(DistributionField kf);
    double at(const Vec3& y, const Vec3& zeta) const override;
    Profile along(const Vec3& omega, const std::vector<double>& rhos) const override;
    const DistributionField& field() const { return kf_; }

private:
    DistributionField kf_;
};

std::shared_ptr<FieldSource> collision_source(const DistributionField& f, const DiscreteCollision& k);

// K f for f = (c + t0 (|zeta|^2 - 2)) sqrt M, which is nu f.
std::shared_ptr<AnalyticSource> exact_solution_source(const KineticModel& model, double c, double t0);
double exact_solution(double c, double t0, const Vec3& zeta);

}  // namespace kinreg
