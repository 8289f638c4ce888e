#pragma once

#include "kinreg/core.hpp"

#include <memory>
#include <string>

namespace kinreg {

// Strictly convex domain {F < 0}, star-shaped about the origin.
class ConvexDomain {
public:
    virtual ~ConvexDomain() = default;

    virtual std::string name() const = 0;
    virtual double value(const Vec3& x) const = 0;
    virtual Vec3 gradient(const Vec3& x) const = 0;
    virtual Mat3 hessian(const Vec3& x) const = 0;
    // Largest |x| over the boundary.
    virtual double bounding_radius() const = 0;
    // Boundary point along the ray from the origin in direction u (unit).
    virtual Vec3 radial_point(const Vec3& u) const;
    // Distance L > 0 from x (inside or on the boundary) to the boundary along
    // -u; the exit point is x - L u.
    virtual double exit_distance(const Vec3& x, const Vec3& u) const;

    bool inside(const Vec3& x) const { return value(x) < 0.0; }
    Vec3 normal(const Vec3& x) const { return gradient(x).normalized(); }
    double diameter() const { return diameter_; }
    double min_curvature_radius() const { return r2_; }  // R2
    double max_curvature_radius() const { return r3_; }  // R3
    double max_curvature() const { return 1.0 / r2_; }   // b
    // Geodesic radius used by the exponential-map checks.
    double geodesic_radius() const;
    double volume() const { return volume_; }
    double surface_tolerance() const { return 1e-10 * bounding_radius(); }

    // Principal curvatures at a boundary point, ascending.
    std::pair<double, double> principal_curvatures(const Vec3& p) const;
    // Newton projection of a nearby point onto {F = 0} along the gradient.
    Vec3 snap_to_surface(const Vec3& x) const;

protected:
    // Called by derived constructors once value/gradient are usable.
    void finalize_metrics();
    virtual void curvature_radius_bounds(double& r2, double& r3) const;

    double diameter_ = 0;
    double r2_ = 0, r3_ = 0;
    double volume_ = 0;
};

class Sphere final : public ConvexDomain {
public:
    explicit Sphere(double radius = 1.0);
    std::string name() const override { return "sphere"; }
    double value(const Vec3& x) const override;
    Vec3 gradient(const Vec3& x) const override;
    Mat3 hessian(const Vec3& x) const override;
    double bounding_radius() const override { return radius_; }
    Vec3 radial_point(const Vec3& u) const override { return radius_ * u; }
    double exit_distance(const Vec3& x, const Vec3& u) const override;
    double radius() const { return radius_; }

protected:
    void curvature_radius_bounds(double& r2, double& r3) const override;

private:
    double radius_;
};

class Ellipsoid final : public ConvexDomain {
public:
    Ellipsoid(double a, double b, double c);
    std::string name() const override { return "ellipsoid"; }
    double value(const Vec3& x) const override;
    Vec3 gradient(const Vec3& x) const override;
    Mat3 hessian(const Vec3& x) const override;
    double bounding_radius() const override { return axes_.maxCoeff(); }
    Vec3 radial_point(const Vec3& u) const override;
    double exit_distance(const Vec3& x, const Vec3& u) const override;
    const Vec3& axes() const { return axes_; }

protected:
    void curvature_radius_bounds(double& r2, double& r3) const override;

private:
    Vec3 axes_, inv2_;
};

// Ellipsoid plus a quartic term: F = sum x_i^2/a_i^2 + eps * sum x_i^4 - 1.
// Both parts are convex, so the sublevel set is strictly convex.
class Superquadric final : public ConvexDomain {
public:
    Superquadric(double a, double b, double c, double eps);
    std::string name() const override { return "superquadric"; }
    double value(const Vec3& x) const override;
    Vec3 gradient(const Vec3& x) const override;
    Mat3 hessian(const Vec3& x) const override;
    double bounding_radius() const override { return bound_; }
    const Vec3& axes() const { return axes_; }
    double eps() const { return eps_; }

private:
    Vec3 axes_, inv2_;
    double eps_;
    double bound_;
};

std::shared_ptr<ConvexDomain> make_domain(const std::string& name, const std::vector<double>& params);

}  // namespace kinreg
