#include "kinreg/ray.hpp"

#include <Eigen/LU>

namespace kinreg {

RayHit exit_ray(const ConvexDomain& domain, const Vec3& x, const Vec3& zeta) {
    const double s = zeta.norm();
    if (!(s > 0)) throw ArgumentError("exit_ray: zero velocity");
    const Vec3 u = zeta / s;
    RayHit h;
    h.length = domain.exit_distance(x, u);
    h.tau_minus = h.length / s;
    h.exit_point = x - h.length * u;
    h.normal_component = std::min(1.0, std::abs(domain.normal(h.exit_point).dot(u)));
    return h;
}

namespace {

// Newton on the Lagrange system y - x + lambda grad F(y) = 0, F(y) = 0.
bool lagrange_newton(const ConvexDomain& d, const Vec3& x, Vec3& y) {
    Vec3 g = d.gradient(y);
    double lambda = -(y - x).dot(g) / g.squaredNorm();
    const double scale = d.bounding_radius();
    for (int it = 0; it < 50; ++it) {
        g = d.gradient(y);
        const Vec3 r = y - x + lambda * g;
        const double f = d.value(y);
        if (r.norm() < 1e-14 * scale && std::abs(f) < 1e-15 * scale) return true;
        Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
        J.topLeftCorner<3, 3>() = Mat3::Identity() + lambda * d.hessian(y);
        J.topRightCorner<3, 1>() = g;
        J.bottomLeftCorner<1, 3>() = g.transpose();
        Eigen::Vector4d rhs;
        rhs << -r, -f;
        const Eigen::Vector4d step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) return false;
        y += step.head<3>();
        lambda += step(3);
        if (step.head<3>().norm() < 1e-15 * scale && std::abs(d.value(y)) < 1e-13 * scale) return true;
    }
    const Vec3 r = y - x + lambda * d.gradient(y);
    return r.norm() < 1e-10 * scale && std::abs(d.value(y)) < 1e-12 * scale;
}

}  // namespace

Vec3 project_to_boundary(const ConvexDomain& domain, const Vec3& x) {
    std::vector<Vec3> starts;
    if (x.norm() > 1e-12) starts.push_back(domain.radial_point(x.normalized()));
    if (domain.gradient(x).norm() > 1e-12) starts.push_back(domain.radial_point(domain.gradient(x).normalized()));
    for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e(k) = 1.0;
        starts.push_back(domain.radial_point(e));
        starts.push_back(domain.radial_point(-e));
    }
    Vec3 best = starts.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (Vec3 y : starts) {
        if (!lagrange_newton(domain, x, y)) continue;
        const double d = (y - x).norm();
        if (d < best_d) {
            best_d = d;
            best = y;
        }
    }
    if (!std::isfinite(best_d)) throw ResolutionError("project_to_boundary: Newton failed from every start");
    return best;
}

double boundary_distance(const ConvexDomain& domain, const Vec3& x) {
    return (project_to_boundary(domain, x) - x).norm();
}

Vec3 exp_map_steps(const ConvexDomain& domain, const Vec3& p0, const Vec3& v, int steps) {
    const double len = v.norm();
    if (len == 0.0) return p0;
    const Vec3 n0 = domain.normal(p0);
    if (std::abs(n0.dot(v)) > 1e-10 * std::max(1.0, len)) throw ArgumentError("exp_map: v is not tangent at p0");
    if (std::abs(domain.value(p0)) > 1e-9 * domain.bounding_radius())
        throw DomainError("exp_map: p0 is not on the boundary");
    Vec3 y = p0;
    Vec3 w = (v - n0.dot(v) * n0).normalized();
    const double h = len / steps;
    auto accel = [&](const Vec3& pos, const Vec3& vel) {
        const Vec3 g = domain.gradient(pos);
        return Vec3(-(vel.dot(domain.hessian(pos) * vel) / g.squaredNorm()) * g);
    };
    for (int k = 0; k < steps; ++k) {
        const Vec3 k1x = w, k1v = accel(y, w);
        const Vec3 k2x = w + 0.5 * h * k1v, k2v = accel(y + 0.5 * h * k1x, k2x);
        const Vec3 k3x = w + 0.5 * h * k2v, k3v = accel(y + 0.5 * h * k2x, k3x);
        const Vec3 k4x = w + h * k3v, k4v = accel(y + h * k3x, k4x);
        y += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        w += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        y = domain.snap_to_surface(y);
        const Vec3 n = domain.normal(y);
        w = (w - n.dot(w) * n).normalized();
    }
    return y;
}

Vec3 exp_map(const ConvexDomain& domain, const Vec3& p0, const Vec3& v) {
    const double r1 = domain.geodesic_radius();
    const double len = v.norm();
    if (len > r1 * (1.0 + 1e-12)) throw RangeError("exp_map: |v| exceeds the geodesic radius");
    const int steps = std::max(1, static_cast<int>(std::ceil(len / (r1 / 128.0))));
    return exp_map_steps(domain, p0, v, steps);
}

}  // namespace kinreg
