#include "kinreg/domain.hpp"

#include "kinreg/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace kinreg {

Vec3 ConvexDomain::radial_point(const Vec3& u) const {
    double lo = 0.0, hi = 1.5 * bounding_radius();
    if (value(hi * u) < 0) throw DomainError("radial_point: bounding radius too small");
    for (int it = 0; it < 200 && hi - lo > 1e-15 * bounding_radius(); ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid * u) < 0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double d = gradient(t * u).dot(u);
        if (d <= 0) break;
        const double step = value(t * u) / d;
        if (std::abs(step) > hi - lo + 1e-12) break;
        t -= step;
    }
    return t * u;
}

double ConvexDomain::exit_distance(const Vec3& x, const Vec3& u) const {
    const double scale = bounding_radius();
    const double tol = 1e-9 * scale;
    const double f0 = value(x);
    if (f0 > tol) throw DomainError("exit_ray: point outside the closed domain");
    auto g = [&](double t) { return value(x - t * u); };
    const double h = diameter() / 64.0;
    double lo = 0.0, hi = -1.0;
    if (g(h) >= 0) {
        if (f0 < -tol) {
            hi = h;
        } else {
            if (gradient(x).dot(u) <= 0) return 0.0;  // leaving immediately
            const double hs = h / 256.0;
            for (int k = 1; k <= 256; ++k) {
                if (g(k * hs) < 0) {
                    lo = k * hs;
                } else if (lo > 0) {
                    hi = k * hs;
                    break;
                }
            }
            if (hi < 0) return 0.0;
        }
    } else {
        lo = h;
        for (int k = 2; k <= 200; ++k) {
            if (g(k * h) >= 0) {
                hi = k * h;
                break;
            }
            lo = k * h;
        }
        if (hi < 0) throw ResolutionError("exit_ray: no boundary crossing found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const double d = -gradient(x - t * u).dot(u);
        if (d <= 0) break;
        const double nt = t - g(t) / d;
        if (nt < lo - 1e-12 * scale || nt > hi + 1e-12 * scale) break;
        t = nt;
    }
    return t;
}

double ConvexDomain::geodesic_radius() const { return std::min(0.5 * kPi * r2_, 1.0 / (4.0 * max_curvature())); }

std::pair<double, double> ConvexDomain::principal_curvatures(const Vec3& p) const {
    const Vec3 g = gradient(p);
    const double gn = g.norm();
    const Vec3 n = g / gn;
    Vec3 t1, t2;
    orthonormal_frame(n, t1, t2);
    const Mat3 H = hessian(p);
    Eigen::Matrix2d S;
    S << t1.dot(H * t1), t1.dot(H * t2), t2.dot(H * t1), t2.dot(H * t2);
    S /= gn;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

Vec3 ConvexDomain::snap_to_surface(const Vec3& x) const {
    Vec3 y = x;
    for (int it = 0; it < 60; ++it) {
        const double f = value(y);
        if (std::abs(f) < 1e-15) break;
        const Vec3 g = gradient(y);
        y -= f * g / g.squaredNorm();
    }
    return y;
}

void ConvexDomain::curvature_radius_bounds(double& r2, double& r3) const {
    const SphereRule rule = product_sphere_rule(48, 96);
    double kmax = 0, kmin = std::numeric_limits<double>::infinity();
    for (const auto& u : rule.dirs) {
        const auto [k1, k2] = principal_curvatures(radial_point(u));
        kmin = std::min(kmin, k1);
        kmax = std::max(kmax, k2);
    }
    // Sampled extremes with a safety margin.
    r2 = 0.97 / kmax;
    r3 = 1.03 / kmin;
}

void ConvexDomain::finalize_metrics() {
    diameter_ = 2.0 * bounding_radius();
    curvature_radius_bounds(r2_, r3_);
    const SphereRule rule = product_sphere_rule(32, 64);
    volume_ = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) volume_ += rule.w[i] * std::pow(radial_point(rule.dirs[i]).norm(), 3) / 3.0;
}

// ---------------------------------------------------------------- Sphere

Sphere::Sphere(double radius) : radius_(radius) {
    if (!(radius > 0)) throw ArgumentError("Sphere: radius must be positive");
    finalize_metrics();
    volume_ = 4.0 / 3.0 * kPi * radius * radius * radius;
}

double Sphere::value(const Vec3& x) const { return (x.squaredNorm() / (radius_ * radius_) - 1.0) * 0.5 * radius_; }
Vec3 Sphere::gradient(const Vec3& x) const { return x / radius_; }
Mat3 Sphere::hessian(const Vec3&) const { return Mat3::Identity() / radius_; }

double Sphere::exit_distance(const Vec3& x, const Vec3& u) const {
    const double f0 = value(x);
    if (f0 > 1e-9 * radius_) throw DomainError("exit_ray: point outside the closed domain");
    const double b = x.dot(u);
    const double disc = b * b - (x.squaredNorm() - radius_ * radius_);
    return std::max(0.0, b + std::sqrt(std::max(0.0, disc)));
}

void Sphere::curvature_radius_bounds(double& r2, double& r3) const { r2 = r3 = radius_; }

// ---------------------------------------------------------------- Ellipsoid

Ellipsoid::Ellipsoid(double a, double b, double c) : axes_(a, b, c) {
    if (!(a > 0 && b > 0 && c > 0)) throw ArgumentError("Ellipsoid: semi-axes must be positive");
    inv2_ = axes_.cwiseInverse().cwiseAbs2();
    finalize_metrics();
    volume_ = 4.0 / 3.0 * kPi * a * b * c;
}

// Scaled by half the geometric-mean axis so |grad F| is O(1) on the boundary.
double Ellipsoid::value(const Vec3& x) const {
    return 0.5 * std::cbrt(axes_.prod()) * (x.cwiseAbs2().dot(inv2_) - 1.0);
}
Vec3 Ellipsoid::gradient(const Vec3& x) const { return std::cbrt(axes_.prod()) * x.cwiseProduct(inv2_); }
Mat3 Ellipsoid::hessian(const Vec3&) const { return std::cbrt(axes_.prod()) * Mat3(inv2_.asDiagonal()); }

Vec3 Ellipsoid::radial_point(const Vec3& u) const { return u / std::sqrt(u.cwiseAbs2().dot(inv2_)); }

double Ellipsoid::exit_distance(const Vec3& x, const Vec3& u) const {
    const double q0 = x.cwiseAbs2().dot(inv2_) - 1.0;
    if (q0 > 1e-9) throw DomainError("exit_ray: point outside the closed domain");
    const double A = u.cwiseAbs2().dot(inv2_);
    const double B = x.cwiseProduct(u).dot(inv2_);
    const double disc = B * B - A * q0;
    const double sq = std::sqrt(std::max(0.0, disc));
    // Larger root of A t^2 - 2 B t + q0 = 0, in the cancellation-free form.
    if (B >= 0) return std::max(0.0, (B + sq) / A);
    return std::max(0.0, -q0 / (sq - B));
}

void Ellipsoid::curvature_radius_bounds(double& r2, double& r3) const {
    const double lo = axes_.minCoeff(), hi = axes_.maxCoeff();
    r2 = lo * lo / hi;
    r3 = hi * hi / lo;
}

// ---------------------------------------------------------------- Superquadric

Superquadric::Superquadric(double a, double b, double c, double eps) : axes_(a, b, c), eps_(eps) {
    if (!(a > 0 && b > 0 && c > 0)) throw ArgumentError("Superquadric: semi-axes must be positive");
    if (!(eps >= 0)) throw ArgumentError("Superquadric: eps must be non-negative");
    inv2_ = axes_.cwiseInverse().cwiseAbs2();
    bound_ = axes_.maxCoeff();
    finalize_metrics();
}

double Superquadric::value(const Vec3& x) const {
    const Vec3 x2 = x.cwiseAbs2();
    return 0.5 * (x2.dot(inv2_) + eps_ * x2.squaredNorm() - 1.0);
}

Vec3 Superquadric::gradient(const Vec3& x) const {
    return x.cwiseProduct(inv2_) + 2.0 * eps_ * x.cwiseProduct(x.cwiseAbs2());
}

Mat3 Superquadric::hessian(const Vec3& x) const {
    return Mat3((inv2_ + 6.0 * eps_ * x.cwiseAbs2()).asDiagonal());
}

std::shared_ptr<ConvexDomain> make_domain(const std::string& name, const std::vector<double>& p) {
    if (name == "sphere") {
        if (p.size() > 1) throw ArgumentError("sphere takes at most one parameter (radius)");
        return std::make_shared<Sphere>(p.empty() ? 1.0 : p[0]);
    }
    if (name == "ellipsoid") {
        if (p.size() != 3) throw ArgumentError("ellipsoid needs three semi-axes");
        for (double a : p)
            if (a < 0.5 || a > 2.0) throw RangeError("ellipsoid semi-axes must lie in [0.5, 2]");
        return std::make_shared<Ellipsoid>(p[0], p[1], p[2]);
    }
    if (name == "superquadric") {
        if (p.size() != 4) throw ArgumentError("superquadric needs three semi-axes and eps");
        for (int i = 0; i < 3; ++i)
            if (p[i] < 0.5 || p[i] > 2.0) throw RangeError("superquadric semi-axes must lie in [0.5, 2]");
        return std::make_shared<Superquadric>(p[0], p[1], p[2], p[3]);
    }
    throw ArgumentError("unknown domain '" + name + "'");
}

}  // namespace kinreg
