#include "kinreg/mesh.hpp"
#include "kinreg/ray.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace kinreg;

namespace {

std::mt19937_64 rng(7);

Vec3 unit(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    return Vec3(n(g), n(g), n(g)).normalized();
}

Vec3 interior(const Ellipsoid& e, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1, 1);
    for (;;) {
        Vec3 x(u(g) * e.axes()(0), u(g) * e.axes()(1), u(g) * e.axes()(2));
        if (e.value(x) < -0.01) return x;
    }
}

// Closest point on an ellipsoid: y_i = x_i a_i^2 / (a_i^2 + t) with t the
// largest root of sum a_i^2 x_i^2 / (a_i^2 + t)^2 = 1, found by bisection.
double ellipsoid_distance_oracle(const Vec3& a, const Vec3& x) {
    const Vec3 a2 = a.cwiseProduct(a);
    auto g = [&](double t) {
        double s = 0;
        for (int i = 0; i < 3; ++i) s += a2(i) * x(i) * x(i) / ((a2(i) + t) * (a2(i) + t));
        return s - 1.0;
    };
    const double t = oracle::bisect(g, -a2.minCoeff() * (1 - 1e-15), 0.0, 300);
    Vec3 y;
    for (int i = 0; i < 3; ++i) y(i) = x(i) * a2(i) / (a2(i) + t);
    return (y - x).norm();
}

}  // namespace

TEST(Domain, SphereMetrics) {
    Sphere s(1.0);
    EXPECT_NEAR(s.min_curvature_radius(), 1.0, 0.05);
    EXPECT_NEAR(s.max_curvature_radius(), 1.0, 0.05);
    EXPECT_NEAR(s.diameter(), 2.0, 1e-12);
    EXPECT_TRUE(s.inside(Vec3(0.3, 0.2, 0.1)));
    EXPECT_FALSE(s.inside(Vec3(1.1, 0, 0)));
    EXPECT_NEAR(s.volume(), 4.0 * kPi / 3.0, 1e-3);
}

TEST(Domain, EllipsoidCurvatureRadii) {
    Ellipsoid e(1, 1.5, 2);
    // Sampled bounds bracket the exact extremes min^2/max and max^2/min.
    EXPECT_LE(e.min_curvature_radius(), 0.5);
    EXPECT_GE(e.min_curvature_radius(), 0.45);
    EXPECT_GE(e.max_curvature_radius(), 4.0);
    EXPECT_LE(e.max_curvature_radius(), 4.2);
    for (int i = 0; i < 50; ++i) {
        const Vec3 p = e.radial_point(unit(rng));
        EXPECT_NEAR(e.value(p), 0.0, 1e-12);
        const auto [k1, k2] = e.principal_curvatures(p);
        EXPECT_GT(k1, 0.0);
        EXPECT_LE(1.0 / k2, e.max_curvature_radius());
        EXPECT_GE(1.0 / k1, e.min_curvature_radius());
    }
}

TEST(Domain, MakeDomainValidates) {
    EXPECT_NO_THROW(make_domain("sphere", {}));
    EXPECT_NO_THROW(make_domain("ellipsoid", {1, 1.5, 2}));
    EXPECT_NO_THROW(make_domain("superquadric", {1, 1, 1, 0.3}));
    EXPECT_THROW(make_domain("ellipsoid", {1, 3, 2}), RangeError);
    EXPECT_THROW(make_domain("torus", {}), ArgumentError);
}

TEST(Ray, SphereClosedForms) {
    Sphere s(1.0);
    const Vec3 z(0, 2, 0);
    RayHit h = exit_ray(s, Vec3::Zero(), z);
    EXPECT_NEAR(h.tau_minus, 0.5, 1e-14);
    EXPECT_NEAR((h.exit_point - Vec3(0, -1, 0)).norm(), 0.0, 1e-14);
    EXPECT_NEAR(h.normal_component, 1.0, 1e-14);
    h = exit_ray(s, Vec3(0.5, 0, 0), Vec3(1, 0, 0));
    EXPECT_NEAR(h.tau_minus, 1.5, 1e-14);
    EXPECT_NEAR((h.exit_point - Vec3(-1, 0, 0)).norm(), 0.0, 1e-14);
}

TEST(Ray, ErrorsOnBadInput) {
    Sphere s(1.0);
    EXPECT_THROW(exit_ray(s, Vec3(0.1, 0, 0), Vec3::Zero()), ArgumentError);
    EXPECT_THROW(exit_ray(s, Vec3(2, 0, 0), Vec3(1, 0, 0)), DomainError);
}

TEST(Ray, EllipsoidMatchesBisection) {
    Ellipsoid e(1, 1.5, 2);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = interior(e, rng);
        const Vec3 z = unit(rng) * std::uniform_real_distribution<double>(0.2, 3.0)(rng);
        const RayHit h = exit_ray(e, x, z);
        const double t_ref =
            oracle::bisect([&](double t) { return e.value(x - t * z); }, 0.0, 2.0 * e.diameter() / z.norm());
        EXPECT_NEAR(h.tau_minus, t_ref, 1e-10);
        EXPECT_LE(std::abs(e.value(h.exit_point)), 1e-10 * 2.0);
        EXPECT_GT(h.normal_component, 0.0);
        EXPECT_LE(h.normal_component, 1.0 + 1e-14);
    }
}

TEST(Ray, GenericDomainSemigroup) {
    Superquadric q(1, 1.2, 0.9, 0.3);
    for (int i = 0; i < 40; ++i) {
        const Vec3 x = 0.5 * q.radial_point(unit(rng));
        const Vec3 z = unit(rng) * 1.3;
        const RayHit h = exit_ray(q, x, z);
        EXPECT_LE(std::abs(q.value(h.exit_point)), 1e-10);
        const double t_ref =
            oracle::bisect([&](double t) { return q.value(x - t * z); }, 0.0, 2.0 * q.diameter() / z.norm());
        EXPECT_NEAR(h.tau_minus, t_ref, 1e-10);
        const double s = 0.4 * h.tau_minus;
        EXPECT_NEAR(exit_ray(q, x - s * z, z).tau_minus, h.tau_minus - s, 1e-10);
    }
}

TEST(Distance, SphereValues) {
    Sphere s(1.0);
    EXPECT_NEAR(boundary_distance(s, Vec3(0.5, 0, 0)), 0.5, 1e-12);
    EXPECT_NEAR(boundary_distance(s, Vec3::Zero()), 1.0, 1e-12);
    EXPECT_NEAR(boundary_distance(s, Vec3(0, 0, 1)), 0.0, 1e-10);
}

TEST(Distance, EllipsoidMatchesConstrainedMinimum) {
    Ellipsoid e(1, 1.5, 2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x = interior(e, rng);
        EXPECT_NEAR(boundary_distance(e, x), ellipsoid_distance_oracle(e.axes(), x), 1e-8);
    }
}

TEST(ExpMap, SphereGreatCircle) {
    Sphere s(1.0);
    for (int i = 0; i < 20; ++i) {
        const Vec3 p = unit(rng);
        Vec3 t1, t2;
        orthonormal_frame(p, t1, t2);
        const double len = 0.2 * (i + 1) / 20.0;
        const Vec3 y = exp_map(s, p, len * t1);
        const Vec3 ref = std::cos(len) * p + std::sin(len) * t1;
        EXPECT_NEAR((y - ref).norm(), 0.0, 1e-8);
    }
    const Vec3 p(0, 0, 1);
    EXPECT_EQ(exp_map(s, p, Vec3::Zero()), p);
}

TEST(ExpMap, EllipsoidStepHalving) {
    Ellipsoid e(1, 1.5, 2);
    const double r1 = e.geodesic_radius();
    EXPECT_NEAR(r1, 0.125, 0.01);
    for (int i = 0; i < 20; ++i) {
        const Vec3 p = e.radial_point(unit(rng));
        Vec3 t1, t2;
        orthonormal_frame(e.normal(p), t1, t2);
        const Vec3 v = r1 * (0.3 * t1 + 0.9 * t2).normalized();
        const Vec3 y = exp_map(e, p, v);
        const Vec3 y2 = exp_map_steps(e, p, v, 256);
        EXPECT_NEAR((y - y2).norm(), 0.0, 1e-8);
        EXPECT_LE(std::abs(e.value(y)), e.surface_tolerance());
    }
    EXPECT_THROW(exp_map(e, e.radial_point(Vec3::UnitX()), Vec3(0, 2 * r1, 0)), RangeError);
}

TEST(Mesh, AreaAndSurfaceResidual) {
    Sphere s(1.0);
    const BoundaryMesh m = make_boundary_mesh(s, 16, 32);
    EXPECT_NEAR(m.area(), 4 * kPi, 1e-10);
    Ellipsoid e(1, 1.5, 2);
    const BoundaryMesh me = make_boundary_mesh(e, 48, 96);
    const BoundaryMesh me2 = make_boundary_mesh(e, 96, 192);
    EXPECT_NEAR(me.area(), me2.area(), 1e-6 * me2.area());
    for (int i = 0; i < me.size(); ++i) {
        EXPECT_LE(std::abs(e.value(me.nodes[i])), e.surface_tolerance());
        EXPECT_NEAR(me.normals[i].norm(), 1.0, 1e-14);
    }
    const BoundaryMesh mf = make_focused_mesh(e, Vec3(0.3, 0.2, 0.9), 0.01, 8, 32);
    EXPECT_NEAR(mf.area(), me2.area(), 1e-4 * me2.area());
}

TEST(Mesh, SurfaceInterpolatorReproducesQuadratics) {
    auto e = std::make_shared<Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<BoundaryMesh>(make_boundary_mesh(*e, 24, 48));
    SurfaceInterpolator interp(e, mesh);
    auto field = [](const Vec3& p) { return 1.0 + 0.3 * p.x() - 0.2 * p.y() * p.z(); };
    for (int i = 0; i < 50; ++i) {
        const Vec3 p = e->radial_point(unit(rng));
        const auto st = interp.stencil(p);
        double v = 0, wsum = 0;
        for (std::size_t k = 0; k < st.idx.size(); ++k) {
            v += st.w[k] * field(mesh->nodes[st.idx[k]]);
            wsum += st.w[k];
        }
        EXPECT_NEAR(wsum, 1.0, 1e-10);
        EXPECT_NEAR(v, field(p), 5e-3);
    }
    // Exact at nodes for constants.
    const auto st = interp.stencil(mesh->nodes[10]);
    double wsum = 0;
    for (double w : st.w) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-12);
}
