#include "kinreg/geometry_checks.hpp"

#include <gtest/gtest.h>

using namespace kinreg;

TEST(InverseSquare, SphereAnalyticValue) {
    Sphere s(1.0);
    const double ref = 2 * kPi / 0.9 * std::log(19.0);
    EXPECT_NEAR(sphere_inverse_square_integral(0.9), ref, 1e-12);
    EXPECT_NEAR(ref, 20.55, 0.01);
    const auto rows = check_inverse_square_focused(s, {Vec3(0.9, 0, 0)});
    EXPECT_NEAR(rows[0].integral, ref, 1e-3 * ref);
    const BoundaryMesh m = make_boundary_mesh(s, 12, 24);
    EXPECT_NEAR(inverse_square_integral(m, Vec3::Zero()), 4 * kPi, 1e-10);
}

TEST(InverseSquare, RejectsCoarseMesh) {
    Sphere s(1.0);
    const BoundaryMesh m = make_boundary_mesh(s, 8, 16);
    EXPECT_THROW(check_inverse_square(s, m, {Vec3(0, 0, 0.95)}), ResolutionError);
}

TEST(InverseSquare, RatioSpreadAndRefinement) {
    for (auto dom : {make_domain("sphere", {}), make_domain("ellipsoid", {1, 1.5, 2})}) {
        Rng rng(11);
        std::vector<Vec3> xs;
        for (int k = 0; k < 3; ++k) {
            const Vec3 Y = random_boundary_point(*dom, rng);
            for (double d : {0.2, 0.1, 0.05, 0.02, 0.01}) xs.push_back(Y - d * dom->normal(Y));
        }
        const auto rows = check_inverse_square_focused(*dom, xs);
        EXPECT_LE(ratio_spread(rows), 10.0);
        const auto fine = check_inverse_square_focused(*dom, xs, 16, 128);
        for (std::size_t i = 0; i < rows.size(); ++i)
            EXPECT_NEAR(rows[i].integral, fine[i].integral, 0.01 * fine[i].integral);
    }
}

TEST(ExpMapInequality, SphereAndEllipsoid) {
    for (auto dom : {make_domain("sphere", {}), make_domain("ellipsoid", {1, 1.5, 2})}) {
        const auto t = check_expmap_inequality(*dom, sample_expmap(*dom, 200, 3));
        EXPECT_EQ(t.evaluated(), 200);
        EXPECT_EQ(t.violations(), 0);
    }
    Sphere s(1.0);
    const Vec3 p(0, 0, 1);
    const auto t = check_expmap_inequality(s, {{p, p - 0.1 * p, Vec3::Zero()}});
    EXPECT_NEAR(t.rows[0].lhs, t.rows[0].rhs, 1e-14);
}

TEST(GeodesicNormals, SphereChordIdentity) {
    Sphere s(1.0);
    const auto t = check_geodesic_normals(s, sample_geodesic_pairs(s, 200, 5));
    EXPECT_EQ(t.violations(), 0);
    for (const auto& r : t.rows)
        if (r.check == "geodesic_nx" || r.check == "geodesic_ny") {
            EXPECT_NEAR(r.lhs, 0.5, 1e-6);
        }
}

TEST(GeodesicNormals, EllipsoidBounded) {
    auto e = make_domain("ellipsoid", {1, 1.5, 2});
    const auto t = check_geodesic_normals(*e, sample_geodesic_pairs(*e, 300, 9));
    EXPECT_EQ(t.evaluated(), 900);
    EXPECT_EQ(t.violations(), 0);
}

TEST(SqrtBounds, BothSides) {
    for (auto dom : {make_domain("sphere", {}), make_domain("ellipsoid", {1, 1.5, 2})}) {
        const auto t = check_sqrt_bounds(*dom, sample_sqrt(*dom, 300, 13));
        EXPECT_EQ(t.violations(), 0);
        EXPECT_GT(t.evaluated("sqrt_upper"), 20);
        EXPECT_GT(t.evaluated("sqrt_lower"), 20);
    }
    // Projection itself: same side, |x - y| = d_y.
    Sphere s(1.0);
    const auto t = check_sqrt_bounds(s, {{Vec3(0, 0, 1), Vec3(0, 0, 0.9)}});
    EXPECT_EQ(t.rows[0].check, "sqrt_upper");
    EXPECT_NEAR(t.rows[0].lhs, 0.1, 1e-12);
}

TEST(ChordDistance, Passes) {
    for (auto dom : {make_domain("sphere", {}), make_domain("ellipsoid", {1, 1.5, 2})}) {
        const auto t = check_chord_distance(*dom, sample_chords(*dom, 300, 17));
        EXPECT_EQ(t.evaluated(), 300);
        EXPECT_EQ(t.violations(), 0);
    }
}

TEST(RayDerivatives, SphereCenterClosedForm) {
    Sphere s(1.0);
    const Vec3 z(0.3, -1.1, 0.5);
    const auto t = check_ray_derivative_bounds(s, {{Vec3::Zero(), z}});
    for (const auto& r : t.rows) {
        if (r.check == "Dtau_zeta") {
            EXPECT_NEAR(r.lhs, 1.0 / z.squaredNorm(), 1e-6);
        }
        if (r.check == "Dtau_x") {
            EXPECT_NEAR(r.lhs, 1.0 / z.norm(), 1e-6);
        }
    }
    EXPECT_EQ(t.violations(), 0);
}

TEST(RayDerivatives, EllipsoidSweep) {
    auto e = make_domain("ellipsoid", {1, 1.5, 2});
    const auto t = check_ray_derivative_bounds(*e, sample_rays(*e, 200, 19));
    EXPECT_EQ(t.violations(), 0);
    EXPECT_GT(t.evaluated("Dp_zeta"), 190);
}

TEST(ExitPointDifference, Passes) {
    auto e = make_domain("ellipsoid", {1, 1.5, 2});
    const auto t = check_exit_point_difference(*e, sample_differences(*e, 300, 23));
    EXPECT_EQ(t.violations(), 0);
}
