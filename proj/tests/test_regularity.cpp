#include "kinreg/geometry_checks.hpp"
#include "kinreg/regularity.hpp"

#include <gtest/gtest.h>

using namespace kinreg;

namespace {

std::shared_ptr<const VelocityGrid> grid() {
    static auto g = std::make_shared<const VelocityGrid>();
    return g;
}

ModulusReport synthetic(const std::vector<double>& ratios) {
    ModulusReport r;
    for (std::size_t i = 0; i < ratios.size(); ++i) r.samples.push_back({double(i + 1), ratios[i], 1.0, ratios[i]});
    return r;
}

}  // namespace

TEST(Fit, ExactPowerLaw) {
    std::vector<double> x, y;
    for (double v : {1.0, 2.0, 5.0, 10.0, 40.0}) x.push_back(v), y.push_back(3.0 * std::pow(v, 1.5));
    const ExponentFit f = fit_exponent(x, y);
    EXPECT_EQ(f.n, 5);
    EXPECT_NEAR(f.exponent, 1.5, 1e-12);
    EXPECT_NEAR(f.constant, 3.0, 1e-10);
    EXPECT_NEAR(f.ci_high - f.ci_low, 0.0, 1e-9);
}

TEST(Fit, ConfidenceIntervalByHand) {
    // log-log data (0,0), (1,1.2), (2,1.8), (3,3.1): slope 0.99, residual
    // sum of squares 0.087; se = sqrt(0.087 / 2 / 5), t(0.975, 2) = 4.302653.
    std::vector<double> x, y;
    const double ly[] = {0.0, 1.2, 1.8, 3.1};
    for (int i = 0; i < 4; ++i) x.push_back(std::exp(double(i))), y.push_back(std::exp(ly[i]));
    const ExponentFit f = fit_exponent(x, y);
    EXPECT_NEAR(f.exponent, 0.99, 1e-12);
    const double half = 4.302653 * std::sqrt(0.087 / 2 / 5);
    EXPECT_NEAR(f.ci_high - f.exponent, half, 1e-5);
    EXPECT_NEAR(f.exponent - f.ci_low, half, 1e-5);
}

TEST(Ladder, DistancesMatchRungs) {
    const auto ladder = default_ladder();
    ASSERT_EQ(ladder.size(), 8u);
    EXPECT_DOUBLE_EQ(ladder.front(), 0.2);
    for (std::size_t k = 1; k < ladder.size(); ++k) EXPECT_NEAR(ladder[k - 1] / ladder[k], std::sqrt(2.0), 1e-12);
    Ellipsoid e(1, 1.5, 2);
    const auto pts = ladder_points(e, ladder, 3, 4);
    ASSERT_EQ(pts.size(), 24u);
    for (const auto& p : pts) EXPECT_NEAR(p.d, ladder[p.rung], 1e-7);
}

TEST(Ladder, CentralDifferencesExactOnQuadratics) {
    auto q = [](const Vec3& x) { return 1.0 + 2 * x.x() - x.y() * x.z() + 0.5 * x.squaredNorm(); };
    const Vec3 x(0.3, -0.2, 0.7);
    const Vec3 g = fd_gradient(q, x, 1e-2);
    EXPECT_NEAR(g.x(), 2 + 0.3, 1e-10);
    EXPECT_NEAR(g.y(), -0.7 - 0.2, 1e-10);
    EXPECT_NEAR(g.z(), 0.2 + 0.7, 1e-10);
}

TEST(Judge, BoundednessVerdicts) {
    RegularityOptions opt;
    auto ok = synthetic({1, 2, 3, 1.5, 2.5, 1, 4, 2});
    judge_boundedness(ok, opt);
    EXPECT_EQ(ok.status, "pass");
    auto bad = synthetic({1, 1, 1, 1, 1, 1, 1, 50});
    judge_boundedness(bad, opt);
    EXPECT_EQ(bad.status, "fail");
    auto few = synthetic({1, 2, 3});
    judge_boundedness(few, opt);
    EXPECT_EQ(few.status, "inconclusive");
    auto zero = synthetic(std::vector<double>(9, 0.0));
    judge_boundedness(zero, opt);
    EXPECT_EQ(zero.status, "pass");
}

TEST(Judge, ExponentUsesUpperConfidenceBound) {
    RegularityOptions opt;
    auto r = synthetic(std::vector<double>(8, 1.0));
    r.fitted_exponent = 0.4;
    r.ci_high = 0.47;
    judge_exponent(r, 1.0 / 3.0 + 0.15, opt);
    EXPECT_EQ(r.status, "pass");
    r.ci_high = 0.5;
    judge_exponent(r, 1.0 / 3.0 + 0.15, opt);
    EXPECT_EQ(r.status, "fail");
}

TEST(IDerivative, RadialClosedFormAtPole) {
    auto s = std::make_shared<const Sphere>(1.0);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*s, 8, 16));
    const KineticModel model;
    const double c = 0.4, t0 = 0.1;
    const WallFlux psi = constant_wall_flux(s, mesh, c);
    const auto T = BoundaryTemperature::constant(t0);
    for (double d : {0.2, 0.05, 0.01}) {
        for (double sp : {0.5, 1.5}) {
            const Vec3 x(0, 0, 1 - d), z(0, 0, -sp);
            const double nu = collision_frequency(model, sp);
            const double fb = exact_solution(c, t0, z);
            const double dz = fb * nu / sp * std::exp(-nu * d / sp);
            const Vec3 g = fd_gradient([&](const Vec3& y) { return damped_boundary_term(*s, model, psi, T, y, z); }, x,
                                       d / 100);
            EXPECT_NEAR(g.z(), dz, 1e-4 * std::abs(dz));
            EXPECT_NEAR(g.x(), 0.0, 1e-4 * std::abs(dz));
            EXPECT_NEAR(g.y(), 0.0, 1e-4 * std::abs(dz));
        }
    }
}

TEST(IDerivative, ConstantDataDrivenByExitTime) {
    // With f_b = c sqrt M, |grad I| = f_b nu e^{-nu tau} / (N |zeta|).
    auto e = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*e, 8, 16));
    const KineticModel model;
    const WallFlux psi = constant_wall_flux(e, mesh, 0.7);
    const auto T = BoundaryTemperature::constant(0);
    Rng rng(21);
    for (int k = 0; k < 40; ++k) {
        const Vec3 x = random_interior_point(*e, rng, 0.05);
        const Vec3 z = random_unit(rng) * std::uniform_real_distribution<double>(0.3, 3.0)(rng);
        const RayHit hit = exit_ray(*e, x, z);
        if (hit.normal_component < 0.05) continue;
        const double nu = collision_frequency(model, z.norm());
        const double ref = 0.7 * sqrt_maxwellian(z) * nu * std::exp(-nu * hit.tau_minus) / (hit.normal_component * z.norm());
        const double h = 1e-4 * boundary_distance(*e, x);
        const Vec3 g = fd_gradient([&](const Vec3& y) { return damped_boundary_term(*e, model, psi, T, y, z); }, x, h);
        EXPECT_NEAR(g.norm(), ref, 1e-5 * ref);
    }
}

TEST(IDerivative, ZeroDataGivesZeroReports) {
    auto e = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*e, 8, 16));
    const WallFlux zero = constant_wall_flux(e, mesh, 0.0);
    RegularityOptions opt;
    const auto pts = ladder_points(*e, default_ladder(), 1, 3);
    const auto reps = probe_I_derivative(*e, KineticModel{}, *grid(), zero, BoundaryTemperature::constant(0), pts, opt);
    ASSERT_EQ(reps.size(), 2u);
    for (const auto& r : reps) {
        EXPECT_EQ(r.status, "pass") << r.check_name;
        EXPECT_EQ(r.max_ratio(), 0.0) << r.check_name;
    }
}

TEST(IDerivative, LadderProductsBoundedOnSmoothData) {
    auto e = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*e, 8, 16));
    const WallFlux psi = make_wall_flux(e, mesh, VecX::Constant(mesh->size(), 0.5));
    RegularityOptions opt;
    const auto pts = ladder_points(*e, default_ladder(), 2, 5);
    const auto reps =
        probe_I_derivative(*e, KineticModel{}, *grid(), psi, BoundaryTemperature::bump(0.2, 0.3, Vec3(1, 0, 0), 0.7), pts, opt);
    EXPECT_EQ(reps[0].check_name, "I_gradient");
    EXPECT_EQ(reps[0].samples.size(), 16u);
    EXPECT_EQ(reps[0].status, "pass");
    EXPECT_EQ(reps[1].status, "pass");
}

TEST(HAndII, ZeroDataGivesNullVerdicts) {
    auto e = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*e, 8, 16));
    const WallFlux zero = constant_wall_flux(e, mesh, 0.0);
    RegularityOptions opt;
    opt.velocity_stride = 100;
    opt.ii_velocities = 1;
    opt.deep_ladder.clear();
    const auto pts = ladder_points(*e, default_ladder(2), 1, 3);
    const auto reps = probe_II_and_H(*e, KineticModel{}, *grid(), zero, BoundaryTemperature::constant(0), pts, opt);
    ASSERT_EQ(reps.size(), 3u);
    for (const auto& r : reps) {
        EXPECT_EQ(r.status, "pass") << r.check_name;
        EXPECT_EQ(r.fitted_exponent, 0.0) << r.check_name;
        for (const auto& s : r.samples) EXPECT_EQ(s.measured, 0.0);
    }
}

TEST(InteriorGradient, VelocityDerivativeOfExactSolution) {
    auto e = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*e, 8, 16));
    const KineticModel model;
    const double c = 0.3, t0 = 0.2;
    auto src = exact_solution_source(model, c, t0);
    const WallFlux psi = constant_wall_flux(e, mesh, c);
    const auto T = BoundaryTemperature::constant(t0);
    const Vec3 x(0.2, 0.1, -0.4);
    for (const Vec3& z : {Vec3(0.5, -0.3, 0.8), Vec3(-1.2, 0.4, 0.1)}) {
        const Vec3 g = fd_gradient([&](const Vec3& w) { return evaluate_f(*e, model, *grid(), psi, T, *src, x, w).value; },
                                   z, 1e-3);
        // d/dzeta [(c + t0(|z|^2 - 2)) sqrt M] = (2 t0 - (c + t0(|z|^2 - 2))) z sqrt M
        const Vec3 ref = (2 * t0 - (c + t0 * (z.squaredNorm() - 2))) * sqrt_maxwellian(z) * z;
        EXPECT_LT((g - ref).norm(), 1e-4) << z.transpose();
    }
}

TEST(InteriorGradient, ConstantTemperatureSolutionIsNull) {
    auto s = std::make_shared<const Sphere>(1.0);
    auto nodes = std::make_shared<const VolumeNodes>(make_volume_nodes(*s, 150));
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*s, 8, 16));
    PicardOptions po;
    po.n_probes = 0;
    const auto sol = picard_solve(s, KineticModel{}, grid(), nodes, mesh, BoundaryTemperature::constant(0.05), po);
    RegularityOptions opt;
    const auto pts = ladder_points(*s, default_ladder(4), 2, 9);
    const auto reps = probe_interior_gradient(sol, pts, opt);
    ASSERT_EQ(reps.size(), 3u);
    EXPECT_EQ(reps[0].check_name, "interior_grad_x");
    EXPECT_EQ(reps[0].status, "pass");
    EXPECT_EQ(reps[0].fitted_exponent, 0.0);
    EXPECT_NE(reps[0].note.find("null"), std::string::npos);
    // The velocity gradient of the exact solution does not vanish.
    EXPECT_GT(reps[2].samples.front().measured, 1e-3);
}
