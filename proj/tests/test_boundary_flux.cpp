#include "kinreg/boundary_flux.hpp"
#include "kinreg/characteristic.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace kinreg;

namespace {

std::shared_ptr<const VelocityGrid> grid() {
    static auto g = std::make_shared<const VelocityGrid>();
    return g;
}

double maxw(double r) { return std::pow(kPi, -1.5) * std::exp(-r * r); }

}  // namespace

TEST(Characteristic, ExpFittedWeightsExactForPiecewiseLinear) {
    const auto t = chord_nodes(1.7);
    EXPECT_DOUBLE_EQ(t.front(), 0.0);
    EXPECT_NEAR(t.back(), 1.7, 1e-14);
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_GT(t[k], t[k - 1]);
    std::vector<double> w;
    for (double a : {0.0, 1e-5, 0.3, 4.0, 300.0}) {
        exp_fitted_weights(t, a, w);
        auto g = [](double l) { return 2.0 - 0.7 * l; };
        double s = 0;
        for (std::size_t k = 0; k < t.size(); ++k) s += w[k] * g(t[k]);
        const double ref = oracle::simpson([&](double l) { return std::exp(-a * l) * g(l); }, 0.0, 1.7, 200000);
        EXPECT_NEAR(s, ref, 1e-9 * std::max(1.0, std::abs(ref))) << "a=" << a;
    }
}

TEST(FluxForms, MomentNormalisation) {
    Ellipsoid e(1, 1.5, 2);
    const Vec3 x = e.radial_point(Vec3(0.3, -0.5, 0.8).normalized());
    const double m0 = psi_moment(e, *grid(), [](const Vec3& z) { return sqrt_maxwellian(z); }, x);
    const double m2 = psi_moment(e, *grid(), [](const Vec3& z) { return z.squaredNorm() * sqrt_maxwellian(z); }, x);
    // Twelve Gauss nodes on [0, 6] leave a relative error of a few 1e-5.
    EXPECT_NEAR(m0, 1.0, 1e-5);
    EXPECT_NEAR(m2, 2.0, 1e-4);
}

TEST(FluxForms, FreeStreamingLimits) {
    Ellipsoid e(1, 1.5, 2);
    const KineticModel free = KineticModel::hard_sphere(0.5, 0.0);
    const Vec3 x = e.radial_point(Vec3(-0.2, 0.4, 0.9).normalized());
    EXPECT_NEAR(B_T(e, free, *grid(), BoundaryTemperature::constant(0.8), x), 0.0, 1e-4);
    EXPECT_NEAR(B_psi_velocity_form(e, free, *grid(), [](const Vec3&) { return 1.0; }, x), 1.0, 1e-5);
}

TEST(FluxForms, SphereBpsiMatchesNestedSimpson) {
    Sphere s(1.0);
    const KineticModel model;
    const Vec3 x(0, 0, 1);
    // On the unit sphere the chord along mu = omega . n has length 2 mu.
    auto inner = [&](double mu) {
        return oracle::simpson(
            [&](double r) {
                if (r == 0) return 0.0;
                return r * r * r * maxw(r) * std::exp(-collision_frequency(model, r) * 2 * mu / r);
            },
            0.0, 6.0, 400);
    };
    const double ref = 2 * std::sqrt(kPi) * 2 * kPi * oracle::simpson([&](double mu) { return mu * inner(mu); }, 0, 1, 400);
    const double v = B_psi_velocity_form(s, model, *grid(), [](const Vec3&) { return 1.0; }, x);
    EXPECT_NEAR(v, ref, 1e-4);
    EXPECT_LT(v, 1.0);
}

TEST(FluxForms, VelocityAndSurfaceFormsAgree) {
    Ellipsoid e(1, 1.5, 2);
    const KineticModel model;
    auto psi = [](const Vec3& y) { return 0.5 + 0.3 * y.x() - 0.2 * y.y() * y.z(); };
    const BoundaryTemperature T = BoundaryTemperature::bump(0.1, 0.4, Vec3(0, 0, 2), 0.8);
    const FluxQuadSpec fine{24, 48, 24};
    for (const Vec3& u : {Vec3(0, 0, 1), Vec3(1, 0.3, -0.2), Vec3(-0.4, 1, 0.5)}) {
        const Vec3 x = e.radial_point(u.normalized());
        const double vp = B_psi_velocity_form(e, model, *grid(), psi, x, fine);
        const double sp = B_psi_surface_form(e, model, psi, x);
        EXPECT_NEAR(vp, sp, 1e-3) << u.transpose();
        const double vt = B_T(e, model, *grid(), T, x, fine);
        const double st = B_T_surface_form(e, model, T, x);
        EXPECT_NEAR(vt, st, 1e-3) << u.transpose();
    }
}

TEST(FluxForms, ExactSolutionBalance) {
    // For f = (c + t0(|z|^2 - 2)) sqrt M the wall flux is c and K f = nu f, so
    // B_T + B_psi[c] + D_f must return c at every wall point.
    Ellipsoid e(1, 1.5, 2);
    const KineticModel model;
    const double c = 0.7, t0 = 0.3;
    auto src = exact_solution_source(model, c, t0);
    for (const Vec3& u : {Vec3(0, 0, 1), Vec3(1, 0.2, 0.1), Vec3(-0.3, -1, 0.4)}) {
        const Vec3 x = e.radial_point(u.normalized());
        const double bt = B_T(e, model, *grid(), BoundaryTemperature::constant(t0), x);
        const double bp = B_psi_velocity_form(e, model, *grid(), [&](const Vec3&) { return c; }, x);
        const double df = D_f_velocity_form(e, model, *grid(), *src, x);
        EXPECT_NEAR(bt + bp + df, c, 2e-4) << u.transpose();
    }
}

TEST(FluxForms, VelocityAndVolumeFormsOfDfAgree) {
    Ellipsoid e(1, 1.5, 2);
    const KineticModel model;
    auto src = exact_solution_source(model, 1.0, 0.0);
    for (const Vec3& u : {Vec3(0, 0, 1), Vec3(0.7, -0.6, 0.2)}) {
        const Vec3 x = e.radial_point(u.normalized());
        const double v = D_f_velocity_form(e, model, *grid(), *src, x);
        const double w = D_f_volume_form(e, model, *src, x);
        EXPECT_NEAR(v, w, 1e-2 * std::abs(w)) << u.transpose();
    }
}

TEST(FluxOperator, SolveRecoversExactWallFlux) {
    auto dom = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*dom, 8, 16));
    const KineticModel model;
    FluxOperator op(dom, model, grid(), mesh);
    EXPECT_LT(op.b_psi_row_sum_max(), 1.0);
    const double c = 0.4, t0 = -0.2;
    auto src = exact_solution_source(model, c, t0);
    const auto res = solve_wall_flux(op, BoundaryTemperature::constant(t0), *src);
    EXPECT_FALSE(res.anchored);
    EXPECT_LT(res.lipschitz, 1.0);
    EXPECT_NEAR(res.psi.values.maxCoeff(), c, 2e-3);
    EXPECT_NEAR(res.psi.values.minCoeff(), c, 2e-3);
}

TEST(FluxOperator, MatrixFormMatchesSourceForm) {
    auto dom = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*dom, 4, 8));
    FluxOperator op(dom, KineticModel{}, grid(), mesh);
    auto nodes = std::make_shared<const VolumeNodes>(make_volume_nodes(*dom, 120));
    auto kf = sample_field(nodes, grid(), [](const Vec3& x, const Vec3& z) {
        return (1.0 + 0.2 * x.x() + 0.1 * z.y()) * sqrt_maxwellian(z);
    });
    const RowMatX D = op.d_f_matrix(*nodes, *kf.interp);
    const Eigen::Map<const VecX> vec(kf.values.data(), kf.values.size());
    const VecX a = D * vec;
    const VecX b = op.d_f(FieldSource(kf));
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()));
}

TEST(FluxOperator, NeutralModeIsAnchored) {
    auto dom = std::make_shared<const Sphere>(1.0);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*dom, 8, 16));
    const KineticModel free = KineticModel::hard_sphere(0.5, 0.0);
    FluxOperator op(dom, free, grid(), mesh);
    EXPECT_GT(op.b_psi_row_sum_max(), 1.0 - 1e-4);
    FluxSolveOptions opt;
    opt.anchor = 0.25;
    opt.tol = 1e-8;
    opt.max_iters = 5000;
    const VecX zero = VecX::Zero(mesh->size());
    const auto res = solve_wall_flux(op, zero, zero, opt);
    EXPECT_TRUE(res.anchored);
    EXPECT_NEAR(res.psi.values.maxCoeff(), 0.25, 1e-6);
    EXPECT_NEAR(res.psi.values.minCoeff(), 0.25, 1e-6);
}

TEST(FluxOperator, DivergenceRaises) {
    auto dom = std::make_shared<const Sphere>(1.0);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*dom, 4, 8));
    FluxOperator op(dom, KineticModel{}, grid(), mesh);
    FluxSolveOptions opt;
    opt.max_iters = 2;
    opt.tol = 1e-30;
    const VecX one = VecX::Ones(mesh->size());
    EXPECT_THROW(solve_wall_flux(op, one, one, opt), ConvergenceError);
}

TEST(Regularity, DfModulusOnExactSource) {
    Ellipsoid e(1, 1.5, 2);
    const KineticModel model;
    auto src = exact_solution_source(model, 1.0, 0.5);
    const auto pairs = boundary_pairs(e, 8, 1e-3, 0.1, 5);
    for (const auto& p : pairs) EXPECT_LE(std::abs(e.value(p.x1)), e.surface_tolerance());
    EXPECT_NEAR((pairs.front().x0 - pairs.front().x1).norm(), 1e-3, 1e-9);
    const ModulusReport rep = check_Df_modulus(e, model, *grid(), *src, pairs);
    ASSERT_EQ(rep.samples.size(), 8u);
    for (const auto& s : rep.samples) EXPECT_TRUE(std::isfinite(s.ratio));
    EXPECT_LE(rep.max_ratio(), 10.0 * rep.median_ratio() + 1e-12);
}

TEST(Regularity, GradientQuotientsStable) {
    auto dom = std::make_shared<const Ellipsoid>(1, 1.5, 2);
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*dom, 8, 16));
    const KineticModel model;
    auto src = exact_solution_source(model, 1.0, 0.0);
    const WallFlux psi = make_wall_flux(dom, mesh, VecX::Constant(mesh->size(), 1.0));
    const auto samples = sample_tangents(*dom, 3, 9);
    const auto rep = check_grad_B_bounded(*dom, model, *grid(), BoundaryTemperature::linear(0, Vec3(0.1, 0, 0.2)), psi,
                                          *src, samples, 1e-2);
    EXPECT_EQ(rep.rows.size(), 27u);
    ASSERT_EQ(rep.summary.size(), 3u);
    for (const auto& s : rep.summary) EXPECT_TRUE(std::isfinite(s.q_h)) << s.quantity;
    EXPECT_TRUE(rep.all_stable());
}
