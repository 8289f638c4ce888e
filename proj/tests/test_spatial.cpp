#include "kinreg/spatial.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace kinreg;

namespace {

std::vector<int> brute_nearest(const std::vector<Vec3>& pts, const Vec3& q, int k) {
    std::vector<std::pair<double, int>> d;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) d.emplace_back((pts[i] - q).norm(), i);
    std::sort(d.begin(), d.end());
    std::vector<int> out;
    for (int i = 0; i < k; ++i) out.push_back(d[i].second);
    return out;
}

}  // namespace

TEST(PointLocator, MatchesBruteForce) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Vec3> pts;
    for (int i = 0; i < 2000; ++i) pts.emplace_back(u(g), 0.5 * u(g), 2 * u(g));
    PointLocator loc(pts, 0.15);
    std::vector<int> idx;
    std::vector<double> dist;
    for (int t = 0; t < 300; ++t) {
        // Include queries well outside the point cloud.
        const Vec3 q(1.5 * u(g), 1.5 * u(g), 3 * u(g));
        loc.nearest(q, 5, idx, dist);
        EXPECT_EQ(idx, brute_nearest(pts, q, 5));
        std::vector<int> w;
        loc.within(q, 0.3, w);
        std::vector<int> ref;
        for (int i = 0; i < 2000; ++i)
            if ((pts[i] - q).norm() <= 0.3) ref.push_back(i);
        EXPECT_EQ(w, ref);
    }
}

TEST(VolumeNodes, WeightsSumToVolume) {
    Sphere s(1.0);
    const VolumeNodes v = make_volume_nodes(s, 600);
    EXPECT_NEAR(v.size(), 600, 60);
    double sum = 0;
    for (double w : v.weights) sum += w;
    EXPECT_NEAR(sum, 4 * kPi / 3, 1e-10);
    for (const auto& p : v.points) EXPECT_TRUE(s.inside(p));

    Ellipsoid e(1, 1.5, 2);
    const VolumeNodes ve = make_volume_nodes(e, 2000);
    sum = 0;
    for (double w : ve.weights) sum += w;
    EXPECT_NEAR(sum, 4 * kPi / 3 * 3.0, 0.03 * 4 * kPi);
}

TEST(Shepard, ExactAtNodesAndConstants) {
    Sphere s(1.0);
    const VolumeNodes v = make_volume_nodes(s, 400);
    ShepardInterpolator sh(v.points);
    for (int i = 0; i < v.size(); i += 37) {
        const auto st = sh.stencil(v.points[i]);
        EXPECT_EQ(st.idx[0], i);
        EXPECT_DOUBLE_EQ(st.w[0], 1.0);
    }
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int t = 0; t < 100; ++t) {
        const auto st = sh.stencil(Vec3(u(g), u(g), u(g)));
        double sum = 0;
        for (double w : st.w) {
            EXPECT_GE(w, 0.0);
            sum += w;
        }
        EXPECT_NEAR(sum, 1.0, 1e-14);
    }
}

TEST(Shepard, ContinuousAcrossStencilChanges) {
    Sphere s(1.0);
    const VolumeNodes v = make_volume_nodes(s, 400);
    ShepardInterpolator sh(v.points);
    auto f = [&](const Vec3& x) {
        const auto st = sh.stencil(x);
        double r = 0;
        for (int k = 0; k < 4; ++k) r += st.w[k] * v.points[st.idx[k]].x();
        return r;
    };
    // Walk a line in tiny steps; no jumps larger than a Lipschitz-type bound.
    double prev = f(Vec3(-0.6, 0.1, 0.05));
    for (int i = 1; i <= 20000; ++i) {
        const Vec3 x(-0.6 + 1.2 * i / 20000.0, 0.1, 0.05);
        const double cur = f(x);
        EXPECT_LT(std::abs(cur - prev), 0.02);
        prev = cur;
    }
}
