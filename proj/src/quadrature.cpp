#include "kinreg/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <mutex>

namespace kinreg {

namespace {

const Rule1D& reference_gauss(int n) {
    static std::mutex mu;
    static std::map<int, Rule1D> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.w[i] = 2.0 * v0 * v0;
    }
    // Symmetrize to remove eigen-solver round-off.
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.x[n - 1 - i] - r.x[i]);
        const double w = 0.5 * (r.w[n - 1 - i] + r.w[i]);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return cache.emplace(n, std::move(r)).first->second;
}

void add_orbit(SphereRule& r, const std::vector<Vec3>& pts, double w) {
    for (const auto& p : pts) {
        r.dirs.push_back(p.normalized());
        r.w.push_back(4.0 * kPi * w);
    }
}

std::vector<Vec3> signed_perms(double a, double b, double c) {
    // All distinct sign/permutation images of (a, b, c).
    std::vector<Vec3> out;
    const double v[3] = {a, b, c};
    int perm[3] = {0, 1, 2};
    do {
        for (int s = 0; s < 8; ++s) {
            Vec3 p(v[perm[0]] * ((s & 1) ? -1 : 1), v[perm[1]] * ((s & 2) ? -1 : 1),
                   v[perm[2]] * ((s & 4) ? -1 : 1));
            bool dup = false;
            for (const auto& q : out)
                if ((q - p).norm() < 1e-12) dup = true;
            if (!dup) out.push_back(p);
        }
    } while (std::next_permutation(perm, perm + 3));
    return out;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
    if (n <= 0) throw ArgumentError("gauss_legendre: n must be positive");
    if (!(b > a)) throw ArgumentError("gauss_legendre: empty interval");
    const Rule1D& ref = reference_gauss(n);
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    const double h = 0.5 * (b - a), m = 0.5 * (b + a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = m + h * ref.x[i];
        r.w[i] = h * ref.w[i];
    }
    return r;
}

Rule1D composite_gauss(const std::vector<double>& breaks, int per_cell) {
    Rule1D r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        Rule1D c = gauss_legendre(per_cell, breaks[i], breaks[i + 1]);
        r.x.insert(r.x.end(), c.x.begin(), c.x.end());
        r.w.insert(r.w.end(), c.w.begin(), c.w.end());
    }
    return r;
}

bool lebedev_supported(int npts) { return npts == 6 || npts == 14 || npts == 26 || npts == 50; }

int lebedev_degree(int npts) {
    switch (npts) {
        case 6: return 3;
        case 14: return 5;
        case 26: return 7;
        case 50: return 11;
        default: throw ArgumentError("lebedev: unsupported point count " + std::to_string(npts));
    }
}

SphereRule lebedev(int npts) {
    lebedev_degree(npts);
    SphereRule r;
    const auto a1 = signed_perms(1, 0, 0);
    const auto a2 = signed_perms(1, 1, 0);
    const auto a3 = signed_perms(1, 1, 1);
    switch (npts) {
        case 6:
            add_orbit(r, a1, 1.0 / 6.0);
            break;
        case 14:
            add_orbit(r, a1, 1.0 / 15.0);
            add_orbit(r, a3, 3.0 / 40.0);
            break;
        case 26:
            add_orbit(r, a1, 1.0 / 21.0);
            add_orbit(r, a2, 4.0 / 105.0);
            add_orbit(r, a3, 9.0 / 280.0);
            break;
        case 50: {
            add_orbit(r, a1, 4.0 / 315.0);
            add_orbit(r, a2, 64.0 / 2835.0);
            add_orbit(r, a3, 27.0 / 1280.0);
            const double l = 1.0 / std::sqrt(11.0);
            const double m = 3.0 / std::sqrt(11.0);
            add_orbit(r, signed_perms(l, l, m), 14641.0 / 725760.0);
            break;
        }
    }
    return r;
}

SphereRule product_sphere_rule(int n_polar, int n_azimuth, const Vec3& axis) {
    if (n_polar <= 0 || n_azimuth <= 0) throw ArgumentError("product_sphere_rule: sizes must be positive");
    const Vec3 n = axis.normalized();
    Vec3 t1, t2;
    orthonormal_frame(n, t1, t2);
    const Rule1D mu = gauss_legendre(n_polar, -1.0, 1.0);
    SphereRule r;
    r.dirs.reserve(n_polar * n_azimuth);
    r.w.reserve(n_polar * n_azimuth);
    const double dphi = 2.0 * kPi / n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - mu.x[i] * mu.x[i]));
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = (j + 0.5) * dphi;
            r.dirs.push_back(mu.x[i] * n + s * (std::cos(phi) * t1 + std::sin(phi) * t2));
            r.w.push_back(mu.w[i] * dphi);
        }
    }
    return r;
}

SphereRule hemisphere_rule(int n_polar, int n_azimuth, const Vec3& nrm) {
    if (n_polar <= 0 || n_azimuth <= 0) throw ArgumentError("hemisphere_rule: sizes must be positive");
    const Vec3 n = nrm.normalized();
    Vec3 t1, t2;
    orthonormal_frame(n, t1, t2);
    const Rule1D mu = gauss_legendre(n_polar, 0.0, 1.0);
    SphereRule r;
    const double dphi = 2.0 * kPi / n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - mu.x[i] * mu.x[i]));
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = (j + 0.5) * dphi;
            r.dirs.push_back(mu.x[i] * n + s * (std::cos(phi) * t1 + std::sin(phi) * t2));
            r.w.push_back(mu.w[i] * dphi);
        }
    }
    return r;
}

HalfSpaceRule half_space_rule(int n_radial, int n_polar, int n_azimuth, double zeta_max, const Vec3& n) {
    if (!(zeta_max > 0)) throw ArgumentError("half_space_rule: zeta_max must be positive");
    HalfSpaceRule h;
    h.dirs = hemisphere_rule(n_polar, n_azimuth, n);
    h.radial = gauss_legendre(n_radial, 0.0, zeta_max);
    for (int i = 0; i < n_radial; ++i) h.radial.w[i] *= h.radial.x[i] * h.radial.x[i];
    return h;
}

}  // namespace kinreg
