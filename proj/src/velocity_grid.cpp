#include "kinreg/velocity_grid.hpp"

#include <Eigen/LU>

#include <algorithm>

namespace kinreg {

CenteredRule::CenteredRule(int n_r, int n_mu, int n_phi, double r_extent)
    : r_extent_(r_extent), n_mu_(n_mu), n_phi_(n_phi) {
    if (n_r <= 0 || n_mu <= 0 || n_phi <= 0 || !(r_extent > 0))
        throw ArgumentError("CenteredRule: sizes must be positive");
    const Rule1D r = gauss_legendre(n_r, 0.0, r_extent);
    r_ = r.x;
    wr_ = r.w;
    const SphereRule s = product_sphere_rule(n_mu, n_phi, Vec3::UnitZ());
    ref_ = s.dirs;
    wd_ = s.w;
}

int sphere_poly_count(int p) { return (p + 1) * (p + 1); }

void sphere_poly_eval(int p, const Vec3& w, double* out) {
    int k = 0;
    for (int deg = 0; deg <= p; ++deg) {
        for (int c = 0; c <= std::min(1, deg); ++c) {
            for (int a = 0; a <= deg - c; ++a) {
                const int b = deg - c - a;
                out[k++] = std::pow(w.x(), a) * std::pow(w.y(), b) * (c ? w.z() : 1.0);
            }
        }
    }
}

VelocityGrid::VelocityGrid(const VelocityGridSpec& spec) : spec_(spec) {
    if (spec.n_radial < 4 || spec.n_radial > 64)
        throw ArgumentError("VelocityGrid: n_radial must be in [4, 64]");
    if (!lebedev_supported(spec.n_angular))
        throw ArgumentError("VelocityGrid: n_angular must be one of 6, 14, 26, 50");
    if (!(spec.zeta_max > 0)) throw ArgumentError("VelocityGrid: zeta_max must be positive");
    if (!(spec.grazing_cutoff > 0)) throw ArgumentError("VelocityGrid: grazing_cutoff must be positive");

    const Rule1D r = gauss_legendre(spec.n_radial, 0.0, spec.zeta_max);
    speeds_ = r.x;
    radial_w_ = r.w;
    const int nr = spec.n_radial;

    dirs_ = lebedev(spec.n_angular);
    const int na = spec.n_angular;
    for (int a = 0; a < nr; ++a) {
        for (int b = 0; b < na; ++b) {
            nodes_.push_back(speeds_[a] * dirs_.dirs[b]);
            weights_.push_back(radial_w_[a] * speeds_[a] * speeds_[a] * dirs_.w[b]);
        }
    }

    const int deg = lebedev_degree(na);
    poly_degree_ = std::max(1, deg / 2 - 1);
    shape_ = na / 8.0;
    const int np = sphere_poly_count(poly_degree_);
    MatX sys = MatX::Zero(na + np, na + np);
    std::vector<double> q(np);
    for (int b = 0; b < na; ++b) {
        for (int c = 0; c < na; ++c)
            sys(b, c) = std::exp(shape_ * (dirs_.dirs[b].dot(dirs_.dirs[c]) - 1.0));
        sphere_poly_eval(poly_degree_, dirs_.dirs[b], q.data());
        for (int k = 0; k < np; ++k) sys(b, na + k) = sys(na + k, b) = q[k];
    }
    MatX rhs = MatX::Zero(na + np, na);
    rhs.topRows(na).setIdentity();
    rbf_coef_ = sys.fullPivLu().solve(rhs);

    k_rule_ = CenteredRule(2 * nr + 8, 2 * deg + 2, deg + 1, spec.zeta_max + 6.0);
}

void VelocityGrid::radial_basis(double rho, double* out) const {
    const int nr = spec_.n_radial;
    std::fill(out, out + nr, 0.0);
    if (rho > spec_.zeta_max) return;
    // Cubic Lagrange on the four nodes around rho. A global polynomial would
    // couple every speed to every other, and after the 1/sqrt(M) weighting the
    // tail nodes would feed errors of size e^{s^2/2} into small speeds.
    const int width = std::min(4, nr);
    const int j = static_cast<int>(std::upper_bound(speeds_.begin(), speeds_.end(), rho) - speeds_.begin()) - 1;
    const int a0 = std::clamp(j - 1, 0, nr - width);
    for (int a = a0; a < a0 + width; ++a) {
        double l = 1.0;
        for (int c = a0; c < a0 + width; ++c)
            if (c != a) l *= (rho - speeds_[c]) / (speeds_[a] - speeds_[c]);
        out[a] = l;
    }
}

void VelocityGrid::angular_basis(const Vec3& omega, double* out) const {
    const int na = spec_.n_angular;
    const int np = sphere_poly_count(poly_degree_);
    Eigen::VectorXd v(na + np);
    for (int c = 0; c < na; ++c) v(c) = std::exp(shape_ * (omega.dot(dirs_.dirs[c]) - 1.0));
    sphere_poly_eval(poly_degree_, omega, v.data() + na);
    Eigen::Map<Eigen::VectorXd>(out, na) = rbf_coef_.transpose() * v;
}

void VelocityGrid::basis(const Vec3& zeta, Eigen::Ref<VecX> out) const {
    const int nr = spec_.n_radial, na = spec_.n_angular;
    double rb[64], ab[64];
    const double s = zeta.norm();
    radial_basis(s, rb);
    angular_basis(s > 0 ? Vec3(zeta / s) : Vec3::UnitZ(), ab);
    for (int a = 0; a < nr; ++a)
        for (int b = 0; b < na; ++b) out(a * na + b) = rb[a] * ab[b];
}

VelocityGridSpec VelocityGrid::refined() const {
    VelocityGridSpec s = spec_;
    s.n_radial *= 2;
    switch (spec_.n_angular) {
        case 6: s.n_angular = 14; break;
        case 14: s.n_angular = 26; break;
        case 26: s.n_angular = 50; break;
        default: throw RangeError("VelocityGrid::refined: no finer angular rule available");
    }
    return s;
}

}  // namespace kinreg
