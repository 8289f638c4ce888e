#pragma once

#include "kinreg/core.hpp"
#include "kinreg/quadrature.hpp"

namespace kinreg {

struct VelocityGridSpec {
    int n_radial = 12;
    int n_angular = 26;
    double zeta_max = 6.0;
    double grazing_cutoff = 1e-3;
};

// Quadrature nodes zeta* = zeta + r*omega centred on the evaluation velocity,
// with the polar axis along zeta. The r^2 Jacobian is folded into the weight,
// which removes the 1/|zeta - zeta*| singularity of the collision kernel.
class CenteredRule {
public:
    CenteredRule() = default;
    CenteredRule(int n_r, int n_mu, int n_phi, double r_extent);

    template <typename Fn>
    void for_each(const Vec3& zeta, Fn&& fn) const {
        const double s = zeta.norm();
        const Vec3 axis = s > 0 ? Vec3(zeta / s) : Vec3::UnitZ();
        Vec3 t1, t2;
        orthonormal_frame(axis, t1, t2);
        const double rmax = std::max(r_extent_, s + 7.0);
        const double scale = rmax / r_extent_;
        for (std::size_t i = 0; i < r_.size(); ++i) {
            const double r = r_[i] * scale;
            const double wr = wr_[i] * scale * r * r;
            for (std::size_t j = 0; j < ref_.size(); ++j) {
                const Vec3& d = ref_[j];
                const Vec3 omega = d.z() * axis + d.x() * t1 + d.y() * t2;
                fn(Vec3(zeta + r * omega), r, omega, wr * wd_[j]);
            }
        }
    }

    int size() const { return static_cast<int>(r_.size() * ref_.size()); }
    int n_r() const { return static_cast<int>(r_.size()); }
    int n_mu() const { return n_mu_; }
    int n_phi() const { return n_phi_; }

private:
    std::vector<double> r_, wr_;
    std::vector<Vec3> ref_;  // directions about the z axis
    std::vector<double> wd_;
    double r_extent_ = 12.0;
    int n_mu_ = 0, n_phi_ = 0;
};

// Product velocity grid: radial Gauss nodes on (0, zeta_max] times Lebedev
// directions. Node m = a * n_angular + b. Off-node values of a velocity slice
// are reconstructed from the weighted quantity g = f / sqrt(M): local cubic
// Lagrange in speed, interpolatory spherical RBF (augmented with low-degree
// polynomials) in direction.
class VelocityGrid {
public:
    explicit VelocityGrid(const VelocityGridSpec& spec = {});

    const VelocityGridSpec& spec() const { return spec_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int n_radial() const { return spec_.n_radial; }
    int n_angular() const { return spec_.n_angular; }
    double zeta_max() const { return spec_.zeta_max; }
    double grazing_cutoff() const { return spec_.grazing_cutoff; }

    const Vec3& node(int m) const { return nodes_[m]; }
    const std::vector<Vec3>& nodes() const { return nodes_; }
    double weight(int m) const { return weights_[m]; }
    const std::vector<double>& weights() const { return weights_; }
    double speed(int m) const { return speeds_[m / spec_.n_angular]; }
    const std::vector<double>& speeds() const { return speeds_; }
    const Vec3& direction(int b) const { return dirs_.dirs[b]; }

    void radial_basis(double rho, double* out) const;
    void angular_basis(const Vec3& omega, double* out) const;
    // phi_m(zeta) such that g(zeta) = sum_m phi_m(zeta) g_m.
    void basis(const Vec3& zeta, Eigen::Ref<VecX> out) const;

    // Refinement used for "double resolution" studies.
    VelocityGridSpec refined() const;

    const CenteredRule& k_rule() const { return k_rule_; }

private:
    VelocityGridSpec spec_;
    std::vector<double> speeds_, radial_w_;
    SphereRule dirs_;
    std::vector<Vec3> nodes_;
    std::vector<double> weights_;
    int poly_degree_ = 1;
    double shape_ = 3.0;
    MatX rbf_coef_;  // (n_ang + n_poly) x n_ang
    CenteredRule k_rule_;
};

// Monomials x^a y^b z^c with c in {0,1}; a basis of polynomials of degree <= p
// restricted to the unit sphere.
int sphere_poly_count(int p);
void sphere_poly_eval(int p, const Vec3& w, double* out);

}  // namespace kinreg
