#pragma once

#include "kinreg/core.hpp"
#include "kinreg/velocity_grid.hpp"

#include <functional>

namespace kinreg {

// Hard-sphere linearized collision model. Kernel constants default to the
// values that make K(sqrt M) = nu sqrt M: c1 = beta0, c2 = 2 beta0.
struct KineticModel {
    double gamma = 1.0;
    double beta0 = 0.5;
    double c1 = 0.5;
    double c2 = 1.0;
    double nu_scale = 1.0;

    static KineticModel hard_sphere(double beta0 = 0.5, double nu_scale = 1.0);
    void validate() const;
};

template <typename Scalar>
Scalar maxwellian(const Vec3T<Scalar>& zeta) {
    using std::exp;
    return Scalar(std::pow(kPi, -1.5)) * exp(-zeta.squaredNorm());
}

template <typename Scalar>
Scalar sqrt_maxwellian(const Vec3T<Scalar>& zeta) {
    using std::exp;
    return Scalar(std::pow(kPi, -0.75)) * exp(-Scalar(0.5) * zeta.squaredNorm());
}

inline double sqrt_maxwellian_speed(double s) { return std::pow(kPi, -0.75) * std::exp(-0.5 * s * s); }

double collision_frequency(const KineticModel& model, double speed);
// d nu / d speed.
double collision_frequency_derivative(const KineticModel& model, double speed);

double kernel(const KineticModel& model, const Vec3& zeta, const Vec3& zeta_star);
Vec3 kernel_velocity_gradient(const KineticModel& model, const Vec3& zeta, const Vec3& zeta_star);

// k(zeta, zeta + r*omega) for unit omega and r > 0, free of cancellation at small r.
inline double kernel_polar(const KineticModel& m, const Vec3& zeta, double r, const Vec3& omega) {
    const double q = 2.0 * zeta.dot(omega) + r;
    const double k2 = m.c2 / r * std::exp(-0.25 * (r * r + q * q));
    const double k1 = m.c1 * r * std::exp(-0.5 * (zeta.squaredNorm() + (zeta + r * omega).squaredNorm()));
    return k2 - k1;
}

template <typename Fn>
double apply_K(const KineticModel& model, const VelocityGrid& grid, Fn&& f_slice, const Vec3& zeta) {
    double acc = 0.0;
    grid.k_rule().for_each(zeta, [&](const Vec3& zs, double r, const Vec3& omega, double w) {
        acc += w * kernel_polar(model, zeta, r, omega) * f_slice(zs);
    });
    return acc;
}

// Integral of |k(zeta, .)|; bounds |K f| by this times max |f|.
double kernel_l1_norm(const KineticModel& model, const VelocityGrid& grid, const Vec3& zeta);

struct DecayRow {
    double speed;
    double value;     // the integral itself
    double weighted;  // value * (1 + speed)
};

std::vector<DecayRow> velocity_decay_check(const VelocityGrid& grid, double epsilon, double a1, double a2,
                                           const std::vector<double>& eta_speeds);

// Fitted constants for the growth and kernel bounds.
struct NuBounds {
    double nu0 = 0, nu1 = 0;
    bool monotone = true;
};
NuBounds fit_nu_bounds(const KineticModel& model, double max_speed, int samples);

struct KernelBoundFit {
    double c_value = 0;     // sup |k| / envelope
    double c_gradient = 0;  // sup |grad k| / gradient envelope
    int samples = 0;
};
// Random pairs with |zeta|, |zeta*| <= radius; the envelope exponent uses
// (1 - delta) / 4.
KernelBoundFit fit_kernel_bounds(const KineticModel& model, double delta, double radius, int samples,
                                 unsigned seed);

}  // namespace kinreg
