#include "kinreg/collision.hpp"

#include <random>

namespace kinreg {

KineticModel KineticModel::hard_sphere(double beta0, double nu_scale) {
    KineticModel m;
    m.beta0 = beta0;
    m.c1 = beta0;
    m.c2 = 2.0 * beta0;
    m.nu_scale = nu_scale;
    m.validate();
    return m;
}

void KineticModel::validate() const {
    if (gamma != 1.0) throw ArgumentError("KineticModel: only the hard-sphere exponent gamma = 1 is supported");
    if (!(beta0 > 0)) throw ArgumentError("KineticModel: beta0 must be positive");
    if (!(c1 > 0) || !(c2 > 0)) throw ArgumentError("KineticModel: kernel constants must be positive");
    if (!(nu_scale >= 0)) throw ArgumentError("KineticModel: nu_scale must be non-negative");
}

double collision_frequency(const KineticModel& m, double s) {
    if (!(s >= 0)) throw ArgumentError("collision_frequency: speed must be non-negative");
    const double rp = 1.0 / std::sqrt(kPi);
    double bracket;
    if (s < 1e-4) {
        // erf(s) / (2 s) = (1 - s^2/3 + s^4/10) / sqrt(pi) + O(s^6)
        bracket = std::exp(-s * s) * rp + s * std::erf(s) + rp * (1.0 - s * s / 3.0 + s * s * s * s / 10.0);
    } else {
        bracket = std::exp(-s * s) * rp + (s + 0.5 / s) * std::erf(s);
    }
    return m.nu_scale * m.beta0 * std::pow(kPi, 1.5) * bracket;
}

double collision_frequency_derivative(const KineticModel& m, double s) {
    if (!(s >= 0)) throw ArgumentError("collision_frequency_derivative: speed must be non-negative");
    // d/ds [e^{-s^2}/sqrt(pi) + (s + 1/(2s)) erf(s)] = (1 - 1/(2 s^2)) erf(s) + e^{-s^2}/(s sqrt(pi))
    double d;
    if (s < 1e-3) {
        d = 4.0 * s / (3.0 * std::sqrt(kPi));
    } else {
        d = (1.0 - 0.5 / (s * s)) * std::erf(s) + std::exp(-s * s) / (s * std::sqrt(kPi));
    }
    return m.nu_scale * m.beta0 * std::pow(kPi, 1.5) * d;
}

double kernel(const KineticModel& m, const Vec3& zeta, const Vec3& zs) {
    const Vec3 v = zeta - zs;
    const double r = v.norm();
    if (r == 0.0) throw ArgumentError("kernel: coincident arguments");
    const double q = v.dot(zeta + zs) / r;
    const double k2 = m.c2 / r * std::exp(-0.25 * (r * r + q * q));
    const double k1 = m.c1 * r * std::exp(-0.5 * (zeta.squaredNorm() + zs.squaredNorm()));
    return k2 - k1;
}

Vec3 kernel_velocity_gradient(const KineticModel& m, const Vec3& zeta, const Vec3& zs) {
    const Vec3 v = zeta - zs;
    const double r = v.norm();
    if (r == 0.0) throw ArgumentError("kernel_velocity_gradient: coincident arguments");
    const double q = v.dot(zeta + zs) / r;
    const double k2 = m.c2 / r * std::exp(-0.25 * (r * r + q * q));
    const double k1 = m.c1 * r * std::exp(-0.5 * (zeta.squaredNorm() + zs.squaredNorm()));
    const Vec3 dq = (2.0 * zeta - q * v / r) / r;
    const Vec3 g2 = k2 * (-v / (r * r) - 0.5 * v - 0.5 * q * dq);
    const Vec3 g1 = k1 * (v / (r * r) - zeta);
    return g2 - g1;
}

double kernel_l1_norm(const KineticModel& model, const VelocityGrid& grid, const Vec3& zeta) {
    double acc = 0.0;
    grid.k_rule().for_each(zeta, [&](const Vec3&, double r, const Vec3& omega, double w) {
        acc += w * std::abs(kernel_polar(model, zeta, r, omega));
    });
    return acc;
}

std::vector<DecayRow> velocity_decay_check(const VelocityGrid& grid, double eps, double a1, double a2,
                                           const std::vector<double>& eta_speeds) {
    if (!(eps > 0) || !(a1 > 0) || !(a2 > 0))
        throw ArgumentError("velocity_decay_check: epsilon, a1, a2 must be positive");
    if (eps > 3) throw ArgumentError("velocity_decay_check: epsilon must not exceed 3");
    // r = u^{1/eps} turns r^{eps-1} dr into du / eps. The azimuth about eta is
    // integrated exactly; mu is the cosine against eta.
    const double rmax = std::sqrt(40.0 / a1);
    const double umax = std::pow(rmax, eps);
    const int panels = std::max(16, 2 * grid.n_radial());
    std::vector<double> ub(panels + 1), mb(4 * panels + 1);
    for (int i = 0; i <= panels; ++i) ub[i] = umax * i / panels;
    for (int i = 0; i <= 4 * panels; ++i) mb[i] = -1.0 + 2.0 * i / (4 * panels);
    const Rule1D u = composite_gauss(ub, 8);
    const Rule1D mu = composite_gauss(mb, 8);

    std::vector<DecayRow> out;
    for (double s : eta_speeds) {
        if (!(s >= 0)) throw ArgumentError("velocity_decay_check: speeds must be non-negative");
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double r = std::pow(u.x[i], 1.0 / eps);
            double inner = 0.0;
            for (std::size_t j = 0; j < mu.size(); ++j) {
                const double q = 2.0 * s * mu.x[j] + r;
                inner += mu.w[j] * std::exp(-a1 * r * r - a2 * q * q);
            }
            acc += u.w[i] / eps * 2.0 * kPi * inner;
        }
        out.push_back({s, acc, acc * (1.0 + s)});
    }
    return out;
}

NuBounds fit_nu_bounds(const KineticModel& model, double max_speed, int samples) {
    if (samples < 2) throw ArgumentError("fit_nu_bounds: need at least two samples");
    NuBounds b;
    b.nu0 = std::numeric_limits<double>::infinity();
    double prev = -1.0;
    for (int i = 0; i < samples; ++i) {
        const double s = max_speed * i / (samples - 1);
        const double nu = collision_frequency(model, s);
        const double ratio = nu / (1.0 + s);
        b.nu0 = std::min(b.nu0, ratio);
        b.nu1 = std::max(b.nu1, ratio);
        if (nu < prev) b.monotone = false;
        prev = nu;
    }
    return b;
}

KernelBoundFit fit_kernel_bounds(const KineticModel& model, double delta, double radius, int samples,
                                 unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto draw = [&] {
        Vec3 v;
        do {
            v = Vec3(U(rng), U(rng), U(rng));
        } while (v.squaredNorm() > 1.0);
        return Vec3(radius * v);
    };
    KernelBoundFit fit;
    for (int i = 0; i < samples; ++i) {
        const Vec3 a = draw(), b = draw();
        const Vec3 v = a - b;
        const double r = v.norm();
        if (r < 1e-8) continue;
        const double q = v.dot(a + b) / r;
        const double env = std::exp(-(1.0 - delta) / 4.0 * (r * r + q * q));
        const double kv = std::abs(kernel(model, a, b));
        const double kg = kernel_velocity_gradient(model, a, b).norm();
        fit.c_value = std::max(fit.c_value, kv / (env / r));
        fit.c_gradient = std::max(fit.c_gradient, kg / (env * (1.0 + a.norm()) / (r * r)));
        ++fit.samples;
    }
    return fit;
}

}  // namespace kinreg
