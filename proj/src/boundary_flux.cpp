#include "kinreg/boundary_flux.hpp"

#include <algorithm>

#include "kinreg/characteristic.hpp"
#include "kinreg/parallel.hpp"
#include "kinreg/quadrature.hpp"

#include <random>

namespace kinreg {

namespace {

const double kTwoSqrtPi = 2.0 * std::sqrt(kPi);

double maxwellian_speed(double s) { return std::pow(kPi, -1.5) * std::exp(-s * s); }

struct HalfSpace {
    HalfSpaceRule rule;
    std::vector<double> nu;
    std::vector<double> mu;      // omega . n per direction
    std::vector<double> length;  // backward chord per direction
    std::vector<Vec3> exit;      // exit point per direction
};

HalfSpace half_space(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid, const Vec3& x,
                     const FluxQuadSpec& quad, bool need_rays) {
    HalfSpace h;
    const Vec3 n = domain.normal(x);
    const int nr = quad.n_radial > 0 ? quad.n_radial : grid.n_radial();
    h.rule = half_space_rule(nr, quad.n_polar, quad.n_azimuth, grid.zeta_max(), n);
    for (double r : h.rule.radial.x) h.nu.push_back(collision_frequency(model, r));
    for (const auto& w : h.rule.dirs.dirs) {
        h.mu.push_back(w.dot(n));
        if (need_rays) {
            const double L = domain.exit_distance(x, w);
            h.length.push_back(L);
            h.exit.push_back(x - L * w);
        }
    }
    return h;
}

}  // namespace

double psi_moment(const ConvexDomain& domain, const VelocityGrid& grid, const std::function<double(const Vec3&)>& f,
                  const Vec3& x, const FluxQuadSpec& quad) {
    const HalfSpace h = half_space(domain, KineticModel{}, grid, x, quad, false);
    double s = 0;
    for (int d = 0; d < h.rule.n_dir(); ++d) {
        const Vec3& w = h.rule.dirs.dirs[d];
        for (int q = 0; q < h.rule.n_rad(); ++q) {
            const double r = h.rule.radial.x[q];
            s += h.rule.dirs.w[d] * h.rule.radial.w[q] * r * h.mu[d] * sqrt_maxwellian_speed(r) * f(r * w);
        }
    }
    return kTwoSqrtPi * s;
}

double B_T(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
           const BoundaryTemperature& T, const Vec3& x, const FluxQuadSpec& quad) {
    const HalfSpace h = half_space(domain, model, grid, x, quad, true);
    double s = 0;
    for (int d = 0; d < h.rule.n_dir(); ++d) {
        if (h.mu[d] < grid.grazing_cutoff()) continue;
        double inner = 0;
        for (int q = 0; q < h.rule.n_rad(); ++q) {
            const double r = h.rule.radial.x[q];
            inner += h.rule.radial.w[q] * r * (r * r - 2.0) * maxwellian_speed(r) * std::exp(-h.nu[q] * h.length[d] / r);
        }
        s += h.rule.dirs.w[d] * h.mu[d] * T(h.exit[d]) * inner;
    }
    return kTwoSqrtPi * s;
}

double B_psi_velocity_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                           const std::function<double(const Vec3&)>& psi, const Vec3& x, const FluxQuadSpec& quad) {
    const HalfSpace h = half_space(domain, model, grid, x, quad, true);
    double s = 0;
    for (int d = 0; d < h.rule.n_dir(); ++d) {
        if (h.mu[d] < grid.grazing_cutoff()) continue;
        double inner = 0;
        for (int q = 0; q < h.rule.n_rad(); ++q) {
            const double r = h.rule.radial.x[q];
            inner += h.rule.radial.w[q] * r * maxwellian_speed(r) * std::exp(-h.nu[q] * h.length[d] / r);
        }
        s += h.rule.dirs.w[d] * h.mu[d] * psi(h.exit[d]) * inner;
    }
    return kTwoSqrtPi * s;
}

double D_f_velocity_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                         const CollisionSource& kf, const Vec3& x, const FluxQuadSpec& quad) {
    const HalfSpace h = half_space(domain, model, grid, x, quad, true);
    const int nq = h.rule.n_rad();
    std::vector<double> out(nq), w;
    double s = 0;
    for (int d = 0; d < h.rule.n_dir(); ++d) {
        if (h.mu[d] < grid.grazing_cutoff()) continue;
        const Vec3& omega = h.rule.dirs.dirs[d];
        const auto profile = kf.along(omega, h.rule.radial.x);
        const std::vector<double> t = chord_nodes(h.length[d]);
        // acc[q] = sum_t c_{q,t} K f(x - t omega, rho_q omega)
        std::vector<double> acc(nq, 0.0);
        std::vector<std::vector<double>> cw(nq);
        for (int q = 0; q < nq; ++q) exp_fitted_weights(t, h.nu[q] / h.rule.radial.x[q], cw[q]);
        for (std::size_t k = 0; k < t.size(); ++k) {
            profile(x - t[k] * omega, out.data());
            for (int q = 0; q < nq; ++q) acc[q] += cw[q][k] * out[q];
        }
        double inner = 0;
        for (int q = 0; q < nq; ++q)
            inner += h.rule.radial.w[q] * sqrt_maxwellian_speed(h.rule.radial.x[q]) * acc[q];
        s += h.rule.dirs.w[d] * h.mu[d] * inner;
    }
    return kTwoSqrtPi * s;
}

// ------------------------------------------------------------ surface forms

namespace {

struct SpeedRule {
    std::vector<double> rho, w, nu;
};

SpeedRule speed_rule(const KineticModel& model, int per_panel) {
    SpeedRule s;
    const Rule1D r = composite_gauss({0.0, 0.125, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 7.0}, per_panel);
    s.rho = r.x;
    s.w = r.w;
    for (double x : s.rho) s.nu.push_back(collision_frequency(model, x));
    return s;
}

template <typename Value, typename Moment>
double surface_form(const ConvexDomain& domain, const Vec3& x, const SurfaceFormSpec& spec, Value&& value,
                    Moment&& moment) {
    const Vec3 nx = domain.normal(x);
    const BoundaryMesh mesh = make_focused_mesh(domain, x, 0.05, spec.per_panel, spec.n_azimuth);
    double s = 0;
    for (int i = 0; i < mesh.size(); ++i) {
        const Vec3 d = x - mesh.nodes[i];
        const double r2 = d.squaredNorm();
        if (r2 == 0.0) continue;
        const double r = std::sqrt(r2);
        const double geo = d.dot(nx) * std::abs(d.dot(mesh.normals[i])) / (r2 * r2);
        s += mesh.weights[i] * value(mesh.nodes[i]) * geo * moment(r);
    }
    return 2.0 / kPi * s;
}

}  // namespace

double B_psi_surface_form(const ConvexDomain& domain, const KineticModel& model,
                          const std::function<double(const Vec3&)>& psi, const Vec3& x, const SurfaceFormSpec& spec) {
    const SpeedRule sr = speed_rule(model, spec.n_speed);
    auto J = [&](double r) {
        double j = 0;
        for (std::size_t k = 0; k < sr.rho.size(); ++k) {
            const double p = sr.rho[k];
            j += sr.w[k] * p * p * p * std::exp(-p * p - sr.nu[k] * r / p);
        }
        return j;
    };
    return surface_form(domain, x, spec, psi, J);
}

double B_T_surface_form(const ConvexDomain& domain, const KineticModel& model, const BoundaryTemperature& T,
                        const Vec3& x, const SurfaceFormSpec& spec) {
    const SpeedRule sr = speed_rule(model, spec.n_speed);
    auto J = [&](double r) {
        double j = 0;
        for (std::size_t k = 0; k < sr.rho.size(); ++k) {
            const double p = sr.rho[k];
            j += sr.w[k] * p * p * p * (p * p - 2.0) * std::exp(-p * p - sr.nu[k] * r / p);
        }
        return j;
    };
    return surface_form(domain, x, spec, [&](const Vec3& y) { return T(y); }, J);
}

double D_f_volume_form(const ConvexDomain& domain, const KineticModel& model, const CollisionSource& kf,
                       const Vec3& x, double zeta_max, const VolumeFormSpec& spec) {
    const Vec3 n = domain.normal(x);
    const SphereRule dirs = hemisphere_rule(spec.n_polar, spec.n_azimuth, n);
    const Rule1D speed = gauss_legendre(spec.n_speed, 0.0, zeta_max);
    std::vector<double> nu, damp(speed.size());
    for (double r : speed.x) nu.push_back(collision_frequency(model, r));
    std::vector<double> out(speed.size());
    double s = 0;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Vec3& omega = dirs.dirs[d];
        const double L = domain.exit_distance(x, omega);
        if (!(L > 0)) continue;
        // Shells graded geometrically toward both ends of the chord.
        std::vector<double> breaks = {0.0};
        for (int k = 10; k >= 2; --k) breaks.push_back(L * std::ldexp(1.0, -k));
        breaks.push_back(0.5 * L);
        for (int k = 2; k <= 6; ++k) breaks.push_back(L * (1.0 - std::ldexp(1.0, -k)));
        breaks.push_back(L);
        const Rule1D shells = composite_gauss(breaks, spec.per_shell);
        const auto profile = kf.along(omega, speed.x);
        double dir_sum = 0;
        for (std::size_t k = 0; k < shells.size(); ++k) {
            const double r = shells.x[k];
            profile(x - r * omega, out.data());
            double inner = 0;
            for (std::size_t q = 0; q < speed.size(); ++q) {
                const double p = speed.x[q];
                inner += speed.w[q] * p * p * std::exp(-0.5 * p * p - nu[q] * r / p) * out[q];
            }
            dir_sum += shells.w[k] * inner;
        }
        s += dirs.w[d] * omega.dot(n) * dir_sum;
    }
    return 2.0 * std::pow(kPi, -0.25) * s;
}

// ------------------------------------------------------------ operator on a mesh

FluxOperator::FluxOperator(std::shared_ptr<const ConvexDomain> domain, const KineticModel& model,
                           std::shared_ptr<const VelocityGrid> grid, std::shared_ptr<const BoundaryMesh> mesh,
                           const FluxQuadSpec& quad)
    : domain_(std::move(domain)), model_(model), grid_(std::move(grid)), mesh_(std::move(mesh)) {
    model_.validate();
    interp_ = std::make_shared<SurfaceInterpolator>(domain_, mesh_);
    const int nr = quad.n_radial > 0 ? quad.n_radial : grid_->n_radial();
    const Rule1D r = gauss_legendre(nr, 0.0, grid_->zeta_max());
    rho_ = r.x;
    for (int q = 0; q < nr; ++q) {
        w_rho_.push_back(r.w[q] * r.x[q] * r.x[q]);
        nu_.push_back(collision_frequency(model_, r.x[q]));
    }
    // Rescale the speed weights by (alpha + beta rho^2) so the half-range
    // moments of rho M and rho^3 M are exact. Without this the wall leaks mass
    // at the level of the truncated Gauss error, and the coupled solve
    // amplifies the leak.
    {
        double a00 = 0, a01 = 0, a11 = 0;
        for (int q = 0; q < nr; ++q) {
            const double m = w_rho_[q] * rho_[q] * maxwellian_speed(rho_[q]);
            const double r2 = rho_[q] * rho_[q];
            a00 += m;
            a01 += m * r2;
            a11 += m * r2 * r2;
        }
        const double t0 = 0.5 * std::pow(kPi, -1.5), t1 = std::pow(kPi, -1.5);
        const double det = a00 * a11 - a01 * a01;
        const double alpha = (t0 * a11 - t1 * a01) / det, beta = (a00 * t1 - a01 * t0) / det;
        for (int q = 0; q < nr; ++q) w_rho_[q] *= alpha + beta * rho_[q] * rho_[q];
    }
    const int nm = mesh_->size();
    rays_.resize(nm);
    bpsi_ = MatX::Zero(nm, nm);
    parallel_for(nm, [&](int k) {
        const Vec3& x = mesh_->nodes[k];
        const Vec3& n = mesh_->normals[k];
        const SphereRule dirs = hemisphere_rule(quad.n_polar, quad.n_azimuth, n);
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            const double mu = dirs.dirs[d].dot(n);
            if (mu < grid_->grazing_cutoff()) continue;
            Ray ray;
            ray.omega = dirs.dirs[d];
            ray.prefactor = kTwoSqrtPi * dirs.w[d] * mu;
            ray.length = domain_->exit_distance(x, ray.omega);
            ray.exit_point = x - ray.length * ray.omega;
            rays_[k].push_back(ray);
            double c = 0;
            for (int q = 0; q < nr; ++q)
                c += w_rho_[q] * rho_[q] * maxwellian_speed(rho_[q]) * std::exp(-nu_[q] * ray.length / rho_[q]);
            const auto st = interp_->stencil(ray.exit_point);
            for (std::size_t t = 0; t < st.idx.size(); ++t) bpsi_(k, st.idx[t]) += ray.prefactor * c * st.w[t];
        }
    });
}

double FluxOperator::b_psi_row_sum_max() const { return bpsi_.rowwise().sum().maxCoeff(); }

VecX FluxOperator::b_t(const BoundaryTemperature& T) const {
    const int nm = mesh_->size();
    VecX out = VecX::Zero(nm);
    for (int k = 0; k < nm; ++k) {
        for (const Ray& ray : rays_[k]) {
            double c = 0;
            for (std::size_t q = 0; q < rho_.size(); ++q)
                c += w_rho_[q] * rho_[q] * (rho_[q] * rho_[q] - 2.0) * maxwellian_speed(rho_[q]) *
                     std::exp(-nu_[q] * ray.length / rho_[q]);
            out(k) += ray.prefactor * c * T(ray.exit_point);
        }
    }
    return out;
}

VecX FluxOperator::d_f(const CollisionSource& kf) const {
    const int nm = mesh_->size();
    const int nq = static_cast<int>(rho_.size());
    VecX out = VecX::Zero(nm);
    parallel_for(nm, [&](int k) {
        const Vec3& x = mesh_->nodes[k];
        std::vector<double> vals(nq);
        std::vector<std::vector<double>> cw(nq);
        double s = 0;
        for (const Ray& ray : rays_[k]) {
            const std::vector<double> t = chord_nodes(ray.length);
            for (int q = 0; q < nq; ++q) exp_fitted_weights(t, nu_[q] / rho_[q], cw[q]);
            const auto profile = kf.along(ray.omega, rho_);
            double inner = 0;
            for (std::size_t j = 0; j < t.size(); ++j) {
                profile(x - t[j] * ray.omega, vals.data());
                for (int q = 0; q < nq; ++q) inner += w_rho_[q] * sqrt_maxwellian_speed(rho_[q]) * cw[q][j] * vals[q];
            }
            s += ray.prefactor * inner;
        }
        out(k) = s;
    });
    return out;
}

RowMatX FluxOperator::d_f_matrix(const VolumeNodes& nodes, const ShepardInterpolator& interp) const {
    const VelocityGrid& g = *grid_;
    const int nm = mesh_->size();
    const int nr = g.n_radial(), na = g.n_angular(), nv = g.size();
    const int nq = static_cast<int>(rho_.size());
    // radial[q][a]: speed-row weight at rho_q including the sqrt M ratio.
    std::vector<double> radial(nq * nr);
    for (int q = 0; q < nq; ++q) {
        g.radial_basis(rho_[q], radial.data() + q * nr);
        for (int a = 0; a < nr; ++a)
            radial[q * nr + a] *= sqrt_maxwellian_speed(rho_[q]) / sqrt_maxwellian_speed(g.speeds()[a]);
    }
    RowMatX D = RowMatX::Zero(nm, static_cast<long>(nodes.size()) * nv);
    parallel_for(nm, [&](int k) {
        const Vec3& x = mesh_->nodes[k];
        std::vector<double> ang(na), e(nr);
        std::vector<std::vector<double>> cw(nq);
        double* row = D.data() + static_cast<long>(k) * D.cols();
        for (const Ray& ray : rays_[k]) {
            g.angular_basis(ray.omega, ang.data());
            const std::vector<double> t = chord_nodes(ray.length);
            for (int q = 0; q < nq; ++q) exp_fitted_weights(t, nu_[q] / rho_[q], cw[q]);
            for (std::size_t j = 0; j < t.size(); ++j) {
                std::fill(e.begin(), e.end(), 0.0);
                for (int q = 0; q < nq; ++q) {
                    const double c = ray.prefactor * w_rho_[q] * sqrt_maxwellian_speed(rho_[q]) * cw[q][j];
                    for (int a = 0; a < nr; ++a) e[a] += c * radial[q * nr + a];
                }
                const ShepardStencil st = interp.stencil(x - t[j] * ray.omega);
                for (int s = 0; s < 4; ++s) {
                    if (st.w[s] == 0.0) continue;
                    double* block = row + static_cast<long>(st.idx[s]) * nv;
                    for (int a = 0; a < nr; ++a) {
                        const double c = st.w[s] * e[a];
                        if (c == 0.0) continue;
                        for (int b = 0; b < na; ++b) block[a * na + b] += c * ang[b];
                    }
                }
            }
        }
    });
    return D;
}

// ------------------------------------------------------------ fixed point

FluxSolveResult solve_wall_flux(const FluxOperator& op, const VecX& bt, const VecX& df,
                                const FluxSolveOptions& options, const VecX* initial) {
    const BoundaryMesh& mesh = op.mesh();
    const int nm = mesh.size();
    if (bt.size() != nm || df.size() != nm) throw ArgumentError("solve_wall_flux: size mismatch");
    VecX area(nm);
    for (int k = 0; k < nm; ++k) area(k) = mesh.weights[k];
    const double total = area.sum();
    FluxSolveResult res;
    // Row sums equal one up to the radial quadrature error when nothing is
    // absorbed along the chords.
    res.anchored = op.b_psi_row_sum_max() > 1.0 - 1e-4;
    VecX psi = initial ? *initial : VecX(bt + df);
    auto anchor = [&](VecX& v) {
        if (res.anchored) v.array() += options.anchor - area.dot(v) / total;
    };
    anchor(psi);
    const VecX rhs = bt + df;
    double prev = 0;
    for (int it = 1; it <= options.max_iters; ++it) {
        VecX next = rhs + op.b_psi() * psi;
        anchor(next);
        const double upd = (next - psi).cwiseAbs().maxCoeff();
        res.history.push_back(upd);
        if (prev > 0) res.lipschitz = upd / prev;
        prev = upd;
        psi = std::move(next);
        res.iterations = it;
        if (upd <= options.tol * std::max(1.0, psi.cwiseAbs().maxCoeff())) {
            res.psi.mesh = op.mesh_ptr();
            res.psi.interp = op.interpolator();
            res.psi.values = psi;
            return res;
        }
        if (!std::isfinite(upd)) break;
    }
    throw ConvergenceError("solve_wall_flux: no convergence within max_iters", res.history);
}

FluxSolveResult solve_wall_flux(const FluxOperator& op, const BoundaryTemperature& T, const CollisionSource& kf,
                                const FluxSolveOptions& options) {
    return solve_wall_flux(op, op.b_t(T), op.d_f(kf), options);
}

// ------------------------------------------------------------ regularity checks

namespace {

Vec3 unit_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec3 v(g(rng), g(rng), g(rng));
        if (v.norm() > 1e-8) return v.normalized();
    }
}

Vec3 boundary_offset(const ConvexDomain& domain, const Vec3& x, const Vec3& t, double h) {
    return domain.radial_point((x + h * t).normalized());
}

}  // namespace

std::vector<BoundaryPair> boundary_pairs(const ConvexDomain& domain, int n, double s_min, double s_max,
                                         unsigned seed, int n_anchors) {
    if (n < 1 || n_anchors < 1 || !(s_min > 0) || !(s_max >= s_min)) throw ArgumentError("boundary_pairs: bad sweep");
    std::mt19937_64 rng(seed);
    std::vector<BoundaryPair> out;
    for (int j = 0; j < n_anchors; ++j) {
        const Vec3 x0 = domain.radial_point(unit_vector(rng));
        Vec3 t1, t2;
        orthonormal_frame(domain.normal(x0), t1, t2);
        const double a = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
        const Vec3 t = std::cos(a) * t1 + std::sin(a) * t2;
        for (int i = 0; i < n; ++i) {
            const double s = n == 1 ? s_min : s_min * std::pow(s_max / s_min, static_cast<double>(i) / (n - 1));
            // Secant steps on the tangential offset to hit the target chord length.
            double h = s, h_prev = 0, e_prev = -s;
            Vec3 x1 = boundary_offset(domain, x0, t, h);
            for (int it = 0; it < 20; ++it) {
                const double e = (x1 - x0).norm() - s;
                if (std::abs(e) < 1e-12 * s) break;
                const double slope = (e - e_prev) / (h - h_prev);
                h_prev = h;
                e_prev = e;
                h -= e / slope;
                x1 = boundary_offset(domain, x0, t, h);
            }
            out.push_back({x0, x1});
        }
    }
    return out;
}

ModulusReport check_Df_modulus(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                               const CollisionSource& kf, const std::vector<BoundaryPair>& pairs,
                               const FluxQuadSpec& quad) {
    ModulusReport rep;
    rep.check_name = "Df_modulus";
    std::vector<ModulusSample> samples(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), [&](int i) {
        const auto& p = pairs[i];
        const double s = (p.x0 - p.x1).norm();
        ModulusSample m;
        m.x = s;
        if (s > 0) {
            m.measured = std::abs(D_f_velocity_form(domain, model, grid, kf, p.x0, quad) -
                                  D_f_velocity_form(domain, model, grid, kf, p.x1, quad));
            m.bound = s * (1.0 + std::abs(std::log(s)));
            m.ratio = m.measured / m.bound;
        }
        samples[i] = m;
    });
    // One sample per separation: the largest difference over anchors.
    for (const auto& m : samples) {
        if (!(m.x > 0)) continue;
        auto it = std::find_if(rep.samples.begin(), rep.samples.end(),
                               [&](const ModulusSample& r) { return std::abs(r.x - m.x) <= 1e-8 * m.x; });
        if (it == rep.samples.end())
            rep.samples.push_back(m);
        else if (m.ratio > it->ratio)
            *it = m;
    }
    std::sort(rep.samples.begin(), rep.samples.end(),
              [](const ModulusSample& a, const ModulusSample& b) { return a.x < b.x; });
    return rep;
}

bool GradBReport::all_stable() const {
    for (const auto& s : summary)
        if (!s.stable) return false;
    return !summary.empty();
}

std::vector<GradientSample> sample_tangents(const ConvexDomain& domain, int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::vector<GradientSample> out;
    for (int i = 0; i < n; ++i) {
        const Vec3 x = domain.radial_point(unit_vector(rng));
        Vec3 t1, t2;
        orthonormal_frame(domain.normal(x), t1, t2);
        const double a = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
        out.push_back({x, std::cos(a) * t1 + std::sin(a) * t2});
    }
    return out;
}

GradBReport check_grad_B_bounded(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                                 const BoundaryTemperature& T, const WallFlux& psi, const CollisionSource& kf,
                                 const std::vector<GradientSample>& samples, double h_rel, const FluxQuadSpec& quad) {
    const std::vector<std::string> names = {"B_T", "B_psi", "D_f"};
    auto eval = [&](int which, const Vec3& x) {
        switch (which) {
            case 0: return B_T(domain, model, grid, T, x, quad);
            case 1: return B_psi_velocity_form(domain, model, grid, [&](const Vec3& p) { return psi.at(p); }, x, quad);
            default: return D_f_velocity_form(domain, model, grid, kf, x, quad);
        }
    };
    const double h0 = h_rel * domain.diameter();
    const int ns = static_cast<int>(samples.size());
    std::vector<GradBRow> rows(3 * ns * 3);
    parallel_for(ns, [&](int i) {
        const auto& s = samples[i];
        for (int lvl = 0; lvl < 3; ++lvl) {
            const double h = h0 / (1 << lvl);
            const Vec3 xp = boundary_offset(domain, s.x, s.tangent, h);
            const Vec3 xm = boundary_offset(domain, s.x, s.tangent, -h);
            const double sep = (xp - xm).norm();
            for (int q = 0; q < 3; ++q)
                rows[(i * 3 + lvl) * 3 + q] = {names[q], i, h, std::abs(eval(q, xp) - eval(q, xm)) / sep};
        }
    });
    GradBReport rep;
    rep.rows = rows;
    for (int q = 0; q < 3; ++q) {
        GradBReport::Summary sm;
        sm.quantity = names[q];
        for (const auto& r : rows) {
            if (r.quantity != names[q]) continue;
            double& slot = r.h == h0 ? sm.q_h : (r.h == h0 / 2 ? sm.q_h2 : sm.q_h4);
            slot = std::max(slot, r.quotient);
        }
        const double scale = std::max({sm.q_h, sm.q_h2, sm.q_h4});
        sm.stable = scale < 1e-8 || (std::abs(sm.q_h2 - sm.q_h) <= 0.1 * sm.q_h2 && std::abs(sm.q_h4 - sm.q_h2) <= 0.1 * sm.q_h4);
        rep.summary.push_back(sm);
    }
    return rep;
}

}  // namespace kinreg
