#include "kinreg/transport.hpp"

#include "kinreg/characteristic.hpp"
#include "kinreg/geometry_checks.hpp"
#include "kinreg/parallel.hpp"
#include "kinreg/quadrature.hpp"

#include <algorithm>

namespace kinreg {

namespace {

double wall_data(const WallFlux& psi, const BoundaryTemperature& T, const Vec3& p, const Vec3& zeta) {
    return (psi.at(p) + T(p) * (zeta.squaredNorm() - 2.0)) * sqrt_maxwellian(zeta);
}

struct Backward {
    double speed = 0, length = 0, normal = 0;
    Vec3 omega, exit;
};

Backward trace(const ConvexDomain& domain, const Vec3& x, const Vec3& zeta) {
    Backward b;
    b.speed = zeta.norm();
    if (!(b.speed > 0)) throw ArgumentError("zero velocity has no characteristic");
    b.omega = zeta / b.speed;
    b.length = domain.exit_distance(x, b.omega);
    b.exit = x - b.length * b.omega;
    b.normal = std::abs(domain.normal(b.exit).dot(b.omega));
    return b;
}

}  // namespace

double boundary_value(const ConvexDomain& domain, const WallFlux& psi, const BoundaryTemperature& T, const Vec3& x,
                      const Vec3& zeta) {
    if (!(zeta.dot(domain.normal(x)) < 0)) throw ArgumentError("boundary_value: zeta must point into the domain");
    return wall_data(psi, T, x, zeta);
}

double damped_boundary_term(const ConvexDomain& domain, const KineticModel& model, const WallFlux& psi,
                            const BoundaryTemperature& T, const Vec3& x, const Vec3& zeta) {
    const Backward b = trace(domain, x, zeta);
    return wall_data(psi, T, b.exit, zeta) * std::exp(-collision_frequency(model, b.speed) * b.length / b.speed);
}

double ray_integral(const ConvexDomain& domain, const KineticModel& model, const Vec3& x, const Vec3& zeta,
                    const std::function<double(const Vec3&)>& g) {
    const Backward b = trace(domain, x, zeta);
    const std::vector<double> t = chord_nodes(b.length);
    std::vector<double> w;
    exp_fitted_weights(t, collision_frequency(model, b.speed) / b.speed, w);
    double s = 0;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (w[k] != 0.0) s += w[k] * g(x - t[k] * b.omega);
    return s / b.speed;
}

RayEval evaluate_f(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                   const WallFlux& psi, const BoundaryTemperature& T, const CollisionSource& kf, const Vec3& x,
                   const Vec3& zeta) {
    const Backward b = trace(domain, x, zeta);
    const double nu = collision_frequency(model, b.speed);
    RayEval r;
    r.value = wall_data(psi, T, b.exit, zeta) * std::exp(-nu * b.length / b.speed);
    if (b.normal < grid.grazing_cutoff()) {
        r.grazing = true;
        return r;
    }
    const std::vector<double> t = chord_nodes(b.length);
    std::vector<double> w;
    exp_fitted_weights(t, nu / b.speed, w);
    const auto profile = kf.along(b.omega, {b.speed});
    double s = 0, v = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        profile(x - t[k] * b.omega, &v);
        s += w[k] * v;
    }
    r.value += s / b.speed;
    return r;
}

// ------------------------------------------------------------ Picard solver

double TransportSolution::density(int node) const {
    double s = 0;
    for (int m = 0; m < grid->size(); ++m) s += grid->weight(m) * sqrt_maxwellian_speed(grid->speed(m)) * f.values(node, m);
    return s;
}

namespace {

// Sparse rows, one per (node, velocity) pair, laid out per node.
struct NodeRows {
    std::vector<int> offset;  // n_velocity + 1
    std::vector<int> col;
    std::vector<double> w;
};

}  // namespace

TransportSolution picard_solve(std::shared_ptr<const ConvexDomain> domain, const KineticModel& model,
                               std::shared_ptr<const VelocityGrid> grid, std::shared_ptr<const VolumeNodes> nodes,
                               std::shared_ptr<const BoundaryMesh> mesh, const BoundaryTemperature& T,
                               const PicardOptions& options) {
    model.validate();
    T.validate();
    if (!(options.tol > 0) || options.max_iters < 1) throw ArgumentError("picard_solve: bad tolerance or max_iters");
    const VelocityGrid& g = *grid;
    const int nn = nodes->size(), nv = g.size();

    TransportSolution sol;
    sol.domain = domain;
    sol.model = model;
    sol.grid = grid;
    sol.T = T;
    sol.f = make_field(nodes, grid);
    const ShepardInterpolator& shep = *sol.f.interp;

    const FluxOperator op(domain, model, grid, mesh, options.flux_quad);
    const SurfaceInterpolator& sint = *op.interpolator();
    const DiscreteCollision K(model, grid);
    const RowMatX D = op.d_f_matrix(*nodes, shep);
    const VecX bt = op.b_t(T);

    std::vector<double> sqrt_m(nv), nu(nv);
    for (int m = 0; m < nv; ++m) {
        sqrt_m[m] = sqrt_maxwellian_speed(g.speed(m));
        nu[m] = collision_frequency(model, g.speed(m));
    }

    // Per pair: transport stencil on K f nodal values, wall stencil on psi,
    // the damped wall factor and the temperature part of the wall data.
    std::vector<NodeRows> sweep(nn), wall(nn);
    RowMatX damp(nn, nv), tterm(nn, nv);
    std::vector<int> grazing(nn, 0);
    parallel_for(nn, [&](int i) {
        const Vec3& x = nodes->points[i];
        NodeRows& sr = sweep[i];
        NodeRows& wr = wall[i];
        sr.offset.assign(1, 0);
        wr.offset.assign(1, 0);
        std::vector<std::pair<int, double>> acc;
        std::vector<double> w;
        for (int m = 0; m < nv; ++m) {
            const Backward b = trace(*domain, x, g.node(m));
            const double e = std::exp(-nu[m] * b.length / b.speed) * sqrt_m[m];
            damp(i, m) = e;
            tterm(i, m) = e * T(b.exit) * (b.speed * b.speed - 2.0);
            const auto st = sint.stencil(b.exit);
            for (std::size_t k = 0; k < st.idx.size(); ++k) {
                wr.col.push_back(st.idx[k]);
                wr.w.push_back(st.w[k]);
            }
            wr.offset.push_back(static_cast<int>(wr.col.size()));
            if (b.normal < g.grazing_cutoff()) {
                ++grazing[i];
            } else {
                const std::vector<double> t = chord_nodes(b.length);
                exp_fitted_weights(t, nu[m] / b.speed, w);
                acc.clear();
                for (std::size_t k = 0; k < t.size(); ++k) {
                    if (w[k] == 0.0) continue;
                    const ShepardStencil ss = shep.stencil(x - t[k] * b.omega);
                    for (int q = 0; q < 4; ++q)
                        if (ss.w[q] != 0.0) acc.emplace_back(ss.idx[q], w[k] * ss.w[q] / b.speed);
                }
                std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
                for (std::size_t k = 0; k < acc.size(); ++k) {
                    if (k > 0 && acc[k].first == acc[k - 1].first) {
                        sr.w.back() += acc[k].second;
                    } else {
                        sr.col.push_back(acc[k].first);
                        sr.w.push_back(acc[k].second);
                    }
                }
            }
            sr.offset.push_back(static_cast<int>(sr.col.size()));
        }
    });
    for (int c : grazing) sol.grazing_pairs += c;

    // Mean density of a field, and of sqrt M itself.
    double vol = 0;
    for (double w : nodes->weights) vol += w;
    auto mean_density = [&](const RowMatX& F) {
        double s = 0;
        for (int i = 0; i < nn; ++i) {
            double d = 0;
            for (int m = 0; m < nv; ++m) d += g.weight(m) * sqrt_m[m] * F(i, m);
            s += nodes->weights[i] * d;
        }
        return s / vol;
    };
    double unit_mass = 0;
    for (int m = 0; m < nv; ++m) unit_mass += g.weight(m) * sqrt_m[m] * sqrt_m[m];

    RowMatX F = RowMatX::Zero(nn, nv), KF(nn, nv), Fn(nn, nv);
    if (options.initial) {
        if (options.initial->rows() != nn || options.initial->cols() != nv)
            throw ArgumentError("picard_solve: initial field has the wrong shape");
        F = *options.initial;
    }
    VecX psi = VecX::Zero(mesh->size());
    for (int it = 1; it <= options.max_iters; ++it) {
        KF = K.apply(F);
        const Eigen::Map<const VecX> kvec(KF.data(), KF.size());
        const VecX df = D * kvec;
        const FluxSolveResult fr = solve_wall_flux(op, bt, df, options.flux, &psi);
        psi = fr.psi.values;
        sol.flux_iterations.push_back(fr.iterations);

        parallel_for(nn, [&](int i) {
            const NodeRows& sr = sweep[i];
            const NodeRows& wr = wall[i];
            for (int m = 0; m < nv; ++m) {
                double pv = 0;
                for (int k = wr.offset[m]; k < wr.offset[m + 1]; ++k) pv += wr.w[k] * psi(wr.col[k]);
                double s = tterm(i, m) + damp(i, m) * pv;
                for (int k = sr.offset[m]; k < sr.offset[m + 1]; ++k) s += sr.w[k] * KF(sr.col[k], m);
                Fn(i, m) = s;
            }
        });
        const double delta = (options.anchor - mean_density(Fn)) / unit_mass;
        for (int i = 0; i < nn; ++i)
            for (int m = 0; m < nv; ++m) Fn(i, m) += delta * sqrt_m[m];
        psi.array() += delta;

        const double upd = (Fn - F).cwiseAbs().maxCoeff();
        F.swap(Fn);
        sol.update_history.push_back(upd);
        sol.iterations = it;
        const double scale = F.cwiseAbs().maxCoeff();
        if (!std::isfinite(upd)) break;
        if (upd <= options.tol * scale || upd == 0.0) {
            sol.f.values = F;
            sol.kf = collision_source(sol.f, K);
            sol.psi.mesh = mesh;
            sol.psi.interp = op.interpolator();
            sol.psi.values = psi;
            sol.anchored_mass = mean_density(F);
            const auto& h = sol.update_history;
            std::vector<double> ratios;
            for (std::size_t k = h.size() / 2 + 1; k < h.size(); ++k)
                if (h[k - 1] > 0 && h[k] > 0) ratios.push_back(h[k] / h[k - 1]);
            if (!ratios.empty()) {
                std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
                sol.contraction = ratios[ratios.size() / 2];
            }

            Rng rng(options.seed);
            std::uniform_int_distribution<int> pick(0, nv - 1);
            sol.probes.resize(options.n_probes);
            for (auto& p : sol.probes) {
                p.x = random_interior_point(*domain, rng);
                p.velocity = pick(rng);
            }
            parallel_for(options.n_probes, [&](int k) {
                ProbeResidual& p = sol.probes[k];
                p.f = sol.f.at_node_velocity(p.x, p.velocity);
                p.rhs = evaluate_f(*domain, model, g, sol.psi, T, *sol.kf, p.x, g.node(p.velocity)).value;
            });
            for (const auto& p : sol.probes)
                sol.probe_residual_max = std::max(sol.probe_residual_max, std::abs(p.f - p.rhs));
            return sol;
        }
    }
    throw ConvergenceError("picard_solve: no convergence within max_iters", sol.update_history);
}

TransportSolution picard_solve(std::shared_ptr<const ConvexDomain> domain, const KineticModel& model,
                               const VelocityGridSpec& grid, const BoundaryTemperature& T, int n_volume,
                               const PicardOptions& options) {
    auto g = std::make_shared<const VelocityGrid>(grid);
    auto nodes = std::make_shared<const VolumeNodes>(make_volume_nodes(*domain, n_volume));
    auto mesh = std::make_shared<const BoundaryMesh>(make_boundary_mesh(*domain, 12, 24));
    return picard_solve(std::move(domain), model, std::move(g), std::move(nodes), std::move(mesh), T, options);
}

// ------------------------------------------------------------ decomposition

double H_eval(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid, const WallFlux& psi,
              const BoundaryTemperature& T, const Vec3& x, const Vec3& zeta) {
    double acc = 0;
    grid.k_rule().for_each(zeta, [&](const Vec3& zs, double r, const Vec3& omega, double w) {
        if (zs.squaredNorm() < 1e-28) return;
        acc += w * kernel_polar(model, zeta, r, omega) * damped_boundary_term(domain, model, psi, T, x, zs);
    });
    return acc;
}

double G_velocity_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                       const CollisionSource& kf, const Vec3& x0, const Vec3& zeta) {
    double acc = 0;
    grid.k_rule().for_each(zeta, [&](const Vec3& zs, double r, const Vec3& omega, double w) {
        const double s = zs.norm();
        if (s < 1e-14) return;
        const Backward b = trace(domain, x0, zs);
        const std::vector<double> t = chord_nodes(b.length);
        std::vector<double> cw;
        exp_fitted_weights(t, collision_frequency(model, s) / s, cw);
        const auto profile = kf.along(b.omega, {s});
        double j = 0, v = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            profile(x0 - t[k] * b.omega, &v);
            j += cw[k] * v;
        }
        acc += w * kernel_polar(model, zeta, r, omega) * j / s;
    });
    return acc;
}

double G_volume_form(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                     const CollisionSource& kf, const Vec3& x0, const Vec3& zeta, const GVolumeSpec& spec) {
    const double s0 = zeta.norm();
    const Vec3 axis = s0 > 0 ? Vec3(zeta / s0) : Vec3::UnitZ();
    const SphereRule dirs = product_sphere_rule(spec.n_polar, spec.n_azimuth, axis);
    const double zmax = grid.zeta_max();
    std::vector<double> breaks = {0.0, 0.5 * zmax, zmax, zmax + 4.0};
    if (s0 > 0 && s0 < zmax + 4.0 && s0 != 0.5 * zmax && s0 != zmax) breaks.push_back(s0);
    std::sort(breaks.begin(), breaks.end());
    const Rule1D speed = composite_gauss(breaks, spec.speed_per_panel);
    const int nq = static_cast<int>(speed.size());
    std::vector<double> nu(nq);
    for (int q = 0; q < nq; ++q) nu[q] = collision_frequency(model, speed.x[q]);

    // Chord integral along zeta itself, for the subtracted singular part.
    double j0 = 0;
    if (s0 > 0) {
        const auto profile = kf.along(axis, {s0});
        const Backward b = trace(domain, x0, zeta);
        const std::vector<double> t = chord_nodes(b.length);
        std::vector<double> cw;
        exp_fitted_weights(t, collision_frequency(model, s0) / s0, cw);
        double v = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            profile(x0 - t[k] * axis, &v);
            j0 += cw[k] * v;
        }
        j0 /= s0;
    }
    double kchi = 0;
    if (j0 != 0.0) {
        grid.k_rule().for_each(zeta, [&](const Vec3&, double r, const Vec3& omega, double w) {
            kchi += w * kernel_polar(model, zeta, r, omega) * std::exp(-r * r);
        });
    }

    std::vector<double> vals, cw;
    double acc = 0;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Vec3& omega = dirs.dirs[d];
        const double L = domain.exit_distance(x0, omega);
        const std::vector<double> t = chord_nodes(L);
        const auto profile = kf.along(omega, speed.x);
        vals.assign(t.size() * nq, 0.0);
        for (std::size_t k = 0; k < t.size(); ++k) profile(x0 - t[k] * omega, vals.data() + k * nq);
        double dir_sum = 0;
        for (int q = 0; q < nq; ++q) {
            const double rho = speed.x[q];
            exp_fitted_weights(t, nu[q] / rho, cw);
            double j = 0;
            for (std::size_t k = 0; k < t.size(); ++k) j += cw[k] * vals[k * nq + q];
            j /= rho;
            const Vec3 zs = rho * omega;
            const double r = (zs - zeta).norm();
            if (r == 0.0) continue;
            const double chi = std::exp(-r * r);
            dir_sum += speed.w[q] * rho * rho * kernel(model, zeta, zs) * (j - chi * j0);
        }
        acc += dirs.w[d] * dir_sum;
    }
    return acc + j0 * kchi;
}

Decomposition decompose_I_II_III(const ConvexDomain& domain, const KineticModel& model, const VelocityGrid& grid,
                                 const WallFlux& psi, const BoundaryTemperature& T, const CollisionSource& kf,
                                 const Vec3& x, const Vec3& zeta, ThirdTerm third) {
    Decomposition d;
    const Backward b = trace(domain, x, zeta);
    d.grazing = b.normal < grid.grazing_cutoff();
    d.I = damped_boundary_term(domain, model, psi, T, x, zeta);
    d.II = ray_integral(domain, model, x, zeta, [&](const Vec3& y) { return H_eval(domain, model, grid, psi, T, y, zeta); });
    d.III = ray_integral(domain, model, x, zeta, [&](const Vec3& y) {
        return third == ThirdTerm::VolumeForm ? G_volume_form(domain, model, grid, kf, y, zeta)
                                              : G_velocity_form(domain, model, grid, kf, y, zeta);
    });
    return d;
}

}  // namespace kinreg
