#include "kinreg/regularity.hpp"

#include "kinreg/geometry_checks.hpp"
#include "kinreg/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <sstream>

namespace kinreg {

std::vector<double> default_ladder(int rungs, double d0) {
    std::vector<double> out;
    for (int k = 0; k < rungs; ++k) out.push_back(d0 * std::pow(2.0, -0.5 * k));
    return out;
}

ExponentFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0 && y[i] > 0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    ExponentFit fit;
    fit.n = static_cast<int>(lx.size());
    if (fit.n < 2) return fit;
    const int n = fit.n;
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) mx += lx[i], my += ly[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0) return fit;
    fit.exponent = sxy / sxx;
    fit.constant = std::exp(my - fit.exponent * mx);
    fit.ci_low = fit.ci_high = fit.exponent;
    if (n > 2) {
        double sse = 0;
        for (int i = 0; i < n; ++i) {
            const double r = ly[i] - my - fit.exponent * (lx[i] - mx);
            sse += r * r;
        }
        const double se = std::sqrt(sse / (n - 2) / sxx);
        const boost::math::students_t dist(n - 2);
        const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
        fit.ci_low = fit.exponent - t * se;
        fit.ci_high = fit.exponent + t * se;
    }
    return fit;
}

std::vector<LadderPoint> ladder_points(const ConvexDomain& domain, const std::vector<double>& ladder, int n_points,
                                       unsigned seed) {
    Rng rng(seed);
    std::vector<Vec3> walls;
    for (int i = 0; i < n_points; ++i) walls.push_back(random_boundary_point(domain, rng));
    std::vector<LadderPoint> out;
    for (int r = 0; r < static_cast<int>(ladder.size()); ++r)
        for (const Vec3& p : walls) {
            LadderPoint lp;
            lp.wall = p;
            lp.x = p - ladder[r] * domain.normal(p);
            lp.d = boundary_distance(domain, lp.x);
            lp.rung = r;
            out.push_back(lp);
        }
    return out;
}

Vec3 fd_gradient(const std::function<double(const Vec3&)>& fn, const Vec3& x, double h) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        const Vec3 e = h * Vec3::Unit(i);
        g[i] = (fn(x + e) - fn(x - e)) / (2 * h);
    }
    return g;
}

void judge_boundedness(ModulusReport& rep, const RegularityOptions& opt) {
    rep.exponent_check = false;
    rep.limit = opt.ratio_slack;
    if (static_cast<int>(rep.samples.size()) < opt.min_points) {
        rep.status = "inconclusive";
        rep.note += "fewer than " + std::to_string(opt.min_points) + " valid samples; ";
        return;
    }
    for (const auto& s : rep.samples)
        if (!std::isfinite(s.ratio)) {
            rep.status = "fail";
            rep.note += "non-finite ratio; ";
            return;
        }
    const double mx = rep.max_ratio(), med = rep.median_ratio();
    if (mx == 0) {
        rep.status = "pass";
        rep.note += "all differences vanish; ";
        return;
    }
    rep.status = mx <= opt.ratio_slack * med ? "pass" : "fail";
}

void judge_exponent(ModulusReport& rep, double limit, const RegularityOptions& opt) {
    rep.exponent_check = true;
    rep.limit = limit;
    if (rep.status == "pass" && rep.note.find("null") != std::string::npos) return;
    if (static_cast<int>(rep.samples.size()) < opt.min_points) {
        rep.status = "inconclusive";
        rep.note += "fewer than " + std::to_string(opt.min_points) + " resolved samples; ";
        return;
    }
    rep.status = rep.ci_high <= limit ? "pass" : "fail";
    std::ostringstream os;
    os << "exponent limit " << limit << "; ";
    rep.note += os.str();
}

namespace {

// Log-log fit of measured / divisor against abscissa, or the null verdict
// when every sample is below its truncation floor.
void fit_ladder(ModulusReport& rep, const std::vector<double>& abscissa, const std::vector<double>& divisor,
                const std::vector<double>& floors) {
    bool null = !rep.samples.empty();
    for (std::size_t i = 0; i < rep.samples.size(); ++i) null = null && rep.samples[i].measured <= floors[i];
    if (null) {
        rep.fitted_exponent = rep.ci_low = rep.ci_high = 0;
        rep.fitted_constant = 0;
        rep.status = "pass";
        rep.note += "null: every derivative below the h^2 floor; ";
        return;
    }
    std::vector<double> y;
    for (std::size_t i = 0; i < rep.samples.size(); ++i) y.push_back(rep.samples[i].measured / divisor[i]);
    const ExponentFit fit = fit_exponent(abscissa, y);
    rep.fitted_constant = fit.constant;
    rep.fitted_exponent = fit.exponent;
    rep.ci_low = fit.ci_low;
    rep.ci_high = fit.ci_high;
}

struct RungSup {
    double coarse = 0, fine = 0;
};

// Groups per-point sups into rungs and returns which rungs are resolved.
std::vector<bool> resolved_rungs(const std::vector<LadderPoint>& pts, const std::vector<RungSup>& sups, int n_rungs,
                                 double stability, const std::vector<double>& floor_by_rung, std::string& note) {
    std::vector<RungSup> rung(n_rungs);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        rung[pts[i].rung].coarse = std::max(rung[pts[i].rung].coarse, sups[i].coarse);
        rung[pts[i].rung].fine = std::max(rung[pts[i].rung].fine, sups[i].fine);
    }
    std::vector<bool> ok(n_rungs, true);
    for (int r = 0; r < n_rungs; ++r) {
        const double a = rung[r].coarse, b = rung[r].fine;
        if (std::max(a, b) <= floor_by_rung[r]) continue;
        if (std::abs(a - b) > stability * std::max(a, b)) {
            ok[r] = false;
            std::ostringstream os;
            os << "rung " << r << " unresolved (" << a << " vs " << b << "); ";
            note += os.str();
        }
    }
    return ok;
}

int n_rungs_of(const std::vector<LadderPoint>& pts) {
    int n = 0;
    for (const auto& p : pts) n = std::max(n, p.rung + 1);
    return n;
}

double rung_distance(const std::vector<LadderPoint>& pts, int rung) {
    for (const auto& p : pts)
        if (p.rung == rung) return p.d;
    return 0;
}

std::vector<int> velocity_subset(const VelocityGrid& grid, int stride) {
    std::vector<int> out;
    for (int m = 0; m < grid.size(); m += std::max(1, stride)) out.push_back(m);
    return out;
}

// Two-step sup of |grad g| over the given velocities at each ladder point.
template <class Eval>
std::vector<RungSup> ladder_sups(const std::vector<LadderPoint>& pts, const std::vector<int>& vels,
                                 const VelocityGrid& grid, double fd_fraction, Eval&& eval,
                                 const std::function<double(const Vec3&)>& weight) {
    std::vector<RungSup> out(pts.size());
    const int nv = static_cast<int>(vels.size());
    std::vector<double> coarse(pts.size() * nv), fine(pts.size() * nv);
    parallel_for(static_cast<int>(pts.size()) * nv, [&](int k) {
        const auto& p = pts[k / nv];
        const Vec3 z = grid.node(vels[k % nv]);
        const double h = fd_fraction * p.d;
        auto fn = [&](const Vec3& y) { return eval(y, z); };
        coarse[k] = fd_gradient(fn, p.x, h).norm() * weight(z);
        fine[k] = fd_gradient(fn, p.x, h / 2).norm() * weight(z);
    });
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int j = 0; j < nv; ++j) {
            out[i].coarse = std::max(out[i].coarse, coarse[i * nv + j]);
            out[i].fine = std::max(out[i].fine, fine[i * nv + j]);
        }
    return out;
}

// Builds a ladder report from per-point sups: samples from resolved rungs,
// optionally without the finest one.
ModulusReport ladder_report(const std::string& name, const std::vector<LadderPoint>& pts,
                            const std::vector<RungSup>& sups, const std::vector<bool>& ok, bool include_finest,
                            const std::function<double(double)>& bound, const std::function<double(double)>& abscissa,
                            const std::function<double(double)>& divisor, double floor_scale, double fd_fraction) {
    ModulusReport rep;
    rep.check_name = name;
    const int finest = n_rungs_of(pts) - 1;
    std::vector<double> ax, dv, fl;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!ok[p.rung] || (!include_finest && p.rung == finest)) continue;
        ModulusSample s;
        s.x = p.d;
        s.measured = sups[i].fine;
        s.bound = bound(p.d);
        s.ratio = s.measured / s.bound;
        rep.samples.push_back(s);
        ax.push_back(abscissa(p.d));
        dv.push_back(divisor(p.d));
        const double h = fd_fraction * p.d / 2;
        fl.push_back(h * h * floor_scale);
    }
    fit_ladder(rep, ax, dv, fl);
    return rep;
}

double one(double) { return 1.0; }
double inv_plus_one(double d) { return 1.0 + 1.0 / d; }
double log_factor(double d) { return std::abs(std::log(d)) + 1.0; }

}  // namespace

std::vector<ModulusReport> probe_interior_gradient(const TransportSolution& sol, const std::vector<LadderPoint>& points,
                                                   const RegularityOptions& opt) {
    const ConvexDomain& dom = *sol.domain;
    const VelocityGrid& grid = *sol.grid;
    std::vector<int> vels;
    for (int m = 0; m < grid.size(); ++m)
        if (grid.speed(m) >= opt.min_speed) vels.push_back(m);
    auto f = [&](const Vec3& x, const Vec3& z) { return evaluate_f(dom, sol.model, grid, sol.psi, sol.T, *sol.kf, x, z).value; };
    auto unit = [](const Vec3&) { return 1.0; };
    const auto sups = ladder_sups(points, vels, grid, opt.fd_fraction, f, unit);

    const int n_rungs = n_rungs_of(points);
    const double scale = std::max(1.0, sol.f.max_norm());
    std::vector<double> floors(n_rungs);
    for (int r = 0; r < n_rungs; ++r) {
        const double h = opt.fd_fraction * rung_distance(points, r) / 2;
        floors[r] = h * h * scale;
    }
    std::string note;
    const auto ok = resolved_rungs(points, sups, n_rungs, opt.stability, floors, note);

    const double p = 4.0 / 3.0 + opt.epsilon;
    auto bound = [p](double d) { return std::pow(1.0 + 1.0 / d, p); };
    ModulusReport strict =
        ladder_report("interior_grad_x", points, sups, ok, false, bound, inv_plus_one, one, scale, opt.fd_fraction);
    strict.note = note + strict.note;
    judge_exponent(strict, 4.0 / 3.0 + opt.exponent_slack, opt);
    ModulusReport finest = ladder_report("interior_grad_x_finest", points, sups, ok, true, bound, inv_plus_one, one,
                                         scale, opt.fd_fraction);
    finest.note = note + finest.note;
    finest.advisory = true;
    judge_exponent(finest, 4.0 / 3.0 + opt.exponent_slack, opt);

    // Velocity gradient with a fixed step; the step is not tied to d_x.
    ModulusReport zrep;
    zrep.check_name = "interior_grad_zeta";
    zrep.advisory = true;
    const int nv = static_cast<int>(vels.size());
    std::vector<double> gz(points.size() * nv);
    parallel_for(static_cast<int>(points.size()) * nv, [&](int k) {
        const Vec3& x = points[k / nv].x;
        const Vec3 z = grid.node(vels[k % nv]);
        gz[k] = fd_gradient([&](const Vec3& w) { return f(x, w); }, z, 1e-3).norm();
    });
    std::vector<double> ax, dv, fl;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double m = 0;
        for (int j = 0; j < nv; ++j) m = std::max(m, gz[i * nv + j]);
        zrep.samples.push_back({points[i].d, m, bound(points[i].d), m / bound(points[i].d)});
        ax.push_back(inv_plus_one(points[i].d));
        dv.push_back(1.0);
        fl.push_back(1e-6 * scale);
    }
    fit_ladder(zrep, ax, dv, fl);
    judge_exponent(zrep, 4.0 / 3.0 + opt.exponent_slack, opt);
    return {strict, finest, zrep};
}

std::vector<ModulusReport> probe_I_derivative(const ConvexDomain& domain, const KineticModel& model,
                                              const VelocityGrid& grid, const WallFlux& psi,
                                              const BoundaryTemperature& T, const std::vector<LadderPoint>& points,
                                              const RegularityOptions& opt) {
    const int ng = grid.size();
    auto I = [&](const Vec3& x, const Vec3& z) { return damped_boundary_term(domain, model, psi, T, x, z); };
    auto N = [&](const Vec3& x, const Vec3& z) { return exit_ray(domain, x, z).normal_component; };
    const double a = opt.decay_a;

    ModulusReport grad;
    grad.check_name = "I_gradient";
    std::vector<double> vals(points.size() * ng, 0.0);
    std::vector<char> graz(points.size() * ng, 0);
    parallel_for(static_cast<int>(points.size()) * ng, [&](int k) {
        const auto& p = points[k / ng];
        const Vec3 z = grid.node(k % ng);
        if (N(p.x, z) < grid.grazing_cutoff()) {
            graz[k] = 1;
            return;
        }
        auto fn = [&](const Vec3& y) { return I(y, z); };
        vals[k] = fd_gradient(fn, p.x, opt.fd_fraction * p.d).norm() * std::exp(0.5 * a * z.squaredNorm());
    });
    int excluded = 0;
    for (char g : graz) excluded += g;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double m = 0;
        for (int j = 0; j < ng; ++j) m = std::max(m, vals[i * ng + j]);
        const double d = points[i].d;
        grad.samples.push_back({d, m, 1.0 / d, m * d});
    }
    grad.note = std::to_string(excluded) + " grazing pairs excluded; ";
    {
        std::vector<double> x, y;
        for (const auto& s : grad.samples) x.push_back(1.0 / s.x), y.push_back(s.measured);
        const ExponentFit fit = fit_exponent(x, y);
        grad.fitted_constant = fit.constant;
        grad.fitted_exponent = fit.exponent;
        grad.ci_low = fit.ci_low;
        grad.ci_high = fit.ci_high;
    }
    judge_boundedness(grad, opt);

    // Pairs about the coarsest ladder point of the first wall point.
    ModulusReport hold;
    hold.check_name = "I_holder_N";
    if (!points.empty()) {
        const Vec3 x0 = points.front().x;
        Rng rng(opt.seed + 7);
        const Vec3 u = random_unit(rng);
        const double smax = std::min(opt.pair_max, 0.5 * points.front().d);
        const int np = opt.n_pairs;
        std::vector<ModulusSample> rows(np);
        parallel_for(np, [&](int k) {
            const double s = opt.pair_min * std::pow(smax / opt.pair_min, np > 1 ? double(k) / (np - 1) : 0.0);
            const Vec3 y = x0 + s * u;
            ModulusSample best{s, 0, 1, 0};
            for (int m = 0; m < ng; ++m) {
                const Vec3 z = grid.node(m);
                const double nx = N(x0, z), ny = N(y, z);
                if (std::min(nx, ny) < grid.grazing_cutoff()) continue;
                const double sp = z.norm(), se = std::pow(s, 1 - opt.epsilon);
                const double b = (se / nx + s / (nx * sp) + se / ny + s / (ny * sp)) * std::exp(-a * sp * sp);
                const double diff = std::abs(I(x0, z) - I(y, z));
                if (diff / b > best.ratio) best = {s, diff, b, diff / b};
            }
            rows[k] = best;
        });
        hold.samples = rows;
    }
    judge_boundedness(hold, opt);
    return {grad, hold};
}

std::vector<ModulusReport> probe_II_and_H(const ConvexDomain& domain, const KineticModel& model,
                                          const VelocityGrid& grid, const WallFlux& psi,
                                          const BoundaryTemperature& T, const std::vector<LadderPoint>& points,
                                          const RegularityOptions& opt) {
    const int n_rungs = n_rungs_of(points);
    const double scale = std::max(1.0, psi.values.size() ? psi.values.cwiseAbs().maxCoeff() : 0.0);
    std::vector<double> floors(n_rungs);
    for (int r = 0; r < n_rungs; ++r) {
        const double h = opt.fd_fraction * rung_distance(points, r) / 2;
        floors[r] = h * h * scale;
    }

    auto H = [&](const Vec3& x, const Vec3& z) { return H_eval(domain, model, grid, psi, T, x, z); };
    auto unit = [](const Vec3&) { return 1.0; };
    const auto hs = ladder_sups(points, velocity_subset(grid, opt.velocity_stride), grid, opt.fd_fraction, H, unit);
    std::string note;
    const auto ok = resolved_rungs(points, hs, n_rungs, opt.stability, floors, note);
    // The bound carries a log factor; the exponent is fitted after dividing it out.
    ModulusReport hrep = ladder_report(
        "H_gradient", points, hs, ok, true, [](double d) { return std::pow(d, -1.0 / 3.0) * log_factor(d); },
        [](double d) { return 1.0 / d; }, log_factor, scale, opt.fd_fraction);
    hrep.note = note + hrep.note;
    judge_exponent(hrep, 1.0 / 3.0 + opt.h_exponent_slack, opt);

    std::vector<ModulusReport> out{hrep};
    if (!opt.deep_ladder.empty()) {
        std::vector<Vec3> walls;
        for (const auto& p : points)
            if (std::none_of(walls.begin(), walls.end(), [&](const Vec3& w) { return (w - p.wall).norm() == 0; }))
                walls.push_back(p.wall);
        std::vector<LadderPoint> deep;
        for (int r = 0; r < static_cast<int>(opt.deep_ladder.size()); ++r)
            for (const Vec3& w : walls) {
                LadderPoint lp{w, w - opt.deep_ladder[r] * domain.normal(w), 0, r};
                lp.d = boundary_distance(domain, lp.x);
                deep.push_back(lp);
            }
        const int nd = static_cast<int>(opt.deep_ladder.size());
        std::vector<double> dfloors(nd);
        for (int r = 0; r < nd; ++r) {
            const double h = opt.fd_fraction * opt.deep_ladder[r] / 2;
            dfloors[r] = h * h * scale;
        }
        const auto ds = ladder_sups(deep, velocity_subset(grid, opt.velocity_stride), grid, opt.fd_fraction, H, unit);
        std::string dnote;
        const auto dok = resolved_rungs(deep, ds, nd, opt.stability, dfloors, dnote);
        ModulusReport drep = ladder_report(
            "H_gradient_deep", deep, ds, dok, true, [](double d) { return std::pow(d, -1.0 / 3.0) * log_factor(d); },
            [](double d) { return 1.0 / d; }, log_factor, scale, opt.fd_fraction);
        drep.note = dnote + drep.note;
        drep.advisory = true;
        judge_exponent(drep, 1.0 / 3.0 + opt.h_exponent_slack, opt);
        out.push_back(drep);
    }

    // II with a single step: each evaluation is a ray integral of H.
    std::vector<int> vels;
    const int nii = std::max(1, opt.ii_velocities);
    for (int k = 0; k < nii; ++k) vels.push_back(static_cast<int>((k + 0.5) * grid.size() / nii));
    const int nv = static_cast<int>(vels.size());
    std::vector<double> g(points.size() * nv);
    parallel_for(static_cast<int>(points.size()) * nv, [&](int k) {
        const auto& p = points[k / nv];
        const Vec3 z = grid.node(vels[k % nv]);
        auto II = [&](const Vec3& y) {
            return ray_integral(domain, model, y, z, [&](const Vec3& w) { return H(w, z); });
        };
        g[k] = fd_gradient(II, p.x, opt.fd_fraction * p.d).norm();
    });
    ModulusReport iirep, wrep;
    iirep.check_name = "II_gradient";
    wrep.check_name = "II_gradient_speed_weighted";
    std::vector<double> ax, dv, fl;
    const double p1 = 4.0 / 3.0 + opt.epsilon_prime, p2 = 1.0 / 3.0 + opt.epsilon_prime;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double m = 0, mw = 0;
        for (int j = 0; j < nv; ++j) {
            m = std::max(m, g[i * nv + j]);
            mw = std::max(mw, g[i * nv + j] / (1.0 + 1.0 / grid.speed(vels[j])));
        }
        const double d = points[i].d;
        iirep.samples.push_back({d, m, std::pow(1 + 1 / d, p1), m / std::pow(1 + 1 / d, p1)});
        wrep.samples.push_back({d, mw, std::pow(1 + 1 / d, p2), mw / std::pow(1 + 1 / d, p2)});
        ax.push_back(inv_plus_one(d));
        dv.push_back(1.0);
        const double h = opt.fd_fraction * d;
        fl.push_back(h * h * scale);
    }
    fit_ladder(iirep, ax, dv, fl);
    fit_ladder(wrep, ax, dv, fl);
    judge_exponent(iirep, 4.0 / 3.0 + opt.exponent_slack, opt);
    judge_exponent(wrep, 1.0 / 3.0 + opt.exponent_slack, opt);
    out.insert(out.begin() + 1, {iirep, wrep});
    return out;
}

namespace {

std::vector<double> separations(const RegularityOptions& opt, double smax) {
    std::vector<double> s;
    const int n = opt.n_pairs;
    for (int k = 0; k < n; ++k) s.push_back(opt.pair_min * std::pow(smax / opt.pair_min, n > 1 ? double(k) / (n - 1) : 0.0));
    return s;
}

// Interior pair sweep: sup over the given velocities of |q(x0) - q(x1)| / bound.
ModulusReport pair_sweep(const std::string& name, const Vec3& x0, const Vec3& u, const std::vector<double>& seps,
                         const std::vector<Vec3>& vels, const std::function<double(const Vec3&, const Vec3&)>& q,
                         const std::function<double(const Vec3&, const Vec3&, double)>& bound) {
    ModulusReport rep;
    rep.check_name = name;
    const int nv = static_cast<int>(vels.size());
    std::vector<double> base(nv);
    parallel_for(nv, [&](int j) { base[j] = q(x0, vels[j]); });
    const int ns = static_cast<int>(seps.size());
    std::vector<double> diff(ns * nv);
    parallel_for(ns * nv, [&](int k) {
        const Vec3 x1 = x0 + seps[k / nv] * u;
        diff[k] = std::abs(q(x1, vels[k % nv]) - base[k % nv]);
    });
    for (int i = 0; i < ns; ++i) {
        const Vec3 x1 = x0 + seps[i] * u;
        ModulusSample s{seps[i], 0, bound(x0, x1, seps[i]), 0};
        for (int j = 0; j < nv; ++j) s.measured = std::max(s.measured, diff[i * nv + j]);
        s.ratio = s.measured / s.bound;
        rep.samples.push_back(s);
    }
    return rep;
}

}  // namespace

std::vector<ModulusReport> probe_moduli(const TransportSolution& sol, const RegularityOptions& opt) {
    const ConvexDomain& dom = *sol.domain;
    const VelocityGrid& grid = *sol.grid;
    const KineticModel& model = sol.model;
    std::vector<ModulusReport> out;

    auto fit_sweep = [](ModulusReport& rep) {
        std::vector<double> x, y;
        for (const auto& s : rep.samples) x.push_back(s.x), y.push_back(s.measured);
        const ExponentFit fit = fit_exponent(x, y);
        rep.fitted_constant = fit.constant;
        rep.fitted_exponent = fit.exponent;
        rep.ci_low = fit.ci_low;
        rep.ci_high = fit.ci_high;
    };

    {
        const auto pairs = boundary_pairs(dom, opt.n_pairs, opt.pair_min, opt.pair_max, opt.seed, opt.n_anchors);
        ModulusReport rep = check_Df_modulus(dom, model, grid, *sol.kf, pairs);
        fit_sweep(rep);
        judge_boundedness(rep, opt);
        out.push_back(rep);
    }

    Rng rng(opt.seed + 11);
    const Vec3 x0 = 0.3 * dom.radial_point(random_unit(rng));
    const Vec3 u = random_unit(rng);
    const std::vector<Vec3> vels = {Vec3(0.5, 0.3, -0.7), Vec3(-1.1, 0.4, 0.2), Vec3(0.1, -0.2, 2.0)};
    const auto seps = separations(opt, opt.pair_max);
    auto dxy = [&](const Vec3& a, const Vec3& b) { return std::min(boundary_distance(dom, a), boundary_distance(dom, b)); };
    const double e = opt.epsilon;

    {
        auto G = [&](const Vec3& x, const Vec3& z) { return G_volume_form(dom, model, grid, *sol.kf, x, z); };
        ModulusReport rep = pair_sweep("G_modulus", x0, u, seps, vels, G,
                                       [](const Vec3&, const Vec3&, double s) { return s * (1 + std::abs(std::log(s))); });
        fit_sweep(rep);
        judge_boundedness(rep, opt);
        out.push_back(rep);
    }
    {
        auto III = [&](const Vec3& x, const Vec3& z) {
            return ray_integral(dom, model, x, z, [&](const Vec3& y) { return G_volume_form(dom, model, grid, *sol.kf, y, z); });
        };
        const std::vector<Vec3> v2(vels.begin(), vels.begin() + 2);
        ModulusReport rep = pair_sweep("III_holder", x0, u, seps, v2, III, [&](const Vec3& a, const Vec3& b, double s) {
            return (1 + 1 / dxy(a, b)) * std::pow(s, 1 - e);
        });
        fit_sweep(rep);
        judge_boundedness(rep, opt);
        out.push_back(rep);
    }
    {
        auto kdI = [&](const Vec3& x, const Vec3& y, const Vec3& z) {
            double acc = 0;
            grid.k_rule().for_each(z, [&](const Vec3& zs, double r, const Vec3& omega, double w) {
                if (zs.squaredNorm() < 1e-28) return;
                acc += w * std::abs(kernel_polar(model, z, r, omega)) *
                       std::abs(damped_boundary_term(dom, model, sol.psi, sol.T, x, zs) -
                                damped_boundary_term(dom, model, sol.psi, sol.T, y, zs));
            });
            return acc;
        };
        ModulusReport rep;
        rep.check_name = "kdI_holder";
        for (double s : seps) {
            const Vec3 x1 = x0 + s * u;
            const double d = dxy(x0, x1);
            ModulusSample m{s, 0, std::pow(1 + 1 / d, 1.0 / 3.0) * log_factor(d) * std::pow(s, 1 - e), 0};
            for (const Vec3& z : vels) m.measured = std::max(m.measured, kdI(x0, x1, z));
            m.ratio = m.measured / m.bound;
            rep.samples.push_back(m);
        }
        fit_sweep(rep);
        judge_boundedness(rep, opt);
        out.push_back(rep);
    }

    // Boundary Hoelder: x on the wall, y on its inward normal, speeds binned.
    const Vec3 p = dom.radial_point(random_unit(rng));
    const Vec3 n = dom.normal(p);
    auto f_at = [&](const Vec3& x, const Vec3& z, bool on_wall) {
        if (on_wall && z.dot(n) < 0) return boundary_value(dom, sol.psi, sol.T, x, z);
        return evaluate_f(dom, model, grid, sol.psi, sol.T, *sol.kf, x, z).value;
    };
    const double bins[3][2] = {{0.1, 0.5}, {0.5, 2.0}, {2.0, 6.0}};
    const char* names[3] = {"boundary_holder_speed_low", "boundary_holder_speed_mid", "boundary_holder_speed_high"};
    const auto wseps = separations(opt, std::min(opt.pair_max, 0.5 * dom.min_curvature_radius()));
    for (int b = 0; b < 3; ++b) {
        std::vector<Vec3> zs;
        Rng zr(opt.seed + 100 + b);
        std::uniform_real_distribution<double> sp(bins[b][0], bins[b][1]);
        for (int k = 0; k < 40; ++k) zs.push_back(sp(zr) * random_unit(zr));
        ModulusReport rep;
        rep.check_name = names[b];
        const int nz = static_cast<int>(zs.size());
        std::vector<double> fx(nz);
        for (int j = 0; j < nz; ++j) fx[j] = f_at(p, zs[j], true);
        const int ns = static_cast<int>(wseps.size());
        std::vector<double> q(ns * nz);
        parallel_for(ns * nz, [&](int k) {
            const Vec3 y = p - wseps[k / nz] * n;
            const Vec3& z = zs[k % nz];
            q[k] = std::abs(fx[k % nz] - f_at(y, z, false)) / (1 + 1 / z.norm());
        });
        for (int i = 0; i < ns; ++i) {
            ModulusSample m{wseps[i], 0, std::pow(wseps[i], 0.5 * (1 - e)), 0};
            for (int j = 0; j < nz; ++j) m.measured = std::max(m.measured, q[i * nz + j]);
            m.ratio = m.measured / m.bound;
            rep.samples.push_back(m);
        }
        fit_sweep(rep);
        judge_boundedness(rep, opt);
        out.push_back(rep);
    }
    return out;
}

}  // namespace kinreg
