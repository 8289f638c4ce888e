#include "kinreg/geometry_checks.hpp"

#include <algorithm>
#include <cmath>

namespace kinreg {

namespace {

double uniform(Rng& rng, double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng); }

// Relative slack for inequalities that are evaluated exactly up to rounding.
constexpr double kRoundoff = 1e-9;

bool leq(double lhs, double rhs, double slack = 1.0) { return lhs <= slack * rhs * (1.0 + kRoundoff) + 1e-13; }

}  // namespace

Vec3 random_unit(Rng& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec3 v(g(rng), g(rng), g(rng));
        const double n = v.norm();
        if (n > 1e-8) return v / n;
    }
}

Vec3 random_boundary_point(const ConvexDomain& domain, Rng& rng) { return domain.radial_point(random_unit(rng)); }

Vec3 random_interior_point(const ConvexDomain& domain, Rng& rng, double margin) {
    const Vec3 b = random_boundary_point(domain, rng);
    return std::cbrt(uniform(rng)) * (1.0 - margin) * b;
}

Vec3 random_tangent(const Vec3& n, Rng& rng) {
    Vec3 t1, t2;
    orthonormal_frame(n, t1, t2);
    const double a = uniform(rng, 0.0, 2.0 * kPi);
    return std::cos(a) * t1 + std::sin(a) * t2;
}

// ------------------------------------------------------------ log bound

double sphere_inverse_square_integral(double a) {
    if (a < 0 || a >= 1) throw ArgumentError("sphere_inverse_square_integral: need 0 <= a < 1");
    if (a < 1e-6) return 4.0 * kPi * (1.0 + a * a / 3.0);
    return 2.0 * kPi / a * std::log((1.0 + a) / (1.0 - a));
}

double inverse_square_integral(const BoundaryMesh& mesh, const Vec3& x) {
    double s = 0;
    for (int i = 0; i < mesh.size(); ++i) s += mesh.weights[i] / (mesh.nodes[i] - x).squaredNorm();
    return s;
}

namespace {

InverseSquareRow inverse_square_row(const ConvexDomain& domain, const BoundaryMesh& mesh, const Vec3& x, double d) {
    if (!domain.inside(x)) throw DomainError("check_inverse_square: sample is not interior");
    const Vec3 Y = project_to_boundary(domain, x);
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < mesh.size(); ++i) {
        const double r = (mesh.nodes[i] - Y).squaredNorm();
        if (r < best) {
            best = r;
            nearest = i;
        }
    }
    const double spacing = std::sqrt(mesh.weights[nearest]);
    if (!(spacing < 0.25 * d))
        throw ResolutionError("check_inverse_square: mesh spacing " + std::to_string(spacing) +
                              " near the sample must be below " + std::to_string(0.25 * d));
    InverseSquareRow row;
    row.d = d;
    row.integral = inverse_square_integral(mesh, x);
    row.ratio = row.integral / (std::abs(std::log(d)) + 1.0);
    return row;
}

}  // namespace

std::vector<InverseSquareRow> check_inverse_square(const ConvexDomain& domain, const BoundaryMesh& mesh,
                                                   const std::vector<Vec3>& x_samples) {
    std::vector<InverseSquareRow> rows;
    for (const auto& x : x_samples) rows.push_back(inverse_square_row(domain, mesh, x, boundary_distance(domain, x)));
    return rows;
}

std::vector<InverseSquareRow> check_inverse_square_focused(const ConvexDomain& domain,
                                                           const std::vector<Vec3>& x_samples, int per_panel,
                                                           int n_azimuth) {
    std::vector<InverseSquareRow> rows;
    for (const auto& x : x_samples) {
        const double d = boundary_distance(domain, x);
        const Vec3 Y = project_to_boundary(domain, x);
        const double theta0 = std::min(0.5, 0.25 * d / Y.norm());
        const BoundaryMesh mesh = make_focused_mesh(domain, Y, theta0, per_panel, n_azimuth);
        rows.push_back(inverse_square_row(domain, mesh, x, d));
    }
    return rows;
}

double ratio_spread(const std::vector<InverseSquareRow>& rows) {
    if (rows.empty()) return 0;
    double lo = rows[0].ratio, hi = rows[0].ratio;
    for (const auto& r : rows) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    return hi / lo;
}

// ------------------------------------------------------------ exponential map

std::vector<ExpMapSample> sample_expmap(const ConvexDomain& domain, int n, unsigned seed) {
    Rng rng(seed);
    const double r1 = domain.geodesic_radius();
    std::vector<ExpMapSample> out;
    for (int i = 0; i < n; ++i) {
        ExpMapSample s;
        s.p0 = random_boundary_point(domain, rng);
        const Vec3 nrm = domain.normal(s.p0);
        s.x = s.p0 - uniform(rng) * r1 * nrm;
        s.v = uniform(rng) * r1 * random_tangent(nrm, rng);
        out.push_back(s);
    }
    return out;
}

CheckTable check_expmap_inequality(const ConvexDomain& domain, const std::vector<ExpMapSample>& samples) {
    CheckTable t;
    const double r1 = domain.geodesic_radius();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const Vec3 n0 = domain.normal(s.p0);
        const Vec3 off = s.p0 - s.x;
        const bool normal_offset = (off - off.dot(n0) * n0).norm() <= 1e-10 * std::max(1.0, off.norm());
        if (!normal_offset || off.norm() > r1 * (1 + 1e-12) || s.v.norm() > r1 * (1 + 1e-12)) {
            ++t.skipped;
            continue;
        }
        const Vec3 e = exp_map(domain, s.p0, s.v);
        const double lhs = off.squaredNorm() + 0.5 * s.v.squaredNorm();
        const double rhs = (e - s.x).squaredNorm();
        t.add("expmap", static_cast<int>(i), lhs, rhs, leq(lhs, rhs));
    }
    if (t.skipped) t.note = "samples violating the geodesic-radius preconditions were skipped";
    return t;
}

std::vector<GeodesicPair> sample_geodesic_pairs(const ConvexDomain& domain, int n, unsigned seed) {
    Rng rng(seed);
    const double r1 = domain.geodesic_radius();
    std::vector<GeodesicPair> out;
    for (int i = 0; i < n; ++i) {
        GeodesicPair p;
        p.x = random_boundary_point(domain, rng);
        p.v = random_tangent(domain.normal(p.x), rng);
        // Log-uniform lengths reach the y -> x limit.
        const double len = r1 * std::pow(10.0, -3.0 * uniform(rng));
        p.y = exp_map(domain, p.x, len * p.v);
        out.push_back(p);
    }
    return out;
}

CheckTable check_geodesic_normals(const ConvexDomain& domain, const std::vector<GeodesicPair>& pairs) {
    CheckTable t;
    const double bound = 4.0 * domain.max_curvature();
    const double r1 = domain.geodesic_radius();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        const Vec3 d = p.x - p.y;
        const double r = d.norm();
        if (r == 0 || r > r1 * (1 + 1e-9)) {
            ++t.skipped;
            continue;
        }
        const Vec3 nx = domain.normal(p.x), ny = domain.normal(p.y);
        const Vec3 v = p.v.normalized();
        const int id = static_cast<int>(i);
        const double a = std::abs(nx.dot(d)) / (r * r);
        const double b = std::abs(ny.dot(d)) / (r * r);
        const double c = std::abs(ny.dot(v)) / r;
        t.add("geodesic_nx", id, a, bound, leq(a, bound));
        t.add("geodesic_ny", id, b, bound, leq(b, bound));
        t.add("geodesic_nyv", id, c, bound, leq(c, bound));
    }
    if (t.skipped) t.note = "pairs outside the geodesic disc were skipped";
    return t;
}

// ------------------------------------------------------------ sqrt bounds

std::vector<SqrtSample> sample_sqrt(const ConvexDomain& domain, int n, unsigned seed) {
    Rng rng(seed);
    const double R0 = domain.min_curvature_radius();
    const double R3 = domain.max_curvature_radius();
    std::vector<SqrtSample> out;
    for (int i = 0; i < n; ++i) {
        const Vec3 Y = random_boundary_point(domain, rng);
        const Vec3 nY = domain.normal(Y);
        const double d = R0 * std::pow(10.0, -2.0 * uniform(rng));
        SqrtSample s;
        s.y = Y - d * nY;
        if (i % 2 == 0) {
            // Nearby boundary point at a tangential offset of the order sqrt(R3 d).
            const double off = 3.0 * std::sqrt(R3 * d) * uniform(rng);
            s.x = domain.radial_point((Y + off * random_tangent(nY, rng)).normalized());
        } else {
            s.x = random_boundary_point(domain, rng);
        }
        out.push_back(s);
    }
    return out;
}

CheckTable check_sqrt_bounds(const ConvexDomain& domain, const std::vector<SqrtSample>& samples) {
    CheckTable t;
    const double R0 = domain.min_curvature_radius();
    const double c1 = std::sqrt(2.0 * domain.max_curvature_radius());
    const double c2 = std::sqrt(domain.min_curvature_radius());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const double dy = boundary_distance(domain, s.y);
        if (!(dy > 0) || dy > R0) {
            ++t.skipped;
            continue;
        }
        const Vec3 Y = project_to_boundary(domain, s.y);
        const double side = domain.normal(Y).dot(s.x - s.y);
        const double r = (s.x - s.y).norm();
        const int id = static_cast<int>(i);
        if (side >= 0) {
            const double rhs = c1 * std::sqrt(dy);
            t.add("sqrt_upper", id, r, rhs, leq(r, rhs));
        } else {
            const double rhs = c2 * std::sqrt(dy);
            t.add("sqrt_lower", id, r, rhs, r >= rhs * (1.0 - kRoundoff) - 1e-13);
        }
    }
    if (t.skipped) t.note = "samples with d_y outside (0, R0] were skipped";
    return t;
}

// ------------------------------------------------------------ chords and rays

std::vector<ChordSample> sample_chords(const ConvexDomain& domain, int n, unsigned seed) {
    Rng rng(seed);
    std::vector<ChordSample> out;
    for (int i = 0; i < n; ++i) {
        ChordSample s;
        s.x = random_interior_point(domain, rng);
        s.zeta = uniform(rng, 0.2, 4.0) * random_unit(rng);
        const RayHit h = exit_ray(domain, s.x, s.zeta);
        s.t = uniform(rng) * h.tau_minus;
        out.push_back(s);
    }
    return out;
}

CheckTable check_chord_distance(const ConvexDomain& domain, const std::vector<ChordSample>& samples) {
    CheckTable t;
    const double R = domain.diameter();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const RayHit h = exit_ray(domain, s.x, s.zeta);
        if (s.t < 0 || s.t > h.tau_minus) {
            ++t.skipped;
            continue;
        }
        const Vec3 z = s.x - s.t * s.zeta;
        const double dz = boundary_distance(domain, z);
        const double rhs = boundary_distance(domain, s.x) / R * (z - h.exit_point).norm();
        // d_z is evaluated by an iterative projection: allow its tolerance.
        t.add("chord", static_cast<int>(i), rhs, dz, rhs <= dz * (1.0 + 1e-8) + 1e-10 * R);
    }
    return t;
}

std::vector<RaySample> sample_rays(const ConvexDomain& domain, int n, unsigned seed) {
    Rng rng(seed);
    std::vector<RaySample> out;
    for (int i = 0; i < n; ++i) out.push_back({random_interior_point(domain, rng), uniform(rng, 0.2, 4.0) * random_unit(rng)});
    return out;
}

CheckTable check_ray_derivative_bounds(const ConvexDomain& domain, const std::vector<RaySample>& samples,
                                       double grazing_cutoff) {
    constexpr double kSlack = 1.05;
    CheckTable t;
    const double scale = domain.bounding_radius();
    auto tau = [&](const Vec3& x, const Vec3& z) { return exit_ray(domain, x, z).tau_minus; };
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const RayHit h = exit_ray(domain, s.x, s.zeta);
        const double N = h.normal_component;
        if (N < grazing_cutoff) {
            ++t.skipped;
            continue;
        }
        const double speed = s.zeta.norm();
        // The exit time curves like 1/N^3 near grazing: shrink the step there.
        const double hx = std::min(1e-6, 1e-4 * N * N) * scale;
        const double hz = std::min(1e-6, 1e-4 * N * N) * speed;
        Vec3 dtau_x, dtau_z;
        double dp_x = 0, dp_z = 0;
        for (int k = 0; k < 3; ++k) {
            const Vec3 ex = hx * Vec3::Unit(k), ez = hz * Vec3::Unit(k);
            const double tp = tau(s.x + ex, s.zeta), tm = tau(s.x - ex, s.zeta);
            dtau_x(k) = (tp - tm) / (2 * hx);
            const Vec3 pp = s.x + ex - tp * s.zeta, pm = s.x - ex - tm * s.zeta;
            dp_x = std::max(dp_x, ((pp - pm) / (2 * hx)).norm());
            const double zp = tau(s.x, s.zeta + ez), zm = tau(s.x, s.zeta - ez);
            dtau_z(k) = (zp - zm) / (2 * hz);
            const Vec3 qp = s.x - zp * (s.zeta + ez), qm = s.x - zm * (s.zeta - ez);
            dp_z = std::max(dp_z, ((qp - qm) / (2 * hz)).norm());
        }
        const int id = static_cast<int>(i);
        const double tm = h.tau_minus;
        const double b1 = 2.0 / (N * speed), b2 = 1.0 / N, b3 = tm / (N * speed), b4 = tm / N;
        const double b4_stated = tm * (1.0 + 1.0 / (N * speed));
        t.add("Dtau_x", id, dtau_x.norm(), b1, leq(dtau_x.norm(), b1, kSlack));
        t.add("Dp_x", id, dp_x, b2, leq(dp_x, b2, kSlack));
        t.add("Dtau_zeta", id, dtau_z.norm(), b3, leq(dtau_z.norm(), b3, kSlack));
        t.add("Dp_zeta", id, dp_z, b4, leq(dp_z, b4, kSlack));
        t.add("Dp_zeta_stated", id, dp_z, b4_stated, leq(dp_z, b4_stated, kSlack), true);
        const double lower = boundary_distance(domain, s.x) / (N * speed);
        t.add("tau_lower", id, lower, tm, lower <= tm * (1.0 + 1e-8));
    }
    if (t.skipped) t.note = std::to_string(t.skipped) + " grazing samples excluded";
    return t;
}

std::vector<DifferenceSample> sample_differences(const ConvexDomain& domain, int n, unsigned seed) {
    Rng rng(seed);
    std::vector<DifferenceSample> out;
    for (int i = 0; i < n; ++i) {
        DifferenceSample s;
        s.x = random_interior_point(domain, rng);
        s.zeta = uniform(rng, 0.2, 4.0) * random_unit(rng);
        if (i % 2 == 0) {
            s.y = random_interior_point(domain, rng);
        } else {
            do {
                s.y = s.x + domain.bounding_radius() * std::pow(10.0, -3.0 * uniform(rng)) * random_unit(rng);
            } while (!domain.inside(s.y));
        }
        out.push_back(s);
    }
    return out;
}

CheckTable check_exit_point_difference(const ConvexDomain& domain, const std::vector<DifferenceSample>& samples,
                                       double grazing_cutoff) {
    CheckTable t;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Vec3 x = samples[i].x, y = samples[i].y;
        const Vec3& z = samples[i].zeta;
        RayHit hx = exit_ray(domain, x, z), hy = exit_ray(domain, y, z);
        // The statement takes x as the point with the shorter backward chord.
        if (hx.length > hy.length) {
            std::swap(x, y);
            std::swap(hx, hy);
        }
        const double N = hx.normal_component;
        if (N < grazing_cutoff) {
            ++t.skipped;
            continue;
        }
        const double sep = (x - y).norm();
        const int id = static_cast<int>(i);
        const double a = (hx.exit_point - hy.exit_point).norm(), ra = sep / N;
        const double b = std::abs(hx.length - hy.length), rb = 2.0 * sep / N;
        t.add("exit_point_diff", id, a, ra, leq(a, ra) || a < 1e-12);
        t.add("chord_length_diff", id, b, rb, leq(b, rb) || b < 1e-12);
    }
    if (t.skipped) t.note = std::to_string(t.skipped) + " grazing samples excluded";
    return t;
}

}  // namespace kinreg
