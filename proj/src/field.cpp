#include "kinreg/field.hpp"

namespace kinreg {

BoundaryTemperature BoundaryTemperature::constant(double t0) {
    BoundaryTemperature t;
    t.t0 = t0;
    return t;
}

BoundaryTemperature BoundaryTemperature::linear(double t0, const Vec3& slope) {
    BoundaryTemperature t;
    t.kind = Kind::Linear;
    t.t0 = t0;
    t.slope = slope;
    return t;
}

BoundaryTemperature BoundaryTemperature::bump(double t0, double amplitude, const Vec3& center, double width) {
    BoundaryTemperature t;
    t.kind = Kind::Bump;
    t.t0 = t0;
    t.amplitude = amplitude;
    t.center = center;
    t.width = width;
    t.validate();
    return t;
}

double BoundaryTemperature::operator()(const Vec3& x) const {
    switch (kind) {
        case Kind::Constant: return t0;
        case Kind::Linear: return t0 + slope.dot(x);
        case Kind::Bump: return t0 + amplitude * std::exp(-(x - center).squaredNorm() / (width * width));
    }
    return t0;
}

Vec3 BoundaryTemperature::gradient(const Vec3& x) const {
    switch (kind) {
        case Kind::Constant: return Vec3::Zero();
        case Kind::Linear: return slope;
        case Kind::Bump: {
            const Vec3 d = x - center;
            return -2.0 * amplitude / (width * width) * std::exp(-d.squaredNorm() / (width * width)) * d;
        }
    }
    return Vec3::Zero();
}

bool BoundaryTemperature::is_constant() const {
    return kind == Kind::Constant || (kind == Kind::Linear && slope.isZero(0.0)) ||
           (kind == Kind::Bump && amplitude == 0.0);
}

void BoundaryTemperature::validate() const {
    if (!std::isfinite(t0) || !slope.allFinite() || !std::isfinite(amplitude) || !center.allFinite())
        throw ArgumentError("BoundaryTemperature: coefficients must be finite");
    if (kind == Kind::Bump && !(width > 0)) throw ArgumentError("BoundaryTemperature: bump width must be positive");
}

std::string to_string(BoundaryTemperature::Kind k) {
    switch (k) {
        case BoundaryTemperature::Kind::Constant: return "constant";
        case BoundaryTemperature::Kind::Linear: return "linear";
        case BoundaryTemperature::Kind::Bump: return "bump";
    }
    return "constant";
}

BoundaryTemperature::Kind temperature_kind(const std::string& name) {
    if (name == "constant") return BoundaryTemperature::Kind::Constant;
    if (name == "linear") return BoundaryTemperature::Kind::Linear;
    if (name == "bump") return BoundaryTemperature::Kind::Bump;
    throw ArgumentError("unknown temperature kind '" + name + "'");
}

// ------------------------------------------------------------ wall flux

double WallFlux::at(const Vec3& p) const {
    const auto st = interp->stencil(p);
    double v = 0;
    for (std::size_t k = 0; k < st.idx.size(); ++k) v += st.w[k] * values(st.idx[k]);
    return v;
}

WallFlux make_wall_flux(std::shared_ptr<const ConvexDomain> domain, std::shared_ptr<const BoundaryMesh> mesh,
                        VecX values) {
    if (values.size() != mesh->size()) throw ArgumentError("make_wall_flux: one value per mesh node required");
    WallFlux w;
    w.interp = std::make_shared<SurfaceInterpolator>(std::move(domain), mesh);
    w.mesh = std::move(mesh);
    w.values = std::move(values);
    return w;
}

WallFlux constant_wall_flux(std::shared_ptr<const ConvexDomain> domain, std::shared_ptr<const BoundaryMesh> mesh,
                            double value) {
    const int n = mesh->size();
    return make_wall_flux(std::move(domain), std::move(mesh), VecX::Constant(n, value));
}

// ------------------------------------------------------------ distribution field

double DistributionField::at_node_velocity(const Vec3& x, int m) const {
    const ShepardStencil st = interp->stencil(x);
    double v = 0;
    for (int k = 0; k < 4; ++k) v += st.w[k] * values(st.idx[k], m);
    return v;
}

double DistributionField::at(const Vec3& x, const Vec3& zeta) const {
    const int nv = grid->size();
    thread_local VecX phi;
    phi.resize(nv);
    grid->basis(zeta, phi);
    const ShepardStencil st = interp->stencil(x);
    double g = 0;
    for (int m = 0; m < nv; ++m) {
        if (phi(m) == 0.0) continue;
        double v = 0;
        for (int k = 0; k < 4; ++k) v += st.w[k] * values(st.idx[k], m);
        g += phi(m) * v / sqrt_maxwellian_speed(grid->speed(m));
    }
    return g * sqrt_maxwellian(zeta);
}

DistributionField make_field(std::shared_ptr<const VolumeNodes> nodes, std::shared_ptr<const VelocityGrid> grid,
                             std::shared_ptr<const ShepardInterpolator> interp) {
    DistributionField f;
    f.interp = interp ? std::move(interp) : std::make_shared<ShepardInterpolator>(nodes->points);
    f.values = RowMatX::Zero(nodes->size(), grid->size());
    f.nodes = std::move(nodes);
    f.grid = std::move(grid);
    return f;
}

DistributionField sample_field(std::shared_ptr<const VolumeNodes> nodes, std::shared_ptr<const VelocityGrid> grid,
                               const std::function<double(const Vec3&, const Vec3&)>& fn) {
    DistributionField f = make_field(std::move(nodes), std::move(grid));
    for (int i = 0; i < f.nodes->size(); ++i)
        for (int m = 0; m < f.grid->size(); ++m) f.values(i, m) = fn(f.nodes->points[i], f.grid->node(m));
    return f;
}

// ------------------------------------------------------------ discrete collision

DiscreteCollision::DiscreteCollision(const KineticModel& model, std::shared_ptr<const VelocityGrid> grid)
    : model_(model), grid_(std::move(grid)) {
    model_.validate();
    const int nv = grid_->size();
    sqrt_m_.resize(nv);
    for (int m = 0; m < nv; ++m) sqrt_m_[m] = sqrt_maxwellian_speed(grid_->speed(m));
    w_.resize(nv, nv);
    for (int m = 0; m < nv; ++m) w_.row(m) = row(grid_->node(m)).transpose();
}

VecX DiscreteCollision::row(const Vec3& zeta) const {
    const int nv = grid_->size();
    VecX r = VecX::Zero(nv);
    VecX phi(nv);
    grid_->k_rule().for_each(zeta, [&](const Vec3& zs, double rr, const Vec3& omega, double w) {
        if (zs.norm() > grid_->zeta_max()) return;
        grid_->basis(zs, phi);
        r += (w * kernel_polar(model_, zeta, rr, omega) * sqrt_maxwellian(zs)) * phi;
    });
    for (int m = 0; m < nv; ++m) r(m) /= sqrt_m_[m];
    return r;
}

// ------------------------------------------------------------ sources

CollisionSource::Profile CollisionSource::along(const Vec3& omega, const std::vector<double>& rhos) const {
    return [this, omega, rhos](const Vec3& y, double* out) {
        for (std::size_t k = 0; k < rhos.size(); ++k) out[k] = at(y, rhos[k] * omega);
    };
}

FieldSource::FieldSource(DistributionField kf) : kf_(std::move(kf)) {}

double FieldSource::at(const Vec3& y, const Vec3& zeta) const { return kf_.at(y, zeta); }

CollisionSource::Profile FieldSource::along(const Vec3& omega, const std::vector<double>& rhos) const {
    const VelocityGrid& g = *kf_.grid;
    const int nr = g.n_radial(), na = g.n_angular();
    std::vector<double> ang(na);
    g.angular_basis(omega, ang.data());
    // radial[k * nr + a]: weight of speed row a at rho_k, including the
    // sqrt M ratio between the target speed and the node speed.
    std::vector<double> radial(rhos.size() * nr);
    for (std::size_t k = 0; k < rhos.size(); ++k) {
        g.radial_basis(rhos[k], radial.data() + k * nr);
        const double sm = sqrt_maxwellian_speed(rhos[k]);
        for (int a = 0; a < nr; ++a) radial[k * nr + a] *= sm / sqrt_maxwellian_speed(g.speeds()[a]);
    }
    const RowMatX* values = &kf_.values;
    const ShepardInterpolator* interp = kf_.interp.get();
    return [values, interp, ang = std::move(ang), radial = std::move(radial), nr, na,
            nk = rhos.size()](const Vec3& y, double* out) {
        const ShepardStencil st = interp->stencil(y);
        double v[64];
        for (int a = 0; a < nr; ++a) {
            double s = 0;
            for (int t = 0; t < 4; ++t) {
                if (st.w[t] == 0.0) continue;
                const double* row = values->data() + static_cast<long>(st.idx[t]) * values->cols() + a * na;
                double d = 0;
                for (int b = 0; b < na; ++b) d += ang[b] * row[b];
                s += st.w[t] * d;
            }
            v[a] = s;
        }
        for (std::size_t k = 0; k < nk; ++k) {
            double s = 0;
            for (int a = 0; a < nr; ++a) s += radial[k * nr + a] * v[a];
            out[k] = s;
        }
    };
}

std::shared_ptr<FieldSource> collision_source(const DistributionField& f, const DiscreteCollision& k) {
    DistributionField kf = f;
    kf.values = k.apply(f.values);
    return std::make_shared<FieldSource>(std::move(kf));
}

double exact_solution(double c, double t0, const Vec3& zeta) {
    return (c + t0 * (zeta.squaredNorm() - 2.0)) * sqrt_maxwellian(zeta);
}

std::shared_ptr<AnalyticSource> exact_solution_source(const KineticModel& model, double c, double t0) {
    return std::make_shared<AnalyticSource>([model, c, t0](const Vec3&, const Vec3& z) {
        return collision_frequency(model, z.norm()) * exact_solution(c, t0, z);
    });
}

}  // namespace kinreg
