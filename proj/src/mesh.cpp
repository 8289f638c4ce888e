#include "kinreg/mesh.hpp"

#include "kinreg/quadrature.hpp"

#include <Eigen/Cholesky>

namespace kinreg {

double BoundaryMesh::area() const {
    double a = 0;
    for (double w : weights) a += w;
    return a;
}

namespace {

void push_node(BoundaryMesh& m, const ConvexDomain& domain, const Vec3& u, double dir_weight) {
    const Vec3 y = domain.radial_point(u);
    const Vec3 n = domain.normal(y);
    const double r = y.norm();
    m.nodes.push_back(y);
    m.normals.push_back(n);
    m.weights.push_back(dir_weight * r * r / u.dot(n));
}

}  // namespace

BoundaryMesh make_boundary_mesh(const ConvexDomain& domain, int n_polar, int n_azimuth) {
    if (n_polar <= 0 || n_azimuth <= 0) throw ArgumentError("make_boundary_mesh: mesh sizes must be positive");
    const SphereRule rule = product_sphere_rule(n_polar, n_azimuth, Vec3::UnitZ());
    BoundaryMesh m;
    m.n_polar = n_polar;
    m.n_azimuth = n_azimuth;
    for (std::size_t i = 0; i < rule.size(); ++i) push_node(m, domain, rule.dirs[i], rule.w[i]);
    return m;
}

BoundaryMesh make_focused_mesh(const ConvexDomain& domain, const Vec3& focus, double theta0, int per_panel,
                               int n_azimuth) {
    if (!(theta0 > 0) || per_panel <= 0 || n_azimuth <= 0)
        throw ArgumentError("make_focused_mesh: bad resolution parameters");
    const Vec3 axis = focus.normalized();
    Vec3 t1, t2;
    orthonormal_frame(axis, t1, t2);
    std::vector<double> breaks = {0.0};
    for (double t = theta0; t < kPi; t *= 2.0) breaks.push_back(t);
    if (kPi - breaks.back() < 0.5 * (breaks.back() - breaks[breaks.size() - 2])) breaks.pop_back();
    breaks.push_back(kPi);
    const Rule1D th = composite_gauss(breaks, per_panel);
    BoundaryMesh m;
    m.n_polar = static_cast<int>(th.size());
    m.n_azimuth = n_azimuth;
    const double dphi = 2.0 * kPi / n_azimuth;
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double st = std::sin(th.x[i]), ct = std::cos(th.x[i]);
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = (j + 0.5) * dphi;
            const Vec3 u = ct * axis + st * (std::cos(phi) * t1 + std::sin(phi) * t2);
            push_node(m, domain, u, th.w[i] * st * dphi);
        }
    }
    return m;
}

SurfaceInterpolator::SurfaceInterpolator(std::shared_ptr<const ConvexDomain> domain,
                                         std::shared_ptr<const BoundaryMesh> mesh)
    : domain_(std::move(domain)), mesh_(std::move(mesh)) {
    if (!domain_ || !mesh_ || mesh_->size() < 6) throw ArgumentError("SurfaceInterpolator: need a mesh of 6+ nodes");
    const double cell = std::sqrt(mesh_->area() / mesh_->size());
    loc_ = PointLocator(mesh_->nodes, cell);
    std::vector<int> idx;
    std::vector<double> dist;
    double d4 = 0;
    for (const auto& p : mesh_->nodes) {
        loc_.nearest(p, 5, idx, dist);
        d4 = std::max(d4, dist.back());
    }
    radius_ = 2.0 * d4;
}

SurfaceInterpolator::Stencil SurfaceInterpolator::stencil(const Vec3& p) const {
    Stencil st;
    loc_.within(p, radius_, st.idx);
    if (st.idx.empty()) throw ResolutionError("SurfaceInterpolator: no mesh node within the support radius");
    const Vec3 n = domain_->normal(p);
    Vec3 t1, t2;
    orthonormal_frame(n, t1, t2);
    const int k = static_cast<int>(st.idx.size());
    std::vector<double> w(k);
    Eigen::MatrixXd A(k, 6);
    for (int i = 0; i < k; ++i) {
        const Vec3 d = mesh_->nodes[st.idx[i]] - p;
        const double q = d.squaredNorm() / (radius_ * radius_);
        w[i] = (1.0 - q) * (1.0 - q);
        const double u = d.dot(t1) / radius_, v = d.dot(t2) / radius_;
        A.row(i) << 1.0, u, v, u * u, u * v, v * v;
    }
    for (int cols : {6, 3, 1}) {
        const Eigen::MatrixXd B = A.leftCols(cols);
        Eigen::MatrixXd BtW = B.transpose();
        for (int i = 0; i < k; ++i) BtW.col(i) *= w[i];
        const Eigen::MatrixXd N = BtW * B;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(N);
        const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
        if (ldlt.info() != Eigen::Success || d.minCoeff() < 1e-9 * d.maxCoeff()) continue;
        Eigen::VectorXd e = Eigen::VectorXd::Zero(cols);
        e(0) = 1.0;
        const Eigen::VectorXd c = BtW.transpose() * ldlt.solve(e);
        st.w.assign(c.data(), c.data() + k);
        return st;
    }
    throw ResolutionError("SurfaceInterpolator: degenerate neighbourhood");
}

}  // namespace kinreg
