#include "kinreg/spatial.hpp"

#include <algorithm>
#include <numeric>

namespace kinreg {

PointLocator::PointLocator(std::vector<Vec3> points, double cell_size) : pts_(std::move(points)), h_(cell_size) {
    if (pts_.empty()) throw ArgumentError("PointLocator: empty point set");
    if (!(cell_size > 0)) throw ArgumentError("PointLocator: cell size must be positive");
    Vec3 hi = pts_[0];
    lo_ = pts_[0];
    for (const auto& p : pts_) {
        lo_ = lo_.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 ext = hi - lo_;
    nx_ = static_cast<int>(ext.x() / h_) + 1;
    ny_ = static_cast<int>(ext.y() / h_) + 1;
    nz_ = static_cast<int>(ext.z() / h_) + 1;
    const long ncell = static_cast<long>(nx_) * ny_ * nz_;
    std::vector<long> key(pts_.size());
    start_.assign(ncell + 1, 0);
    for (std::size_t p = 0; p < pts_.size(); ++p) {
        int i, j, k;
        cell_of(pts_[p], i, j, k);
        key[p] = cell_key(i, j, k);
        ++start_[key[p] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(pts_.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t p = 0; p < pts_.size(); ++p) items_[fill[key[p]]++] = static_cast<int>(p);
}

void PointLocator::cell_of(const Vec3& q, int& i, int& j, int& k) const {
    const Vec3 r = (q - lo_) / h_;
    i = std::clamp(static_cast<int>(std::floor(r.x())), 0, nx_ - 1);
    j = std::clamp(static_cast<int>(std::floor(r.y())), 0, ny_ - 1);
    k = std::clamp(static_cast<int>(std::floor(r.z())), 0, nz_ - 1);
}

void PointLocator::nearest(const Vec3& q, int k, std::vector<int>& idx, std::vector<double>& dist) const {
    k = std::min(k, size());
    int ci, cj, ck;
    cell_of(q, ci, cj, ck);
    // Distance from q to the outside of the (2m+1)^3 cell block around its cell.
    const Vec3 r = (q - lo_) / h_;
    std::vector<std::pair<double, int>> cand;
    const int mmax = std::max({nx_, ny_, nz_});
    for (int m = 0;; ++m) {
        // Add shell m.
        for (int i = ci - m; i <= ci + m; ++i) {
            if (i < 0 || i >= nx_) continue;
            for (int j = cj - m; j <= cj + m; ++j) {
                if (j < 0 || j >= ny_) continue;
                for (int kk = ck - m; kk <= ck + m; ++kk) {
                    if (kk < 0 || kk >= nz_) continue;
                    if (std::max({std::abs(i - ci), std::abs(j - cj), std::abs(kk - ck)}) != m) continue;
                    const long c = cell_key(i, j, kk);
                    for (int t = start_[c]; t < start_[c + 1]; ++t) {
                        const int p = items_[t];
                        cand.emplace_back((pts_[p] - q).norm(), p);
                    }
                }
            }
        }
        if (static_cast<int>(cand.size()) >= k) {
            // Guaranteed radius: distance from q to the nearest block face that
            // still has cells beyond it.
            const double inf = std::numeric_limits<double>::infinity();
            auto face = [&](int lo_cell, int hi_cell, int n, double x) {
                const double a = lo_cell <= 0 ? inf : x - lo_cell;
                const double b = hi_cell >= n ? inf : hi_cell - x;
                return std::min(a, b);
            };
            const double inner = std::min({face(ci - m, ci + m + 1, nx_, r.x()), face(cj - m, cj + m + 1, ny_, r.y()),
                                           face(ck - m, ck + m + 1, nz_, r.z())}) *
                                 h_;
            std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
            if (cand[k - 1].first <= inner || m > mmax) break;
        } else if (m > mmax) {
            break;
        }
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    idx.resize(k);
    dist.resize(k);
    for (int t = 0; t < k; ++t) {
        idx[t] = cand[t].second;
        dist[t] = cand[t].first;
    }
}

void PointLocator::within(const Vec3& q, double radius, std::vector<int>& idx) const {
    idx.clear();
    int i0, j0, k0, i1, j1, k1;
    cell_of(q - Vec3::Constant(radius), i0, j0, k0);
    cell_of(q + Vec3::Constant(radius), i1, j1, k1);
    for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j)
            for (int k = k0; k <= k1; ++k) {
                const long c = cell_key(i, j, k);
                for (int t = start_[c]; t < start_[c + 1]; ++t)
                    if ((pts_[items_[t]] - q).norm() <= radius) idx.push_back(items_[t]);
            }
    std::sort(idx.begin(), idx.end());
}

VolumeNodes make_volume_nodes(const ConvexDomain& domain, int target) {
    if (target < 8) throw ArgumentError("make_volume_nodes: need at least 8 nodes");
    const int layers = std::max(2, static_cast<int>(std::lround(std::cbrt(3.0 * target / (4.0 * kPi)))));
    double norm = 0;
    for (int l = 0; l < layers; ++l) norm += std::pow((l + 0.5) / layers, 2);
    VolumeNodes out;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int l = 0; l < layers; ++l) {
        const double s0 = static_cast<double>(l) / layers, s1 = (l + 1.0) / layers, s = (l + 0.5) / layers;
        const int n = std::max(1, static_cast<int>(std::lround(target * s * s / norm)));
        const double shell = (s1 * s1 * s1 - s0 * s0 * s0) / 3.0;
        for (int k = 0; k < n; ++k) {
            // Fibonacci directions, rotated per layer.
            const double z = 1.0 - (2.0 * k + 1.0) / n;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * k + 0.7 * l;
            const Vec3 u(rho * std::cos(phi), rho * std::sin(phi), z);
            const Vec3 b = domain.radial_point(u);
            const double rb = b.norm();
            out.points.push_back(s * b);
            out.weights.push_back(4.0 * kPi / n * shell * rb * rb * rb);
        }
    }
    out.spacing = domain.bounding_radius() / layers;
    return out;
}

ShepardInterpolator::ShepardInterpolator(const std::vector<Vec3>& nodes) {
    if (nodes.size() < 5) throw ArgumentError("ShepardInterpolator: need at least five nodes");
    Vec3 lo = nodes[0], hi = nodes[0];
    for (const auto& p : nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double cell = std::max(1e-6, std::cbrt((hi - lo).prod() / nodes.size()) * 1.5);
    loc_ = PointLocator(nodes, cell);
}

ShepardStencil ShepardInterpolator::stencil(const Vec3& x) const {
    thread_local std::vector<int> idx;
    thread_local std::vector<double> dist;
    loc_.nearest(x, 5, idx, dist);
    ShepardStencil st;
    if (dist[0] < 1e-13) {
        st.idx = {idx[0], idx[1], idx[2], idx[3]};
        st.w = {1.0, 0.0, 0.0, 0.0};
        return st;
    }
    const double R = dist[4];
    double sum = 0;
    for (int t = 0; t < 4; ++t) {
        const double a = std::max(0.0, R - dist[t]) / (R * dist[t]);
        st.idx[t] = idx[t];
        st.w[t] = a * a;
        sum += st.w[t];
    }
    if (!(sum > 0)) {
        // All four at the same distance as the fifth: plain average.
        for (int t = 0; t < 4; ++t) st.w[t] = 0.25;
        return st;
    }
    for (int t = 0; t < 4; ++t) st.w[t] /= sum;
    return st;
}

}  // namespace kinreg
