#pragma once

#include "kinreg/domain.hpp"

#include <array>

namespace kinreg {

// Uniform-cell hash over a fixed point set; exact k-nearest and radius queries.
class PointLocator {
public:
    PointLocator() = default;
    PointLocator(std::vector<Vec3> points, double cell_size);

    // Indices of the k nearest points, ascending distance (ties by index).
    void nearest(const Vec3& q, int k, std::vector<int>& idx, std::vector<double>& dist) const;
    void within(const Vec3& q, double radius, std::vector<int>& idx) const;
    const std::vector<Vec3>& points() const { return pts_; }
    int size() const { return static_cast<int>(pts_.size()); }

private:
    long cell_key(int i, int j, int k) const { return (static_cast<long>(i) * ny_ + j) * nz_ + k; }
    void cell_of(const Vec3& q, int& i, int& j, int& k) const;

    std::vector<Vec3> pts_;
    Vec3 lo_;
    double h_ = 1;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    std::vector<int> start_, items_;
};

// Interior nodes in star-shaped coordinates x = s r(omega) omega: radial
// layers of equal thickness in s with direction counts proportional to s^2.
struct VolumeNodes {
    std::vector<Vec3> points;
    std::vector<double> weights;  // volume quadrature weights
    double spacing = 0;           // nominal node spacing
    int size() const { return static_cast<int>(points.size()); }
};

VolumeNodes make_volume_nodes(const ConvexDomain& domain, int target_count);

struct ShepardStencil {
    std::array<int, 4> idx{};
    std::array<double, 4> w{};
};

// Modified Shepard interpolation over the four nearest nodes with weights
// ((R - d) / (R d))^2, R the distance to the fifth nearest node. Continuous,
// exact at nodes and for constants.
class ShepardInterpolator {
public:
    ShepardInterpolator() = default;
    explicit ShepardInterpolator(const std::vector<Vec3>& nodes);
    ShepardStencil stencil(const Vec3& x) const;
    const PointLocator& locator() const { return loc_; }

private:
    PointLocator loc_;
};

}  // namespace kinreg
