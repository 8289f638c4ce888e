#pragma once

#include "kinreg/domain.hpp"
#include "kinreg/spatial.hpp"

#include <memory>

namespace kinreg {

struct BoundaryMesh {
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals;
    std::vector<double> weights;  // area weights
    int n_polar = 0, n_azimuth = 0;
    int size() const { return static_cast<int>(nodes.size()); }
    double area() const;
};

// Product mesh in direction space (Gauss in cos(theta) about the z axis times
// uniform azimuth), mapped radially onto the boundary.
BoundaryMesh make_boundary_mesh(const ConvexDomain& domain, int n_polar, int n_azimuth);

// Mesh with its pole at the boundary point in direction `focus` and polar
// panels refined geometrically toward the pole, starting at angle `theta0`.
BoundaryMesh make_focused_mesh(const ConvexDomain& domain, const Vec3& focus, double theta0, int per_panel,
                               int n_azimuth);

// Moving least squares (quadratic in tangent coordinates) over the mesh nodes
// within a fixed radius, with weights (1 - (d/R)^2)^2. Falls back to linear
// and then constant fits in sparse neighbourhoods.
class SurfaceInterpolator {
public:
    SurfaceInterpolator() = default;
    SurfaceInterpolator(std::shared_ptr<const ConvexDomain> domain, std::shared_ptr<const BoundaryMesh> mesh);

    struct Stencil {
        std::vector<int> idx;
        std::vector<double> w;
    };
    Stencil stencil(const Vec3& p) const;
    double radius() const { return radius_; }

private:
    std::shared_ptr<const ConvexDomain> domain_;
    std::shared_ptr<const BoundaryMesh> mesh_;
    PointLocator loc_;
    double radius_ = 0;
};

}  // namespace kinreg
