#pragma once

#include "minsurf/kdtree.hpp"
#include "minsurf/surfaces.hpp"

namespace minsurf {

/// Local interpolation data: the point of interest p0, its k nearest
/// neighbors (p0 included) and, once attached, the pair of off-surface ghost
/// points p0 ± h·n with level values (C, C+h, C−h).
struct Stencil {
    std::size_t center_index = 0;            // index into the source cloud
    std::vector<std::size_t> neighbor_indices;
    std::vector<Vec3> points;                // neighbor positions, p0 first
    Vec3 pca_normal = Vec3::Zero();
    Vec3 ghost_plus = Vec3::Zero();
    Vec3 ghost_minus = Vec3::Zero();
    double offset_h = 0.0;
    double level_constant = 0.0;
    bool has_ghosts = false;

    const Vec3& center() const { return points.front(); }
    std::size_t num_points() const { return points.size(); }

    /// All constraint sites: surface points followed by ghost_plus, ghost_minus.
    std::vector<Vec3> constraint_points() const;

    /// Level values (C,...,C, C+h, C−h), length num_points()+2.
    VectorXd constraint_values() const;
};

/// k nearest neighbors of cloud point `center_index` (ties by index order).
/// The center is placed first; remaining neighbors ascend by distance.
Stencil knn_stencil(const PointCloud& cloud, const SpatialIndex& index, std::size_t center_index,
                    std::size_t k);

/// Convenience overload building a throwaway index (small clouds, tests).
Stencil knn_stencil(const PointCloud& cloud, std::size_t center_index, std::size_t k);

/// Unit eigenvector of the centered stencil covariance with smallest
/// eigenvalue; orientation arbitrary. Throws GeometryError when the stencil
/// is (near-)collinear.
Vec3 pca_normal(const Stencil& stencil);

/// raw if raw·reference >= 0, else −raw.
Vec3 orient_normal(const Vec3& raw, const Vec3& reference);

/// Mean distance from the stencil center to its `count` nearest neighbors
/// (excluding itself); the default ghost-offset rule.
double default_ghost_offset(const Stencil& stencil, std::size_t count = 5);

/// Attaches the ghost pair p0 ± h·normal and the level structure. Throws
/// GeometryError if a ghost lands on an existing stencil point.
void attach_ghosts(Stencil& stencil, const Vec3& normal, double h, double level_constant);

/// Full ghost expansion of a cloud (a pair per point, Eq.-6 style); kept for
/// completeness, no experiment consumes it.
PointCloud expand_with_ghost_pairs(const PointCloud& cloud, const std::vector<Vec3>& normals,
                                   double h);

}  // namespace minsurf
