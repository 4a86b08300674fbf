#pragma once

#include "minsurf/common.hpp"
#include "minsurf/surface_frame.hpp"

#include <optional>

namespace minsurf {

/// Unit-interval Halton radical inverse in the given base, index i >= 1.
double halton(std::uint64_t index, unsigned base);

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> exact_normals;  // empty, or one unit vector per point
    std::string source;

    std::size_t size() const { return points.size(); }
    bool has_normals() const { return !exact_normals.empty(); }
};

enum class SurfaceKind { Ellipsoid, Torus, Sphube };

/// Analytic test surfaces {F = 0} with closed-form gradients and Hessians.
class ImplicitSurface {
  public:
    static ImplicitSurface ellipsoid(double a, double b, double c);
    static ImplicitSurface torus(double major_radius, double minor_radius);
    static ImplicitSurface sphube(double squareness, double radius);

    SurfaceKind kind() const { return kind_; }
    std::string name() const;

    double value(const Vec3& p) const;
    Vec3 gradient(const Vec3& p) const;
    Mat3 hessian(const Vec3& p) const;

    /// Exact frame at an on-surface point (|F| <= 1e-8 required), oriented by
    /// the outward gradient.
    SurfaceFrame exact_frame(const Vec3& p) const;

    /// Outward unit normal ∇F/‖∇F‖.
    Vec3 exact_normal(const Vec3& p) const;

    /// Deterministic low-discrepancy sample of n surface points with exact
    /// normals attached. Bases (2,3) in the 2-D parameter rectangle.
    PointCloud sample_halton(std::size_t n) const;

  private:
    ImplicitSurface(SurfaceKind kind) : kind_(kind) {}
    Vec3 map_parameters(double u, double v) const;
    SurfaceKind kind_;
    double param0_ = 0, param1_ = 0, param2_ = 0;
};

/// sup over probe points of the distance to the nearest cloud point (Eq. of
/// the fill distance, with the probe standing in for the embedding domain).
double fill_distance(const PointCloud& cloud, const PointCloud& probe);

/// i.i.d. Gaussian perturbation of each coordinate; drops exact normals.
PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// Uniform random samples on the faces of an axis-aligned cube centred at the
/// origin (edge length `edge`); every point has one coordinate == ±edge/2.
PointCloud cube_cloud(std::size_t n, double edge, std::uint64_t seed);

/// Unsigned distance from p to the surface of that cube; fairing fidelity metric.
double cube_surface_distance(const Vec3& p, double edge);

}  // namespace minsurf
