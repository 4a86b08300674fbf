#include "minsurf/surfaces.hpp"

#include "minsurf/kdtree.hpp"

#include <cmath>

namespace minsurf {

double halton(std::uint64_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        result += f * static_cast<double>(index % base);
        index /= base;
    }
    return result;
}

ImplicitSurface ImplicitSurface::ellipsoid(double a, double b, double c) {
    if (a <= 0 || b <= 0 || c <= 0) throw std::invalid_argument("ellipsoid: semi-axes must be positive");
    ImplicitSurface s(SurfaceKind::Ellipsoid);
    s.param0_ = a;
    s.param1_ = b;
    s.param2_ = c;
    return s;
}

ImplicitSurface ImplicitSurface::torus(double major_radius, double minor_radius) {
    if (!(major_radius > minor_radius && minor_radius > 0))
        throw std::invalid_argument("torus: need R > r > 0");
    ImplicitSurface s(SurfaceKind::Torus);
    s.param0_ = major_radius;
    s.param1_ = minor_radius;
    return s;
}

ImplicitSurface ImplicitSurface::sphube(double squareness, double radius) {
    if (!(radius > 0) || squareness < 0 || squareness > 1)
        throw std::invalid_argument("sphube: need r > 0 and 0 <= s <= 1");
    ImplicitSurface s(SurfaceKind::Sphube);
    s.param0_ = squareness;
    s.param1_ = radius;
    return s;
}

std::string ImplicitSurface::name() const {
    char buf[96];
    switch (kind_) {
        case SurfaceKind::Ellipsoid:
            std::snprintf(buf, sizeof buf, "ellipsoid(%g,%g,%g)", param0_, param1_, param2_);
            break;
        case SurfaceKind::Torus:
            std::snprintf(buf, sizeof buf, "torus(%g,%g)", param0_, param1_);
            break;
        case SurfaceKind::Sphube:
            std::snprintf(buf, sizeof buf, "sphube(%g,%g)", param0_, param1_);
            break;
    }
    return buf;
}

double ImplicitSurface::value(const Vec3& p) const {
    const double x = p.x(), y = p.y(), z = p.z();
    switch (kind_) {
        case SurfaceKind::Ellipsoid: {
            const double a = param0_, b = param1_, c = param2_;
            return x * x / (a * a) + y * y / (b * b) + z * z / (c * c) - 1.0;
        }
        case SurfaceKind::Torus: {
            const double R = param0_, r = param1_;
            const double rho = std::sqrt(x * x + y * y);
            return (R - rho) * (R - rho) + z * z - r * r;
        }
        case SurfaceKind::Sphube: {
            const double s = param0_, r = param1_;
            const double s2r2 = s * s / (r * r);
            const double s4r4 = s2r2 * s2r2;
            const double x2 = x * x, y2 = y * y, z2 = z * z;
            return x2 + y2 + z2 - s2r2 * (x2 * y2 + y2 * z2 + x2 * z2) + s4r4 * x2 * y2 * z2 -
                   r * r;
        }
    }
    return 0.0;
}

Vec3 ImplicitSurface::gradient(const Vec3& p) const {
    const double x = p.x(), y = p.y(), z = p.z();
    switch (kind_) {
        case SurfaceKind::Ellipsoid: {
            const double a = param0_, b = param1_, c = param2_;
            return {2 * x / (a * a), 2 * y / (b * b), 2 * z / (c * c)};
        }
        case SurfaceKind::Torus: {
            const double R = param0_;
            const double rho = std::sqrt(x * x + y * y);
            if (rho == 0.0) throw GeometryError("torus gradient undefined on the axis");
            const double f = 2.0 * (rho - R) / rho;
            return {f * x, f * y, 2 * z};
        }
        case SurfaceKind::Sphube: {
            const double s = param0_, r = param1_;
            const double s2r2 = s * s / (r * r);
            const double s4r4 = s2r2 * s2r2;
            const double x2 = x * x, y2 = y * y, z2 = z * z;
            return {2 * x - s2r2 * 2 * x * (y2 + z2) + s4r4 * 2 * x * y2 * z2,
                    2 * y - s2r2 * 2 * y * (x2 + z2) + s4r4 * 2 * y * x2 * z2,
                    2 * z - s2r2 * 2 * z * (x2 + y2) + s4r4 * 2 * z * x2 * y2};
        }
    }
    return Vec3::Zero();
}

Mat3 ImplicitSurface::hessian(const Vec3& p) const {
    const double x = p.x(), y = p.y(), z = p.z();
    Mat3 h = Mat3::Zero();
    switch (kind_) {
        case SurfaceKind::Ellipsoid: {
            const double a = param0_, b = param1_, c = param2_;
            h(0, 0) = 2 / (a * a);
            h(1, 1) = 2 / (b * b);
            h(2, 2) = 2 / (c * c);
            break;
        }
        case SurfaceKind::Torus: {
            const double R = param0_;
            const double rho2 = x * x + y * y;
            const double rho = std::sqrt(rho2);
            if (rho == 0.0) throw GeometryError("torus hessian undefined on the axis");
            const double rho3 = rho2 * rho;
            h(0, 0) = 2.0 - 2.0 * R / rho + 2.0 * R * x * x / rho3;
            h(1, 1) = 2.0 - 2.0 * R / rho + 2.0 * R * y * y / rho3;
            h(0, 1) = h(1, 0) = 2.0 * R * x * y / rho3;
            h(2, 2) = 2.0;
            break;
        }
        case SurfaceKind::Sphube: {
            const double s = param0_, r = param1_;
            const double s2r2 = s * s / (r * r);
            const double s4r4 = s2r2 * s2r2;
            const double x2 = x * x, y2 = y * y, z2 = z * z;
            h(0, 0) = 2 - 2 * s2r2 * (y2 + z2) + 2 * s4r4 * y2 * z2;
            h(1, 1) = 2 - 2 * s2r2 * (x2 + z2) + 2 * s4r4 * x2 * z2;
            h(2, 2) = 2 - 2 * s2r2 * (x2 + y2) + 2 * s4r4 * x2 * y2;
            h(0, 1) = h(1, 0) = -4 * s2r2 * x * y + 4 * s4r4 * x * y * z2;
            h(0, 2) = h(2, 0) = -4 * s2r2 * x * z + 4 * s4r4 * x * z * y2;
            h(1, 2) = h(2, 1) = -4 * s2r2 * y * z + 4 * s4r4 * y * z * x2;
            break;
        }
    }
    return h;
}

Vec3 ImplicitSurface::exact_normal(const Vec3& p) const {
    const Vec3 g = gradient(p);
    const double n = g.norm();
    if (n <= 1e-14) throw GeometryError("exact_normal: vanishing gradient");
    return g / n;
}

SurfaceFrame ImplicitSurface::exact_frame(const Vec3& p) const {
    if (std::abs(value(p)) > 1e-8)
        throw GeometryError("exact_frame: point does not lie on the surface");
    const Vec3 g = gradient(p);
    return frame_from_derivatives(g, hessian(p), g);
}

namespace {

// Radial projection of a unit direction onto the sphube level set: find t > 0
// with F(t*dir) = 0 by bisection. The surface is star-shaped about the origin.
double sphube_radius(const ImplicitSurface& surf, double r, const Vec3& dir) {
    double lo = 0.5 * r;
    double hi = r;
    double f_hi = surf.value(hi * dir);
    int guard = 0;
    while (f_hi < 0.0 && guard++ < 64) {
        hi *= 1.25;
        f_hi = surf.value(hi * dir);
    }
    if (f_hi < 0.0) throw GeometryError("sphube_radius: failed to bracket the level set");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = surf.value(mid * dir);
        if (std::abs(f_mid) < 1e-13) return mid;
        if (f_mid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Vec3 ImplicitSurface::map_parameters(double u, double v) const {
    switch (kind_) {
        case SurfaceKind::Ellipsoid: {
            // area-preserving polar inversion avoids clustering at the poles
            const double theta = std::acos(1.0 - 2.0 * u);
            const double phi = 2.0 * M_PI * v;
            return {param0_ * std::sin(theta) * std::cos(phi),
                    param1_ * std::sin(theta) * std::sin(phi), param2_ * std::cos(theta)};
        }
        case SurfaceKind::Torus: {
            const double theta = 2.0 * M_PI * u;
            const double psi = 2.0 * M_PI * v;
            const double w = param0_ + param1_ * std::cos(psi);
            return {w * std::cos(theta), w * std::sin(theta), param1_ * std::sin(psi)};
        }
        case SurfaceKind::Sphube: {
            const double theta = std::acos(1.0 - 2.0 * u);
            const double phi = 2.0 * M_PI * v;
            const Vec3 dir{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                           std::cos(theta)};
            return sphube_radius(*this, param1_, dir) * dir;
        }
    }
    return Vec3::Zero();
}

PointCloud ImplicitSurface::sample_halton(std::size_t n) const {
    if (n == 0) throw std::domain_error("sample_halton: n must be >= 1");
    PointCloud cloud;
    cloud.points.reserve(n);
    cloud.exact_normals.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double u = halton(i, 2);
        const double v = halton(i, 3);
        const Vec3 p = map_parameters(u, v);
        cloud.points.push_back(p);
        cloud.exact_normals.push_back(exact_normal(p));
    }
    cloud.source = name() + " halton n=" + std::to_string(n);
    return cloud;
}

double fill_distance(const PointCloud& cloud, const PointCloud& probe) {
    if (cloud.size() == 0 || probe.size() == 0)
        throw std::domain_error("fill_distance: empty input");
    const SpatialIndex index(cloud.points);
    double sup = 0.0;
    for (const Vec3& q : probe.points) sup = std::max(sup, index.nearest_distance(q));
    return sup;
}

PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw std::domain_error("add_noise: sigma must be >= 0");
    PointCloud out;
    out.points.reserve(cloud.size());
    out.source = cloud.source + " +noise";
    NormalSampler normal(seed);
    for (const Vec3& p : cloud.points)
        out.points.push_back(p + sigma * Vec3(normal(), normal(), normal()));
    return out;
}

PointCloud cube_cloud(std::size_t n, double edge, std::uint64_t seed) {
    if (n == 0 || edge <= 0) throw std::domain_error("cube_cloud: need n >= 1 and edge > 0");
    PointCloud cloud;
    cloud.points.reserve(n);
    cloud.exact_normals.reserve(n);
    NormalSampler rng(seed);
    const double half = 0.5 * edge;
    for (std::size_t i = 0; i < n; ++i) {
        const int face = static_cast<int>(rng.uniform01() * 6.0) % 6;
        const int axis = face / 2;
        const double sign = (face % 2 == 0) ? 1.0 : -1.0;
        Vec3 p;
        p[axis] = sign * half;
        p[(axis + 1) % 3] = (rng.uniform01() - 0.5) * edge;
        p[(axis + 2) % 3] = (rng.uniform01() - 0.5) * edge;
        cloud.points.push_back(p);
        Vec3 nrm = Vec3::Zero();
        nrm[axis] = sign;
        cloud.exact_normals.push_back(nrm);
    }
    cloud.source = "cube edge=" + std::to_string(edge);
    return cloud;
}

double cube_surface_distance(const Vec3& p, double edge) {
    const double half = 0.5 * edge;
    const Vec3 q = p.cwiseAbs() - Vec3::Constant(half);
    const double outside = q.cwiseMax(0.0).norm();
    const double inside = std::min(q.maxCoeff(), 0.0);
    return std::abs(outside + inside);
}

}  // namespace minsurf
