#pragma once

#include "minsurf/common.hpp"

namespace minsurf {

/// Normal and curvature data of a level set at one point.
struct SurfaceFrame {
    Vec3 normal = Vec3::Zero();
    double kappa1 = std::numeric_limits<double>::quiet_NaN();  // kappa1 >= kappa2
    double kappa2 = std::numeric_limits<double>::quiet_NaN();
    Vec3 dir1 = Vec3::Zero();
    Vec3 dir2 = Vec3::Zero();
    double gaussian = std::numeric_limits<double>::quiet_NaN();
    double mean = std::numeric_limits<double>::quiet_NaN();
    /// Set when the discarded shape-operator eigenvalue is not negligibly
    /// small next to the dominant curvature.
    bool dubious = false;
    bool has_curvature() const { return std::isfinite(kappa1); }
};

/// Builds a frame from the gradient and Hessian of a level-set function:
/// n = ∇F/‖∇F‖ (flipped toward orientation_ref), S = −P∇²F P/‖∇F‖ with
/// P = I − nnᵀ, principal curvatures from the two tangential eigenpairs.
/// Throws GeometryError when ‖∇F‖ ≤ 1e-10.
SurfaceFrame frame_from_derivatives(const Vec3& grad, const Mat3& hess, const Vec3& orientation_ref);

/// ‖n* − n‖₂ for two unit normals.
double normal_error(const Vec3& estimated, const Vec3& exact);

}  // namespace minsurf
