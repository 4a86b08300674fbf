#include "minsurf/differential.hpp"

namespace minsurf {

SurfaceFrame FittedImplicit::normal_frame(const Vec3& x, const Vec3& orientation_ref) const {
    const Vec3 grad = gradient(x);
    const double gnorm = grad.norm();
    if (gnorm <= 1e-10) throw GeometryError("normal_frame: vanishing gradient");
    SurfaceFrame frame;
    frame.normal = grad / gnorm;
    if (frame.normal.dot(orientation_ref) < 0.0) frame.normal = -frame.normal;
    return frame;
}

}  // namespace minsurf
