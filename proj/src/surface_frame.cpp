#include "minsurf/surface_frame.hpp"

namespace minsurf {

SurfaceFrame frame_from_derivatives(const Vec3& grad, const Mat3& hess, const Vec3& orientation_ref) {
    const double gnorm = grad.norm();
    if (gnorm <= 1e-10) throw GeometryError("frame_from_derivatives: vanishing gradient");

    SurfaceFrame frame;
    frame.normal = grad / gnorm;
    if (frame.normal.dot(orientation_ref) < 0.0) frame.normal = -frame.normal;

    const Mat3 projector = Mat3::Identity() - frame.normal * frame.normal.transpose();
    const Mat3 shape_op = -(projector * hess * projector) / gnorm;

    Eigen::SelfAdjointEigenSolver<Mat3> eig(shape_op);
    const Vec3 evals = eig.eigenvalues();
    const Mat3 evecs = eig.eigenvectors();

    // The eigenvector most aligned with the normal carries the spurious
    // normal mode; at near-flat points it need not be the smallest eigenvalue.
    int normal_mode = 0;
    double best_align = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double align = std::abs(evecs.col(i).dot(frame.normal));
        if (align > best_align) {
            best_align = align;
            normal_mode = i;
        }
    }
    int t[2], ti = 0;
    for (int i = 0; i < 3; ++i)
        if (i != normal_mode) t[ti++] = i;

    if (evals(t[0]) >= evals(t[1])) {
        frame.kappa1 = evals(t[0]);
        frame.kappa2 = evals(t[1]);
        frame.dir1 = evecs.col(t[0]);
        frame.dir2 = evecs.col(t[1]);
    } else {
        frame.kappa1 = evals(t[1]);
        frame.kappa2 = evals(t[0]);
        frame.dir1 = evecs.col(t[1]);
        frame.dir2 = evecs.col(t[0]);
    }
    frame.gaussian = frame.kappa1 * frame.kappa2;
    frame.mean = 0.5 * (frame.kappa1 + frame.kappa2);

    const double dominant = std::max({std::abs(frame.kappa1), std::abs(frame.kappa2), 1.0});
    frame.dubious = std::abs(evals(normal_mode)) > 1e-4 * dominant;
    return frame;
}

double normal_error(const Vec3& estimated, const Vec3& exact) { return (estimated - exact).norm(); }

}  // namespace minsurf
