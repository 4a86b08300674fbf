#pragma once

#include "minsurf/surface_frame.hpp"
#include "minsurf/trial_space.hpp"

namespace minsurf {

/// A trial-space element with solved coefficients; evaluates the implicit
/// function, its first two derivatives and the induced surface frame.
class FittedImplicit {
  public:
    FittedImplicit(TrialSpaceAssembly assembly, VectorXd lambda)
        : assembly_(std::move(assembly)), lambda_(std::move(lambda)) {
        if (lambda_.size() != assembly_.basis_count())
            throw std::invalid_argument("FittedImplicit: coefficient length mismatch");
    }

    const TrialSpaceAssembly& assembly() const { return assembly_; }
    const VectorXd& coefficients() const { return lambda_; }

    double value(const Vec3& x) const { return assembly_.value(x, lambda_); }
    Vec3 gradient(const Vec3& x) const { return assembly_.gradient(x, lambda_); }
    Mat3 hessian(const Vec3& x) const { return assembly_.hessian(x, lambda_); }
    bool curvature_supported() const { return assembly_.hessian_supported(); }

    /// Frame of the fitted level set at x. Requires ‖∇F(x)‖ > 1e-10 and a
    /// kernel smooth enough for Hessians.
    SurfaceFrame frame(const Vec3& x, const Vec3& orientation_ref) const {
        return frame_from_derivatives(gradient(x), hessian(x), orientation_ref);
    }

    /// Normal-only frame; works for every supported kernel order.
    SurfaceFrame normal_frame(const Vec3& x, const Vec3& orientation_ref) const;

  private:
    TrialSpaceAssembly assembly_;
    VectorXd lambda_;
};

}  // namespace minsurf
