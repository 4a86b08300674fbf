#pragma once

#include "minsurf/common.hpp"

namespace minsurf {

/// Matérn-Sobolev kernel Φ_{τ,d}(r) = K_ν(r)·r^ν with ν = τ − d/2, evaluated
/// in closed form for the half-integer orders ν ∈ {1/2, 3/2, 5/2, 7/2, 9/2}.
///
/// All radial derivatives reduce to the same family at shifted orders via
/// d/dr[r^ν K_ν(r)] = −r^ν K_{ν−1}(r):
///
///     φ'(r)/r            = −φ_{ν−1}(r)
///     (φ''(r) − φ'(r)/r) = r²·φ_{ν−2}(r)
///
/// which keeps Gram and Hessian assembly free of cancellation near r = 0.
class MaternKernel {
  public:
    /// Throws std::invalid_argument unless d ∈ {1,3} and ν = τ − d/2 lands in
    /// the supported half-integer range.
    MaternKernel(int tau, int dim);

    int tau() const { return tau_; }
    int dim() const { return dim_; }
    double nu() const { return n_ + 0.5; }

    /// φ(r). r must be finite and ≥ 0; φ(0) = 2^{ν−1}Γ(ν).
    double eval(double r) const;

    /// φ'(r)/r. Finite limit at r = 0 requires ν > 1 (throws otherwise).
    double phi1_over_r(double r) const;

    /// φ'(r). Zero limit at r = 0 for ν > 1; kink (ν = 1/2) throws at r = 0.
    double phi1(double r) const;

    /// φ''(r). Finite at r = 0 for ν > 1 (throws for ν = 1/2 at r = 0).
    double phi2(double r) const;

    /// (φ''(r) − φ'(r)/r)/r² = φ_{ν−2}(r); the rank-one Hessian factor.
    /// r = 0 requires ν > 2.
    double phi2m1_over_r2(double r) const;

    /// −φ_{ν−3}(r) = (g''(r)·r − g'(r))/r³ with g = φ'/r; third-derivative
    /// factor used by Hermite basis Hessians. r > 0 only.
    double phi3_factor(double r) const;

    /// φ_{k+1/2}(r) for order index k (possibly negative); exposed for tests.
    static double phi_order(int order_index, double r);

  private:
    int tau_;
    int dim_;
    int n_;  // nu = n + 1/2
};

/// True iff Φ_{τ+1,3} and Φ_{τ,1} agree to 1e-12 relative on a fixed r grid.
bool dimension_shift_check(int tau);

/// Shared grid comparison used by dimension_shift_check.
bool kernels_match_on_grid(const MaternKernel& a, const MaternKernel& b, double rel_tol = 1e-12);

}  // namespace minsurf
