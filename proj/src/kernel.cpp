#include "minsurf/kernel.hpp"

#include <cmath>
#include <limits>

namespace minsurf {

namespace {

constexpr double kSqrtHalfPi = 1.2533141373155002512078826424055;  // sqrt(pi/2)

// Row q holds the coefficients of K_{q+1/2}(r)·√(2r/π)·e^{r}, i.e.
// Σ_k coeff[q][k]·r^{-k}, with coeff[q][k] = (q+k)!/(k!(q−k)!)·2^{−k}.
constexpr double kCoeff[5][5] = {
    {1, 0, 0, 0, 0},
    {1, 1, 0, 0, 0},
    {1, 3, 3, 0, 0},
    {1, 6, 15, 15, 0},
    {1, 10, 45, 105, 105},
};

// φ_{n+1/2}(r) = √(π/2)·e^{−r}·Σ_k c_k·r^{n−k} where the coefficient row is
// q = n for n ≥ 0 and q = −n−1 for n < 0 (K_{−ν} = K_ν).
double phi_half_integer(int n, double r) {
    const int q = (n >= 0) ? n : -n - 1;
    if (q > 4) throw std::invalid_argument("MaternKernel: unsupported order shift");
    if (n >= 0) {
        // Horner over descending powers r^n ... r^0
        double p = kCoeff[q][0];
        for (int k = 1; k <= q; ++k) p = p * r + kCoeff[q][k];
        // remaining factor r^{n-q} = 1 here (q = n)
        return kSqrtHalfPi * std::exp(-r) * p;
    }
    if (r <= 0.0) throw std::domain_error("MaternKernel: negative-order profile needs r > 0");
    const double inv_r = 1.0 / r;
    double p = kCoeff[q][q];
    for (int k = q - 1; k >= 0; --k) p = p * inv_r + kCoeff[q][k];
    // p = Σ c_k r^{-k}; remaining factor r^n
    return kSqrtHalfPi * std::exp(-r) * p * std::pow(r, n);
}

void check_r(double r) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw std::domain_error("MaternKernel: radius must be finite and nonnegative");
}

}  // namespace

MaternKernel::MaternKernel(int tau, int dim) : tau_(tau), dim_(dim) {
    if (dim != 1 && dim != 3) throw std::invalid_argument("MaternKernel: dim must be 1 or 3");
    // nu = tau - dim/2 = n + 1/2
    n_ = (dim == 3) ? tau - 2 : tau - 1;
    if (n_ < 0 || n_ > 4)
        throw std::invalid_argument("MaternKernel: tau=" + std::to_string(tau) + ", dim=" +
                                    std::to_string(dim) + " outside the supported order range");
}

double MaternKernel::phi_order(int order_index, double r) { return phi_half_integer(order_index, r); }

double MaternKernel::eval(double r) const {
    check_r(r);
    return phi_half_integer(n_, r);
}

double MaternKernel::phi1_over_r(double r) const {
    check_r(r);
    if (r == 0.0 && n_ < 1)
        throw std::domain_error("MaternKernel: phi'/r singular at r=0 for nu <= 1");
    return -phi_half_integer(n_ - 1, r);
}

double MaternKernel::phi1(double r) const {
    check_r(r);
    if (r == 0.0) {
        if (n_ < 1) throw std::domain_error("MaternKernel: phi' undefined at r=0 for nu = 1/2");
        return 0.0;
    }
    return -r * phi_half_integer(n_ - 1, r);
}

double MaternKernel::phi2(double r) const {
    check_r(r);
    if (r == 0.0) {
        if (n_ < 1) throw std::domain_error("MaternKernel: phi'' undefined at r=0 for nu = 1/2");
        return -phi_half_integer(n_ - 1, 0.0);
    }
    return -phi_half_integer(n_ - 1, r) + r * r * phi_half_integer(n_ - 2, r);
}

double MaternKernel::phi2m1_over_r2(double r) const {
    check_r(r);
    if (r == 0.0) {
        if (n_ < 2)
            throw std::domain_error("MaternKernel: Hessian factor singular at r=0 for nu <= 2");
        return phi_half_integer(n_ - 2, 0.0);
    }
    return phi_half_integer(n_ - 2, r);
}

double MaternKernel::phi3_factor(double r) const {
    check_r(r);
    if (r == 0.0) {
        if (n_ < 3)
            throw std::domain_error("MaternKernel: third-order factor singular at r=0 for nu <= 3");
        return -phi_half_integer(n_ - 3, 0.0);
    }
    return -phi_half_integer(n_ - 3, r);
}

bool kernels_match_on_grid(const MaternKernel& a, const MaternKernel& b, double rel_tol) {
    for (int i = 0; i < 50; ++i) {
        const double r = 0.01 + (10.0 - 0.01) * static_cast<double>(i) / 49.0;
        const double va = a.eval(r);
        const double vb = b.eval(r);
        if (std::abs(va - vb) > rel_tol * std::max(std::abs(va), std::abs(vb))) return false;
    }
    return true;
}

bool dimension_shift_check(int tau) {
    if (tau < 1) throw std::invalid_argument("dimension_shift_check: tau must be >= 1");
    return kernels_match_on_grid(MaternKernel(tau + 1, 3), MaternKernel(tau, 1));
}

}  // namespace minsurf
