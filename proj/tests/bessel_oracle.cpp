#include "bessel_oracle.hpp"

#include <mpfr.h>

#include <stdexcept>

namespace minsurf::testing {

namespace {

constexpr mpfr_prec_t kPrec = 256;

// I_nu(r) = sum_m (r/2)^{2m+nu} / (m! * Gamma(m+nu+1)); nu may be negative
// half-integer (Gamma poles sit only at non-positive integers, never hit).
// 300 terms overshoot convergence at 256 bits for every r used in tests.
void bessel_i_series(mpfr_t out, const mpfr_t nu, const mpfr_t r) {
    mpfr_t half_r, term_pow, gamma_arg, gamma_val, factorial, term, sum;
    mpfr_inits2(kPrec, half_r, term_pow, gamma_arg, gamma_val, factorial, term, sum,
                (mpfr_ptr) nullptr);

    mpfr_div_ui(half_r, r, 2, MPFR_RNDN);
    mpfr_set_ui(sum, 0, MPFR_RNDN);
    mpfr_set_ui(factorial, 1, MPFR_RNDN);

    for (unsigned m = 0; m < 300; ++m) {
        mpfr_set(term_pow, nu, MPFR_RNDN);
        mpfr_add_ui(term_pow, term_pow, 2 * m, MPFR_RNDN);
        mpfr_pow(term, half_r, term_pow, MPFR_RNDN);
        if (m > 0) mpfr_mul_ui(factorial, factorial, m, MPFR_RNDN);
        mpfr_div(term, term, factorial, MPFR_RNDN);
        mpfr_add_ui(gamma_arg, nu, m + 1, MPFR_RNDN);
        mpfr_gamma(gamma_val, gamma_arg, MPFR_RNDN);
        mpfr_div(term, term, gamma_val, MPFR_RNDN);
        mpfr_add(sum, sum, term, MPFR_RNDN);
    }
    mpfr_set(out, sum, MPFR_RNDN);
    mpfr_clears(half_r, term_pow, gamma_arg, gamma_val, factorial, term, sum, (mpfr_ptr) nullptr);
}

}  // namespace

double bessel_profile_oracle(int tau, int dim, double r) {
    if (r <= 0.0) throw std::domain_error("bessel_profile_oracle: r must be positive");
    if (dim != 1 && dim != 3) throw std::domain_error("bessel_profile_oracle: dim must be 1 or 3");
    const int two_nu = 2 * tau - dim;  // nu = two_nu / 2, odd by construction
    if (two_nu <= 0) throw std::domain_error("bessel_profile_oracle: nu must be positive");
    const int n = (two_nu - 1) / 2;  // nu = n + 1/2

    mpfr_t nu, neg_nu, rr, i_pos, i_neg, k, result;
    mpfr_inits2(kPrec, nu, neg_nu, rr, i_pos, i_neg, k, result, (mpfr_ptr) nullptr);
    mpfr_set_si(nu, two_nu, MPFR_RNDN);
    mpfr_div_ui(nu, nu, 2, MPFR_RNDN);
    mpfr_neg(neg_nu, nu, MPFR_RNDN);
    mpfr_set_d(rr, r, MPFR_RNDN);

    bessel_i_series(i_pos, nu, rr);
    bessel_i_series(i_neg, neg_nu, rr);

    // K_nu = pi/2 * (I_{-nu} - I_nu)/sin(pi*nu); sin(pi*(n+1/2)) = (-1)^n
    mpfr_sub(k, i_neg, i_pos, MPFR_RNDN);
    mpfr_const_pi(result, MPFR_RNDN);
    mpfr_mul(k, k, result, MPFR_RNDN);
    mpfr_div_ui(k, k, 2, MPFR_RNDN);
    if (n % 2 == 1) mpfr_neg(k, k, MPFR_RNDN);

    // times r^nu
    mpfr_pow(result, rr, nu, MPFR_RNDN);
    mpfr_mul(result, result, k, MPFR_RNDN);

    const double out = mpfr_get_d(result, MPFR_RNDN);
    mpfr_clears(nu, neg_nu, rr, i_pos, i_neg, k, result, (mpfr_ptr) nullptr);
    return out;
}

}  // namespace minsurf::testing
