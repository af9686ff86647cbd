// Test-only oracle: the half-line free-chain propagator in closed form,
//   (e^{-2iHt})_{jk} = (-i)^{k-j} J_{k-j}(4t) - (-i)^{k+j} J_{k+j}(4t),
// via the method of images for the discrete Laplacian with Dirichlet wall.
// Backed by GSL Bessel functions; independent of the spectral code path.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

namespace fibcone::testing {

inline std::complex<double> minus_i_pow(long long p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, -1};
        case 2: return {-1, 0};
        default: return {0, 1};
    }
}

inline std::complex<double> bessel_J(long long order, double x) {
    [[maybe_unused]] static auto* old_handler = gsl_set_error_handler_off();
    // J_{-m}(x) = (-1)^m J_m(x)
    const long long m = order < 0 ? -order : order;
    gsl_sf_result res;
    const int status = gsl_sf_bessel_Jn_e(static_cast<int>(m), x, &res);
    double v = (status == GSL_EUNDRFLW) ? 0.0 : res.val;
    if (order < 0 && (m % 2)) v = -v;
    return {v, 0};
}

inline std::vector<std::complex<double>> free_halfline_row(std::size_t j, std::size_t n, double t) {
    std::vector<std::complex<double>> row(n);
    const double x = 4.0 * t;
    for (std::size_t k = 1; k <= n; ++k) {
        const long long diff = static_cast<long long>(k) - static_cast<long long>(j);
        const long long sum = static_cast<long long>(k) + static_cast<long long>(j);
        row[k - 1] = minus_i_pow(diff) * bessel_J(diff, x) - minus_i_pow(sum) * bessel_J(sum, x);
    }
    return row;
}

} // namespace fibcone::testing
