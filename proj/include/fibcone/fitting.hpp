// Least-squares line fits used by every exponent estimator.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "fibcone/errors.hpp"

namespace fibcone {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double rel_residual = 0.0; // rms(residual) / rms(y - mean), in [0,1] for sane fits
    std::size_t npoints = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw domain_error("fit_line: need >= 2 matching points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw domain_error("fit_line: degenerate abscissa");
    LineFit f;
    f.npoints = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.slope_stderr = (n > 2) ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    f.rel_residual = (syy > 0) ? std::sqrt(ssr / syy) : 0.0;
    return f;
}

// Replace y by its running maximum along the index order; the finite-window
// stand-in for limsup-type exponents.
inline void running_maximum(std::span<double> y) {
    double m = -std::numeric_limits<double>::infinity();
    for (double& v : y) {
        m = std::max(m, v);
        v = m;
    }
}

} // namespace fibcone
