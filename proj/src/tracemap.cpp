#include "fibcone/tracemap.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "fibcone/errors.hpp"

namespace fibcone {

std::uint64_t fibonacci_number(int l) {
    if (l < 1) throw domain_error("fibonacci_number: l must be >= 1");
    if (l > 90) throw domain_error("fibonacci_number: overflow beyond l = 90");
    std::uint64_t a = 1, b = 1; // F_1, F_2
    for (int i = 3; i <= l; ++i) {
        const std::uint64_t c = a + b;
        a = b;
        b = c;
    }
    return b;
}

TransferMatrix transfer_matrix(const PotentialSpec& spec, std::complex<double> z, std::uint64_t m,
                               long double omega) {
    TransferMatrix P{1.0, 0.0, 0.0, 1.0};
    if (m == 0) return P;
    PotentialSpec s = spec;
    s.omega = static_cast<double>(omega);
    std::vector<double> V;
    if (spec.kind == PotentialKind::Fibonacci) {
        // evaluate at full phase precision rather than the double in the spec
        V.resize(m);
        for (std::uint64_t i = 1; i <= m; ++i) V[i - 1] = fib_value(i, spec.lambda, omega);
    } else {
        V = generate(s, m).values;
    }
    for (std::uint64_t i = 0; i < m; ++i) {
        const TransferMatrix step{z - V[i], -1.0, 1.0, 0.0};
        P = step * P;
    }
    return P;
}

ScaledComplex ScaledComplex::from(std::complex<double> v) {
    const double a = std::abs(v);
    if (a == 0.0) return {};
    return {v / a, std::log(a)};
}

std::complex<double> ScaledComplex::value() const {
    if (is_zero()) return {0.0, 0.0};
    return unit * std::exp(log_abs);
}

ScaledComplex scaled_mul(const ScaledComplex& x, const ScaledComplex& y) {
    if (x.is_zero() || y.is_zero()) return {};
    const std::complex<double> u = x.unit * y.unit;
    const double a = std::abs(u); // ~1; fold rounding into the exponent
    return {u / a, x.log_abs + y.log_abs + std::log(a)};
}

namespace {

// x + sign*y with |x| >= |y| assumed handled by caller
ScaledComplex combine(const ScaledComplex& big, const ScaledComplex& small, double sign) {
    const double diff = small.log_abs - big.log_abs;
    if (small.is_zero() || diff < -745.0) return big;
    const std::complex<double> w = big.unit + sign * small.unit * std::exp(diff);
    const double a = std::abs(w);
    if (a == 0.0) return {};
    return {w / a, big.log_abs + std::log(a)};
}

} // namespace

ScaledComplex scaled_add(const ScaledComplex& x, const ScaledComplex& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    return (x.log_abs >= y.log_abs) ? combine(x, y, 1.0) : combine(y, x, 1.0);
}

ScaledComplex scaled_sub(const ScaledComplex& x, const ScaledComplex& y) {
    if (y.is_zero()) return x;
    if (x.is_zero()) return {-y.unit, y.log_abs};
    if (x.log_abs >= y.log_abs) return combine(x, y, -1.0);
    ScaledComplex r = combine(y, x, -1.0);
    r.unit = -r.unit;
    return r;
}

std::complex<double> TraceOrbit::fricke_invariant(int M) const {
    const ScaledComplex& xp = x(M + 1);
    const ScaledComplex& xm = x(M);
    const ScaledComplex& xmm = x(M - 1);
    ScaledComplex s = scaled_add(scaled_mul(xp, xp), scaled_mul(xm, xm));
    s = scaled_add(s, scaled_mul(xmm, xmm));
    ScaledComplex prod = scaled_mul(scaled_mul(xp, xm), xmm);
    prod.log_abs += std::log(2.0);
    s = scaled_sub(s, prod);
    s = scaled_sub(s, ScaledComplex::from(1.0));
    return s.value();
}

TraceOrbit trace_orbit(std::complex<double> z, double lambda, int M_max) {
    if (M_max < 2) throw domain_error("trace_orbit: M_max must be >= 2");
    TraceOrbit orbit;
    orbit.z = z;
    orbit.lambda = lambda;
    orbit.values.reserve(M_max + 2);
    orbit.derivatives.reserve(M_max + 2);
    orbit.values = {ScaledComplex::from(1.0), ScaledComplex::from(z / 2.0),
                    ScaledComplex::from((z - lambda) / 2.0)};
    orbit.derivatives = {ScaledComplex::from(0.0), ScaledComplex::from(0.5),
                         ScaledComplex::from(0.5)};
    for (int M = 1; M < M_max; ++M) {
        const auto& xs = orbit.values;
        const auto& ds = orbit.derivatives;
        const std::size_t i = xs.size() - 1; // index of x_M
        ScaledComplex prod = scaled_mul(xs[i], xs[i - 1]);
        prod.log_abs += std::log(2.0);
        const ScaledComplex next = scaled_sub(prod, xs[i - 2]);
        ScaledComplex dterm = scaled_add(scaled_mul(ds[i], xs[i - 1]), scaled_mul(xs[i], ds[i - 1]));
        dterm.log_abs += std::log(2.0);
        const ScaledComplex dnext = scaled_sub(dterm, ds[i - 2]);
        if (!std::isfinite(next.log_abs) && !next.is_zero())
            throw numeric_failure("trace_orbit: overflow past index " + std::to_string(M));
        orbit.values.push_back(next);
        orbit.derivatives.push_back(dnext);
    }
    return orbit;
}

namespace {

// Plain extended-precision orbit for real E: trace value and derivative at a
// single index.  Safe without scaling because it is only used near band
// roots, where the orbit stays bounded.
void real_orbit(long double E, double lambda, int M, long double& x_out, long double& dx_out) {
    long double xm2 = 1.0L, xm1 = E / 2.0L, x = (E - lambda) / 2.0L;
    long double dm2 = 0.0L, dm1 = 0.5L, d = 0.5L;
    for (int i = 1; i < M; ++i) {
        const long double xn = 2.0L * x * xm1 - xm2;
        const long double dn = 2.0L * (d * xm1 + x * dm1) - dm2;
        xm2 = xm1; xm1 = x; x = xn;
        dm2 = dm1; dm1 = d; d = dn;
    }
    if (M == 0) { x_out = xm1; dx_out = dm1; return; }
    if (M == -1) { x_out = xm2; dx_out = dm2; return; }
    x_out = x;
    dx_out = d;
}

} // namespace

BandRoots band_roots(double lambda, int k) {
    if (k < 1) throw domain_error("band_roots: k must be >= 1");
    if (!(lambda > 0)) throw domain_error("band_roots: lambda must be > 0");
    const int M = (k <= 2) ? 1 : k - 1; // orbit index whose zeros are generation k
    const std::uint64_t count = fibonacci_number(k);

    std::vector<double> candidates;
    if (count == 1) {
        candidates = {lambda}; // x_1 = (E - lambda)/2
    } else {
        // Hermitian Bloch matrix at quarter-turn boundary phase: its
        // eigenvalues are exactly the zeros of the period-F_k half-trace.
        const auto p = static_cast<Eigen::Index>(count);
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            B(i, i) = fib_value(static_cast<std::uint64_t>(i) + 1, lambda, 0.0L);
        for (Eigen::Index i = 0; i + 1 < p; ++i) {
            B(i, i + 1) = 1.0;
            B(i + 1, i) = 1.0;
        }
        B(p - 1, 0) = std::complex<double>(0.0, 1.0);
        B(0, p - 1) = std::complex<double>(0.0, -1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw numeric_failure("band_roots: Bloch eigensolve failed at k = " + std::to_string(k));
        candidates.assign(es.eigenvalues().data(), es.eigenvalues().data() + p);
        std::sort(candidates.begin(), candidates.end());
    }

    BandRoots out;
    out.k = k;
    out.roots.reserve(candidates.size());
    out.derivative_magnitudes.reserve(candidates.size());
    out.residuals.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        // bracket at neighbor midpoints; the Bloch eigenvalue error is far
        // below the smallest root gap
        const double gap_lo = (i == 0) ? 1.0 : (candidates[i] - candidates[i - 1]) / 2.0;
        const double gap_hi = (i + 1 == candidates.size()) ? 1.0 : (candidates[i + 1] - candidates[i]) / 2.0;
        long double E = candidates[i];
        const long double lo = candidates[i] - gap_lo, hi = candidates[i] + gap_hi;
        long double x, dx;
        for (int iter = 0; iter < 60; ++iter) {
            real_orbit(E, lambda, M, x, dx);
            if (dx == 0.0L) break;
            const long double step = x / dx;
            long double next = E - step;
            if (next <= lo || next >= hi) next = (lo + hi) / 2.0L;
            if (next == E) break;
            E = next;
            if (std::abs((double)step) < 1e-21 * std::max(1.0, std::abs((double)E))) break;
        }
        real_orbit(E, lambda, M, x, dx);
        out.roots.push_back(static_cast<double>(E));
        out.derivative_magnitudes.push_back(std::abs(static_cast<double>(dx)));
        out.residuals.push_back(std::abs(static_cast<double>(x)));
    }
    for (std::size_t i = 0; i + 1 < out.roots.size(); ++i)
        if (!(out.roots[i] < out.roots[i + 1]))
            throw numeric_failure("band_roots: found " + std::to_string(out.roots.size()) +
                                  " candidates but roots " + std::to_string(i) + "," +
                                  std::to_string(i + 1) + " collapsed at k = " + std::to_string(k));
    return out;
}

AlphaPrimeEstimate alpha_prime(double lambda, int k_min, int k_max) {
    if (!(lambda > 0)) throw domain_error("alpha_prime: lambda must be > 0");
    if (k_min < 2) throw domain_error("alpha_prime: k_min must be >= 2");
    if (k_max < k_min + 2) throw domain_error("alpha_prime: k_max must be >= k_min + 2");

    AlphaPrimeEstimate est;
    est.lambda = lambda;
    est.k_min = k_min;
    est.k_max = k_max;
    std::vector<double> L; // log of the minimal derivative magnitude per generation
    for (int k = k_min; k <= k_max; ++k) {
        const BandRoots br = band_roots(lambda, k);
        const double dmin = *std::min_element(br.derivative_magnitudes.begin(),
                                              br.derivative_magnitudes.end());
        if (!(dmin > 0) || !std::isfinite(dmin))
            throw numeric_failure("alpha_prime: degenerate derivative minimum at k = " +
                                  std::to_string(k));
        L.push_back(std::log(dmin));
        est.y.push_back(L.back() / k);
    }
    const std::size_t m = L.size();
    // the increments of L oscillate with period two; their average estimates
    // the limit of y_k
    const double inc1 = L[m - 1] - L[m - 2];
    const double inc2 = L[m - 2] - L[m - 3];
    est.y_extrapolated = (inc1 + inc2) / 2.0;
    if (m >= 5) {
        const double prev1 = L[m - 3] - L[m - 4];
        const double prev2 = L[m - 4] - L[m - 5];
        const double wobble = std::abs(inc1 - prev1) + std::abs(inc2 - prev2);
        if (wobble > 0.1 * std::max(1.0, inc1 + inc2))
            throw numeric_failure("alpha_prime: no stabilization of derivative growth increments");
    }
    if (!(est.y_extrapolated > 0))
        throw numeric_failure("alpha_prime: nonpositive growth rate, no stabilization");
    est.alpha_prime = std::log(static_cast<double>(kGoldenMean)) / est.y_extrapolated;
    const auto [lo, hi] = prop_close_bounds(lambda);
    est.bracket_lower = lo;
    est.bracket_upper = hi;
    return est;
}

std::pair<std::optional<double>, std::optional<double>> prop_close_bounds(double lambda) {
    if (!(lambda > 0)) throw domain_error("prop_close_bounds: lambda must be > 0");
    const double logphi = std::log(static_cast<double>(kGoldenMean));
    std::optional<double> lower, upper;
    if (lambda > std::sqrt(24.0)) lower = 2.0 * logphi / std::log(2.0 * lambda + 22.0);
    if (lambda >= 8.0) {
        const double xi = 0.5 * (lambda - 4.0 + std::sqrt((lambda - 4.0) * (lambda - 4.0) - 12.0));
        upper = 2.0 * logphi / std::log(xi);
    }
    return {lower, upper};
}

GrowthFit growth_rate_check(double lambda, double E, double eps, int M_max) {
    if (!(eps > 0.0 && eps <= 1.0)) throw domain_error("growth_rate_check: eps must be in (0,1]");
    const double K = std::max(4.0, 2.0 * lambda + 5.0);
    if (!(E >= -K && E <= K)) throw domain_error("growth_rate_check: E outside [-K, K]");
    if (M_max < 2) throw domain_error("growth_rate_check: M_max must be >= 2");

    const TraceOrbit orbit = trace_orbit({E, eps}, lambda, M_max);
    GrowthFit fit;
    fit.M_max = M_max;
    for (int M0 = 1; M0 < M_max; ++M0) {
        double delta = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int M = M0 + 1; M <= M_max; ++M) {
            const double L = orbit.x(M).log_abs;
            if (!(L > 0)) {
                ok = false;
                break;
            }
            delta = std::min(delta,
                             std::expm1(L / static_cast<double>(fibonacci_number(M - M0))));
        }
        if (ok && delta >= 1e-3) {
            fit.found = true;
            fit.delta_hat = delta;
            fit.M0_hat = M0;
            return fit;
        }
    }
    return fit; // clean failure report
}

PhaseIndependenceReport phase_independence_check(double lambda, std::complex<double> z,
                                                 std::span<const long double> omegas, int M_max) {
    if (omegas.empty()) throw domain_error("phase_independence_check: empty phase grid");
    if (M_max < 3) throw domain_error("phase_independence_check: M_max must be >= 3");
    const TraceOrbit reference = trace_orbit(z, lambda, M_max);
    const PotentialSpec spec{PotentialKind::Fibonacci, lambda};

    PhaseIndependenceReport rep;
    rep.M_max = M_max;
    bool odd_ok = true, even_ok = true;
    for (const long double omega : omegas) {
        // each phase must match the omega=0 traces on one full parity class of
        // orbit indices in [3, M_max]; which class can vary with omega at
        // finite M, so the classes are intersected over the grid
        bool odd_here = true, even_here = true;
        for (int M = 3; M <= M_max; ++M) {
            const std::complex<double> x0 = reference.x(M).value();
            const double tol = 1e-9 * std::max(1.0, std::abs(x0));
            const TransferMatrix P = transfer_matrix(spec, z, fibonacci_number(M + 1), omega);
            const double dev = std::abs(0.5 * P.trace() - x0);
            if (M % 2) {
                rep.max_dev_odd = std::max(rep.max_dev_odd, dev);
                if (dev > tol) odd_here = false;
            } else {
                rep.max_dev_even = std::max(rep.max_dev_even, dev);
                if (dev > tol) even_here = false;
            }
        }
        if (!odd_here && !even_here)
            throw numeric_failure("phase_independence_check: a phase matches neither parity class");
        odd_ok = odd_ok && odd_here;
        even_ok = even_ok && even_here;
    }
    using Parity = PhaseIndependenceReport::Parity;
    if (odd_ok && even_ok) rep.passing = Parity::Both;
    else if (odd_ok) rep.passing = Parity::Odd;
    else if (even_ok) rep.passing = Parity::Even;
    else rep.passing = Parity::Mixed;
    return rep;
}

} // namespace fibcone
