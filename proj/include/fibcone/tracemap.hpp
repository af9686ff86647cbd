// Transfer matrices of the chain, the trace-map orbit x_{M+1} = 2 x_M x_{M-1}
// - x_{M-2} with its differentiated companion, band-root localization at each
// generation, the derivative-growth exponent alpha' that pins the light-cone
// power, and the closed-form bounds bracketing it.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fibcone/potential.hpp"

namespace fibcone {

// F_1 = F_2 = 1; overflows 64-bit beyond l = 90.
std::uint64_t fibonacci_number(int l);

struct TransferMatrix {
    std::complex<double> a, b, c, d; // row-major ((a,b),(c,d))

    std::complex<double> trace() const { return a + d; }
    std::complex<double> determinant() const { return a * d - b * c; }
    TransferMatrix operator*(const TransferMatrix& rhs) const {
        return {a * rhs.a + b * rhs.c, a * rhs.b + b * rhs.d,
                c * rhs.a + d * rhs.c, c * rhs.b + d * rhs.d};
    }
};

// Product of one-step matrices ((z - V_i, -1), (1, 0)) for i = 1..m, so that
// (u(m+1), u(m))^T = Phi_m (u(1), u(0))^T for solutions of H(omega) u = z u.
TransferMatrix transfer_matrix(const PotentialSpec& spec, std::complex<double> z, std::uint64_t m,
                               long double omega);

// Complex number carried as unit * exp(log_abs); survives the doubly
// exponential trace-map growth without overflow.
struct ScaledComplex {
    std::complex<double> unit{0.0, 0.0}; // modulus 1, or 0 for the zero value
    double log_abs = -std::numeric_limits<double>::infinity();

    static ScaledComplex from(std::complex<double> v);
    std::complex<double> value() const; // overflows to inf beyond double range
    bool is_zero() const { return unit == std::complex<double>(0.0, 0.0); }
};

ScaledComplex scaled_mul(const ScaledComplex& x, const ScaledComplex& y);
ScaledComplex scaled_add(const ScaledComplex& x, const ScaledComplex& y);
ScaledComplex scaled_sub(const ScaledComplex& x, const ScaledComplex& y);

// Orbit entries x_{-1}..x_{M_max} and E-derivatives, seeds x_{-1} = 1,
// x_0 = z/2, x_1 = (z - lambda)/2 (Fricke invariant exactly lambda^2/4).
// Entry x_M is the half-trace of the transfer product over F_{M+1} sites at
// omega = 0.
struct TraceOrbit {
    std::complex<double> z;
    double lambda = 0.0;
    std::vector<ScaledComplex> values;      // index i holds x_{i-1}
    std::vector<ScaledComplex> derivatives; // d/dE at fixed Im z

    const ScaledComplex& x(int M) const { return values.at(static_cast<std::size_t>(M + 1)); }
    const ScaledComplex& dx(int M) const { return derivatives.at(static_cast<std::size_t>(M + 1)); }
    int max_index() const { return static_cast<int>(values.size()) - 2; }

    // x_{M+1}^2 + x_M^2 + x_{M-1}^2 - 2 x_{M+1} x_M x_{M-1} - 1, which stays
    // at lambda^2/4 along the orbit.
    std::complex<double> fricke_invariant(int M) const;
};

TraceOrbit trace_orbit(std::complex<double> z, double lambda, int M_max);

// All F_k real zeros of the generation-k half-trace (orbit index k-1 for
// k >= 2).  Candidates come from the Hermitian Bloch matrix at quarter-turn
// boundary phase, whose eigenvalues are exactly those zeros; each candidate is
// polished by a bracket-safeguarded Newton iteration in extended precision.
struct BandRoots {
    int k = 0;
    std::vector<double> roots;                 // ascending
    std::vector<double> derivative_magnitudes; // |x'_k| at each root
    std::vector<double> residuals;             // |x_k| at each polished root
};

BandRoots band_roots(double lambda, int k);

struct AlphaPrimeEstimate {
    double lambda = 0.0;
    int k_min = 0, k_max = 0;
    std::vector<double> y;   // y_k = (1/k) log min_j |x'_k|, k = k_min..k_max
    double y_extrapolated = 0.0;
    double alpha_prime = 0.0;
    std::optional<double> bracket_lower, bracket_upper;
};

AlphaPrimeEstimate alpha_prime(double lambda, int k_min, int k_max);

// Closed-form bounds: lower 2 log(phi)/log(2 lambda + 22) for lambda > sqrt(24),
// upper 2 log(phi)/log(xi) with xi = (lambda - 4 + sqrt((lambda-4)^2 - 12))/2
// for lambda >= 8.
std::pair<std::optional<double>, std::optional<double>> prop_close_bounds(double lambda);

struct GrowthFit {
    bool found = false;
    double delta_hat = 0.0;
    int M0_hat = 0;
    int M_max = 0;
};

// Smallest M0 and largest delta >= 1e-3 with |x_M(E + i eps)| >= (1+delta)^{F_{M-M0}}
// for all M0 < M <= M_max.
GrowthFit growth_rate_check(double lambda, double E, double eps, int M_max);

struct PhaseIndependenceReport {
    // Odd/Even: that class matches omega=0 for every phase in the grid.
    // Both: trivial grids (omega = 0 only, or lambda = 0).  Mixed: every
    // phase matches one class, but which class varies across the grid (the
    // exceptional windows at finite M).
    enum class Parity { Odd, Even, Both, Mixed };
    Parity passing = Parity::Both;
    int M_max = 0;
    double max_dev_odd = 0.0;  // worst relative deviation across odd M >= 3
    double max_dev_even = 0.0;
};

// Checks x_M(z, omega) = x_M(z, 0) over the phase grid on orbit indices in
// [3, M_max].  A phase matching neither parity class is a convention failure
// and throws.
PhaseIndependenceReport phase_independence_check(double lambda, std::complex<double> z,
                                                 std::span<const long double> omegas, int M_max);

} // namespace fibcone
