// One-body chain Hamiltonian H_n: symmetric tridiagonal with unit hoppings
// and external-field diagonal.  Provides the spectral factorization, the
// propagator rows F_jk(t) = (e^{-2i H_n t})_jk, resolvent columns of
// (-2H_n - z), the Combes-Thomas decay audit and the contour-integral
// cross-check of the propagator.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fibcone/potential.hpp"

namespace fibcone {

struct TridiagonalOperator {
    std::vector<double> diagonal; // V_1..V_n; all off-diagonal entries are 1
    std::size_t size() const { return diagonal.size(); }
};

TridiagonalOperator build_hamiltonian(const PotentialSpec& spec, std::size_t n);

// Full orthonormal factorization, eigenvalues ascending.  Eigenvectors are
// stored column-major: vector m occupies [m*n, (m+1)*n).
struct SpectralData {
    std::size_t n = 0;
    std::vector<double> eigenvalues;
    std::vector<double> vectors;

    double vec(std::size_t site, std::size_t m) const { return vectors[m * n + site]; }
};

// Implicit-shift QL iteration on the tridiagonal form; at most 50 sweeps per
// eigenvalue, non-convergence reports the offending index.
SpectralData eigensolve(const TridiagonalOperator& T, bool want_vectors = true);

struct PropagatorRow {
    double t = 0.0;
    std::size_t j = 1; // source site, 1-based
    std::vector<std::complex<double>> amplitudes; // F_j1 .. F_jn

    // sum_{k>N} |F_jk|^2
    double outside_probability(std::size_t N) const;
};

class Propagator {
public:
    explicit Propagator(SpectralData spectral) : s_(std::move(spectral)) {}
    PropagatorRow row(std::size_t j, double t) const;
    const SpectralData& spectral() const { return s_; }
    std::size_t size() const { return s_.n; }

private:
    SpectralData s_;
};

struct ResolventQuery {
    std::complex<double> z; // E + i eps, eps > 0
    std::size_t m = 1;      // column site, 1-based
};

// Solves (-2T - z) x = delta_m by tridiagonal elimination with partial
// pivoting; O(n).
std::vector<std::complex<double>> resolvent_column(const TridiagonalOperator& T,
                                                   const ResolventQuery& q);

struct CombesThomasRow {
    double eps;        // imaginary offset of z = E + i eps
    double d;          // min(dist(z, spectrum of -2T), 1)
    double rho;        // fitted decay rate of |R_lm| per site
    double rho_over_d;
};

// For each eps fits the exponential decay of |<delta_l, (-2T - z)^{-1} delta_m>|
// against |l - m| over the sampled pairs.
std::vector<CombesThomasRow> combes_thomas_report(
    const TridiagonalOperator& T, double E, std::span<const double> eps_list,
    std::span<const std::pair<std::size_t, std::size_t>> pair_samples);

struct RectangularContour {
    double half_width;  // rectangle spans [-half_width, half_width] on the real axis
    double half_height; // and [-half_height, half_height] on the imaginary axis
};

struct DunfordResult {
    std::complex<double> contour_value;
    std::complex<double> spectral_value;
    double difference;
};

// Evaluates F_jk(t) once through the spectral factorization and once as the
// contour integral -(1/2 pi i) \oint e^{itz} <delta_j, (-2T - z)^{-1} delta_k> dz
// over the rectangle (Gauss-Legendre panels, >= quad_points nodes total).
DunfordResult dunford_check(const TridiagonalOperator& T, std::size_t j, std::size_t k, double t,
                            const RectangularContour& contour, std::size_t quad_points);

// K = max{4, 2 lambda + 5}; the spectrum of -2H_n lies in [-K+1, K-1] for
// every n and phase.
double spectral_bound(double lambda);

} // namespace fibcone
