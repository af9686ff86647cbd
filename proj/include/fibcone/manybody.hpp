// Many-body commutator surrogates built from one-body propagator rows: the
// exact lower bound |F_jj'|, the fermionic amplitude envelope, the spin
// envelope that absorbs the Jordan-Wigner string, light-cone front scans and
// power-law cone fits, and the three-way exponent consistency report.
// All outputs are the ||B||-stripped coefficients of the bounds.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fibcone/onebody.hpp"
#include "fibcone/potential.hpp"
#include "fibcone/tracemap.hpp"
#include "fibcone/transport.hpp"

namespace fibcone {

// 2 sum_{k >= j'} |F_jk(t)| for the row of source j.
double fermionic_envelope(const PropagatorRow& row, std::size_t j_prime);

// 4 sum_{l<=j} sum_{k>=j'} |F_lk(t)|; adjoint contributions are folded in
// analytically (equal magnitudes for a real symmetric generator).
double spin_envelope(const Propagator& propagator, std::size_t j, std::size_t j_prime, double t);

struct CommutatorBounds {
    double t = 0.0;
    std::size_t j = 0, j_prime = 0;
    double lower = 0.0;         // |F_jj'(t)|
    double fermi_envelope = 0.0;
    double spin_envelope = 0.0;
};

CommutatorBounds commutator_bounds(const Propagator& propagator, std::size_t j,
                                   std::size_t j_prime, double t);

enum class ConeQuantity { Lower, Fermi, Spin };

std::string to_string(ConeQuantity q);
ConeQuantity cone_quantity_from_string(const std::string& s);

struct TailSample {
    double t = 0.0;
    double front = 0.0;
    std::vector<double> distances; // beyond the front
    std::vector<double> values;    // quantity at those distances
};

struct FrontTable {
    double epsilon = 0.0;
    ConeQuantity quantity = ConeQuantity::Spin;
    double lambda = 0.0;
    std::vector<double> times;
    std::vector<double> fronts;      // minimal d with quantity < eps for all d' >= d
    std::vector<TailSample> tails;   // sampled decay profiles beyond the front
};

// Source site is 1.  Fronts are the suffix condition "stays below eps"; the
// scan fails if a front comes within 20 sites of the right boundary.
FrontTable cone_scan(const PotentialSpec& spec, std::size_t n, std::span<const double> t_grid,
                     double epsilon, ConeQuantity quantity, unsigned max_threads = 0);

struct ConeFit {
    double lambda = 0.0;
    double alpha = 0.0;  // front exponent
    double v = 0.0;      // front prefactor
    double mu = 0.0;     // decay rate beyond the front
    double alpha_stderr = 0.0;
    double rel_residual = 0.0;
    double epsilon = 0.0;
    std::string quantity;
    bool localized = false; // alpha indistinguishable from zero
    double window_lo = 0.0, window_hi = 0.0;
};

nlohmann::json to_json(const ConeFit& f);

// Two-stage fit: (alpha, v) by least squares of log front against log t over
// the window (running maximum first), mu from the sampled tails.  Refuses
// fits with relative residual above 0.2.
ConeFit cone_fit(const FrontTable& table, std::pair<double, double> window);

struct ConsistencyReport {
    double lambda = 0.0;
    double cone_alpha = 0.0;
    double front_alpha_u = 0.0;
    double alpha_prime = 0.0;
    double max_pairwise_difference = 0.0;
    double tolerance = 0.15;
    bool pass = false;
};

nlohmann::json to_json(const ConsistencyReport& r);

// The fitted cone exponent, the front-based transport estimate and the
// trace-map growth exponent must agree pairwise within the tolerance.
ConsistencyReport consistency_report(double lambda, const ConeFit& cone,
                                     const AlphaPrimeEstimate& alpha_prime_est,
                                     const ExponentFit& front_estimate, double tolerance = 0.15);

} // namespace fibcone
