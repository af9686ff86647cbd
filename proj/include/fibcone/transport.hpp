// Wavepacket transport from site 1: outside probabilities P(N,t), position
// moments |X|^p(t), Abel time-averages, and the finite-window exponent
// estimators standing in for the limsup transport exponents.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fibcone/onebody.hpp"
#include "fibcone/potential.hpp"

namespace fibcone {

// sum_{k>N} |F_jk(t)|^2
double outside_probability(const PropagatorRow& row, std::size_t N);

// sum_{k>=1} k^p |F_jk(t)|^2
double moment(const PropagatorRow& row, double p);

// Amplitude magnitudes from source site 1 over a time grid; rows are
// computed independently per time and assembled by index.
class TransportSeries {
public:
    TransportSeries(const PotentialSpec& spec, std::size_t n, std::vector<double> times,
                    double boundary_tolerance = 1e-10, unsigned max_threads = 0);

    std::size_t n() const { return n_; }
    const std::vector<double>& times() const { return times_; }
    const PotentialSpec& spec() const { return spec_; }
    double boundary_tolerance() const { return boundary_tolerance_; }

    std::span<const double> magnitudes(std::size_t time_index) const;
    double outside_probability(std::size_t time_index, std::size_t N) const;
    double moment(std::size_t time_index, double p) const;

    // min{N : P(N,t) <= eps}
    std::size_t front_site(std::size_t time_index, double eps) const;

private:
    PotentialSpec spec_;
    std::size_t n_;
    std::vector<double> times_;
    std::vector<double> magnitudes_; // row-major, [ti * n + k]
    double boundary_tolerance_;
};

struct AbelAverage {
    double value = 0.0;
    double truncation_bound = 0.0; // (2/T) e^{-2 t_max / T} sup|f|
};

// (2/T) \int_0^\infty e^{-2t/T} f(t) dt by composite trapezoid on the sample
// grid; requires t_max >= 10 T so the truncated tail is negligible.
AbelAverage abel_average(std::span<const double> times, std::span<const double> values, double T);

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double stderr_ = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    std::string method;
    double lambda = 0.0; // coupling of the underlying run
};

nlohmann::json to_json(const ExponentFit& f);

// Least-squares slope of log|X|^p (running maximum, limsup surrogate) against
// p log t; `averaged` uses the Abel time-average over admissible T instead.
ExponentFit beta_estimator(const TransportSeries& series, double p,
                           std::pair<double, double> window, bool averaged);

struct FrontRadius {
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> radii;
};

// r_eps(t) = min{N : P(N,t) <= eps}
FrontRadius front_radius(const TransportSeries& series, double eps);

// Maximum over thresholds of the front log-log slope; a finite-window
// estimator of the upper transport exponent, not the limsup itself.
ExponentFit alpha_u_estimator(const TransportSeries& series, std::span<const double> eps_list,
                              std::pair<double, double> window);

} // namespace fibcone
