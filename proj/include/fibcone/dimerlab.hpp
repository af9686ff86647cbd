// Random-dimer comparison lab: the closed-form moment exponent of the dimer
// chain, the degradation arithmetic the Jordan-Wigner string sum imposes on
// power-law bounds, and seeded ensemble runs contrasting dimer, unpaired
// i.i.d., Fibonacci and free fields.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fibcone {

// beta^+(p) = max{0, 1 - 1/(2p)} for the random dimer chain.
double dimer_beta(double p);

// (p - 1/2)/(p - 1), from p beta^+(p) = p - 1/2; the string sum diverges at
// p <= 1.
double jw_degradation(double p);

struct EnsembleEstimate {
    double exponent = 0.0;
    double stderr_ = 0.0;
};

struct DimerReport {
    std::vector<double> p_grid;
    std::vector<double> formula;       // dimer_beta per p
    std::vector<double> degradation;   // jw_degradation per p (NaN where p <= 1)
    std::vector<EnsembleEstimate> dimer;
    std::vector<EnsembleEstimate> iid; // same +-lambda values, unpaired
    EnsembleEstimate fibonacci_control; // lambda = 8, p = 2
    EnsembleEstimate free_control;      // p = 2
    int ensemble_size = 0;
    std::uint64_t seed = 0;
    double lambda = 0.0;
};

nlohmann::json to_json(const DimerReport& r);

// Per-realization moment exponents via the transport machinery, ensemble
// averaged.  Realization seeds are derived from (seed, index), so the report
// is bitwise reproducible at any concurrency.
DimerReport ensemble_transport(std::size_t n, const std::vector<double>& t_grid,
                               const std::vector<double>& p_list, int ensemble_size, double lambda,
                               std::uint64_t seed, unsigned max_threads = 0);

} // namespace fibcone
