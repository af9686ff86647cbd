// External magnetic field sequences for the XY chain: the Fibonacci
// circle-map field, its substitution-word equivalent, and the comparison
// families (free, periodic, i.i.d. random, random dimer).
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fibcone {

// Golden mean and its inverse, in extended precision.
inline const long double kSqrt5 = std::sqrt(5.0L);
inline const long double kGoldenMean = (1.0L + kSqrt5) / 2.0L;
inline const long double kInvGoldenMean = (kSqrt5 - 1.0L) / 2.0L;

enum class PotentialKind { Fibonacci, Free, Periodic, IidRandom, RandomDimer };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& s);

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Free;
    double lambda = 0.0;                 // coupling strength, >= 0
    double omega = 0.0;                  // phase in [0,1), Fibonacci only
    std::vector<double> period_values;   // periodic only, nonempty
    std::uint64_t seed = 0;              // random kinds only

    void validate() const;               // throws domain_error
    bool operator==(const PotentialSpec&) const = default;
};

void to_json(nlohmann::json& j, const PotentialSpec& s);
void from_json(const nlohmann::json& j, PotentialSpec& s);

struct PotentialSequence {
    std::vector<double> values;          // values[i] is V_{i+1} (sites count from 1)
    PotentialSpec spec;
};

// V_j = lambda * chi_[1-1/phi, 1)(j/phi + omega mod 1), evaluated through the
// floor-difference identity so that boundary membership is decided exactly
// (integer arithmetic plus one comparison accurate to ~1e-19).
double fib_value(std::uint64_t j, double lambda, long double omega);

// floor(j/phi + omega); exposed for the covariance tests.
std::int64_t floor_rotation(std::uint64_t j, long double omega);

// k-th iterate of the substitution a -> ab, b -> a, starting from "a".
// Length is F_k (F_1 = F_2 = 1).
std::string fib_word(int k);

// omega_l = omega + l/phi mod 1, so that V_{j+l}(omega) = V_j(omega_l).
long double shift_phase(long double omega, std::uint64_t l);

PotentialSequence generate(const PotentialSpec& spec, std::size_t n);

} // namespace fibcone
