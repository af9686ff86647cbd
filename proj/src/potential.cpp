#include "fibcone/potential.hpp"

#include <algorithm>
#include <cmath>

#include "fibcone/errors.hpp"

namespace fibcone {
namespace {

// Integer square root of a 128-bit value (largest m with m*m <= x).
std::uint64_t isqrt_u128(unsigned __int128 x) {
    auto m = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
    while (m > 0 && static_cast<unsigned __int128>(m) * m > x) --m;
    while (static_cast<unsigned __int128>(m + 1) * (m + 1) <= x) ++m;
    return m;
}

// SplitMix64; the counter-based generator behind the random field kinds.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Sign draw keyed on (seed, counter); order of evaluation never matters.
double keyed_sign(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t v = splitmix64(seed ^ splitmix64(counter + 1));
    return (v >> 63) ? 1.0 : -1.0;
}

} // namespace

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::Fibonacci: return "fibonacci";
        case PotentialKind::Free: return "free";
        case PotentialKind::Periodic: return "periodic";
        case PotentialKind::IidRandom: return "iid_random";
        case PotentialKind::RandomDimer: return "random_dimer";
    }
    throw domain_error("unknown potential kind");
}

PotentialKind potential_kind_from_string(const std::string& s) {
    if (s == "fibonacci") return PotentialKind::Fibonacci;
    if (s == "free") return PotentialKind::Free;
    if (s == "periodic") return PotentialKind::Periodic;
    if (s == "iid_random") return PotentialKind::IidRandom;
    if (s == "random_dimer") return PotentialKind::RandomDimer;
    throw domain_error("unknown potential kind '" + s + "'");
}

void PotentialSpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw domain_error("potential.lambda must be >= 0 and finite");
    if (!(omega >= 0.0 && omega < 1.0))
        throw domain_error("potential.omega must lie in [0,1)");
    if (kind == PotentialKind::Periodic && period_values.empty())
        throw domain_error("potential.period_values must be nonempty for the periodic kind");
}

void to_json(nlohmann::json& j, const PotentialSpec& s) {
    j = nlohmann::json{{"kind", to_string(s.kind)},
                       {"lambda", s.lambda},
                       {"omega", s.omega},
                       {"seed", s.seed},
                       {"period_values", s.period_values}};
}

void from_json(const nlohmann::json& j, PotentialSpec& s) {
    s = PotentialSpec{};
    if (j.contains("kind")) s.kind = potential_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("lambda")) s.lambda = j.at("lambda").get<double>();
    if (j.contains("omega")) s.omega = j.at("omega").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("period_values")) s.period_values = j.at("period_values").get<std::vector<double>>();
}

std::int64_t floor_rotation(std::uint64_t j, long double omega) {
    if (!(omega >= 0.0L && omega < 1.0L)) throw domain_error("omega must lie in [0,1)");
    if (j == 0) return 0;
    if (j > 1000000000000000000ULL) throw domain_error("site index too large");
    // j/phi = (j*sqrt(5) - j)/2.  With m = floor(j*sqrt(5)) and
    // theta = frac(j*sqrt(5)) in (0,1):
    //   floor(j/phi + omega) = floor((q + 2*omega + theta)/2),  q = m - j.
    const unsigned __int128 jj = j;
    const std::uint64_t m = isqrt_u128(5 * jj * jj);
    const std::uint64_t q = m - j; // m >= 2j since sqrt(5) > 2
    // theta = (5 j^2 - m^2)/(j sqrt(5) + m): numerator exact, so the absolute
    // error is ~1e-19 rather than the ~j*1e-19 of the naive product.
    const unsigned __int128 num = 5 * jj * jj - static_cast<unsigned __int128>(m) * m;
    const long double theta =
        static_cast<long double>(num) / (static_cast<long double>(j) * kSqrt5 + static_cast<long double>(m));
    const long double two_omega = 2.0L * omega;
    const std::uint64_t u = (two_omega >= 1.0L) ? 1 : 0; // exact: omega is a binary fraction
    const long double v = two_omega - static_cast<long double>(u);
    const std::uint64_t r = q + u;
    if (r % 2 == 0) return static_cast<std::int64_t>(r / 2);
    // odd r: one extra unit iff theta + v >= 1
    return static_cast<std::int64_t>(r / 2) + ((theta >= 1.0L - v) ? 1 : 0);
}

double fib_value(std::uint64_t j, double lambda, long double omega) {
    if (j < 1) throw domain_error("site index must be >= 1");
    const std::int64_t step = floor_rotation(j + 1, omega) - floor_rotation(j, omega);
    return step ? lambda : 0.0;
}

std::string fib_word(int k) {
    if (k < 1) throw domain_error("fib_word: k must be >= 1");
    if (k > 40) throw domain_error("fib_word: k > 40 not supported");
    // |fib_word(k)| = F_k with F_1 = F_2 = 1, so k = 1, 2 are both the seed.
    std::string w = "a";
    for (int i = 3; i <= k; ++i) {
        std::string next;
        next.reserve(2 * w.size());
        for (char c : w) next += (c == 'a') ? "ab" : "a";
        w = std::move(next);
    }
    return w;
}

long double shift_phase(long double omega, std::uint64_t l) {
    if (!(omega >= 0.0L && omega < 1.0L)) throw domain_error("omega must lie in [0,1)");
    if (l == 0) return omega;
    // frac(l/phi) through the same integer decomposition as floor_rotation.
    const unsigned __int128 ll = l;
    const std::uint64_t m = isqrt_u128(5 * ll * ll);
    const unsigned __int128 num = 5 * ll * ll - static_cast<unsigned __int128>(m) * m;
    const long double theta =
        static_cast<long double>(num) / (static_cast<long double>(l) * kSqrt5 + static_cast<long double>(m));
    const std::uint64_t q = m - l;
    const long double frac_l = (q % 2 == 0) ? theta / 2.0L : (1.0L + theta) / 2.0L;
    long double result = omega + frac_l;
    if (result >= 1.0L) result -= 1.0L;
    return result;
}

PotentialSequence generate(const PotentialSpec& spec, std::size_t n) {
    spec.validate();
    if (n < 1) throw domain_error("generate: n must be >= 1");
    PotentialSequence seq;
    seq.spec = spec;
    seq.values.resize(n);
    switch (spec.kind) {
        case PotentialKind::Free:
            std::fill(seq.values.begin(), seq.values.end(), 0.0);
            break;
        case PotentialKind::Fibonacci:
            for (std::size_t i = 0; i < n; ++i)
                seq.values[i] = fib_value(i + 1, spec.lambda, static_cast<long double>(spec.omega));
            break;
        case PotentialKind::Periodic:
            for (std::size_t i = 0; i < n; ++i)
                seq.values[i] = spec.period_values[i % spec.period_values.size()];
            break;
        case PotentialKind::IidRandom:
            for (std::size_t i = 0; i < n; ++i)
                seq.values[i] = spec.lambda * keyed_sign(spec.seed, i + 1);
            break;
        case PotentialKind::RandomDimer:
            for (std::size_t i = 0; i < n; ++i)
                seq.values[i] = spec.lambda * keyed_sign(spec.seed, i / 2 + 1);
            break;
    }
    return seq;
}

} // namespace fibcone
