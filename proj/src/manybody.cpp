#include "fibcone/manybody.hpp"

#include <algorithm>
#include <cmath>

#include "fibcone/errors.hpp"
#include "fibcone/fitting.hpp"
#include "fibcone/parallel.hpp"

namespace fibcone {

double fermionic_envelope(const PropagatorRow& row, std::size_t j_prime) {
    if (j_prime < 1 || j_prime > row.amplitudes.size())
        throw domain_error("fermionic_envelope: target site out of range");
    double sum = 0.0;
    for (std::size_t k = j_prime - 1; k < row.amplitudes.size(); ++k)
        sum += std::abs(row.amplitudes[k]);
    return 2.0 * sum;
}

double spin_envelope(const Propagator& propagator, std::size_t j, std::size_t j_prime, double t) {
    if (!(j >= 1 && j < j_prime && j_prime <= propagator.size()))
        throw domain_error("spin_envelope: need 1 <= j < j' <= n");
    double sum = 0.0;
    for (std::size_t l = 1; l <= j; ++l) {
        const auto row = propagator.row(l, t);
        for (std::size_t k = j_prime - 1; k < row.amplitudes.size(); ++k)
            sum += std::abs(row.amplitudes[k]);
    }
    return 4.0 * sum;
}

CommutatorBounds commutator_bounds(const Propagator& propagator, std::size_t j,
                                   std::size_t j_prime, double t) {
    if (!(j >= 1 && j < j_prime && j_prime <= propagator.size()))
        throw domain_error("commutator_bounds: need 1 <= j < j' <= n");
    CommutatorBounds out;
    out.t = t;
    out.j = j;
    out.j_prime = j_prime;
    const auto row = propagator.row(j, t);
    out.lower = std::abs(row.amplitudes[j_prime - 1]);
    out.fermi_envelope = fermionic_envelope(row, j_prime);
    out.spin_envelope = spin_envelope(propagator, j, j_prime, t);
    return out;
}

std::string to_string(ConeQuantity q) {
    switch (q) {
        case ConeQuantity::Lower: return "lower";
        case ConeQuantity::Fermi: return "fermi";
        case ConeQuantity::Spin: return "spin";
    }
    throw domain_error("unknown cone quantity");
}

ConeQuantity cone_quantity_from_string(const std::string& s) {
    if (s == "lower") return ConeQuantity::Lower;
    if (s == "fermi") return ConeQuantity::Fermi;
    if (s == "spin") return ConeQuantity::Spin;
    throw domain_error("unknown cone quantity '" + s + "'");
}

namespace {

// quantity(1, 1+d, t) as a function of distance d = 1..n-1, from the source
// row's magnitudes
std::vector<double> quantity_profile(std::span<const double> mags, ConeQuantity q) {
    const std::size_t n = mags.size();
    std::vector<double> profile(n - 1);
    if (q == ConeQuantity::Lower) {
        for (std::size_t d = 1; d < n; ++d) profile[d - 1] = mags[d];
        return profile;
    }
    const double factor = (q == ConeQuantity::Fermi) ? 2.0 : 4.0;
    double suffix = 0.0;
    for (std::size_t d = n - 1; d >= 1; --d) {
        suffix += mags[d];
        profile[d - 1] = factor * suffix;
    }
    return profile;
}

} // namespace

FrontTable cone_scan(const PotentialSpec& spec, std::size_t n, std::span<const double> t_grid,
                     double epsilon, ConeQuantity quantity, unsigned max_threads) {
    if (!(epsilon > 0)) throw domain_error("cone_scan: epsilon must be > 0");
    if (t_grid.size() < 2) throw domain_error("cone_scan: need at least 2 times");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1])) throw domain_error("cone_scan: times must increase");

    const Propagator propagator(eigensolve(build_hamiltonian(spec, n)));

    FrontTable table;
    table.epsilon = epsilon;
    table.quantity = quantity;
    table.lambda = spec.lambda;
    table.times.assign(t_grid.begin(), t_grid.end());
    table.fronts.resize(t_grid.size());

    std::vector<std::vector<double>> profiles(t_grid.size());
    parallel_for(t_grid.size(), max_threads, [&](std::size_t ti) {
        const auto row = propagator.row(1, t_grid[ti]);
        std::vector<double> mags(n);
        for (std::size_t k = 0; k < n; ++k) mags[k] = std::abs(row.amplitudes[k]);
        profiles[ti] = quantity_profile(mags, quantity);
    });

    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const auto& prof = profiles[ti];
        // largest violating distance; the front is one past it ("stays below")
        std::size_t last_above = prof.size();
        while (last_above > 0 && prof[last_above - 1] < epsilon) --last_above;
        if (last_above + 20 > prof.size())
            throw boundary_reached("cone_scan: front " + std::to_string(last_above) +
                                   " within 20 sites of the boundary at t = " +
                                   std::to_string(t_grid[ti]));
        table.fronts[ti] = static_cast<double>(last_above == 0 ? 1 : last_above + 1);
    }

    // tail decay samples at five evenly spread times
    const std::size_t count = std::min<std::size_t>(5, t_grid.size());
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t ti = (t_grid.size() - 1) * (s + 1) / count;
        const auto& prof = profiles[ti];
        TailSample tail;
        tail.t = t_grid[ti];
        tail.front = table.fronts[ti];
        const auto start = static_cast<std::size_t>(std::max(0.0, tail.front - 1.0));
        const std::size_t stop = std::min(prof.size(), start + 60);
        for (std::size_t d = start; d < stop; ++d) {
            if (!(prof[d] > 0)) break;
            tail.distances.push_back(static_cast<double>(d + 1));
            tail.values.push_back(prof[d]);
        }
        if (tail.distances.size() >= 4) table.tails.push_back(std::move(tail));
    }
    return table;
}

nlohmann::json to_json(const ConeFit& f) {
    return {{"lambda", f.lambda},        {"alpha", f.alpha},
            {"v", f.v},                  {"mu", f.mu},
            {"alpha_stderr", f.alpha_stderr}, {"rel_residual", f.rel_residual},
            {"epsilon", f.epsilon},      {"quantity", f.quantity},
            {"localized", f.localized},  {"window", {f.window_lo, f.window_hi}}};
}

ConeFit cone_fit(const FrontTable& table, std::pair<double, double> window) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < table.times.size(); ++i) {
        const double t = table.times[i];
        if (t < window.first || t > window.second || t <= 0) continue;
        xs.push_back(std::log(t));
        ys.push_back(std::log(std::max(1.0, table.fronts[i])));
    }
    if (xs.size() < 8) throw domain_error("cone_fit: need >= 8 front points in the window");
    running_maximum(ys);
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const bool flat = (*ymax - *ymin) <= 1e-9 * std::max(1.0, std::abs(*ymax));
    const LineFit f = fit_line(xs, ys);
    if (!flat && f.rel_residual > 0.2)
        throw numeric_failure("cone_fit: relative residual " + std::to_string(f.rel_residual) +
                              " exceeds 0.2, refusing fit");

    ConeFit fit;
    fit.lambda = table.lambda;
    fit.alpha = flat ? 0.0 : f.slope;
    fit.v = std::exp(f.intercept);
    fit.alpha_stderr = f.slope_stderr;
    fit.rel_residual = flat ? 0.0 : f.rel_residual;
    fit.epsilon = table.epsilon;
    fit.quantity = to_string(table.quantity);
    fit.window_lo = window.first;
    fit.window_hi = window.second;
    fit.localized = std::abs(fit.alpha) <= std::max(0.05, 2.0 * fit.alpha_stderr);

    // stage two: exponential decay rate beyond the front
    std::vector<double> rates;
    for (const auto& tail : table.tails) {
        std::vector<double> ds, ls;
        for (std::size_t i = 0; i < tail.distances.size(); ++i) {
            if (tail.values[i] <= 0) break;
            ds.push_back(tail.distances[i]);
            ls.push_back(std::log(tail.values[i]));
        }
        if (ds.size() < 4) continue;
        const LineFit decay = fit_line(ds, ls);
        if (decay.slope < 0) rates.push_back(-decay.slope);
    }
    if (rates.empty()) throw numeric_failure("cone_fit: no usable decay tails for mu");
    fit.mu = 0.0;
    for (double r : rates) fit.mu += r;
    fit.mu /= static_cast<double>(rates.size());
    return fit;
}

nlohmann::json to_json(const ConsistencyReport& r) {
    return {{"lambda", r.lambda},
            {"cone_alpha", r.cone_alpha},
            {"front_alpha_u", r.front_alpha_u},
            {"alpha_prime", r.alpha_prime},
            {"max_pairwise_difference", r.max_pairwise_difference},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
}

ConsistencyReport consistency_report(double lambda, const ConeFit& cone,
                                     const AlphaPrimeEstimate& alpha_prime_est,
                                     const ExponentFit& front_estimate, double tolerance) {
    const auto close = [&](double a) { return std::abs(a - lambda) <= 1e-12 * std::max(1.0, lambda); };
    if (!close(cone.lambda) || !close(alpha_prime_est.lambda) || !close(front_estimate.lambda))
        throw domain_error("consistency_report: inputs come from different couplings");
    ConsistencyReport r;
    r.lambda = lambda;
    r.cone_alpha = cone.alpha;
    r.front_alpha_u = front_estimate.exponent;
    r.alpha_prime = alpha_prime_est.alpha_prime;
    r.tolerance = tolerance;
    r.max_pairwise_difference = std::max({std::abs(r.cone_alpha - r.front_alpha_u),
                                          std::abs(r.cone_alpha - r.alpha_prime),
                                          std::abs(r.front_alpha_u - r.alpha_prime)});
    r.pass = r.max_pairwise_difference <= tolerance;
    return r;
}

} // namespace fibcone
