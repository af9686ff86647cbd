#include "fibcone/dimerlab.hpp"

#include <cmath>

#include "fibcone/errors.hpp"
#include "fibcone/parallel.hpp"
#include "fibcone/transport.hpp"

namespace fibcone {

double dimer_beta(double p) {
    if (!(p > 0)) throw domain_error("dimer_beta: p must be > 0");
    return std::max(0.0, 1.0 - 1.0 / (2.0 * p));
}

double jw_degradation(double p) {
    if (!(p > 1)) throw domain_error("jw_degradation: sum diverges for p <= 1");
    return (p - 0.5) / (p - 1.0);
}

nlohmann::json to_json(const DimerReport& r) {
    auto estimates = [](const std::vector<EnsembleEstimate>& v) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& e : v) out.push_back({{"exponent", e.exponent}, {"stderr", e.stderr_}});
        return out;
    };
    return {{"p_grid", r.p_grid},
            {"formula", r.formula},
            {"degradation", r.degradation},
            {"dimer", estimates(r.dimer)},
            {"iid", estimates(r.iid)},
            {"fibonacci_control",
             {{"exponent", r.fibonacci_control.exponent}, {"stderr", r.fibonacci_control.stderr_}}},
            {"free_control",
             {{"exponent", r.free_control.exponent}, {"stderr", r.free_control.stderr_}}},
            {"ensemble_size", r.ensemble_size},
            {"seed", r.seed},
            {"lambda", r.lambda}};
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

DimerReport ensemble_transport(std::size_t n, const std::vector<double>& t_grid,
                               const std::vector<double>& p_list, int ensemble_size, double lambda,
                               std::uint64_t seed, unsigned max_threads) {
    if (!(lambda < 1.0)) throw domain_error("ensemble_transport: dimer model needs lambda < 1");
    if (ensemble_size < 8) throw domain_error("ensemble_transport: ensemble_size must be >= 8");
    if (p_list.empty()) throw domain_error("ensemble_transport: empty p grid");

    DimerReport report;
    report.p_grid = p_list;
    report.ensemble_size = ensemble_size;
    report.seed = seed;
    report.lambda = lambda;
    for (const double p : p_list) {
        report.formula.push_back(dimer_beta(p));
        report.degradation.push_back(p > 1 ? jw_degradation(p)
                                           : std::numeric_limits<double>::quiet_NaN());
    }

    const std::pair<double, double> window{10.0, t_grid.back()};
    const auto run_exponent = [&](const PotentialSpec& spec, double p) {
        const TransportSeries series(spec, n, t_grid, 1e-10, 1);
        return beta_estimator(series, p, window, false).exponent;
    };

    // realization exponents per p, realizations in parallel
    std::vector<std::vector<double>> dimer_runs(p_list.size(),
                                                std::vector<double>(ensemble_size));
    std::vector<std::vector<double>> iid_runs(p_list.size(), std::vector<double>(ensemble_size));
    parallel_for(static_cast<std::size_t>(ensemble_size), max_threads, [&](std::size_t r) {
        PotentialSpec dimer{PotentialKind::RandomDimer, lambda};
        dimer.seed = mix(seed, 2 * r);
        PotentialSpec iid{PotentialKind::IidRandom, lambda};
        iid.seed = mix(seed, 2 * r + 1);
        const TransportSeries ds(dimer, n, t_grid, 1e-10, 1);
        const TransportSeries is(iid, n, t_grid, 1e-10, 1);
        for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
            dimer_runs[pi][r] = beta_estimator(ds, p_list[pi], window, false).exponent;
            iid_runs[pi][r] = beta_estimator(is, p_list[pi], window, false).exponent;
        }
    });

    const auto summarize = [&](const std::vector<double>& runs) {
        EnsembleEstimate e;
        for (double v : runs) e.exponent += v;
        e.exponent /= static_cast<double>(runs.size());
        double var = 0.0;
        for (double v : runs) var += (v - e.exponent) * (v - e.exponent);
        e.stderr_ = std::sqrt(var / static_cast<double>(runs.size() - 1) /
                              static_cast<double>(runs.size()));
        return e;
    };
    for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
        report.dimer.push_back(summarize(dimer_runs[pi]));
        report.iid.push_back(summarize(iid_runs[pi]));
    }

    report.free_control.exponent = run_exponent({PotentialKind::Free}, 2.0);
    report.fibonacci_control.exponent = run_exponent({PotentialKind::Fibonacci, 8.0}, 2.0);
    return report;
}

} // namespace fibcone
