#include "fibcone/transport.hpp"

#include <algorithm>
#include <cmath>

#include "fibcone/errors.hpp"
#include "fibcone/fitting.hpp"
#include "fibcone/parallel.hpp"

namespace fibcone {

double outside_probability(const PropagatorRow& row, std::size_t N) {
    if (N > row.amplitudes.size()) throw domain_error("outside_probability: N exceeds chain length");
    return row.outside_probability(N);
}

double moment(const PropagatorRow& row, double p) {
    if (!(p > 0)) throw domain_error("moment: p must be > 0");
    double sum = 0.0;
    for (std::size_t k = row.amplitudes.size(); k-- > 0;)
        sum += std::pow(static_cast<double>(k + 1), p) * std::norm(row.amplitudes[k]);
    return sum;
}

TransportSeries::TransportSeries(const PotentialSpec& spec, std::size_t n,
                                 std::vector<double> times, double boundary_tolerance,
                                 unsigned max_threads)
    : spec_(spec), n_(n), times_(std::move(times)), boundary_tolerance_(boundary_tolerance) {
    if (times_.empty()) throw domain_error("transport series: empty time grid");
    for (std::size_t i = 0; i + 1 < times_.size(); ++i)
        if (!(times_[i] < times_[i + 1]))
            throw domain_error("transport series: times must be strictly increasing");
    if (times_.front() < 0) throw domain_error("transport series: negative time");

    const Propagator propagator(eigensolve(build_hamiltonian(spec, n)));
    magnitudes_.assign(times_.size() * n_, 0.0);
    parallel_for(times_.size(), max_threads, [&](std::size_t ti) {
        const PropagatorRow row = propagator.row(1, times_[ti]);
        double* out = magnitudes_.data() + ti * n_;
        for (std::size_t k = 0; k < n_; ++k) out[k] = std::abs(row.amplitudes[k]);
    });
    // the finite chain stands in for the half line only while the packet has
    // not reached the right end
    const std::size_t guard = std::min<std::size_t>(n_ - 1, 5);
    for (std::size_t ti = 0; ti < times_.size(); ++ti) {
        if (outside_probability(ti, n_ - guard) > boundary_tolerance_)
            throw boundary_reached("transport series: boundary mass " +
                                   std::to_string(outside_probability(ti, n_ - guard)) +
                                   " at t = " + std::to_string(times_[ti]));
    }
}

std::span<const double> TransportSeries::magnitudes(std::size_t ti) const {
    return {magnitudes_.data() + ti * n_, n_};
}

double TransportSeries::outside_probability(std::size_t ti, std::size_t N) const {
    const auto mags = magnitudes(ti);
    double sum = 0.0;
    for (std::size_t k = n_; k-- > N;) sum += mags[k] * mags[k];
    return sum;
}

double TransportSeries::moment(std::size_t ti, double p) const {
    const auto mags = magnitudes(ti);
    double sum = 0.0;
    for (std::size_t k = n_; k-- > 0;)
        sum += std::pow(static_cast<double>(k + 1), p) * mags[k] * mags[k];
    return sum;
}

std::size_t TransportSeries::front_site(std::size_t ti, double eps) const {
    const auto mags = magnitudes(ti);
    double tail = 0.0;
    for (std::size_t N = n_; N-- > 0;) {
        tail += mags[N] * mags[N];
        if (tail > eps) return N + 1;
    }
    return 0;
}

AbelAverage abel_average(std::span<const double> times, std::span<const double> values, double T) {
    if (!(T > 0)) throw domain_error("abel_average: T must be > 0");
    if (times.size() != values.size() || times.size() < 2)
        throw domain_error("abel_average: need matching sampled function");
    const double t_max = times.back();
    if (t_max < 10.0 * T)
        throw domain_error("abel_average: insufficient tail, t_max must be >= 10 T");
    double integral = 0.0, sup = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double f0 = std::exp(-2.0 * times[i] / T) * values[i];
        const double f1 = std::exp(-2.0 * times[i + 1] / T) * values[i + 1];
        integral += 0.5 * (f0 + f1) * (times[i + 1] - times[i]);
        sup = std::max({sup, std::abs(values[i]), std::abs(values[i + 1])});
    }
    AbelAverage out;
    out.value = 2.0 / T * integral;
    out.truncation_bound = 2.0 / T * std::exp(-2.0 * t_max / T) * sup;
    return out;
}

nlohmann::json to_json(const ExponentFit& f) {
    return {{"exponent", f.exponent}, {"intercept", f.intercept},     {"stderr", f.stderr_},
            {"window", {f.window_lo, f.window_hi}}, {"method", f.method}, {"lambda", f.lambda}};
}

ExponentFit beta_estimator(const TransportSeries& series, double p,
                           std::pair<double, double> window, bool averaged) {
    if (!(p > 0)) throw domain_error("beta_estimator: p must be > 0");
    const auto& ts = series.times();

    std::vector<double> xs, ys;
    if (!averaged) {
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            if (ts[ti] < window.first || ts[ti] > window.second || ts[ti] <= 0) continue;
            const double m = series.moment(ti, p);
            if (!std::isfinite(m) || !(m > 0))
                throw numeric_failure("beta_estimator: non-finite moment at t = " +
                                      std::to_string(ts[ti]));
            xs.push_back(p * std::log(ts[ti]));
            ys.push_back(std::log(m));
        }
    } else {
        // Abel averages sampled at admissible T inside the window
        std::vector<double> mom(ts.size());
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            mom[ti] = series.moment(ti, p);
            if (!std::isfinite(mom[ti]))
                throw numeric_failure("beta_estimator: non-finite moment at t = " +
                                      std::to_string(ts[ti]));
        }
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            const double T = ts[ti];
            if (T < window.first || T > window.second || T <= 0) continue;
            if (ts.back() < 10.0 * T) continue;
            const double avg = abel_average(ts, mom, T).value;
            if (!(avg > 0)) continue;
            xs.push_back(p * std::log(T));
            ys.push_back(std::log(avg));
        }
    }
    if (xs.size() < 8) throw domain_error("beta_estimator: window contains fewer than 8 samples");
    running_maximum(ys);
    const LineFit f = fit_line(xs, ys);
    ExponentFit out;
    out.exponent = f.slope;
    out.intercept = f.intercept;
    out.stderr_ = f.slope_stderr;
    out.window_lo = window.first;
    out.window_hi = window.second;
    out.method = averaged ? "moment-abel-runmax-ols" : "moment-runmax-ols";
    out.lambda = series.spec().lambda;
    return out;
}

FrontRadius front_radius(const TransportSeries& series, double eps) {
    if (!(eps > 0 && eps < 1)) throw domain_error("front_radius: eps must lie in (0,1)");
    FrontRadius out;
    out.epsilon = eps;
    out.times = series.times();
    out.radii.resize(out.times.size());
    for (std::size_t ti = 0; ti < out.times.size(); ++ti)
        out.radii[ti] = static_cast<double>(series.front_site(ti, eps));
    return out;
}

ExponentFit alpha_u_estimator(const TransportSeries& series, std::span<const double> eps_list,
                              std::pair<double, double> window) {
    if (eps_list.empty()) throw domain_error("alpha_u_estimator: need at least one threshold");
    ExponentFit best;
    bool have = false;
    for (const double eps : eps_list) {
        const FrontRadius fr = front_radius(series, eps);
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < fr.times.size(); ++i) {
            if (fr.times[i] < window.first || fr.times[i] > window.second || fr.times[i] <= 0)
                continue;
            xs.push_back(std::log(fr.times[i]));
            ys.push_back(std::log(std::max(1.0, fr.radii[i])));
        }
        if (xs.size() < 8) throw domain_error("alpha_u_estimator: window contains fewer than 8 samples");
        running_maximum(ys);
        const LineFit f = fit_line(xs, ys);
        if (!have || f.slope > best.exponent) {
            best.exponent = f.slope;
            best.intercept = f.intercept;
            best.stderr_ = f.slope_stderr;
            have = true;
        }
    }
    best.window_lo = window.first;
    best.window_hi = window.second;
    best.method = "front-max-runmax-ols";
    best.lambda = series.spec().lambda;
    return best;
}

} // namespace fibcone
