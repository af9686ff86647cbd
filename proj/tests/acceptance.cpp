// Acceptance suite: one case per criterion, each printing a pass/fail line.
// The heavy runs (lambda = 8, n = 2000 series; free-chain controls) are built
// once and shared.
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bessel_images.hpp"
#include "fibcone/config.hpp"
#include "fibcone/dimerlab.hpp"
#include "fibcone/errors.hpp"
#include "fibcone/io.hpp"
#include "fibcone/manybody.hpp"
#include "fibcone/oracle.hpp"
#include "fibcone/tracemap.hpp"
#include "fibcone/transport.hpp"

using namespace fibcone;
namespace fs = std::filesystem;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, const std::string& name, bool pass) {
    std::printf("ACCEPT %02d %s: %s\n", criterion, name.c_str(), pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK_MESSAGE(pass, "criterion ", criterion, " (", name, ")");
}

std::vector<double> linspace(double a, double b, std::size_t count) {
    std::vector<double> ts(count);
    for (std::size_t i = 0; i < count; ++i)
        ts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    return ts;
}

const TransportSeries& fib8_series() {
    static const TransportSeries series({PotentialKind::Fibonacci, 8.0}, 2000,
                                        linspace(0.0, 300.0, 121), 1e-10, 0);
    return series;
}

const TransportSeries& free_series() {
    static const TransportSeries series({PotentialKind::Free}, 1400, linspace(0.0, 300.0, 121),
                                        1e-10, 0);
    return series;
}

const std::vector<double> kGridLambdas{0.0, 1.0, 8.0};
const std::vector<double> kGridOmegas{0.0, 0.3};
const std::vector<double> kGridTimes{0.0, 0.5, 1.7, 4.0};

} // namespace

TEST_CASE("criterion 1: oracle equivalence") {
    Stopwatch watch;
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
        for (const double lambda : kGridLambdas) {
            for (const double omega : kGridOmegas) {
                PotentialSpec spec{PotentialKind::Fibonacci, lambda, omega};
                for (const double t : kGridTimes) {
                    const int j = std::max(1, n / 2);
                    const auto r = oracle::verify_free_fermion(spec, n, j, t);
                    worst = std::max({worst, r.defect, r.magnitude_defect});
                }
            }
        }
    }
    const double elapsed = watch.seconds();
    std::printf("   max defect %.3e, %.1fs\n", worst, elapsed);
    report(1, "oracle-equivalence", worst <= 1e-8 && elapsed <= 120.0);
}

TEST_CASE("criterion 2: inequality sandwich") {
    double violation = 0.0;
    for (int n = 2; n <= 8; ++n) {
        for (const double lambda : kGridLambdas) {
            for (const double omega : kGridOmegas) {
                const PotentialSpec spec{PotentialKind::Fibonacci, lambda, omega};
                const auto H = oracle::build_xy(spec, n);
                const auto jw = oracle::jordan_wigner(n);
                const oracle::Evolution evo(H);
                const Propagator P(eigensolve(build_hamiltonian(spec, n)));
                std::vector<std::size_t> sources{1};
                if (n / 2 > 1) sources.push_back(n / 2);
                for (const double t : kGridTimes) {
                    for (const std::size_t j : sources) {
                        const auto tau_c = evo.conjugate(jw.c[j - 1], t);
                        for (std::size_t jp : {j + 1, j + 2, j + 4}) {
                            if (jp > static_cast<std::size_t>(n)) continue;
                            const auto bounds = commutator_bounds(P, j, jp, t);
                            const oracle::DenseOperator araise =
                                oracle::lowering(static_cast<int>(jp), n).adjoint();
                            const std::vector<oracle::DenseOperator> Bs{
                                oracle::lowering(static_cast<int>(jp), n), araise,
                                oracle::site_operator(oracle::pauli_z(), static_cast<int>(jp), n)};
                            for (std::size_t bi = 0; bi < Bs.size(); ++bi) {
                                const double exact =
                                    oracle::operator_norm(tau_c * Bs[bi] - Bs[bi] * tau_c);
                                if (bi == 1) // B = a*, the Lemma pairing
                                    violation = std::max(violation, bounds.lower - exact);
                                violation = std::max(violation, exact - bounds.fermi_envelope);
                            }
                            violation =
                                std::max(violation, bounds.fermi_envelope - bounds.spin_envelope);
                        }
                    }
                }
            }
        }
    }
    std::printf("   worst violation %.3e\n", violation);
    report(2, "inequality-sandwich", violation <= 1e-8);
}

TEST_CASE("criterion 3: CAR and sigma-z identities") {
    double worst = 0.0;
    for (int n = 2; n <= 5; ++n) {
        const auto jw = oracle::jordan_wigner(n);
        worst = std::max({worst, oracle::car_defect(jw), oracle::sigma_z_identity_defect(jw)});
    }
    std::printf("   max identity defect %.3e\n", worst);
    report(3, "car-and-sigma-z", worst <= 1e-12);
}

TEST_CASE("criterion 4: unitarity of every propagator row") {
    double worst = 0.0;
    for (const auto* series : {&fib8_series(), &free_series()}) {
        for (std::size_t ti = 0; ti < series->times().size(); ++ti)
            worst = std::max(worst, std::abs(series->outside_probability(ti, 0) - 1.0));
    }
    const Propagator P(eigensolve(build_hamiltonian({PotentialKind::Fibonacci, 8.0}, 500)));
    for (const double t : {0.5, 5.0, 50.0})
        for (const std::size_t j : {1ULL, 250ULL})
            worst = std::max(worst, std::abs(P.row(j, t).outside_probability(0) - 1.0));
    std::printf("   worst |sum - 1| = %.3e\n", worst);
    report(4, "unitarity", worst <= 1e-10);
}

TEST_CASE("criterion 5: free-chain controls against the Bessel oracle") {
    // propagator magnitudes at n = 1200, t <= 100
    const Propagator P(eigensolve(build_hamiltonian({PotentialKind::Free}, 1200)));
    double worst = 0.0;
    for (const double t : {0.5, 5.0, 20.0, 50.0, 100.0}) {
        for (const std::size_t j : {1ULL, 3ULL, 17ULL}) {
            const auto row = P.row(j, t);
            const auto oracle_row = fibcone::testing::free_halfline_row(j, 1200, t);
            for (std::size_t k = 0; k < 1200; ++k)
                worst = std::max(worst,
                                 std::abs(std::abs(row.amplitudes[k]) - std::abs(oracle_row[k])));
        }
    }
    std::printf("   max ||F| - |images|| = %.3e\n", worst);
    const bool bessel_ok = worst <= 1e-8;

    // ballistic cone fit
    const auto table =
        cone_scan({PotentialKind::Free}, 1400, free_series().times(), 1e-1, ConeQuantity::Lower);
    const auto fit = cone_fit(table, {30.0, 300.0});
    std::printf("   cone alpha = %.4f, v = %.4f\n", fit.alpha, fit.v);
    const bool cone_ok = std::abs(fit.alpha - 1.0) <= 0.05 && std::abs(fit.v - 4.0) <= 0.3;

    const auto beta = beta_estimator(free_series(), 2.0, {20.0, 300.0}, false);
    std::printf("   beta+(2) = %.4f\n", beta.exponent);
    const bool beta_ok = std::abs(beta.exponent - 1.0) <= 0.1;

    report(5, "free-chain-controls", bessel_ok && cone_ok && beta_ok);
}

TEST_CASE("criterion 6: anomalous cone at lambda = 8") {
    Stopwatch watch;
    const auto table = cone_scan({PotentialKind::Fibonacci, 8.0}, 2000, fib8_series().times(),
                                 1e-6, ConeQuantity::Spin);
    const auto fit = cone_fit(table, {10.0, 300.0});
    const auto ap = alpha_prime(8.0, 3, 14);
    const std::vector<double> eps{1e-4, 1e-6, 1e-8};
    const auto front = alpha_u_estimator(fib8_series(), eps, {10.0, 300.0});
    const auto rep = consistency_report(8.0, fit, ap, front);
    const double elapsed = watch.seconds();
    std::printf("   cone alpha = %.4f, alpha' = %.4f, front alpha_u = %.4f, %.1fs\n", fit.alpha,
                ap.alpha_prime, front.exponent, elapsed);
    const bool ok = fit.alpha < 0.9 && std::abs(fit.alpha - ap.alpha_prime) <= 0.15 &&
                    std::abs(fit.alpha - front.exponent) <= 0.15 && rep.pass &&
                    elapsed <= 1200.0;
    report(6, "anomalous-cone", ok);
}

TEST_CASE("criterion 7: alpha-prime brackets") {
    Stopwatch watch;
    const auto est12 = alpha_prime(12.0, 3, 14);
    const auto est24 = alpha_prime(24.0, 3, 12);
    const double elapsed = watch.seconds();
    std::printf("   alpha'(12) = %.4f (formula bracket %.4f..%.4f), alpha'(24) = %.4f, %.1fs\n",
                est12.alpha_prime, *est12.bracket_lower, *est12.bracket_upper, est24.alpha_prime,
                elapsed);
    const bool ok12 = est12.alpha_prime >= 0.20 && est12.alpha_prime <= 0.55;
    const bool ok24 = est24.alpha_prime >= 0.18 && est24.alpha_prime <= 0.37;
    report(7, "alpha-prime-brackets", ok12 && ok24 && elapsed <= 300.0);
}

TEST_CASE("criterion 8: trace map integrity") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst_rel = 0.0, worst_fricke = 0.0;
    for (const double lambda : {1.0, 8.0}) {
        const PotentialSpec spec{PotentialKind::Fibonacci, lambda};
        for (int trial = 0; trial < 20; ++trial) {
            const std::complex<double> z(uni(rng) * (lambda + 3.0), 0.0);
            const auto orbit = trace_orbit(z, lambda, 13);
            for (int M = 1; M <= 12; ++M) {
                const auto P = transfer_matrix(spec, z, fibonacci_number(M + 1), 0.0L);
                const std::complex<double> direct = 0.5 * P.trace();
                if (!(std::abs(direct) < 1e100)) continue;
                worst_rel = std::max(worst_rel, std::abs(direct - orbit.x(M).value()) /
                                                    std::max(1.0, std::abs(direct)));
            }
            for (int M = 0; M + 1 <= orbit.max_index(); ++M) {
                if (std::exp(std::min(orbit.x(M + 1).log_abs, 300.0)) > 1e3) break;
                worst_fricke = std::max(worst_fricke,
                                        std::abs(orbit.fricke_invariant(M) - lambda * lambda / 4.0) /
                                            std::max(1.0, lambda * lambda / 4.0));
            }
        }
    }
    bool counts_ok = true;
    for (const double lambda : {8.0, 12.0})
        for (int k = 1; k <= 12; ++k)
            counts_ok = counts_ok && band_roots(lambda, k).roots.size() == fibonacci_number(k);
    std::printf("   recursion-vs-product %.3e, Fricke %.3e, counts %s\n", worst_rel, worst_fricke,
                counts_ok ? "ok" : "mismatch");
    report(8, "trace-map-integrity", worst_rel <= 1e-8 && worst_fricke <= 1e-9 && counts_ok);
}

TEST_CASE("criterion 9: phase independence") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<long double> omegas;
    for (int i = 0; i < 10; ++i) omegas.push_back(uni(rng));
    bool ok = false;
    try {
        const auto rep = phase_independence_check(1.0, {0.3, 0.0}, omegas, 8);
        ok = rep.passing == PhaseIndependenceReport::Parity::Odd ||
             rep.passing == PhaseIndependenceReport::Parity::Even;
        std::printf("   passing class: %s\n",
                    rep.passing == PhaseIndependenceReport::Parity::Odd ? "odd" : "even");
    } catch (const numeric_failure& e) {
        std::printf("   %s\n", e.what());
    }
    report(9, "phase-independence", ok);
}

TEST_CASE("criterion 10: Abel averaging and the paired-run inequality") {
    const auto ts = linspace(0.0, 50.0, 25001);
    std::vector<double> ones(ts.size(), 1.0), lin(ts.size()), ex(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        lin[i] = ts[i];
        ex[i] = std::exp(-ts[i]);
    }
    const bool norm_ok = std::abs(abel_average(ts, ones, 2.0).value - 1.0) <= 1e-4;
    const bool lin_ok = std::abs(abel_average(ts, lin, 3.0).value - 1.5) <= 1e-4 * 1.5;
    const bool exp_ok = std::abs(abel_average(ts, ex, 1.0).value - 2.0 / 3.0) <= 1e-4 * (2.0 / 3.0);

    bool paired_ok = true;
    for (const auto* series : {&free_series(), &fib8_series()}) {
        const auto plain = beta_estimator(*series, 2.0, {10.0, 300.0}, false);
        const auto avg = beta_estimator(*series, 2.0, {10.0, 30.0}, true);
        std::printf("   lambda=%g: averaged %.4f vs unaveraged %.4f\n", series->spec().lambda,
                    avg.exponent, plain.exponent);
        paired_ok = paired_ok && (avg.exponent <= plain.exponent + 0.05);
    }
    report(10, "abel-averaging", norm_ok && lin_ok && exp_ok && paired_ok);
}

TEST_CASE("criterion 11: contour integral against the spectral propagator") {
    const auto T = build_hamiltonian({PotentialKind::Fibonacci, 1.0}, 40);
    const RectangularContour contour{spectral_bound(1.0), 1.0};
    double worst = 0.0;
    int count = 0;
    for (const double t : {0.0, 0.7, 2.3, 4.0}) {
        for (std::size_t j = 2; j <= 38; j += 9) {
            for (std::size_t k = j; k <= 38; k += 11) {
                worst = std::max(worst, dunford_check(T, j, k, t, contour, 2000).difference);
                ++count;
            }
        }
    }
    std::printf("   max |contour - spectral| = %.3e over %d points\n", worst, count);
    report(11, "dunford-check", worst <= 1e-6 && count >= 40);
}

TEST_CASE("criterion 12: dimer formulas and ensemble ordering") {
    bool formulas_ok = true;
    for (double p = 0.25; p <= 128.0; p *= 2) {
        formulas_ok = formulas_ok && dimer_beta(p) == std::max(0.0, 1.0 - 1.0 / (2.0 * p));
        if (p > 1)
            formulas_ok = formulas_ok && jw_degradation(p) == (p - 0.5) / (p - 1.0);
        if (p >= 1)
            formulas_ok = formulas_ok && std::abs(p * dimer_beta(p) - (p - 0.5)) <= 1e-15 * p;
    }
    std::vector<double> ts;
    for (int i = 0; i <= 40; ++i) ts.push_back(150.0 * i / 40.0);
    const auto rep = ensemble_transport(800, ts, {2.0}, 16, 0.5, 7);
    std::printf("   dimer beta2 = %.4f +- %.4f, iid beta2 = %.4f +- %.4f\n",
                rep.dimer[0].exponent, rep.dimer[0].stderr_, rep.iid[0].exponent,
                rep.iid[0].stderr_);
    report(12, "dimer-formulas", formulas_ok && rep.dimer[0].exponent > rep.iid[0].exponent);
}

TEST_CASE("criterion 13: determinism across reruns and concurrency") {
    const fs::path dir = fs::temp_directory_path() / "fibcone_acceptance_det";
    fs::remove_all(dir);
    const auto run = [&](const std::string& sub, const std::string& extra, const fs::path& out) {
        const std::string cmd = std::string(FIBCONE_BIN) + " " + sub +
                                " --potential.lambda 8 --n 400 --t_grid.stop 50 "
                                "--t_grid.count 26 --fit_window [5.0,50.0] " +
                                extra + " --output_dir " + out.string() + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    bool ok = run("transport", "--max_threads 1", dir / "a") == 0 &&
              run("transport", "--max_threads 4", dir / "b") == 0 &&
              run("cone", "--max_threads 2", dir / "a2") == 0 &&
              run("cone", "--max_threads 1", dir / "b2") == 0;
    if (ok) {
        const auto compare = [&](const fs::path& da, const fs::path& db) {
            const auto manifest = nlohmann::json::parse(std::ifstream(da / "manifest.json"));
            const auto manifest_b = nlohmann::json::parse(std::ifstream(db / "manifest.json"));
            if (manifest.at("config_hash") != manifest_b.at("config_hash")) return false;
            for (const auto& f : manifest.at("files")) {
                const auto name = f.at("path").get<std::string>();
                std::ostringstream sa, sb;
                sa << std::ifstream(da / name, std::ios::binary).rdbuf();
                sb << std::ifstream(db / name, std::ios::binary).rdbuf();
                if (sa.str() != sb.str()) return false;
            }
            return true;
        };
        ok = compare(dir / "a", dir / "b") && compare(dir / "a2", dir / "b2");
    }
    report(13, "determinism", ok);
}
