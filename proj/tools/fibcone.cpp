// fibcone: light-cone laboratory for the XY chain with quasi-periodic and
// random external fields.
//
//   fibcone <subcommand> [--config file.json] [--key.path value]...
//
// Subcommands: potential | evolve | transport | tracemap | alphaprime | cone
//            | oracle-check | dimer | report
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

#include "fibcone/config.hpp"
#include "fibcone/dimerlab.hpp"
#include "fibcone/errors.hpp"
#include "fibcone/io.hpp"
#include "fibcone/manybody.hpp"
#include "fibcone/onebody.hpp"
#include "fibcone/oracle.hpp"
#include "fibcone/tracemap.hpp"
#include "fibcone/transport.hpp"

namespace {

using namespace fibcone;

std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    if (dir.is_relative()) {
        if (const char* root = std::getenv("FIBCONE_OUTPUT_ROOT")) dir = std::filesystem::path(root) / dir;
    }
    return dir;
}

std::vector<std::string> row(std::initializer_list<double> values) {
    std::vector<std::string> out;
    for (double v : values) out.push_back(format_double(v));
    return out;
}

void cmd_potential(const RunConfig& cfg, RunOutput& out) {
    const auto seq = generate(cfg.potential, cfg.n);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 1; j <= seq.values.size(); ++j)
        rows.push_back({std::to_string(j), format_double(seq.values[j - 1])});
    out.write_csv("potential.csv", {"j", "V"}, rows, "potential:(j,V)");
}

void cmd_evolve(const RunConfig& cfg, RunOutput& out) {
    const auto T = build_hamiltonian(cfg.potential, cfg.n);
    const Propagator P(eigensolve(T));
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t m = 0; m < P.spectral().n; ++m)
            rows.push_back({std::to_string(m + 1), format_double(P.spectral().eigenvalues[m])});
        out.write_csv("eigenvalues.csv", {"m", "E"}, rows, "eigenvalues:(m,E)");
    }
    const auto times = cfg.t_grid.expand();
    std::vector<std::vector<std::string>> rows;
    for (const double t : times) {
        const auto r = P.row(1, t);
        if (r.outside_probability(cfg.n - std::min<std::size_t>(cfg.n - 1, 5)) >
            cfg.boundary_tolerance)
            throw boundary_reached("evolve: wavepacket reached the boundary at t = " +
                                   std::to_string(t));
        for (std::size_t k = 1; k <= cfg.n; ++k) {
            const auto a = r.amplitudes[k - 1];
            rows.push_back({format_double(t), std::to_string(k), format_double(a.real()),
                            format_double(a.imag()), format_double(std::abs(a))});
        }
    }
    out.write_csv("propagator_rows.csv", {"t", "k", "re", "im", "abs"}, rows,
                  "propagator-rows:(t,k,re,im,abs)");
}

void cmd_transport(const RunConfig& cfg, RunOutput& out) {
    const TransportSeries series(cfg.potential, cfg.n, cfg.t_grid.expand(),
                                 cfg.boundary_tolerance, cfg.max_threads);
    const auto& ts = series.times();
    {
        std::vector<std::vector<std::string>> rows;
        std::vector<std::size_t> Ns;
        for (std::size_t N = 1; N < cfg.n; N *= 2) Ns.push_back(N);
        for (std::size_t ti = 0; ti < ts.size(); ++ti)
            for (const std::size_t N : Ns)
                rows.push_back({format_double(ts[ti]), std::to_string(N),
                                format_double(series.outside_probability(ti, N))});
        out.write_csv("outside_probability.csv", {"t", "N", "P"}, rows, "outside:(t,N,P)");
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t ti = 0; ti < ts.size(); ++ti)
            for (const double p : cfg.p_grid)
                rows.push_back({format_double(ts[ti]), format_double(p),
                                format_double(series.moment(ti, p))});
        out.write_csv("moments.csv", {"t", "p", "moment"}, rows, "moments:(t,p,moment)");
    }
    nlohmann::json fits = nlohmann::json::array();
    for (const double p : cfg.p_grid) {
        fits.push_back(to_json(beta_estimator(series, p, cfg.fit_window, false)));
        try {
            fits.push_back(to_json(beta_estimator(series, p, cfg.fit_window, true)));
        } catch (const domain_error&) {
            // the grid cannot support Abel averages in this window; the
            // unaveraged fit stands alone
        }
    }
    const auto front = alpha_u_estimator(series, cfg.epsilons, cfg.fit_window);
    nlohmann::json payload = {{"beta_fits", fits}, {"alpha_u", to_json(front)}};
    out.write_json("transport_fits.json", payload, "transport-fits");
}

void cmd_tracemap(const RunConfig& cfg, RunOutput& out) {
    const double lambda = cfg.potential.lambda;
    const auto br = band_roots(lambda, cfg.tracemap.k_max);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < br.roots.size(); ++j)
        rows.push_back({std::to_string(j + 1), format_double(br.roots[j]),
                        format_double(br.derivative_magnitudes[j]),
                        format_double(br.residuals[j])});
    out.write_csv("band_roots.csv", {"j", "E", "abs_dx", "residual"}, rows,
                  "band-roots:(j,E,abs_dx,residual)");

    const auto growth = growth_rate_check(lambda, 0.0, cfg.tracemap.growth_eps,
                                          cfg.tracemap.growth_m_max);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<long double> omegas;
    for (int i = 0; i < cfg.tracemap.phase_count; ++i) omegas.push_back(uni(rng));
    const auto phase = phase_independence_check(
        lambda, {cfg.tracemap.z_re, cfg.tracemap.z_im}, omegas, cfg.tracemap.m_max);
    const char* parity = phase.passing == PhaseIndependenceReport::Parity::Both    ? "both"
                         : phase.passing == PhaseIndependenceReport::Parity::Odd   ? "odd"
                         : phase.passing == PhaseIndependenceReport::Parity::Even  ? "even"
                                                                                   : "mixed";
    nlohmann::json payload = {
        {"lambda", lambda},
        {"growth", {{"found", growth.found}, {"delta", growth.delta_hat}, {"M0", growth.M0_hat}}},
        {"phase_independence",
         {{"passing", parity}, {"max_dev_odd", phase.max_dev_odd}, {"max_dev_even", phase.max_dev_even}}}};
    out.write_json("tracemap_checks.json", payload, "tracemap-checks");
}

void cmd_alphaprime(const RunConfig& cfg, RunOutput& out) {
    const auto est = alpha_prime(cfg.potential.lambda, cfg.tracemap.k_min, cfg.tracemap.k_max);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < est.y.size(); ++i)
        rows.push_back({std::to_string(est.k_min + static_cast<int>(i)), format_double(est.y[i])});
    out.write_csv("y_table.csv", {"k", "y"}, rows, "alpha-prime-y:(k,y)");
    nlohmann::json payload = {
        {"lambda", est.lambda},
        {"y_k", est.y},
        {"alpha_prime", est.alpha_prime},
        {"bracket",
         {est.bracket_lower ? nlohmann::json(*est.bracket_lower) : nlohmann::json(nullptr),
          est.bracket_upper ? nlohmann::json(*est.bracket_upper) : nlohmann::json(nullptr)}}};
    out.write_json("alpha_prime.json", payload, "alpha-prime");
}

void cmd_cone(const RunConfig& cfg, RunOutput& out) {
    const auto table = cone_scan(cfg.potential, cfg.n, cfg.t_grid.expand(), cfg.cone.epsilon,
                                 cone_quantity_from_string(cfg.cone.quantity), cfg.max_threads);
    const auto fit = cone_fit(table, cfg.fit_window);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < table.times.size(); ++i)
        rows.push_back({format_double(table.times[i]), format_double(table.fronts[i])});
    out.write_csv("front_table.csv", {"t", "front"}, rows, "front:(t,front)");
    out.write_json("cone_fit.json", to_json(fit), "cone-fit");
    std::vector<std::vector<double>> plot;
    for (std::size_t i = 0; i < table.times.size(); ++i) {
        const double t = table.times[i];
        if (t <= 0) continue;
        plot.push_back({t, table.fronts[i], fit.v * std::pow(t, fit.alpha)});
    }
    out.write_plot_data("front.dat", {"t", "front", "fit"}, plot, "front-plot:(t,front,fit)");
}

void cmd_oracle_check(const RunConfig& cfg, RunOutput& out) {
    nlohmann::json points = nlohmann::json::array();
    bool all_pass = true;
    std::string matched_gauge = "identity";
    for (const int n : cfg.oracle.n_list) {
        for (const double lambda : cfg.oracle.lambdas) {
            for (const double omega : cfg.oracle.omegas) {
                PotentialSpec spec{PotentialKind::Fibonacci, lambda, omega};
                for (const double t : cfg.oracle.times) {
                    const int j = std::max(1, n / 2);
                    const auto r = oracle::verify_free_fermion(spec, n, j, t);
                    const bool pass = r.defect <= 1e-8 && r.magnitude_defect <= 1e-8;
                    all_pass = all_pass && pass;
                    if (lambda > 0 && t > 0) matched_gauge = r.gauge;
                    points.push_back({{"n", n},
                                      {"lambda", lambda},
                                      {"omega", omega},
                                      {"t", t},
                                      {"j", j},
                                      {"defect", r.defect},
                                      {"magnitude_defect", r.magnitude_defect},
                                      {"gauge", r.gauge},
                                      {"pass", pass}});
                }
            }
        }
    }
    nlohmann::json payload = {{"points", points}, {"matched_gauge", matched_gauge}, {"pass", all_pass}};
    out.write_json("oracle_report.json", payload, "oracle-report");
    if (!all_pass) throw numeric_failure("oracle-check: defects above tolerance");
}

void cmd_dimer(const RunConfig& cfg, RunOutput& out) {
    std::vector<double> ts;
    for (int i = 0; i < cfg.dimer.t_count; ++i)
        ts.push_back(cfg.dimer.t_max * static_cast<double>(i) / (cfg.dimer.t_count - 1));
    const auto report = ensemble_transport(cfg.dimer.n, ts, cfg.p_grid, cfg.dimer.ensemble_size,
                                           cfg.dimer.lambda, cfg.seed, cfg.max_threads);
    out.write_json("dimer_report.json", to_json(report), "dimer-report");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < report.p_grid.size(); ++i)
        rows.push_back({format_double(report.p_grid[i]), format_double(report.formula[i]),
                        format_double(report.degradation[i]),
                        format_double(report.dimer[i].exponent),
                        format_double(report.dimer[i].stderr_)});
    out.write_csv("dimer_table.csv", {"p", "formula", "degradation", "estimate", "stderr"}, rows,
                  "dimer:(p,formula,degradation,estimate,stderr)");
}

void cmd_report(const RunConfig& cfg, RunOutput& out) {
    const auto dir = resolve_output_dir(cfg);
    const auto load = [&](const std::string& name) {
        std::ifstream in(dir / name);
        if (!in) throw domain_error("report: missing prior output " + (dir / name).string());
        return nlohmann::json::parse(in);
    };
    const auto conej = load("cone_fit.json");
    const auto apj = load("alpha_prime.json");
    const auto tfj = load("transport_fits.json");

    ConeFit cone;
    cone.lambda = conej.at("lambda").get<double>();
    cone.alpha = conej.at("alpha").get<double>();
    AlphaPrimeEstimate ap;
    ap.lambda = apj.at("lambda").get<double>();
    ap.alpha_prime = apj.at("alpha_prime").get<double>();
    ExponentFit front;
    front.lambda = tfj.at("alpha_u").at("lambda").get<double>();
    front.exponent = tfj.at("alpha_u").at("exponent").get<double>();

    const auto rep = consistency_report(cone.lambda, cone, ap, front);
    out.write_json("consistency_report.json", to_json(rep), "consistency-report");
}

int run(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: fibcone <potential|evolve|transport|tracemap|alphaprime|cone|"
                     "oracle-check|dimer|report> [--config file.json] [--key.path value]...\n";
        return 2;
    }
    const std::string cmd = argv[1];
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--", 0) != 0) {
            std::cerr << "unexpected argument '" << arg << "'\n";
            return 2;
        }
        arg = arg.substr(2);
        std::string value;
        if (const auto eq = arg.find('='); eq != std::string::npos) {
            value = arg.substr(eq + 1);
            arg = arg.substr(0, eq);
        } else if (i + 1 < argc) {
            value = argv[++i];
        } else {
            std::cerr << "missing value for --" << arg << "\n";
            return 2;
        }
        if (arg == "config") config_path = value;
        else overrides.emplace_back(arg, value);
    }

    const RunConfig cfg = parse_config(config_path, overrides);
    RunOutput out(resolve_output_dir(cfg), cfg.hash());

    if (cmd == "potential") cmd_potential(cfg, out);
    else if (cmd == "evolve") cmd_evolve(cfg, out);
    else if (cmd == "transport") cmd_transport(cfg, out);
    else if (cmd == "tracemap") cmd_tracemap(cfg, out);
    else if (cmd == "alphaprime") cmd_alphaprime(cfg, out);
    else if (cmd == "cone") cmd_cone(cfg, out);
    else if (cmd == "oracle-check") cmd_oracle_check(cfg, out);
    else if (cmd == "dimer") cmd_dimer(cfg, out);
    else if (cmd == "report") cmd_report(cfg, out);
    else {
        std::cerr << "unknown subcommand '" << cmd << "'\n";
        return 2;
    }
    out.finalize();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fibcone::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fibcone::numeric_failure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
