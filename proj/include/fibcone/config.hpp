// Run configuration: one JSON document, strict validation (unknown keys are
// rejected, offending field named), flag overrides as dotted paths that win
// over file values.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fibcone/potential.hpp"

namespace fibcone {

struct TimeGrid {
    double start = 0.0;
    double stop = 300.0;
    int count = 121;
    std::string spacing = "linear"; // or "log"

    // expanded grid; a leading t = 0 is prepended when absent so Abel
    // averages see the whole history
    std::vector<double> expand() const;
};

struct RunConfig {
    PotentialSpec potential{PotentialKind::Fibonacci, 8.0};
    std::size_t n = 2000;
    TimeGrid t_grid;
    std::vector<double> p_grid{1.0, 2.0};
    std::vector<double> epsilons{1e-4, 1e-6, 1e-8};
    std::pair<double, double> fit_window{10.0, 300.0};
    double boundary_tolerance = 1e-10;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    unsigned max_threads = 0; // 0 = hardware

    struct Tracemap {
        int k_min = 3;
        int k_max = 14;
        double z_re = 0.3, z_im = 0.0;
        double growth_eps = 1.0;
        int growth_m_max = 25;
        int phase_count = 10;
        int m_max = 8;
    } tracemap;

    struct Cone {
        std::string quantity = "spin";
        double epsilon = 1e-6;
    } cone;

    struct Oracle {
        std::vector<int> n_list{2, 3, 4, 5, 6, 7, 8};
        std::vector<double> lambdas{0.0, 1.0, 8.0};
        std::vector<double> omegas{0.0, 0.3};
        std::vector<double> times{0.0, 0.5, 1.7, 4.0};
    } oracle;

    struct Dimer {
        int ensemble_size = 16;
        double lambda = 0.5;
        std::size_t n = 800;
        double t_max = 150.0;
        int t_count = 41;
    } dimer;

    nlohmann::json to_json() const;
    std::string hash() const;
};

// Parses file (optional) plus dotted-path overrides, validates, fills
// defaults.  Throws domain_error naming the offending key.
RunConfig parse_config(const std::optional<std::string>& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

} // namespace fibcone
