#include "fibcone/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "fibcone/errors.hpp"
#include "fibcone/io.hpp"

namespace fibcone {

std::vector<double> TimeGrid::expand() const {
    if (count < 2) throw domain_error("t_grid.count must be >= 2");
    if (!(stop > start)) throw domain_error("t_grid.stop must exceed t_grid.start");
    std::vector<double> ts;
    if (spacing == "linear") {
        for (int i = 0; i < count; ++i)
            ts.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
    } else if (spacing == "log") {
        if (!(start > 0)) throw domain_error("t_grid.start must be > 0 for log spacing");
        const double ratio = std::log(stop / start);
        for (int i = 0; i < count; ++i)
            ts.push_back(start * std::exp(ratio * static_cast<double>(i) / (count - 1)));
    } else {
        throw domain_error("t_grid.spacing must be 'linear' or 'log'");
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        if (!(ts[i] < ts[i + 1])) throw domain_error("t_grid must be strictly increasing");
    if (ts.front() > 0.0) ts.insert(ts.begin(), 0.0);
    return ts;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["potential"] = potential;
    j["n"] = n;
    j["t_grid"] = {{"start", t_grid.start},
                   {"stop", t_grid.stop},
                   {"count", t_grid.count},
                   {"spacing", t_grid.spacing}};
    j["p_grid"] = p_grid;
    j["epsilons"] = epsilons;
    j["fit_window"] = {fit_window.first, fit_window.second};
    j["boundary_tolerance"] = boundary_tolerance;
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    j["max_threads"] = max_threads;
    j["tracemap"] = {{"k_min", tracemap.k_min},       {"k_max", tracemap.k_max},
                     {"z_re", tracemap.z_re},         {"z_im", tracemap.z_im},
                     {"growth_eps", tracemap.growth_eps}, {"growth_m_max", tracemap.growth_m_max},
                     {"phase_count", tracemap.phase_count}, {"m_max", tracemap.m_max}};
    j["cone"] = {{"quantity", cone.quantity}, {"epsilon", cone.epsilon}};
    j["oracle"] = {{"n_list", oracle.n_list},
                   {"lambdas", oracle.lambdas},
                   {"omegas", oracle.omegas},
                   {"times", oracle.times}};
    j["dimer"] = {{"ensemble_size", dimer.ensemble_size},
                  {"lambda", dimer.lambda},
                  {"n", dimer.n},
                  {"t_max", dimer.t_max},
                  {"t_count", dimer.t_count}};
    return j;
}

std::string RunConfig::hash() const {
    // the hash identifies the scientific run: where results are written and
    // how many workers computed them must not change it
    nlohmann::json j = to_json();
    j.erase("max_threads");
    j.erase("output_dir");
    return config_hash(j);
}

namespace {

void reject_unknown(const nlohmann::json& j, const nlohmann::json& reference,
                    const std::string& prefix) {
    if (!j.is_object()) return;
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!reference.contains(key)) throw domain_error("unknown config key '" + path + "'");
        if (value.is_object()) reject_unknown(value, reference.at(key), path);
    }
}

// parse "a.b.c" into a JSON pointer and set the value, coercing to the type
// of the default when one exists
void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value) {
    std::string pointer = "/";
    for (const char c : key) pointer += (c == '.') ? '/' : c;
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
        parsed = value; // plain string
    }
    doc[nlohmann::json::json_pointer(pointer)] = parsed;
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into, const std::string& prefix) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw domain_error("config field '" + prefix + key + "' has the wrong type");
    }
}

} // namespace

RunConfig parse_config(const std::optional<std::string>& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    nlohmann::json doc = nlohmann::json::object();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw domain_error("config file not found: " + *path);
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (!body.empty()) {
            try {
                doc = nlohmann::json::parse(body);
            } catch (const nlohmann::json::exception& e) {
                throw domain_error(std::string("malformed config JSON: ") + e.what());
            }
        }
    }
    if (!doc.is_object()) throw domain_error("config must be a JSON object");
    for (const auto& [key, value] : overrides) apply_override(doc, key, value);

    RunConfig cfg;
    reject_unknown(doc, cfg.to_json(), "");

    if (doc.contains("potential")) cfg.potential = doc.at("potential").get<PotentialSpec>();
    read(doc, "n", cfg.n, "");
    if (doc.contains("t_grid")) {
        const auto& tg = doc.at("t_grid");
        read(tg, "start", cfg.t_grid.start, "t_grid.");
        read(tg, "stop", cfg.t_grid.stop, "t_grid.");
        read(tg, "count", cfg.t_grid.count, "t_grid.");
        read(tg, "spacing", cfg.t_grid.spacing, "t_grid.");
    }
    read(doc, "p_grid", cfg.p_grid, "");
    read(doc, "epsilons", cfg.epsilons, "");
    if (doc.contains("fit_window")) {
        const auto w = doc.at("fit_window").get<std::vector<double>>();
        if (w.size() != 2 || !(w[0] < w[1]))
            throw domain_error("config field 'fit_window' must be [lo, hi] with lo < hi");
        cfg.fit_window = {w[0], w[1]};
    }
    read(doc, "boundary_tolerance", cfg.boundary_tolerance, "");
    read(doc, "output_dir", cfg.output_dir, "");
    read(doc, "seed", cfg.seed, "");
    read(doc, "max_threads", cfg.max_threads, "");
    if (doc.contains("tracemap")) {
        const auto& t = doc.at("tracemap");
        read(t, "k_min", cfg.tracemap.k_min, "tracemap.");
        read(t, "k_max", cfg.tracemap.k_max, "tracemap.");
        read(t, "z_re", cfg.tracemap.z_re, "tracemap.");
        read(t, "z_im", cfg.tracemap.z_im, "tracemap.");
        read(t, "growth_eps", cfg.tracemap.growth_eps, "tracemap.");
        read(t, "growth_m_max", cfg.tracemap.growth_m_max, "tracemap.");
        read(t, "phase_count", cfg.tracemap.phase_count, "tracemap.");
        read(t, "m_max", cfg.tracemap.m_max, "tracemap.");
    }
    if (doc.contains("cone")) {
        const auto& c = doc.at("cone");
        read(c, "quantity", cfg.cone.quantity, "cone.");
        read(c, "epsilon", cfg.cone.epsilon, "cone.");
    }
    if (doc.contains("oracle")) {
        const auto& o = doc.at("oracle");
        read(o, "n_list", cfg.oracle.n_list, "oracle.");
        read(o, "lambdas", cfg.oracle.lambdas, "oracle.");
        read(o, "omegas", cfg.oracle.omegas, "oracle.");
        read(o, "times", cfg.oracle.times, "oracle.");
    }
    if (doc.contains("dimer")) {
        const auto& d = doc.at("dimer");
        read(d, "ensemble_size", cfg.dimer.ensemble_size, "dimer.");
        read(d, "lambda", cfg.dimer.lambda, "dimer.");
        read(d, "n", cfg.dimer.n, "dimer.");
        read(d, "t_max", cfg.dimer.t_max, "dimer.");
        read(d, "t_count", cfg.dimer.t_count, "dimer.");
    }

    // validation that names fields
    try {
        cfg.potential.validate();
    } catch (const domain_error& e) {
        throw domain_error(std::string("config field 'potential': ") + e.what());
    }
    if (cfg.n < 1) throw domain_error("config field 'n' must be >= 1");
    cfg.t_grid.expand(); // throws with field names
    for (double p : cfg.p_grid)
        if (!(p > 0)) throw domain_error("config field 'p_grid' entries must be > 0");
    for (double e : cfg.epsilons)
        if (!(e > 0 && e < 1)) throw domain_error("config field 'epsilons' entries must be in (0,1)");
    if (!(cfg.boundary_tolerance > 0))
        throw domain_error("config field 'boundary_tolerance' must be > 0");
    if (cfg.cone.quantity != "lower" && cfg.cone.quantity != "fermi" && cfg.cone.quantity != "spin")
        throw domain_error("config field 'cone.quantity' must be lower|fermi|spin");
    if (!(cfg.cone.epsilon > 0 && cfg.cone.epsilon < 1))
        throw domain_error("config field 'cone.epsilon' must be in (0,1)");
    if (cfg.tracemap.k_max < cfg.tracemap.k_min + 2)
        throw domain_error("config field 'tracemap.k_max' must be >= k_min + 2");
    if (cfg.dimer.ensemble_size < 8)
        throw domain_error("config field 'dimer.ensemble_size' must be >= 8");
    return cfg;
}

} // namespace fibcone
