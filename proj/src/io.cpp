#include "fibcone/io.hpp"

#include <chrono>
#include <cstdio>

#include "fibcone/errors.hpp"

namespace fibcone {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string config_hash(const nlohmann::json& config) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

RunOutput::RunOutput(std::filesystem::path dir, std::string config_hash)
    : dir_(std::move(dir)), hash_(std::move(config_hash)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
        throw domain_error("output directory not writable: " + dir_.string());
}

void RunOutput::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows,
                          const std::string& schema) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw domain_error("cannot open " + (dir_ / name).string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
    entries_.push_back({name, schema, rows.size()});
}

void RunOutput::write_json(const std::string& name, const nlohmann::json& payload,
                           const std::string& schema) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw domain_error("cannot open " + (dir_ / name).string());
    out << payload.dump(2) << '\n';
    entries_.push_back({name, schema, 1});
}

void RunOutput::write_plot_data(const std::string& name, const std::vector<std::string>& columns,
                                const std::vector<std::vector<double>>& rows,
                                const std::string& schema) {
    {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw domain_error("cannot open " + (dir_ / name).string());
        out << "#";
        for (const auto& c : columns) out << ' ' << c;
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? " " : "") << format_double(row[i]);
            out << '\n';
        }
    }
    entries_.push_back({name, schema, rows.size()});
    const std::string script = name + ".gp";
    std::ofstream gp(dir_ / script, std::ios::binary);
    gp << "set logscale xy\nset xlabel '" << columns.front() << "'\nplot";
    for (std::size_t i = 1; i < columns.size(); ++i)
        gp << (i > 1 ? "," : "") << " '" << name << "' using 1:" << (i + 1)
           << " with linespoints title '" << columns[i] << "'";
    gp << '\n';
    entries_.push_back({script, "gnuplot-script", 1});
}

void RunOutput::write_text(const std::string& name, const std::string& body,
                           const std::string& schema, std::size_t rows) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw domain_error("cannot open " + (dir_ / name).string());
    out << body;
    entries_.push_back({name, schema, rows});
}

void RunOutput::finalize() {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : entries_)
        files.push_back({{"path", e.path}, {"schema", e.schema}, {"rows", e.rows}});
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    nlohmann::json manifest = {
        {"config_hash", hash_},
        {"generated_at", std::chrono::duration_cast<std::chrono::seconds>(now).count()},
        {"files", files},
    };
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
}

} // namespace fibcone
