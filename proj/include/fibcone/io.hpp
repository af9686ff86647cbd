// Artifact emission: CSV files (comma separated, '.' decimal, header row, LF
// endings, 17 significant digits) plus a manifest naming every file written.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fibcone {

std::string format_double(double v); // %.17g

std::uint64_t fnv1a64(const std::string& s);

// Hash of a config document: canonical (key-sorted) JSON dump, FNV-1a.
std::string config_hash(const nlohmann::json& config);

class RunOutput {
public:
    RunOutput(std::filesystem::path dir, std::string config_hash);

    // Streams a CSV file; rows are sequences of already-formatted cells.
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, const std::string& schema);

    void write_json(const std::string& name, const nlohmann::json& payload, const std::string& schema);

    // Whitespace-separated data file plus matching gnuplot script.
    void write_plot_data(const std::string& name, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows, const std::string& schema);

    void write_text(const std::string& name, const std::string& body, const std::string& schema,
                    std::size_t rows);

    void finalize(); // writes manifest.json

    const std::filesystem::path& dir() const { return dir_; }

private:
    struct Entry {
        std::string path;
        std::string schema;
        std::size_t rows;
    };
    std::filesystem::path dir_;
    std::string hash_;
    std::vector<Entry> entries_;
};

} // namespace fibcone
