#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace curvlab::cli {

// Round-trippable decimal form: 17 significant digits, '.' separator.
std::string format_number(double v);

// RFC 4180 table assembled in memory and written in one piece.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    std::size_t rows() const noexcept { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::string& path, const std::string& content);

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::vector<std::string> outputs;
    long long seed = 0;

    nlohmann::ordered_json to_json() const;
    // Records the manifest itself as an output and writes it atomically.
    void write(const std::string& path);
};

nlohmann::ordered_json version_info();

}  // namespace curvlab::cli
