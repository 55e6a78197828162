#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace bslms::io {

/// Write `content` to `path` via a sibling temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal text (17 significant digits at most).
std::string format_number(double v);

/// Streaming CSV table. Rows go to `<path>.tmp`; commit() renames to `path`,
/// abandon() renames to `<path>.partial` so completed rows survive a failure.
class CsvWriter {
public:
    CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    std::filesystem::path commit();
    std::filesystem::path abandon();

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    std::size_t columns_;
    bool open_ = true;
};

/// Whole-table convenience wrapper around CsvWriter.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Column-major table: one column per series, all of equal length.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

/// Reads a numeric CSV with an optional header row; returns its columns.
std::vector<std::vector<double>> read_columns(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::ordered_json config;  ///< fully resolved, accepted back by --config
    std::uint64_t master_seed = 0;
    std::vector<std::string> artifacts;
    std::string version;
    double duration_seconds = 0.0;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();  ///< theory values, warnings

    nlohmann::ordered_json to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

/// gnuplot script plotting columns 2.. of `data` against column 1.
std::string gnuplot_script(const std::string& data_file, const std::vector<std::string>& header, bool log_x,
                           bool db_y);

}  // namespace bslms::io
