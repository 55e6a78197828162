#include "bslms/io.hpp"

#include <charconv>
#include <sstream>
#include <system_error>

#include "bslms/errors.hpp"

namespace bslms::io {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_cell(const std::string& cell, double& v) {
    std::size_t b = cell.find_first_not_of(" \t");
    std::size_t e = cell.find_last_not_of(" \t");
    if (b == std::string::npos) return false;
    const char* first = cell.data() + b;
    const char* last = cell.data() + e + 1;
    auto [ptr, ec] = std::from_chars(first, last, v);
    return ec == std::errc() && ptr == last;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_number failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(fs::path path, const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    tmp_ = path_;
    tmp_ += ".tmp";
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write '" + tmp_.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter::~CsvWriter() {
    if (open_) {
        try {
            abandon();
        } catch (...) {
        }
    }
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw DimensionError("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
    out_.flush();
}

fs::path CsvWriter::commit() {
    out_.close();
    open_ = false;
    fs::rename(tmp_, path_);
    return path_;
}

fs::path CsvWriter::abandon() {
    out_.close();
    open_ = false;
    fs::path partial = path_;
    partial += ".partial";
    fs::rename(tmp_, partial);
    return partial;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    CsvWriter w(path, header);
    for (const auto& r : rows) w.row(r);
    w.commit();
}

void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
    if (columns.size() != header.size()) throw DimensionError("write_columns: header/column mismatch");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != n) throw DimensionError("write_columns: columns differ in length");
    }
    CsvWriter w(path, header);
    std::vector<double> row(columns.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) row[j] = columns[j][i];
        w.row(row);
    }
    w.commit();
}

std::vector<std::vector<double>> read_columns(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<std::vector<double>> cols;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        std::vector<double> values(cells.size());
        bool numeric = true;
        for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = parse_cell(cells[i], values[i]);
        if (!numeric) {
            if (cols.empty() && line_no == 1) continue;  // header
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell");
        }
        if (cols.empty()) cols.resize(values.size());
        if (values.size() != cols.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(cols.size()) + " cells");
        }
        for (std::size_t i = 0; i < values.size(); ++i) cols[i].push_back(values[i]);
    }
    return cols;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["manifest_version"] = 1;
    j["command"] = command;
    j["tool_version"] = version;
    j["master_seed"] = master_seed;
    j["duration_seconds"] = duration_seconds;
    j["artifacts"] = artifacts;
    j["config"] = config;
    j["results"] = extra;
    return j;
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
    write_atomic(path, manifest.to_json().dump(2) + "\n");
}

std::string gnuplot_script(const std::string& data_file, const std::vector<std::string>& header, bool log_x,
                           bool db_y) {
    std::ostringstream s;
    s << "# gnuplot -p " << data_file << ".gp\n";
    s << "set datafile separator ','\n";
    s << "set grid\n";
    if (log_x) s << "set logscale x\n";
    s << "set xlabel '" << (header.empty() ? "x" : header.front()) << "'\n";
    s << "set ylabel '" << (db_y ? "MSD (dB)" : "value") << "'\n";
    s << "plot";
    for (std::size_t i = 1; i < header.size(); ++i) {
        s << (i > 1 ? ", \\\n    " : " ") << "'" << data_file << "' every ::1 using 1:"
          << (db_y ? "(10*log10($" + std::to_string(i + 1) + "))" : std::to_string(i + 1)) << " with lines title '" << header[i] << "'";
    }
    s << "\n";
    return s.str();
}

}  // namespace bslms::io
