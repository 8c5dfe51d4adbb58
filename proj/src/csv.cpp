#include "cvrisk/csv.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace cvrisk {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::string fmt_int(std::int64_t v) {
    std::array<char, 24> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(std::move(cell));
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

CsvReader::CsvReader(const std::string& path, const std::vector<std::string>& expected_header)
    : in_(path), path_(path) {
    if (!in_.is_open()) {
        throw DataError("cannot open file: " + path);
    }
    std::string header_line;
    if (!std::getline(in_, header_line)) {
        throw DataError("empty file: " + path);
    }
    ++line_number_;
    auto header = split_csv_line(header_line);
    if (header != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i) {
            if (i) want += ',';
            want += expected_header[i];
        }
        throw DataError("header mismatch in " + path + ": expected '" + want + "', got '" + header_line + "'");
    }
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (line.empty() || line == "\r") continue;
        fields = split_csv_line(line);
        return true;
    }
    return false;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_.is_open()) {
        throw DataError("cannot open file for writing: " + path);
    }
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) {
        throw DataError("write failed: " + path_);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot open file for writing: " + path);
    out << content;
    out.close();
    if (out.fail()) throw DataError("write failed: " + path);
}

bool file_exists(const std::string& path) {
    return std::filesystem::exists(path);
}

}  // namespace cvrisk
