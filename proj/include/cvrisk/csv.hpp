#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvrisk {

// Raised for malformed inputs that the caller cannot recover from.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest round-trip representation; keeps artifacts bytewise reproducible.
std::string fmt_double(double v);
std::string fmt_int(std::int64_t v);

std::vector<std::string> split_csv_line(const std::string& line);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

// Line-oriented CSV reader with a mandatory header row.
class CsvReader {
public:
    CsvReader(const std::string& path, const std::vector<std::string>& expected_header);

    // Returns false at end of file. Blank lines are skipped.
    bool next_row(std::vector<std::string>& fields);

    std::size_t line_number() const { return line_number_; }

private:
    std::ifstream in_;
    std::string path_;
    std::size_t line_number_ = 0;
};

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void write_row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::string path_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

}  // namespace cvrisk
