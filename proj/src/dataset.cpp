#include "cvrisk/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "cvrisk/csv.hpp"

namespace cvrisk {

int LabeledDataset::col_index(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

void LabeledDataset::append_row(std::span<const double> row_values, int label,
                                const std::string& group_id, std::int64_t bin_start) {
    if (row_values.size() != n_cols()) {
        throw DataError("append_row: expected " + std::to_string(n_cols()) + " values, got " +
                        std::to_string(row_values.size()));
    }
    values.insert(values.end(), row_values.begin(), row_values.end());
    labels.push_back(label);
    group_ids.push_back(group_id);
    bin_starts.push_back(bin_start);
}

LabeledDataset LabeledDataset::select_columns(const std::vector<std::size_t>& cols) const {
    LabeledDataset out;
    out.feature_names.reserve(cols.size());
    for (auto c : cols) out.feature_names.push_back(feature_names.at(c));
    out.values.reserve(n_rows() * cols.size());
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (auto c : cols) out.values.push_back(at(r, c));
    }
    out.labels = labels;
    out.group_ids = group_ids;
    out.bin_starts = bin_starts;
    return out;
}

LabeledDataset LabeledDataset::select_rows(const std::vector<std::size_t>& rows) const {
    LabeledDataset out;
    out.feature_names = feature_names;
    out.values.reserve(rows.size() * n_cols());
    out.labels.reserve(rows.size());
    out.group_ids.reserve(rows.size());
    out.bin_starts.reserve(rows.size());
    for (auto r : rows) {
        auto rv = row(r);
        out.values.insert(out.values.end(), rv.begin(), rv.end());
        out.labels.push_back(labels.at(r));
        out.group_ids.push_back(group_ids[r]);
        out.bin_starts.push_back(bin_starts[r]);
    }
    return out;
}

std::size_t LabeledDataset::count_label(int label) const {
    std::size_t n = 0;
    for (int y : labels) {
        if (y == label) ++n;
    }
    return n;
}

void LabeledDataset::validate() const {
    std::size_t n = n_rows();
    if (group_ids.size() != n || bin_starts.size() != n) {
        throw DataError("dataset metadata length mismatch");
    }
    if (values.size() != n * n_cols()) {
        throw DataError("dataset value count does not match rows * cols");
    }
    for (double v : values) {
        if (std::isnan(v)) throw DataError("dataset contains NaN");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0/1");
    }
}

void LabeledDataset::save_csv(const std::string& path) const {
    CsvWriter w(path);
    std::vector<std::string> row_fields = feature_names;
    row_fields.push_back("crash_check");
    row_fields.push_back("segment_id");
    row_fields.push_back("bin_start");
    w.write_row(row_fields);
    for (std::size_t r = 0; r < n_rows(); ++r) {
        row_fields.clear();
        for (std::size_t c = 0; c < n_cols(); ++c) row_fields.push_back(fmt_double(at(r, c)));
        row_fields.push_back(fmt_int(labels[r]));
        row_fields.push_back(group_ids[r]);
        row_fields.push_back(fmt_int(bin_starts[r]));
        w.write_row(row_fields);
    }
    w.close();
}

LabeledDataset LabeledDataset::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw DataError("cannot open file: " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("empty dataset file: " + path);
    auto header = split_csv_line(header_line);
    if (header.size() < 3 || header[header.size() - 3] != "crash_check" ||
        header[header.size() - 2] != "segment_id" || header.back() != "bin_start") {
        throw DataError(path + ": not a dataset CSV (missing crash_check,segment_id,bin_start tail)");
    }
    LabeledDataset ds;
    ds.feature_names.assign(header.begin(), header.end() - 3);
    std::size_t ncols = ds.feature_names.size();
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != ncols + 3) {
            throw DataError(path + " line " + std::to_string(lineno) + ": wrong field count");
        }
        for (std::size_t c = 0; c < ncols; ++c) {
            auto v = parse_double(f[c]);
            if (!v) throw DataError(path + " line " + std::to_string(lineno) + ": bad value '" + f[c] + "'");
            ds.values.push_back(*v);
        }
        auto y = parse_int(f[ncols]);
        auto bs = parse_int(f[ncols + 2]);
        if (!y || !bs || (*y != 0 && *y != 1)) {
            throw DataError(path + " line " + std::to_string(lineno) + ": bad label or bin_start");
        }
        ds.labels.push_back(static_cast<int>(*y));
        ds.group_ids.push_back(f[ncols + 1]);
        ds.bin_starts.push_back(*bs);
    }
    return ds;
}

namespace {

constexpr char kBinaryMagic[8] = {'C', 'V', 'D', 'S', '0', '0', '0', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("truncated binary dataset: " + path);
    return v;
}

void put_string(std::ofstream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::ifstream& in, const std::string& path) {
    auto n = get<std::uint32_t>(in, path);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw DataError("truncated binary dataset: " + path);
    return s;
}

}  // namespace

void LabeledDataset::save_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw DataError("cannot open file for writing: " + path);
    out.write(kBinaryMagic, sizeof(kBinaryMagic));
    put<std::uint64_t>(out, n_rows());
    put<std::uint64_t>(out, n_cols());
    for (const auto& name : feature_names) put_string(out, name);
    // column-major payload so a reload for training stays cache friendly
    for (std::size_t c = 0; c < n_cols(); ++c) {
        for (std::size_t r = 0; r < n_rows(); ++r) put<double>(out, at(r, c));
    }
    for (int y : labels) put<std::int8_t>(out, static_cast<std::int8_t>(y));
    for (const auto& g : group_ids) put_string(out, g);
    for (auto b : bin_starts) put<std::int64_t>(out, b);
    out.close();
    if (out.fail()) throw DataError("write failed: " + path);
}

LabeledDataset LabeledDataset::load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw DataError("cannot open file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0) {
        throw DataError(path + ": not a dataset binary cache (bad magic)");
    }
    auto rows = get<std::uint64_t>(in, path);
    auto cols = get<std::uint64_t>(in, path);
    LabeledDataset ds;
    ds.feature_names.reserve(cols);
    for (std::uint64_t c = 0; c < cols; ++c) ds.feature_names.push_back(get_string(in, path));
    ds.values.assign(rows * cols, 0.0);
    for (std::uint64_t c = 0; c < cols; ++c) {
        for (std::uint64_t r = 0; r < rows; ++r) ds.values[r * cols + c] = get<double>(in, path);
    }
    ds.labels.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) ds.labels.push_back(get<std::int8_t>(in, path));
    ds.group_ids.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) ds.group_ids.push_back(get_string(in, path));
    ds.bin_starts.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) ds.bin_starts.push_back(get<std::int64_t>(in, path));
    return ds;
}

}  // namespace cvrisk
