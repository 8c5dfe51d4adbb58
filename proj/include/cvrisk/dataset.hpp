#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cvrisk {

// Feature matrix + binary labels + per-row metadata. Rows are stored
// row-major; metadata vectors always have one entry per row.
struct LabeledDataset {
    std::vector<std::string> feature_names;
    std::vector<double> values;  // n_rows * n_cols, row-major
    std::vector<int> labels;     // 0/1
    std::vector<std::string> group_ids;
    std::vector<std::int64_t> bin_starts;

    std::size_t n_rows() const { return labels.size(); }
    std::size_t n_cols() const { return feature_names.size(); }

    double at(std::size_t r, std::size_t c) const { return values[r * n_cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * n_cols() + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * n_cols(), n_cols()};
    }

    int col_index(const std::string& name) const;

    void append_row(std::span<const double> row_values, int label, const std::string& group_id,
                    std::int64_t bin_start);

    LabeledDataset select_columns(const std::vector<std::size_t>& cols) const;
    LabeledDataset select_rows(const std::vector<std::size_t>& rows) const;

    std::size_t count_label(int label) const;

    // Must hold before training: no NaN, consistent lengths.
    void validate() const;

    // CSV with header feature_names + crash_check,segment_id,bin_start.
    void save_csv(const std::string& path) const;
    static LabeledDataset load_csv(const std::string& path);

    // Columnar binary cache with a versioned magic header, for fast reload.
    void save_binary(const std::string& path) const;
    static LabeledDataset load_binary(const std::string& path);
};

}  // namespace cvrisk
