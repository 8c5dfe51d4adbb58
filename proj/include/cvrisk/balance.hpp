#pragma once

#include <cstdint>
#include <vector>

#include "cvrisk/dataset.hpp"
#include "cvrisk/rng.hpp"

namespace cvrisk {

enum class TestMode { paper, clean };

TestMode test_mode_from_name(const std::string& s);
std::string test_mode_name(TestMode m);

struct SplitSpec {
    double train_fraction = 0.70;
    std::uint64_t seed = 0;
    double smote_ratio = 1.0;  // minority : majority target, in (0, 1]
    int k_neighbors = 5;
    TestMode test_mode = TestMode::paper;
    bool standardize_knn = false;  // z-score features before the k-NN search
};

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
};

// Crash and non-crash rows are split to the fraction independently, each
// shuffled with the given seed; train is crash rows then non-crash rows.
SplitResult stratified_split(const LabeledDataset& ds, const SplitSpec& spec);

// k nearest minority neighbors of each minority row, exhaustive Euclidean
// search, ties broken by row index. Excludes the row itself.
std::vector<std::vector<std::size_t>> knn_indices(const std::vector<double>& rows,
                                                  std::size_t n_rows, std::size_t n_cols, int k,
                                                  bool standardize);

// Linear interpolation x + lambda * (nn - x), the SMOTE generation kernel.
std::vector<double> smote_interpolate(std::span<const double> a, std::span<const double> b,
                                      double lambda);

struct SmoteResult {
    std::vector<double> rows;            // n_synthetic * n_cols, row-major
    std::vector<std::size_t> seed_rows;  // minority row each synthetic row grew from
    std::size_t n_synthetic = 0;
};

// Emits ceil(ratio * majority_count) - minority_count synthetic rows by
// round-robin over the minority rows; lambda is drawn from the open (0,1).
SmoteResult smote(const std::vector<double>& minority_rows, std::size_t n_rows, std::size_t n_cols,
                  std::size_t majority_count, double ratio, int k, Rng& rng,
                  bool standardize = false);

// Oversamples the minority class of one dataset in place of its metadata:
// synthetic rows inherit the seed row's group id and bin_start.
LabeledDataset oversample_minority(const LabeledDataset& ds, double ratio, int k, Rng& rng,
                                   bool standardize = false);

struct BalanceResult {
    LabeledDataset train;
    LabeledDataset test;
    std::size_t train_synthetic = 0;
    std::size_t test_synthetic = 0;
};

// Split, then SMOTE the training set; the test set is oversampled too in
// paper mode and left untouched in clean mode.
BalanceResult balance_protocol(const LabeledDataset& ds, const SplitSpec& spec);

}  // namespace cvrisk
