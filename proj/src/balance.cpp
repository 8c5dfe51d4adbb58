#include "cvrisk/balance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvrisk/csv.hpp"

namespace cvrisk {

TestMode test_mode_from_name(const std::string& s) {
    if (s == "paper") return TestMode::paper;
    if (s == "clean") return TestMode::clean;
    throw DataError("unknown test mode: " + s + " (expected paper or clean)");
}

std::string test_mode_name(TestMode m) {
    return m == TestMode::paper ? "paper" : "clean";
}

SplitResult stratified_split(const LabeledDataset& ds, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
        throw DataError("train fraction must be in (0, 1)");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        (ds.labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.size() < 2 || neg.size() < 2) {
        throw DataError("stratified split needs at least 2 rows per class (have " +
                        std::to_string(pos.size()) + " positive, " + std::to_string(neg.size()) +
                        " negative)");
    }

    auto split_stratum = [&](std::vector<std::size_t>& idx, std::uint64_t stream) {
        Rng rng(derive_seed(spec.seed, stream));
        rng.shuffle(idx);
        auto n_train = static_cast<std::size_t>(
            std::llround(spec.train_fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        return n_train;
    };

    std::size_t pos_train = split_stratum(pos, 1);
    std::size_t neg_train = split_stratum(neg, 2);

    std::vector<std::size_t> train_idx(pos.begin(), pos.begin() + pos_train);
    train_idx.insert(train_idx.end(), neg.begin(), neg.begin() + neg_train);
    std::vector<std::size_t> test_idx(pos.begin() + pos_train, pos.end());
    test_idx.insert(test_idx.end(), neg.begin() + neg_train, neg.end());

    return {ds.select_rows(train_idx), ds.select_rows(test_idx)};
}

std::vector<std::vector<std::size_t>> knn_indices(const std::vector<double>& rows,
                                                  std::size_t n_rows, std::size_t n_cols, int k,
                                                  bool standardize) {
    if (static_cast<std::size_t>(k) >= n_rows) {
        throw DataError("smote: k (" + std::to_string(k) + ") must be below minority count (" +
                        std::to_string(n_rows) + ")");
    }
    std::vector<double> scaled;
    const double* data = rows.data();
    if (standardize) {
        scaled = rows;
        for (std::size_t c = 0; c < n_cols; ++c) {
            double sum = 0.0, sum_sq = 0.0;
            for (std::size_t r = 0; r < n_rows; ++r) sum += rows[r * n_cols + c];
            double mean = sum / static_cast<double>(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                double d = rows[r * n_cols + c] - mean;
                sum_sq += d * d;
            }
            double sd = std::sqrt(sum_sq / static_cast<double>(n_rows));
            if (sd == 0.0) sd = 1.0;
            for (std::size_t r = 0; r < n_rows; ++r) {
                scaled[r * n_cols + c] = (rows[r * n_cols + c] - mean) / sd;
            }
        }
        data = scaled.data();
    }

    std::vector<std::vector<std::size_t>> out(n_rows);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < n_rows; ++i) {
        dist.clear();
        dist.reserve(n_rows - 1);
        for (std::size_t j = 0; j < n_rows; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < n_cols; ++c) {
                double d = data[i * n_cols + c] - data[j * n_cols + c];
                d2 += d * d;
            }
            dist.emplace_back(d2, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        out[i].reserve(k);
        for (int t = 0; t < k; ++t) out[i].push_back(dist[t].second);
    }
    return out;
}

std::vector<double> smote_interpolate(std::span<const double> a, std::span<const double> b,
                                      double lambda) {
    std::vector<double> out(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) out[c] = a[c] + lambda * (b[c] - a[c]);
    return out;
}

SmoteResult smote(const std::vector<double>& minority_rows, std::size_t n_rows, std::size_t n_cols,
                  std::size_t majority_count, double ratio, int k, Rng& rng, bool standardize) {
    if (ratio <= 0.0 || ratio > 1.0) {
        throw DataError("smote ratio must be in (0, 1]");
    }
    if (k < 1) throw DataError("smote needs k >= 1");

    auto target = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(majority_count)));
    SmoteResult res;
    if (target <= n_rows) return res;  // already balanced to the ratio
    res.n_synthetic = target - n_rows;

    auto nn = knn_indices(minority_rows, n_rows, n_cols, k, standardize);

    res.rows.reserve(res.n_synthetic * n_cols);
    res.seed_rows.reserve(res.n_synthetic);
    std::size_t i = 0;
    for (std::size_t made = 0; made < res.n_synthetic; ++made) {
        const auto& neighbors = nn[i];
        std::size_t j = neighbors[rng.uniform_index(neighbors.size())];
        double lambda = rng.uniform_open01();
        for (std::size_t c = 0; c < n_cols; ++c) {
            double x = minority_rows[i * n_cols + c];
            res.rows.push_back(x + lambda * (minority_rows[j * n_cols + c] - x));
        }
        res.seed_rows.push_back(i);
        i = (i + 1) % n_rows;  // round-robin until the target is reached
    }
    return res;
}

LabeledDataset oversample_minority(const LabeledDataset& ds, double ratio, int k, Rng& rng,
                                   bool standardize) {
    std::size_t n_pos = ds.count_label(1);
    std::size_t n_neg = ds.n_rows() - n_pos;
    int minority_label = n_pos <= n_neg ? 1 : 0;
    std::size_t minority_count = std::min(n_pos, n_neg);
    std::size_t majority_count = std::max(n_pos, n_neg);
    if (minority_count == 0) throw DataError("smote: minority class is empty");

    std::vector<std::size_t> minority_idx;
    minority_idx.reserve(minority_count);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        if (ds.labels[i] == minority_label) minority_idx.push_back(i);
    }

    std::vector<double> minority_rows;
    minority_rows.reserve(minority_count * ds.n_cols());
    for (auto r : minority_idx) {
        auto rv = ds.row(r);
        minority_rows.insert(minority_rows.end(), rv.begin(), rv.end());
    }

    auto synth = smote(minority_rows, minority_count, ds.n_cols(), majority_count, ratio, k, rng,
                       standardize);

    LabeledDataset out = ds;
    for (std::size_t s = 0; s < synth.n_synthetic; ++s) {
        std::size_t origin = minority_idx[synth.seed_rows[s]];
        out.append_row({synth.rows.data() + s * ds.n_cols(), ds.n_cols()}, minority_label,
                       ds.group_ids[origin], ds.bin_starts[origin]);
    }
    return out;
}

BalanceResult balance_protocol(const LabeledDataset& ds, const SplitSpec& spec) {
    auto split = stratified_split(ds, spec);
    BalanceResult out;

    std::size_t train_before = split.train.n_rows();
    Rng train_rng(derive_seed(spec.seed, 3));
    out.train = oversample_minority(split.train, spec.smote_ratio, spec.k_neighbors, train_rng,
                                    spec.standardize_knn);
    out.train_synthetic = out.train.n_rows() - train_before;

    if (spec.test_mode == TestMode::paper) {
        std::size_t test_before = split.test.n_rows();
        Rng test_rng(derive_seed(spec.seed, 4));
        out.test = oversample_minority(split.test, spec.smote_ratio, spec.k_neighbors, test_rng,
                                       spec.standardize_knn);
        out.test_synthetic = out.test.n_rows() - test_before;
    } else {
        out.test = std::move(split.test);
    }
    return out;
}

}  // namespace cvrisk
