#pragma once

#include <cstdint>

#include "cvrisk/models/model.hpp"
#include "cvrisk/models/tree.hpp"

namespace cvrisk {

struct GbtConfig {
    double learning_rate = 0.05;
    int max_depth = 11;
    int n_rounds = 200;
    double lambda = 1.0;
    double min_child_weight = 1.0;
};

// Column-major training matrix with per-feature presorted row orders. The
// sort happens once per fit and is shared by every boosting round.
class NewtonTreeData {
public:
    explicit NewtonTreeData(const LabeledDataset& ds);

    std::size_t n_rows() const { return n_; }
    std::size_t n_cols() const { return p_; }
    const double* col(std::size_t f) const { return cols_.data() + f * n_; }
    const std::vector<std::uint32_t>& sorted_rows(std::size_t f) const { return sorted_[f]; }

private:
    std::size_t n_, p_;
    std::vector<double> cols_;
    std::vector<std::vector<std::uint32_t>> sorted_;
};

// One exact-greedy tree on gradients/hessians. Split gain is
//   (G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)) / 2
// and leaf values are -G/(H+lambda). Candidate thresholds are midpoints
// between consecutive distinct values; ties resolve to the lowest feature
// index, then the lowest threshold. leaf_of, when given, receives the tree
// node index each row ends in (saves re-evaluating the tree).
Tree fit_newton_tree(const NewtonTreeData& data, std::span<const double> gradients,
                     std::span<const double> hessians, const GbtConfig& config,
                     std::vector<std::int32_t>* leaf_of = nullptr);

struct GbtTrainInfo {
    std::vector<double> train_logloss;  // after each round
};

// Newton boosting on logarithmic loss. score() is
// sigmoid(base_score + learning_rate * sum of tree outputs).
class GbtModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::gbt; }
    const std::vector<std::string>& feature_names() const override { return feature_names_; }
    double score(std::span<const double> row, const std::string* = nullptr) const override;
    double margin(std::span<const double> row) const;
    nlohmann::json to_json() const override;
    static std::unique_ptr<GbtModel> from_json(const nlohmann::json& j);

    double base_score = 0.0;  // log-odds of the training base rate
    std::vector<Tree> trees;
    GbtConfig config;
    std::vector<std::string> feature_names_;
};

std::unique_ptr<GbtModel> train_gbt(const LabeledDataset& train, const GbtConfig& config,
                                    GbtTrainInfo* info = nullptr);

double log_loss(std::span<const double> probabilities, std::span<const int> labels);

}  // namespace cvrisk
