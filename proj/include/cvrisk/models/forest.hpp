#pragma once

#include <cstdint>

#include "cvrisk/models/model.hpp"
#include "cvrisk/models/tree.hpp"

namespace cvrisk {

struct RfConfig {
    int n_trees = 100;
    int max_features = 0;  // 0 means floor(sqrt(p))
    std::uint64_t seed = 0;
    bool bootstrap = true;
    int max_depth = 0;  // 0 means grow until pure or below min_samples_split
    int min_samples_split = 2;
};

// Bagged Gini trees; leaves store the class-1 fraction of their training
// rows. score() is the fraction of trees voting 1 (leaf fraction >= 0.5),
// margin() the mean leaf fraction (the additive output SHAP explains).
class RfModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::rf; }
    const std::vector<std::string>& feature_names() const override { return feature_names_; }
    double score(std::span<const double> row, const std::string* = nullptr) const override;
    double margin(std::span<const double> row) const;
    nlohmann::json to_json() const override;
    static std::unique_ptr<RfModel> from_json(const nlohmann::json& j);

    std::vector<Tree> trees;
    RfConfig config;
    std::vector<std::string> feature_names_;
};

std::unique_ptr<RfModel> train_rf(const LabeledDataset& train, const RfConfig& config);

}  // namespace cvrisk
