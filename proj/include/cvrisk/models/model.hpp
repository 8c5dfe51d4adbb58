#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cvrisk/dataset.hpp"
#include "json.hpp"

namespace cvrisk {

enum class ModelKind { logreg, linsvm, rf, gbt, gpb };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Uniform train/score contract over the five classifier families.
// score() is a probability in [0,1] for probabilistic kinds and a signed
// margin for the SVM; predict() thresholds at decision_threshold().
class Model {
public:
    virtual ~Model() = default;

    virtual ModelKind kind() const = 0;
    virtual const std::vector<std::string>& feature_names() const = 0;

    // group_id carries the per-row grouping for random-effect models and is
    // ignored by every other kind.
    virtual double score(std::span<const double> row, const std::string* group_id = nullptr) const = 0;

    virtual double decision_threshold() const { return 0.5; }

    int predict(std::span<const double> row, const std::string* group_id = nullptr) const {
        return score(row, group_id) >= decision_threshold() ? 1 : 0;
    }

    virtual nlohmann::json to_json() const = 0;
};

// Column positions of the model's features inside the dataset; throws if a
// feature is absent. Scoring goes through this mapping so a dataset with
// permuted columns still scores identically.
std::vector<std::size_t> align_columns(const Model& model, const LabeledDataset& ds);

std::vector<double> score_rows(const Model& model, const LabeledDataset& ds);
std::vector<int> predict_rows(const Model& model, const LabeledDataset& ds);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j);
void save_model(const Model& model, const std::string& path);
std::unique_ptr<Model> load_model(const std::string& path);

}  // namespace cvrisk
