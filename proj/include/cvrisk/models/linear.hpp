#pragma once

#include <cstdint>

#include "cvrisk/models/model.hpp"

namespace cvrisk {

struct LogRegConfig {
    double l2_strength = 1.0;
    double learning_rate = 0.1;
    int max_iter = 1000;
    double tol = 1e-8;  // stop when the gradient's max norm falls below
};

// Weights live on the raw feature scale. Training standardizes internally
// and folds the transform back, so gradient descent stays stable on
// unscaled traffic features.
class LogRegModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::logreg; }
    const std::vector<std::string>& feature_names() const override { return feature_names_; }
    double score(std::span<const double> row, const std::string* = nullptr) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<LogRegModel> from_json(const nlohmann::json& j);

    std::vector<double> weights;
    double bias = 0.0;
    bool converged = false;
    LogRegConfig config;

    std::vector<std::string> feature_names_;
};

std::unique_ptr<LogRegModel> train_logreg(const LabeledDataset& train, const LogRegConfig& config);

// Objective and gradient of the trained loss at an arbitrary parameter
// point theta = (weights..., bias); mean cross entropy plus
// l2/(2n) * |w|^2. Exposed so the gradient can be checked directly.
double logreg_objective(std::span<const double> theta, const LabeledDataset& ds, double l2_strength);
std::vector<double> logreg_gradient(std::span<const double> theta, const LabeledDataset& ds,
                                    double l2_strength);

struct LinSvmConfig {
    double c = 1.0;
    double learning_rate = 0.01;
    int max_iter = 1000;
};

// Linear SVM trained by full-batch subgradient descent on
// (|w|^2/2 + c * sum hinge) / n. score() is the signed margin.
class LinSvmModel : public Model {
public:
    ModelKind kind() const override { return ModelKind::linsvm; }
    const std::vector<std::string>& feature_names() const override { return feature_names_; }
    double score(std::span<const double> row, const std::string* = nullptr) const override;
    double decision_threshold() const override { return 0.0; }
    nlohmann::json to_json() const override;
    static std::unique_ptr<LinSvmModel> from_json(const nlohmann::json& j);

    std::vector<double> weights;
    double bias = 0.0;
    LinSvmConfig config;

    std::vector<std::string> feature_names_;
};

// objective_trace, when given, records the internally minimized objective
// after every iteration (on the standardized copy of the data).
std::unique_ptr<LinSvmModel> train_linsvm(const LabeledDataset& train, const LinSvmConfig& config,
                                          std::vector<double>* objective_trace = nullptr);

double linsvm_objective(std::span<const double> theta, const LabeledDataset& ds, double c);

}  // namespace cvrisk
