#include "cvrisk/models/linear.hpp"

#include <algorithm>
#include <cmath>

#include "cvrisk/csv.hpp"

namespace cvrisk {

namespace {

void check_finite(const LabeledDataset& ds) {
    for (double v : ds.values) {
        if (!std::isfinite(v)) throw DataError("training data contains non-finite features");
    }
}

void check_two_classes(const LabeledDataset& ds) {
    std::size_t pos = ds.count_label(1);
    if (pos == 0 || pos == ds.n_rows()) {
        throw DataError("training set must contain both classes");
    }
}

struct Standardizer {
    std::vector<double> mean, stddev;

    explicit Standardizer(const LabeledDataset& ds) {
        std::size_t p = ds.n_cols(), n = ds.n_rows();
        mean.assign(p, 0.0);
        stddev.assign(p, 1.0);
        for (std::size_t r = 0; r < n; ++r) {
            auto row = ds.row(r);
            for (std::size_t c = 0; c < p; ++c) mean[c] += row[c];
        }
        for (double& m : mean) m /= static_cast<double>(n);
        std::vector<double> var(p, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            auto row = ds.row(r);
            for (std::size_t c = 0; c < p; ++c) {
                double d = row[c] - mean[c];
                var[c] += d * d;
            }
        }
        for (std::size_t c = 0; c < p; ++c) {
            double sd = std::sqrt(var[c] / static_cast<double>(n));
            stddev[c] = sd > 0.0 ? sd : 1.0;
        }
    }

    LabeledDataset apply(const LabeledDataset& ds) const {
        LabeledDataset out = ds;
        std::size_t p = ds.n_cols();
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            for (std::size_t c = 0; c < p; ++c) {
                out.at(r, c) = (ds.at(r, c) - mean[c]) / stddev[c];
            }
        }
        return out;
    }

    // Fold standardized weights back onto the raw feature scale.
    void fold_back(std::vector<double>& w, double& b) const {
        for (std::size_t c = 0; c < w.size(); ++c) {
            w[c] /= stddev[c];
            b -= w[c] * mean[c];
        }
    }
};

double dot_row(std::span<const double> theta, std::span<const double> row) {
    double z = theta[row.size()];  // bias is the last entry
    for (std::size_t c = 0; c < row.size(); ++c) z += theta[c] * row[c];
    return z;
}

}  // namespace

double logreg_objective(std::span<const double> theta, const LabeledDataset& ds,
                        double l2_strength) {
    std::size_t n = ds.n_rows(), p = ds.n_cols();
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double z = dot_row(theta, ds.row(r));
        // log(1 + exp(-|z|)) form avoids overflow
        double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - static_cast<double>(ds.labels[r]) * z;
    }
    double reg = 0.0;
    for (std::size_t c = 0; c < p; ++c) reg += theta[c] * theta[c];
    return (loss + 0.5 * l2_strength * reg) / static_cast<double>(n);
}

std::vector<double> logreg_gradient(std::span<const double> theta, const LabeledDataset& ds,
                                    double l2_strength) {
    std::size_t n = ds.n_rows(), p = ds.n_cols();
    std::vector<double> grad(p + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = ds.row(r);
        double residual = sigmoid(dot_row(theta, row)) - static_cast<double>(ds.labels[r]);
        for (std::size_t c = 0; c < p; ++c) grad[c] += residual * row[c];
        grad[p] += residual;
    }
    for (std::size_t c = 0; c < p; ++c) grad[c] += l2_strength * theta[c];
    for (double& g : grad) g /= static_cast<double>(n);
    return grad;
}

std::unique_ptr<LogRegModel> train_logreg(const LabeledDataset& train, const LogRegConfig& config) {
    check_finite(train);
    check_two_classes(train);

    Standardizer scaler(train);
    LabeledDataset ds = scaler.apply(train);

    std::size_t p = ds.n_cols();
    std::vector<double> theta(p + 1, 0.0);
    bool converged = false;
    for (int it = 0; it < config.max_iter; ++it) {
        auto grad = logreg_gradient(theta, ds, config.l2_strength);
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        if (gmax < config.tol) {
            converged = true;
            break;
        }
        for (std::size_t c = 0; c <= p; ++c) theta[c] -= config.learning_rate * grad[c];
    }

    auto model = std::make_unique<LogRegModel>();
    model->weights.assign(theta.begin(), theta.begin() + p);
    model->bias = theta[p];
    scaler.fold_back(model->weights, model->bias);
    model->converged = converged;
    model->config = config;
    model->feature_names_ = train.feature_names;
    return model;
}

double LogRegModel::score(std::span<const double> row, const std::string*) const {
    double z = bias;
    for (std::size_t c = 0; c < weights.size(); ++c) z += weights[c] * row[c];
    return sigmoid(z);
}

nlohmann::json LogRegModel::to_json() const {
    return {{"weights", weights},
            {"bias", bias},
            {"converged", converged},
            {"config",
             {{"l2_strength", config.l2_strength},
              {"learning_rate", config.learning_rate},
              {"max_iter", config.max_iter},
              {"tol", config.tol}}},
            {"feature_names", feature_names_}};
}

std::unique_ptr<LogRegModel> LogRegModel::from_json(const nlohmann::json& j) {
    auto m = std::make_unique<LogRegModel>();
    m->weights = j.at("weights").get<std::vector<double>>();
    m->bias = j.at("bias").get<double>();
    m->converged = j.at("converged").get<bool>();
    const auto& c = j.at("config");
    m->config.l2_strength = c.at("l2_strength").get<double>();
    m->config.learning_rate = c.at("learning_rate").get<double>();
    m->config.max_iter = c.at("max_iter").get<int>();
    m->config.tol = c.at("tol").get<double>();
    m->feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    return m;
}

double linsvm_objective(std::span<const double> theta, const LabeledDataset& ds, double c) {
    std::size_t n = ds.n_rows(), p = ds.n_cols();
    double reg = 0.0;
    for (std::size_t i = 0; i < p; ++i) reg += theta[i] * theta[i];
    double hinge = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double y = ds.labels[r] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * dot_row(theta, ds.row(r)));
    }
    return (0.5 * reg + c * hinge) / static_cast<double>(n);
}

std::unique_ptr<LinSvmModel> train_linsvm(const LabeledDataset& train, const LinSvmConfig& config,
                                          std::vector<double>* objective_trace) {
    check_finite(train);
    check_two_classes(train);

    Standardizer scaler(train);
    LabeledDataset ds = scaler.apply(train);

    std::size_t n = ds.n_rows(), p = ds.n_cols();
    std::vector<double> theta(p + 1, 0.0);
    std::vector<double> grad(p + 1);
    for (int it = 0; it < config.max_iter; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < p; ++i) grad[i] = theta[i];
        for (std::size_t r = 0; r < n; ++r) {
            auto row = ds.row(r);
            double y = ds.labels[r] == 1 ? 1.0 : -1.0;
            if (y * dot_row(theta, row) < 1.0) {
                for (std::size_t i = 0; i < p; ++i) grad[i] -= config.c * y * row[i];
                grad[p] -= config.c * y;
            }
        }
        for (std::size_t i = 0; i <= p; ++i) {
            theta[i] -= config.learning_rate * grad[i] / static_cast<double>(n);
        }
        if (objective_trace) objective_trace->push_back(linsvm_objective(theta, ds, config.c));
    }

    auto model = std::make_unique<LinSvmModel>();
    model->weights.assign(theta.begin(), theta.begin() + p);
    model->bias = theta[p];
    scaler.fold_back(model->weights, model->bias);
    model->config = config;
    model->feature_names_ = train.feature_names;
    return model;
}

double LinSvmModel::score(std::span<const double> row, const std::string*) const {
    double z = bias;
    for (std::size_t c = 0; c < weights.size(); ++c) z += weights[c] * row[c];
    return z;
}

nlohmann::json LinSvmModel::to_json() const {
    return {{"weights", weights},
            {"bias", bias},
            {"config",
             {{"c", config.c},
              {"learning_rate", config.learning_rate},
              {"max_iter", config.max_iter}}},
            {"feature_names", feature_names_}};
}

std::unique_ptr<LinSvmModel> LinSvmModel::from_json(const nlohmann::json& j) {
    auto m = std::make_unique<LinSvmModel>();
    m->weights = j.at("weights").get<std::vector<double>>();
    m->bias = j.at("bias").get<double>();
    const auto& c = j.at("config");
    m->config.c = c.at("c").get<double>();
    m->config.learning_rate = c.at("learning_rate").get<double>();
    m->config.max_iter = c.at("max_iter").get<int>();
    m->feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    return m;
}

}  // namespace cvrisk
