#include "cvrisk/models/forest.hpp"

#include <algorithm>
#include <cmath>

#include "cvrisk/csv.hpp"
#include "cvrisk/rng.hpp"

namespace cvrisk {

namespace {

struct GiniBuilder {
    const LabeledDataset& ds;
    const RfConfig& cfg;
    int n_candidate_features;
    Rng& rng;
    Tree tree;

    // scratch reused across nodes
    std::vector<std::pair<double, int>> sorted;  // (value, label)

    GiniBuilder(const LabeledDataset& data, const RfConfig& config, Rng& r)
        : ds(data), cfg(config), rng(r) {
        auto p = static_cast<int>(ds.n_cols());
        n_candidate_features =
            cfg.max_features > 0 ? std::min(cfg.max_features, p)
                                 : std::max(1, static_cast<int>(std::floor(std::sqrt(p))));
    }

    static double gini(std::size_t pos, std::size_t n) {
        if (n == 0) return 0.0;
        double p1 = static_cast<double>(pos) / static_cast<double>(n);
        return 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1);
    }

    // Sampled feature subset, ascending so equal-impurity ties resolve to
    // the lowest feature index.
    std::vector<int> sample_features() {
        auto p = static_cast<int>(ds.n_cols());
        if (n_candidate_features >= p) {
            std::vector<int> all(p);
            for (int i = 0; i < p; ++i) all[i] = i;
            return all;
        }
        std::vector<int> pool(p);
        for (int i = 0; i < p; ++i) pool[i] = i;
        std::vector<int> chosen;
        chosen.reserve(n_candidate_features);
        for (int t = 0; t < n_candidate_features; ++t) {
            auto j = static_cast<std::size_t>(t) + rng.uniform_index(p - t);
            std::swap(pool[t], pool[j]);
            chosen.push_back(pool[t]);
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    int build(std::vector<std::uint32_t>& rows, int depth) {
        std::size_t n = rows.size();
        std::size_t pos = 0;
        for (auto r : rows) pos += static_cast<std::size_t>(ds.labels[r]);

        auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.value = static_cast<double>(pos) / static_cast<double>(n);
            leaf.cover = static_cast<double>(n);
            tree.nodes.push_back(leaf);
            return static_cast<int>(tree.nodes.size() - 1);
        };

        bool pure = (pos == 0 || pos == n);
        bool depth_capped = cfg.max_depth > 0 && depth >= cfg.max_depth;
        if (pure || depth_capped || n < static_cast<std::size_t>(cfg.min_samples_split)) {
            return make_leaf();
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = std::numeric_limits<double>::max();
        for (int f : sample_features()) {
            sorted.clear();
            sorted.reserve(n);
            for (auto r : rows) sorted.emplace_back(ds.at(r, f), ds.labels[r]);
            std::sort(sorted.begin(), sorted.end());
            std::size_t left_pos = 0;
            for (std::size_t i = 1; i < n; ++i) {
                left_pos += static_cast<std::size_t>(sorted[i - 1].second);
                double lo = sorted[i - 1].first, hi = sorted[i].first;
                if (lo == hi) continue;
                double thr = lo + (hi - lo) / 2.0;
                if (!(lo < thr && thr <= hi)) continue;  // adjacent doubles
                double imp = (static_cast<double>(i) * gini(left_pos, i) +
                              static_cast<double>(n - i) * gini(pos - left_pos, n - i)) /
                             static_cast<double>(n);
                if (imp < best_impurity) {
                    best_impurity = imp;
                    best_feature = f;
                    best_threshold = thr;
                }
            }
        }
        if (best_feature < 0) return make_leaf();  // all candidates constant

        std::vector<std::uint32_t> left_rows, right_rows;
        left_rows.reserve(n);
        right_rows.reserve(n);
        for (auto r : rows) {
            (ds.at(r, best_feature) < best_threshold ? left_rows : right_rows).push_back(r);
        }

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.cover = static_cast<double>(n);
        tree.nodes.push_back(node);
        auto self = static_cast<int>(tree.nodes.size() - 1);
        rows.clear();
        rows.shrink_to_fit();
        tree.nodes[self].left = build(left_rows, depth + 1);
        tree.nodes[self].right = build(right_rows, depth + 1);
        return self;
    }
};

}  // namespace

std::unique_ptr<RfModel> train_rf(const LabeledDataset& train, const RfConfig& config) {
    if (config.n_trees < 1) throw DataError("random forest needs n_trees >= 1");
    train.validate();
    if (train.n_rows() == 0) throw DataError("empty training set");

    auto model = std::make_unique<RfModel>();
    model->config = config;
    model->feature_names_ = train.feature_names;
    model->trees.reserve(config.n_trees);

    std::size_t n = train.n_rows();
    for (int t = 0; t < config.n_trees; ++t) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::uint32_t> rows;
        rows.reserve(n);
        if (config.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) {
                rows.push_back(static_cast<std::uint32_t>(rng.uniform_index(n)));
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) rows.push_back(static_cast<std::uint32_t>(i));
        }
        GiniBuilder builder(train, config, rng);
        builder.build(rows, 0);  // root lands at node 0, children follow
        model->trees.push_back(std::move(builder.tree));
    }
    return model;
}

double RfModel::score(std::span<const double> row, const std::string*) const {
    std::size_t votes = 0;
    for (const auto& t : trees) {
        if (t.eval(row) >= 0.5) ++votes;
    }
    return static_cast<double>(votes) / static_cast<double>(trees.size());
}

double RfModel::margin(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.eval(row);
    return sum / static_cast<double>(trees.size());
}

nlohmann::json RfModel::to_json() const {
    nlohmann::json jtrees = nlohmann::json::array();
    for (const auto& t : trees) jtrees.push_back(t.to_json());
    return {{"trees", jtrees},
            {"config",
             {{"n_trees", config.n_trees},
              {"max_features", config.max_features},
              {"seed", config.seed},
              {"bootstrap", config.bootstrap},
              {"max_depth", config.max_depth},
              {"min_samples_split", config.min_samples_split}}},
            {"feature_names", feature_names_}};
}

std::unique_ptr<RfModel> RfModel::from_json(const nlohmann::json& j) {
    auto m = std::make_unique<RfModel>();
    for (const auto& jt : j.at("trees")) m->trees.push_back(Tree::from_json(jt));
    const auto& c = j.at("config");
    m->config.n_trees = c.at("n_trees").get<int>();
    m->config.max_features = c.at("max_features").get<int>();
    m->config.seed = c.at("seed").get<std::uint64_t>();
    m->config.bootstrap = c.at("bootstrap").get<bool>();
    m->config.max_depth = c.at("max_depth").get<int>();
    m->config.min_samples_split = c.at("min_samples_split").get<int>();
    m->feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    return m;
}

}  // namespace cvrisk
