#pragma once

#include <span>
#include <vector>

#include "json.hpp"

namespace cvrisk {

// Axis-aligned binary decision tree. Internal nodes route x[feature] <
// threshold to the left child; leaves carry a value. cover is the number of
// training rows that reached the node; the SHAP walk and the conditional
// expectation oracle both weight absent-feature branches by it.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double cover = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double eval(std::span<const double> row) const {
        int n = 0;
        while (!nodes[n].is_leaf()) {
            n = row[nodes[n].feature] < nodes[n].threshold ? nodes[n].left : nodes[n].right;
        }
        return nodes[n].value;
    }

    // Cover-weighted mean over leaves, the tree's output on an unknown row.
    double expected_value() const;

    int max_feature_index() const;

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

}  // namespace cvrisk
