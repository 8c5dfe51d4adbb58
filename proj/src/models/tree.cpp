#include "cvrisk/models/tree.hpp"

#include <algorithm>

namespace cvrisk {

double Tree::expected_value() const {
    // walk with accumulated cover fractions; equivalent to the cover
    // weighted leaf mean but robust to zero-cover interior nodes
    double total = 0.0;
    struct Item {
        int node;
        double weight;
    };
    std::vector<Item> stack{{0, 1.0}};
    while (!stack.empty()) {
        auto [n, w] = stack.back();
        stack.pop_back();
        const auto& node = nodes[n];
        if (node.is_leaf()) {
            total += w * node.value;
            continue;
        }
        double c = node.cover;
        double wl = c > 0.0 ? nodes[node.left].cover / c : 0.5;
        stack.push_back({node.left, w * wl});
        stack.push_back({node.right, w * (1.0 - wl)});
    }
    return total;
}

int Tree::max_feature_index() const {
    int m = -1;
    for (const auto& n : nodes) m = std::max(m, n.feature);
    return m;
}

nlohmann::json Tree::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes) {
        arr.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.cover});
    }
    return arr;
}

Tree Tree::from_json(const nlohmann::json& j) {
    Tree t;
    t.nodes.reserve(j.size());
    for (const auto& e : j) {
        TreeNode n;
        n.feature = e.at(0).get<int>();
        n.threshold = e.at(1).get<double>();
        n.left = e.at(2).get<int>();
        n.right = e.at(3).get<int>();
        n.value = e.at(4).get<double>();
        n.cover = e.at(5).get<double>();
        t.nodes.push_back(n);
    }
    return t;
}

}  // namespace cvrisk
