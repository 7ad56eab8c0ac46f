#include "hab/trees/importance.hpp"

namespace hab::trees {

namespace {

FeatureImportance gains_over(std::span<const Tree> trees, std::size_t n_features) {
    FeatureImportance importance(n_features, 0.0);
    double total = 0.0;
    for (const Tree& tree : trees) {
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) continue;
            importance[static_cast<std::size_t>(node.feature)] += node.value;
            total += node.value;
        }
    }
    if (total > 0.0)
        for (double& v : importance) v /= total;
    return importance;
}

}  // namespace

FeatureImportance feature_importance(const ForestModel& model) {
    return gains_over(model.trees, model.n_features);
}

FeatureImportance feature_importance(const GbdtModel& model) {
    return gains_over(model.trees, model.n_features);
}

FeatureImportance average_importance(std::span<const FeatureImportance> folds) {
    if (folds.empty()) throw InputError("no importance vectors to average");
    FeatureImportance mean(folds[0].size(), 0.0);
    for (const auto& fold : folds) {
        if (fold.size() != mean.size())
            throw InputError("importance vectors disagree on feature count");
        for (std::size_t i = 0; i < fold.size(); ++i) mean[i] += fold[i];
    }
    for (double& v : mean) v /= static_cast<double>(folds.size());
    return mean;
}

std::vector<std::size_t> select_features(const FeatureImportance& importance,
                                         double threshold) {
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < importance.size(); ++i)
        if (importance[i] > threshold) selected.push_back(i);
    return selected;
}

}  // namespace hab::trees
