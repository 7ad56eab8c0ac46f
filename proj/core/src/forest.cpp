#include "hab/trees/forest.hpp"

#include <numeric>

namespace hab::trees {

ForestModel fit_forest(const Matrix& X, std::span<const double> y,
                       std::span<const double> w, const ForestParams& params) {
    detail::validate_training_inputs(X, y, w);
    if (params.n_estimators == 0) throw InputError("n_estimators must be positive");

    ForestModel model;
    model.params = params;
    model.n_features = X.cols;
    model.trees.resize(params.n_estimators);

    std::size_t n = X.rows;
    TreeParams tree_params;
    tree_params.max_leaves = 0;
    tree_params.min_samples_leaf = params.min_samples_leaf;
    tree_params.features_per_node = params.features_per_node != 0
                                        ? params.features_per_node
                                        : std::max<std::size_t>(1, X.cols / 3);

    parallel_for(params.n_estimators, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> counts(n);
        std::vector<std::uint32_t> rows;
        std::vector<double> boot_w(n);
        for (std::size_t t = begin; t < end; ++t) {
            SplitMix64 rng(params.seed + t);
            if (params.bootstrap) {
                std::fill(counts.begin(), counts.end(), 0u);
                for (std::size_t i = 0; i < n; ++i)
                    ++counts[static_cast<std::size_t>(rng.bounded(n))];
                rows.clear();
                for (std::uint32_t i = 0; i < n; ++i) {
                    if (counts[i] == 0) continue;
                    rows.push_back(i);
                    boot_w[i] = w[i] * counts[i];
                }
                model.trees[t] =
                    detail::fit_tree_rows(X, y.data(), boot_w.data(), rows, tree_params, &rng);
            } else {
                rows.resize(n);
                std::iota(rows.begin(), rows.end(), 0u);
                model.trees[t] =
                    detail::fit_tree_rows(X, y.data(), w.data(), rows, tree_params, &rng);
            }
        }
    });
    return model;
}

std::vector<double> predict(const ForestModel& model, const Matrix& X) {
    if (X.cols != model.n_features)
        throw InputError("feature count mismatch: model expects " +
                         std::to_string(model.n_features) + ", got " +
                         std::to_string(X.cols));
    std::vector<double> out(X.rows, 0.0);
    for (const Tree& tree : model.trees)
        for (std::size_t i = 0; i < X.rows; ++i) out[i] += predict_row(tree, X.row(i));
    double scale = 1.0 / static_cast<double>(model.trees.size());
    for (double& v : out) v *= scale;
    return out;
}

}  // namespace hab::trees
