#include "hab/trees/gbdt.hpp"

#include <cmath>
#include <numeric>

namespace hab::trees {

GbdtModel fit_gbdt(const Matrix& X, std::span<const double> y, std::span<const double> w,
                   const GbdtParams& params) {
    detail::validate_training_inputs(X, y, w);
    if (params.num_leaves < 1) throw InputError("num_leaves must be at least 1");
    if (!(params.bagging_fraction > 0.0) || params.bagging_fraction > 1.0)
        throw InputError("bagging_fraction must be in (0, 1]");

    std::size_t n = X.rows;
    GbdtModel model;
    model.params = params;
    model.n_features = X.cols;
    model.trees.reserve(params.rounds);
    model.train_rmse.reserve(params.rounds);

    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        swy += w[i] * y[i];
    }
    model.base_score = swy / sw;

    std::vector<double> pred(n, model.base_score);
    std::vector<double> residual(n);
    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0u);

    TreeParams tree_params;
    tree_params.max_leaves = params.num_leaves;
    tree_params.min_samples_leaf = params.min_samples_leaf;

    bool bagging_on = params.bagging_freq > 0 && params.bagging_fraction < 1.0 && n > 1;
    std::size_t bag_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::floor(params.bagging_fraction *
                                                static_cast<double>(n))));

    for (std::size_t round = 1; round <= params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - pred[i];

        std::span<const std::uint32_t> rows(all_rows);
        std::vector<std::uint32_t> bag;
        if (bagging_on && round % params.bagging_freq == 0) {
            SplitMix64 rng(derive_seed(params.seed, round));
            bag = sample_without_replacement(n, bag_size, rng);
            rows = bag;
        }

        Tree tree =
            detail::fit_tree_rows(X, residual.data(), w.data(), rows, tree_params, nullptr);
        for (std::size_t i = 0; i < n; ++i)
            pred[i] += params.learning_rate * predict_row(tree, X.row(i));
        model.trees.push_back(std::move(tree));

        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = y[i] - pred[i];
            ss += w[i] * d * d;
        }
        model.train_rmse.push_back(std::sqrt(ss / sw));
    }
    return model;
}

std::vector<double> predict(const GbdtModel& model, const Matrix& X) {
    if (X.cols != model.n_features)
        throw InputError("feature count mismatch: model expects " +
                         std::to_string(model.n_features) + ", got " +
                         std::to_string(X.cols));
    std::vector<double> out(X.rows, model.base_score);
    for (const Tree& tree : model.trees)
        for (std::size_t i = 0; i < X.rows; ++i)
            out[i] += model.params.learning_rate * predict_row(tree, X.row(i));
    return out;
}

}  // namespace hab::trees
