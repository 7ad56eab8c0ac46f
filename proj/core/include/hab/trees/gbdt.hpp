#pragma once

#include "hab/trees/tree.hpp"

namespace hab::trees {

struct GbdtParams {
    std::size_t rounds = 600;
    double learning_rate = 0.025;
    std::size_t num_leaves = 20;
    double bagging_fraction = 0.9;  // row fraction on bagged rounds
    std::size_t bagging_freq = 6;   // every 6th round is bagged; 0 disables
    std::size_t min_samples_leaf = 1;
    std::uint64_t seed = 1;
};

struct GbdtModel {
    GbdtParams params;
    std::size_t n_features = 0;
    double base_score = 0.0;  // weighted mean of the targets
    std::vector<Tree> trees;
    std::vector<double> train_rmse;  // weighted training RMSE after each round

    /// prediction = base_score + learning_rate * sum of tree outputs
};

/// Squared-error boosting with leaf-wise trees of at most num_leaves leaves.
/// Rounds are numbered from 1; on rounds where round % bagging_freq == 0 the
/// tree fits a without-replacement subsample of floor(bagging_fraction * n)
/// rows, on all other rounds the full data. No early stopping.
GbdtModel fit_gbdt(const Matrix& X, std::span<const double> y, std::span<const double> w,
                   const GbdtParams& params = {});

std::vector<double> predict(const GbdtModel& model, const Matrix& X);

}  // namespace hab::trees
