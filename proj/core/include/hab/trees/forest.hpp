#pragma once

#include "hab/trees/tree.hpp"

namespace hab::trees {

struct ForestParams {
    std::size_t n_estimators = 300;
    std::uint64_t seed = 1;
    bool bootstrap = true;              // test hook: disable resampling
    std::size_t min_samples_leaf = 1;
    std::size_t features_per_node = 0;  // 0 = max(1, floor(d / 3))
};

struct ForestModel {
    ForestParams params;
    std::size_t n_features = 0;
    std::vector<Tree> trees;
};

/// Bootstrap forest: tree t trains on n with-replacement draws from its own
/// SplitMix64(seed + t) stream, then consumes the same stream for per-node
/// feature subsets. Trees may fit concurrently; output is identical for any
/// worker count.
ForestModel fit_forest(const Matrix& X, std::span<const double> y,
                       std::span<const double> w, const ForestParams& params = {});

/// Unweighted mean of the trees' predictions.
std::vector<double> predict(const ForestModel& model, const Matrix& X);

}  // namespace hab::trees
