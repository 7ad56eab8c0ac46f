#pragma once

#include "hab/trees/forest.hpp"
#include "hab/trees/gbdt.hpp"

namespace hab::trees {

/// Per-feature share of total split gain; sums to 1 when any split exists,
/// all zeros otherwise.
using FeatureImportance = std::vector<double>;

FeatureImportance feature_importance(const ForestModel& model);
FeatureImportance feature_importance(const GbdtModel& model);

/// Mean of per-fold importance vectors (they each sum to 1 already).
FeatureImportance average_importance(std::span<const FeatureImportance> folds);

/// Indices with importance strictly greater than the threshold, ascending.
std::vector<std::size_t> select_features(const FeatureImportance& importance,
                                         double threshold = 0.005);

}  // namespace hab::trees
