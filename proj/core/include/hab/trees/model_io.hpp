#pragma once

#include <filesystem>
#include <variant>

#include "hab/trees/forest.hpp"
#include "hab/trees/gbdt.hpp"

namespace hab::trees {

// ---------------------------------------------------------------------------
// HABM model container, all integers little-endian:
//
//   magic "HABM", version u16 (1), kind u8 (0 = forest, 1 = gbdt)
//   n_features u32, seed u64
//   kind-specific params:
//     forest: n_estimators u32, min_samples_leaf u32, features_per_node u32,
//             bootstrap u8
//     gbdt:   rounds u32, learning_rate f64, num_leaves u32,
//             bagging_fraction f64, bagging_freq u32, min_samples_leaf u32,
//             base_score f64
//   n_trees u32, then per tree: n_nodes u32 followed by pre-order node
//   records (feature_index i32, threshold f64, left i32, right i32,
//   value f64). Child index -1 marks a leaf; `value` is the leaf prediction
//   for leaves and the split gain for internal nodes.
// ---------------------------------------------------------------------------

using AnyModel = std::variant<ForestModel, GbdtModel>;

void save_model(const std::filesystem::path& path, const ForestModel& model);
void save_model(const std::filesystem::path& path, const GbdtModel& model);
AnyModel load_model(const std::filesystem::path& path);

std::vector<double> predict(const AnyModel& model, const Matrix& X);

}  // namespace hab::trees
