#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hab/common.hpp"

namespace hab::trees {

/// CART regression node. Routing: feature value <= threshold goes left.
/// The sentinel -999 is an ordinary (very small) value under this rule.
/// `value` holds the leaf prediction for leaves and the split gain for
/// internal nodes.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return left < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at index 0, pre-order
};

struct TreeParams {
    std::size_t max_leaves = 0;         // 0 = unbounded
    std::size_t min_samples_leaf = 1;
    std::size_t features_per_node = 0;  // 0 = consider every feature
};

/// Greedy best-first splitting maximizing weighted variance reduction
///   gain = S(parent) - S(left) - S(right),  S = sum(w y^2) - (sum(w y))^2 / sum(w)
/// with leaf values the weighted mean of y and candidate thresholds at
/// midpoints between consecutive distinct sorted feature values. Equal-gain
/// ties resolve to the lowest feature index, then the lowest threshold.
/// `rng` drives per-node feature subsampling when features_per_node is set.
Tree fit_tree(const Matrix& X, std::span<const double> y, std::span<const double> w,
              const TreeParams& params = {}, SplitMix64* rng = nullptr);

double predict_row(const Tree& tree, std::span<const double> x);
std::vector<double> predict(const Tree& tree, const Matrix& X);

namespace detail {

/// Core builder on a row subset; inputs are assumed validated.
Tree fit_tree_rows(const Matrix& X, const double* y, const double* w,
                   std::span<const std::uint32_t> rows, const TreeParams& params,
                   SplitMix64* rng);

void validate_training_inputs(const Matrix& X, std::span<const double> y,
                              std::span<const double> w);

}  // namespace detail

}  // namespace hab::trees
