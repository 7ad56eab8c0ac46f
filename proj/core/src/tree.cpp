#include "hab/trees/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace hab::trees {

namespace detail {

void validate_training_inputs(const Matrix& X, std::span<const double> y,
                              std::span<const double> w) {
    if (X.rows == 0) throw InputError("training data is empty");
    if (X.cols == 0) throw InputError("training data has no features");
    if (y.size() != X.rows || w.size() != X.rows)
        throw InputError("y/w length must match the row count");
    for (double v : X.values)
        if (!std::isfinite(v)) throw InputError("non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw InputError("non-finite target value");
    for (double v : w)
        if (!(v > 0.0) || !std::isfinite(v))
            throw InputError("sample weights must be positive and finite");
}

namespace {

struct NodeSums {
    double sw = 0.0;
    double swy = 0.0;
    double swy2 = 0.0;

    double impurity() const { return swy2 - swy * swy / sw; }
    double mean() const { return swy / sw; }
};

struct SplitChoice {
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;

    bool found() const { return feature >= 0; }
};

// A grown-but-unsplit leaf awaiting its turn in the best-first queue.
struct OpenLeaf {
    std::int32_t node = -1;
    std::vector<std::uint32_t> rows;
    NodeSums sums;
    SplitChoice best;
    std::uint64_t seq = 0;
};

// Queue entry: (gain, seq) locating a leaf in the builder's pool. Largest
// gain first; creation order breaks exact ties.
struct QueueEntry {
    double gain;
    std::uint64_t seq;
    std::size_t pool_index;
};

struct BySplitGain {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.seq > b.seq;
    }
};

NodeSums sums_over(const double* y, const double* w,
                   std::span<const std::uint32_t> rows) {
    NodeSums s;
    for (auto r : rows) {
        s.sw += w[r];
        s.swy += w[r] * y[r];
        s.swy2 += w[r] * y[r] * y[r];
    }
    return s;
}

bool constant_target(const double* y, std::span<const std::uint32_t> rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (y[rows[i]] != y[rows[0]]) return false;
    return true;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, const double* y, const double* w,
                const TreeParams& params, SplitMix64* rng)
        : X_(X), y_(y), w_(w), params_(params), rng_(rng) {}

    Tree build(std::span<const std::uint32_t> rows) {
        Tree tree;
        enqueue(make_leaf(tree, {rows.begin(), rows.end()}));
        std::size_t leaves = 1;
        while (!queue_.empty() &&
               (params_.max_leaves == 0 || leaves < params_.max_leaves)) {
            QueueEntry entry = queue_.top();
            queue_.pop();
            split(tree, std::move(pool_[entry.pool_index]));
            ++leaves;
        }
        return tree;
    }

private:
    OpenLeaf make_leaf(Tree& tree, std::vector<std::uint32_t> rows) {
        OpenLeaf leaf;
        leaf.node = static_cast<std::int32_t>(tree.nodes.size());
        leaf.sums = sums_over(y_, w_, rows);
        leaf.rows = std::move(rows);
        leaf.seq = next_seq_++;
        TreeNode node;
        node.value = leaf.sums.mean();
        tree.nodes.push_back(node);
        leaf.best = find_best_split(leaf);
        return leaf;
    }

    void enqueue(OpenLeaf leaf) {
        if (!leaf.best.found()) return;
        queue_.push({leaf.best.gain, leaf.seq, pool_.size()});
        pool_.push_back(std::move(leaf));
    }

    void split(Tree& tree, OpenLeaf leaf) {
        std::vector<std::uint32_t> left_rows, right_rows;
        left_rows.reserve(leaf.rows.size());
        right_rows.reserve(leaf.rows.size());
        for (auto r : leaf.rows) {
            if (X_.at(r, static_cast<std::size_t>(leaf.best.feature)) <=
                leaf.best.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        OpenLeaf left = make_leaf(tree, std::move(left_rows));
        OpenLeaf right = make_leaf(tree, std::move(right_rows));
        TreeNode& node = tree.nodes[static_cast<std::size_t>(leaf.node)];
        node.feature = leaf.best.feature;
        node.threshold = leaf.best.threshold;
        node.left = left.node;
        node.right = right.node;
        node.value = leaf.best.gain;  // split gain, kept for importance
        enqueue(std::move(left));
        enqueue(std::move(right));
    }

    std::vector<std::uint32_t> candidate_features() {
        std::size_t d = X_.cols;
        if (params_.features_per_node == 0 || params_.features_per_node >= d ||
            rng_ == nullptr) {
            std::vector<std::uint32_t> all(d);
            std::iota(all.begin(), all.end(), 0u);
            return all;
        }
        return sample_without_replacement(d, params_.features_per_node, *rng_);
    }

    SplitChoice find_best_split(OpenLeaf& leaf) {
        SplitChoice best;
        std::size_t n = leaf.rows.size();
        if (n < 2 * params_.min_samples_leaf || n < 2) return best;
        if (constant_target(y_, leaf.rows)) return best;

        auto features = candidate_features();
        sorted_.resize(n);
        for (std::uint32_t f : features) {
            for (std::size_t i = 0; i < n; ++i)
                sorted_[i] = {X_.at(leaf.rows[i], f), leaf.rows[i]};
            std::sort(sorted_.begin(), sorted_.end());

            NodeSums left;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                std::uint32_t r = sorted_[i].second;
                left.sw += w_[r];
                left.swy += w_[r] * y_[r];
                left.swy2 += w_[r] * y_[r] * y_[r];
                double v = sorted_[i].first;
                double next = sorted_[i + 1].first;
                if (!(v < next)) continue;
                std::size_t n_left = i + 1, n_right = n - n_left;
                if (n_left < params_.min_samples_leaf ||
                    n_right < params_.min_samples_leaf)
                    continue;
                NodeSums right{leaf.sums.sw - left.sw, leaf.sums.swy - left.swy,
                               leaf.sums.swy2 - left.swy2};
                double gain = leaf.sums.impurity() - left.impurity() - right.impurity();
                if (gain > best.gain) {
                    double threshold = (v + next) / 2.0;
                    if (!(threshold < next)) threshold = v;  // adjacent doubles
                    best = {gain, static_cast<std::int32_t>(f), threshold};
                }
            }
        }
        return best;
    }

    const Matrix& X_;
    const double* y_;
    const double* w_;
    TreeParams params_;
    SplitMix64* rng_;
    std::uint64_t next_seq_ = 0;
    std::vector<std::pair<double, std::uint32_t>> sorted_;
    std::vector<OpenLeaf> pool_;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, BySplitGain> queue_;
};

}  // namespace

Tree fit_tree_rows(const Matrix& X, const double* y, const double* w,
                   std::span<const std::uint32_t> rows, const TreeParams& params,
                   SplitMix64* rng) {
    if (rows.empty()) throw InputError("cannot fit a tree on zero rows");
    TreeBuilder builder(X, y, w, params, rng);
    return builder.build(rows);
}

}  // namespace detail

Tree fit_tree(const Matrix& X, std::span<const double> y, std::span<const double> w,
              const TreeParams& params, SplitMix64* rng) {
    detail::validate_training_inputs(X, y, w);
    std::vector<std::uint32_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), 0u);
    return detail::fit_tree_rows(X, y.data(), w.data(), rows, params, rng);
}

double predict_row(const Tree& tree, std::span<const double> x) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        if (x[static_cast<std::size_t>(node->feature)] <= node->threshold)
            node = &tree.nodes[static_cast<std::size_t>(node->left)];
        else
            node = &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return node->value;
}

std::vector<double> predict(const Tree& tree, const Matrix& X) {
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = predict_row(tree, X.row(i));
    return out;
}

}  // namespace hab::trees
