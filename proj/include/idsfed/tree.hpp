#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "idsfed/matrix.hpp"
#include "idsfed/rng.hpp"

namespace idsfed {

// Shared hyperparameters for the three model families. The paper reports
// none, so these defaults are standard practice.
struct TrainConfig {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t n_trees = 100;
    std::size_t mtry = 0;    // 0 = ceil(sqrt(n_features))
    bool bootstrap = true;   // test hook; forests bootstrap by default
    double lambda = 1e-4;    // SVM L2 strength
    std::size_t epochs = 10; // SVM epochs
    std::uint64_t seed = 0;

    bool operator==(const TrainConfig&) const = default;
};

// Flat node arena; nodes[0] is the root. Internal nodes route
// x[feature_index] <= threshold to left, else right.
struct TreeNode {
    int feature_index = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int leaf_class = 0;
    double positive_fraction = 0.0;
    std::uint64_t n_samples = 0;

    bool is_leaf() const { return left < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes;
    TrainConfig config;
    std::size_t n_features = 0;

    bool operator==(const DecisionTreeModel&) const = default;
};

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

// 1 - sum(p_c^2) over per-class counts. Throws on zero total.
double gini_impurity(const std::vector<std::size_t>& counts);

// Evaluates midpoint thresholds between adjacent distinct sorted values per
// candidate feature and returns the split with the largest weighted Gini
// decrease (ties: lower feature index, then lower threshold). nullopt when
// no split reduces impurity.
std::optional<SplitChoice> best_split(const FeatureMatrix& X,
                                      const std::vector<std::size_t>& rows,
                                      const std::vector<std::size_t>& candidate_features);
std::optional<SplitChoice> best_split(const FeatureMatrix& X,
                                      const std::vector<std::size_t>& candidate_features);

// Recursive CART with Gini; stops on max_depth, min_samples_split, purity or
// an unproductive split. Leaf class ties go to 1 (attack-preferring).
DecisionTreeModel train_decision_tree(const FeatureMatrix& X, const TrainConfig& cfg);

// Internal entry point shared with the forest trainer: trains on a row
// subset with optional per-node feature subsampling (eng != nullptr).
DecisionTreeModel train_tree_on_rows(const FeatureMatrix& X, const std::vector<std::size_t>& rows,
                                     const TrainConfig& cfg, std::size_t mtry,
                                     rng::Engine* eng);

int predict_row(const DecisionTreeModel& tree, std::span<const double> x);
double score_row(const DecisionTreeModel& tree, std::span<const double> x);

std::vector<int> predict(const DecisionTreeModel& tree, const FeatureMatrix& X);
std::vector<double> decision_scores(const DecisionTreeModel& tree, const FeatureMatrix& X);

}  // namespace idsfed
