#pragma once

#include <cstdint>
#include <vector>

#include "idsfed/tree.hpp"

namespace idsfed {

struct RandomForestModel {
    std::vector<DecisionTreeModel> trees;
    std::size_t n_trees = 0;
    std::size_t mtry = 0;
    std::uint64_t seed = 0;

    std::size_t n_features() const { return trees.empty() ? 0 : trees[0].n_features; }
    bool operator==(const RandomForestModel&) const = default;
};

// Bootstrap-sampled trees with per-node feature subsampling. Per-tree seeds
// derive from (cfg.seed, tree index), so the OpenMP and serial paths build
// identical forests. mtry 0 means ceil(sqrt(n_features)).
RandomForestModel train_random_forest(const FeatureMatrix& X, const TrainConfig& cfg);
RandomForestModel train_random_forest_serial(const FeatureMatrix& X, const TrainConfig& cfg);

// Majority vote over trees; ties go to class 1.
std::vector<int> predict(const RandomForestModel& forest, const FeatureMatrix& X);
std::vector<int> predict_forest_serial(const RandomForestModel& forest, const FeatureMatrix& X);

// Fraction of trees voting class 1.
std::vector<double> decision_scores(const RandomForestModel& forest, const FeatureMatrix& X);

int predict_row(const RandomForestModel& forest, std::span<const double> x);
double score_row(const RandomForestModel& forest, std::span<const double> x);

}  // namespace idsfed
