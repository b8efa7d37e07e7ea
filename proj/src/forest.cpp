#include "idsfed/forest.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "idsfed/errors.hpp"

namespace idsfed {

namespace {

std::size_t resolve_mtry(const TrainConfig& cfg, std::size_t n_features) {
    if (cfg.mtry == 0) {
        return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
    }
    return std::min(cfg.mtry, n_features);
}

DecisionTreeModel train_one_tree(const FeatureMatrix& X, const TrainConfig& cfg,
                                 std::size_t mtry, std::uint64_t tree_seed) {
    auto eng = rng::Engine(tree_seed);
    std::vector<std::size_t> rows;
    rows.reserve(X.n_rows);
    if (cfg.bootstrap) {
        for (std::size_t i = 0; i < X.n_rows; ++i) {
            rows.push_back(rng::uniform_index(eng, X.n_rows));
        }
    } else {
        rows.resize(X.n_rows);
        std::iota(rows.begin(), rows.end(), 0);
    }
    return train_tree_on_rows(X, rows, cfg, mtry, &eng);
}

RandomForestModel train_forest_impl(const FeatureMatrix& X, const TrainConfig& cfg,
                                    bool parallel) {
    if (X.n_rows == 0) throw DataError("train_random_forest: empty input");
    if (cfg.n_trees == 0) throw std::invalid_argument("train_random_forest: n_trees must be >= 1");

    RandomForestModel forest;
    forest.n_trees = cfg.n_trees;
    forest.mtry = resolve_mtry(cfg, X.n_cols);
    forest.seed = cfg.seed;
    forest.trees.resize(cfg.n_trees);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(cfg.n_trees); ++t) {
        const std::uint64_t tree_seed =
            rng::mix_seed(cfg.seed, 0xF0, static_cast<std::uint64_t>(t));
        forest.trees[static_cast<std::size_t>(t)] =
            train_one_tree(X, cfg, forest.mtry, tree_seed);
    }
    return forest;
}

}  // namespace

RandomForestModel train_random_forest(const FeatureMatrix& X, const TrainConfig& cfg) {
    return train_forest_impl(X, cfg, true);
}

RandomForestModel train_random_forest_serial(const FeatureMatrix& X, const TrainConfig& cfg) {
    return train_forest_impl(X, cfg, false);
}

int predict_row(const RandomForestModel& forest, std::span<const double> x) {
    std::size_t votes = 0;
    for (const auto& tree : forest.trees) {
        votes += static_cast<std::size_t>(predict_row(tree, x));
    }
    return (2 * votes >= forest.trees.size()) ? 1 : 0;  // tie -> attack
}

double score_row(const RandomForestModel& forest, std::span<const double> x) {
    std::size_t votes = 0;
    for (const auto& tree : forest.trees) {
        votes += static_cast<std::size_t>(predict_row(tree, x));
    }
    return static_cast<double>(votes) / static_cast<double>(forest.trees.size());
}

namespace {

void check_forest(const RandomForestModel& forest, const FeatureMatrix& X) {
    if (forest.trees.empty()) throw DataError("predict: forest has no trees");
    if (forest.n_features() != X.n_cols) {
        throw DataError("predict: feature count mismatch (model " +
                        std::to_string(forest.n_features()) + ", data " +
                        std::to_string(X.n_cols) + ")");
    }
}

std::vector<int> predict_forest_impl(const RandomForestModel& forest, const FeatureMatrix& X,
                                     bool parallel) {
    check_forest(forest, X);
    std::vector<int> out(X.n_rows);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(X.n_rows); ++r) {
        out[static_cast<std::size_t>(r)] =
            predict_row(forest, X.row(static_cast<std::size_t>(r)));
    }
    return out;
}

}  // namespace

std::vector<int> predict(const RandomForestModel& forest, const FeatureMatrix& X) {
    return predict_forest_impl(forest, X, true);
}

std::vector<int> predict_forest_serial(const RandomForestModel& forest, const FeatureMatrix& X) {
    return predict_forest_impl(forest, X, false);
}

std::vector<double> decision_scores(const RandomForestModel& forest, const FeatureMatrix& X) {
    check_forest(forest, X);
    std::vector<double> out(X.n_rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(X.n_rows); ++r) {
        out[static_cast<std::size_t>(r)] = score_row(forest, X.row(static_cast<std::size_t>(r)));
    }
    return out;
}

}  // namespace idsfed
