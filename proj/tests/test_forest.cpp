#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "idsfed/errors.hpp"
#include "idsfed/forest.hpp"
#include "idsfed/synthetic.hpp"

using namespace idsfed;

namespace {

FeatureMatrix make_matrix(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    FeatureMatrix m;
    m.n_rows = rows.size();
    m.n_cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < m.n_cols; ++c) m.feature_names.push_back("f" + std::to_string(c));
    for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
    m.labels = std::move(labels);
    return m;
}

}  // namespace

TEST_CASE("forest with one tree, full mtry and no bootstrap equals the single tree") {
    const FeatureMatrix train = generate_synthetic(300, 4, 3.0, 0.5, 21);
    const FeatureMatrix test = generate_synthetic(200, 4, 3.0, 0.5, 22);
    TrainConfig cfg;
    cfg.n_trees = 1;
    cfg.mtry = train.n_cols;
    cfg.bootstrap = false;
    cfg.seed = 5;

    const RandomForestModel forest = train_random_forest(train, cfg);
    const DecisionTreeModel tree = train_decision_tree(train, cfg);
    CHECK(forest.trees.size() == 1);
    CHECK(predict(forest, test) == predict(tree, test));
}

TEST_CASE("same config and seed build structurally identical forests") {
    const FeatureMatrix train = generate_synthetic(200, 3, 2.0, 0.4, 8);
    TrainConfig cfg;
    cfg.n_trees = 12;
    cfg.seed = 99;
    const RandomForestModel a = train_random_forest(train, cfg);
    const RandomForestModel b = train_random_forest(train, cfg);
    REQUIRE(a.trees.size() == b.trees.size());
    for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(a.trees[t] == b.trees[t]);

    cfg.seed = 100;
    const RandomForestModel c = train_random_forest(train, cfg);
    CHECK(a.trees != c.trees);
}

TEST_CASE("100 trees on the 1-D toy data all learn the single split") {
    const FeatureMatrix X = make_matrix({{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
    const FeatureMatrix probe = make_matrix({{4.0}}, {1});
    TrainConfig cfg;
    cfg.n_trees = 100;
    cfg.seed = 3;

    // bootstrap off: every tree sees both classes and learns the one split
    cfg.bootstrap = false;
    const RandomForestModel unanimous = train_random_forest(X, cfg);
    CHECK(predict(unanimous, X) == X.labels);
    CHECK(decision_scores(unanimous, probe)[0] == 1.0);

    // bootstrap on: a few 4-row resamples are single-class, so the vote is
    // near- but not exactly unanimous; the majority still classifies cleanly
    cfg.bootstrap = true;
    const RandomForestModel voted = train_random_forest(X, cfg);
    CHECK(predict(voted, X) == X.labels);
    CHECK(decision_scores(voted, probe)[0] > 0.9);
}

TEST_CASE("forest vote ties resolve to attack") {
    // two stumps voting 0 and 1 -> prediction 1
    const FeatureMatrix left = make_matrix({{0}, {1}}, {0, 0});
    const FeatureMatrix right = make_matrix({{0}, {1}}, {1, 1});
    RandomForestModel forest;
    forest.trees.push_back(train_decision_tree(left, TrainConfig{}));
    forest.trees.push_back(train_decision_tree(right, TrainConfig{}));
    forest.n_trees = 2;
    const FeatureMatrix probe = make_matrix({{0.5}}, {0});
    CHECK(predict(forest, probe) == std::vector<int>{1});
    CHECK(decision_scores(forest, probe) == std::vector<double>{0.5});
}

TEST_CASE("tree-based predictions are invariant under a rank-preserving feature transform") {
    const FeatureMatrix train = generate_synthetic(250, 3, 2.5, 0.5, 31);
    const FeatureMatrix test = generate_synthetic(150, 3, 2.5, 0.5, 32);

    auto warp = [](const FeatureMatrix& m) {
        FeatureMatrix out = m;  // strictly increasing transform of feature 0
        for (std::size_t r = 0; r < m.n_rows; ++r) {
            out.at(r, 0) = std::exp(m.at(r, 0) / 2.0) * 3.0 + 1.0;
        }
        return out;
    };

    TrainConfig cfg;
    cfg.n_trees = 15;
    cfg.seed = 17;
    const RandomForestModel plain = train_random_forest(train, cfg);
    const RandomForestModel warped = train_random_forest(warp(train), cfg);
    CHECK(predict(plain, test) == predict(warped, warp(test)));

    const DecisionTreeModel tree_plain = train_decision_tree(train, cfg);
    const DecisionTreeModel tree_warped = train_decision_tree(warp(train), cfg);
    CHECK(predict(tree_plain, test) == predict(tree_warped, warp(test)));
}

TEST_CASE("mtry defaults to ceil(sqrt(n_features))") {
    const FeatureMatrix train = generate_synthetic(100, 10, 3.0, 0.5, 12);
    TrainConfig cfg;
    cfg.n_trees = 2;
    const RandomForestModel forest = train_random_forest(train, cfg);
    CHECK(forest.mtry == 4);  // ceil(sqrt(10))
}

TEST_CASE("forest training and prediction reject bad inputs") {
    FeatureMatrix empty;
    empty.n_cols = 2;
    empty.feature_names = {"a", "b"};
    CHECK_THROWS_AS(train_random_forest(empty, TrainConfig{}), DataError);

    const FeatureMatrix train = generate_synthetic(50, 2, 3.0, 0.5, 4);
    TrainConfig cfg;
    cfg.n_trees = 3;
    const RandomForestModel forest = train_random_forest(train, cfg);
    const FeatureMatrix wide = generate_synthetic(10, 5, 3.0, 0.5, 4);
    CHECK_THROWS_AS(predict(forest, wide), DataError);
}
