#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "idsfed/errors.hpp"
#include "idsfed/model_io.hpp"
#include "idsfed/preprocess.hpp"
#include "idsfed/synthetic.hpp"

using namespace idsfed;

namespace {

struct Fixture {
    FeatureMatrix train;
    FeatureMatrix test;

    Fixture() {
        const FeatureMatrix raw_train = generate_synthetic(400, 5, 3.0, 0.45, 51);
        const FeatureMatrix raw_test = generate_synthetic(250, 5, 3.0, 0.45, 52);
        const ScalerParams scaler = fit_scaler(raw_train);
        train = apply_scaler(scaler, raw_train);
        test = apply_scaler(scaler, raw_test);
    }
};

std::vector<AnyModel> trained_models(const FeatureMatrix& train) {
    TrainConfig cfg;
    cfg.n_trees = 9;
    cfg.seed = 14;
    return {train_decision_tree(train, cfg), train_random_forest(train, cfg),
            train_linear_svm(train, cfg)};
}

}  // namespace

TEST_CASE("predict equals decision_scores thresholded at the model boundary") {
    const Fixture fx;
    for (const AnyModel& model : trained_models(fx.train)) {
        const std::vector<int> pred = predict(model, fx.test);
        const std::vector<double> scores = decision_scores(model, fx.test);
        const double boundary = std::holds_alternative<LinearSvmModel>(model) ? 0.0 : 0.5;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            CHECK(pred[i] == (scores[i] >= boundary ? 1 : 0));
        }
    }
}

TEST_CASE("JSON round-trip preserves predictions bitwise") {
    const Fixture fx;
    int idx = 0;
    for (const AnyModel& model : trained_models(fx.train)) {
        const std::string path = "/tmp/idsfed_model_" + std::to_string(idx++) + ".json";
        save_model(model, path);
        const AnyModel loaded = load_model(path);
        CHECK(predict(loaded, fx.test) == predict(model, fx.test));
        CHECK(decision_scores(loaded, fx.test) == decision_scores(model, fx.test));
        std::remove(path.c_str());
    }
}

TEST_CASE("round-trip reproduces model structure exactly") {
    const Fixture fx;
    TrainConfig cfg;
    cfg.n_trees = 5;
    cfg.seed = 6;
    const RandomForestModel forest = train_random_forest(fx.train, cfg);
    const AnyModel loaded = model_from_json(model_to_json(forest));
    CHECK(std::get<RandomForestModel>(loaded) == forest);

    const LinearSvmModel svm = train_linear_svm(fx.train, cfg);
    const AnyModel svm_loaded = model_from_json(model_to_json(svm));
    CHECK(std::get<LinearSvmModel>(svm_loaded) == svm);
}

TEST_CASE("model files are versioned and self-describing") {
    const Fixture fx;
    const DecisionTreeModel tree = train_decision_tree(fx.train, TrainConfig{});
    const auto j = model_to_json(tree);
    CHECK(j.at("format") == "idsfed-model");
    CHECK(j.at("version") == 1);
    CHECK(j.at("kind") == "decision_tree");

    nlohmann::json bad = j;
    bad["version"] = 99;
    CHECK_THROWS_AS(model_from_json(bad), DataError);
    bad = j;
    bad["kind"] = "boosted_trees";
    CHECK_THROWS_AS(model_from_json(bad), DataError);
}

TEST_CASE("model_n_features reports the trained width") {
    const Fixture fx;
    for (const AnyModel& model : trained_models(fx.train)) {
        CHECK(model_n_features(model) == fx.train.n_cols);
    }
}
