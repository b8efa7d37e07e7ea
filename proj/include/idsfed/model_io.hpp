#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "idsfed/forest.hpp"
#include "idsfed/svm.hpp"
#include "idsfed/tree.hpp"

namespace idsfed {

using AnyModel = std::variant<DecisionTreeModel, RandomForestModel, LinearSvmModel>;

// Versioned self-describing JSON model format. Doubles are emitted with
// shortest round-trip formatting, so a save/load cycle preserves predictions
// bitwise.
nlohmann::ordered_json model_to_json(const DecisionTreeModel& model);
nlohmann::ordered_json model_to_json(const RandomForestModel& model);
nlohmann::ordered_json model_to_json(const LinearSvmModel& model);
nlohmann::ordered_json model_to_json(const AnyModel& model);

AnyModel model_from_json(const nlohmann::json& j);

void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

std::vector<int> predict(const AnyModel& model, const FeatureMatrix& X);
std::vector<double> decision_scores(const AnyModel& model, const FeatureMatrix& X);
std::size_t model_n_features(const AnyModel& model);

}  // namespace idsfed
