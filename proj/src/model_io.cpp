#include "idsfed/model_io.hpp"

#include <fstream>

#include "idsfed/errors.hpp"

namespace idsfed {

namespace {

constexpr const char* kFormat = "idsfed-model";
constexpr int kVersion = 1;

nlohmann::ordered_json config_to_json(const TrainConfig& cfg) {
    return {{"max_depth", cfg.max_depth},
            {"min_samples_split", cfg.min_samples_split},
            {"n_trees", cfg.n_trees},
            {"mtry", cfg.mtry},
            {"bootstrap", cfg.bootstrap},
            {"lambda", cfg.lambda},
            {"epochs", cfg.epochs},
            {"seed", cfg.seed}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.max_depth = j.at("max_depth").get<std::size_t>();
    cfg.min_samples_split = j.at("min_samples_split").get<std::size_t>();
    cfg.n_trees = j.at("n_trees").get<std::size_t>();
    cfg.mtry = j.at("mtry").get<std::size_t>();
    cfg.bootstrap = j.at("bootstrap").get<bool>();
    cfg.lambda = j.at("lambda").get<double>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

// Nodes as compact tuples: [feature, threshold, left, right, class,
// positive_fraction, n_samples].
nlohmann::ordered_json nodes_to_json(const std::vector<TreeNode>& nodes) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& n : nodes) {
        arr.push_back({n.feature_index, n.threshold, n.left, n.right, n.leaf_class,
                       n.positive_fraction, n.n_samples});
    }
    return arr;
}

std::vector<TreeNode> nodes_from_json(const nlohmann::json& arr) {
    std::vector<TreeNode> nodes;
    nodes.reserve(arr.size());
    for (const auto& t : arr) {
        TreeNode n;
        n.feature_index = t.at(0).get<int>();
        n.threshold = t.at(1).get<double>();
        n.left = t.at(2).get<std::int32_t>();
        n.right = t.at(3).get<std::int32_t>();
        n.leaf_class = t.at(4).get<int>();
        n.positive_fraction = t.at(5).get<double>();
        n.n_samples = t.at(6).get<std::uint64_t>();
        nodes.push_back(n);
    }
    return nodes;
}

nlohmann::ordered_json header(const char* kind) {
    nlohmann::ordered_json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["kind"] = kind;
    return j;
}

}  // namespace

nlohmann::ordered_json model_to_json(const DecisionTreeModel& model) {
    auto j = header("decision_tree");
    j["n_features"] = model.n_features;
    j["config"] = config_to_json(model.config);
    j["nodes"] = nodes_to_json(model.nodes);
    return j;
}

nlohmann::ordered_json model_to_json(const RandomForestModel& model) {
    auto j = header("random_forest");
    j["n_features"] = model.n_features();
    j["n_trees"] = model.n_trees;
    j["mtry"] = model.mtry;
    j["seed"] = model.seed;
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (const auto& tree : model.trees) trees.push_back(model_to_json(tree));
    j["trees"] = std::move(trees);
    return j;
}

nlohmann::ordered_json model_to_json(const LinearSvmModel& model) {
    auto j = header("linear_svm");
    j["n_features"] = model.n_features();
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["lambda"] = model.lambda;
    j["epochs"] = model.epochs;
    j["steps"] = model.steps;
    j["seed"] = model.seed;
    j["standardized_inputs"] = model.standardized_inputs;
    return j;
}

nlohmann::ordered_json model_to_json(const AnyModel& model) {
    return std::visit([](const auto& m) { return model_to_json(m); }, model);
}

AnyModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != kFormat) throw DataError("model file: unknown format");
    if (j.value("version", 0) != kVersion) {
        throw DataError("model file: unsupported version " + j.at("version").dump());
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "decision_tree") {
        DecisionTreeModel m;
        m.n_features = j.at("n_features").get<std::size_t>();
        m.config = config_from_json(j.at("config"));
        m.nodes = nodes_from_json(j.at("nodes"));
        return m;
    }
    if (kind == "random_forest") {
        RandomForestModel m;
        m.n_trees = j.at("n_trees").get<std::size_t>();
        m.mtry = j.at("mtry").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("trees")) {
            m.trees.push_back(std::get<DecisionTreeModel>(model_from_json(t)));
        }
        return m;
    }
    if (kind == "linear_svm") {
        LinearSvmModel m;
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.lambda = j.at("lambda").get<double>();
        m.epochs = j.at("epochs").get<std::size_t>();
        m.steps = j.at("steps").get<std::uint64_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.standardized_inputs = j.at("standardized_inputs").get<bool>();
        return m;
    }
    throw DataError("model file: unknown kind '" + kind + "'");
}

void save_model(const AnyModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << "\n";
}

AnyModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    return model_from_json(nlohmann::json::parse(in));
}

std::vector<int> predict(const AnyModel& model, const FeatureMatrix& X) {
    return std::visit([&](const auto& m) { return predict(m, X); }, model);
}

std::vector<double> decision_scores(const AnyModel& model, const FeatureMatrix& X) {
    return std::visit([&](const auto& m) { return decision_scores(m, X); }, model);
}

std::size_t model_n_features(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DecisionTreeModel>) {
                return m.n_features;
            } else {
                return m.n_features();
            }
        },
        model);
}

}  // namespace idsfed
