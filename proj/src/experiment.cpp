#include "idsfed/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "idsfed/csv.hpp"
#include "idsfed/errors.hpp"
#include "idsfed/preprocess.hpp"

namespace fs = std::filesystem;

namespace idsfed {

namespace {

// Shortest round-trip decimal form, same formatter the JSON reports use.
std::string num(double v) { return nlohmann::json(v).dump(); }

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

AggregationStrategy strategy_from_name(const std::string& name) {
    if (name == "fedavg") return AggregationStrategy::FedAvgBaseline;
    if (name == "trust") return AggregationStrategy::TrustAware;
    throw ConfigError("unknown strategy '" + name + "' (expected fedavg|trust)");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "svm") return ModelKind::Svm;
    if (name == "rf") return ModelKind::Forest;
    throw ConfigError("unknown federated model '" + name + "' (expected svm|rf)");
}

Adversary adversary_from_json(const nlohmann::json& j) {
    const std::string kind = get_field<std::string>(j, "kind", "none");
    if (kind == "none") return std::monostate{};
    if (kind == "label_flip") {
        LabelFlipAdversary a;
        a.fraction = get_field<double>(j, "fraction", 0.0);
        a.client_ids = get_field<std::vector<int>>(j, "clients", {});
        return a;
    }
    if (kind == "weight_noise") {
        WeightNoiseAdversary a;
        a.sigma = get_field<double>(j, "sigma", 0.0);
        a.client_ids = get_field<std::vector<int>>(j, "clients", {});
        return a;
    }
    throw ConfigError("unknown adversary kind '" + kind +
                      "' (expected none|label_flip|weight_noise)");
}

nlohmann::ordered_json adversary_to_json(const Adversary& adv) {
    nlohmann::ordered_json j;
    if (const auto* flip = std::get_if<LabelFlipAdversary>(&adv)) {
        j["kind"] = "label_flip";
        j["fraction"] = flip->fraction;
        j["clients"] = flip->client_ids;
    } else if (const auto* noise = std::get_if<WeightNoiseAdversary>(&adv)) {
        j["kind"] = "weight_noise";
        j["sigma"] = noise->sigma;
        j["clients"] = noise->client_ids;
    } else {
        j["kind"] = "none";
    }
    return j;
}

nlohmann::ordered_json metrics_to_json(const MetricReport& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    if (m.roc_auc) {
        j["roc_auc"] = *m.roc_auc;
    } else {
        j["roc_auc"] = nullptr;
    }
    j["zero_division_flags"] = m.zero_division_flags;
    return j;
}

nlohmann::ordered_json confusion_to_json(const ConfusionMatrix& cm) {
    return {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

void write_text_file(const std::string& path, const std::string& content,
                     std::vector<std::string>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path);
    out << content;
    files.push_back(path);
}

}  // namespace

const char* strategy_name(AggregationStrategy s) {
    return s == AggregationStrategy::FedAvgBaseline ? "fedavg" : "trust";
}

const char* model_kind_name(ModelKind k) { return k == ModelKind::Svm ? "svm" : "rf"; }

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    ExperimentConfig cfg;
    cfg.dataset = get_field<std::string>(j, "dataset", cfg.dataset);
    cfg.label_column = get_field<std::string>(j, "label_column", cfg.label_column);
    cfg.split_ratio = get_field<double>(j, "split_ratio", cfg.split_ratio);
    cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);

    if (j.contains("models")) {
        if (j.at("models").is_string() && j.at("models").get<std::string>() == "all") {
            cfg.models = {"rf", "dt", "svm"};
        } else {
            cfg.models = get_field<std::vector<std::string>>(j, "models", cfg.models);
        }
    }

    if (j.contains("train")) {
        const auto& t = j.at("train");
        cfg.train.n_trees = get_field<std::size_t>(t, "n_trees", cfg.train.n_trees);
        cfg.train.max_depth = get_field<std::size_t>(t, "max_depth", cfg.train.max_depth);
        cfg.train.min_samples_split =
            get_field<std::size_t>(t, "min_samples_split", cfg.train.min_samples_split);
        cfg.train.mtry = get_field<std::size_t>(t, "mtry", cfg.train.mtry);
        cfg.train.bootstrap = get_field<bool>(t, "bootstrap", cfg.train.bootstrap);
        cfg.train.lambda = get_field<double>(t, "lambda", cfg.train.lambda);
        cfg.train.epochs = get_field<std::size_t>(t, "epochs", cfg.train.epochs);
    }

    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        cfg.synthetic.n = get_field<std::size_t>(s, "n", cfg.synthetic.n);
        cfg.synthetic.d = get_field<std::size_t>(s, "d", cfg.synthetic.d);
        cfg.synthetic.separation = get_field<double>(s, "separation", cfg.synthetic.separation);
        cfg.synthetic.class_ratio = get_field<double>(s, "class_ratio", cfg.synthetic.class_ratio);
    }

    if (j.contains("federation")) {
        const auto& f = j.at("federation");
        cfg.federation.rounds = get_field<std::size_t>(f, "rounds", cfg.federation.rounds);
        cfg.federation.clients = get_field<int>(f, "clients", cfg.federation.clients);
        cfg.federation.local_epochs =
            get_field<std::size_t>(f, "local_epochs", cfg.federation.local_epochs);
        cfg.federation.validation_fraction =
            get_field<double>(f, "validation_fraction", cfg.federation.validation_fraction);
        const std::string partition = get_field<std::string>(f, "partition", "iid");
        if (partition == "iid") {
            cfg.federation.partition = PartitionScheme::IID;
        } else if (partition == "dirichlet") {
            cfg.federation.partition = PartitionScheme::Dirichlet;
        } else {
            throw ConfigError("config field 'federation.partition' must be iid|dirichlet");
        }
        cfg.federation.alpha = get_field<double>(f, "alpha", cfg.federation.alpha);
        cfg.federation.trust_beta = get_field<double>(f, "trust_beta", cfg.federation.trust_beta);
        if (f.contains("adversary")) cfg.federation.adversary = adversary_from_json(f.at("adversary"));
        if (f.contains("strategies")) {
            cfg.strategies.clear();
            for (const auto& s : get_field<std::vector<std::string>>(f, "strategies", {})) {
                cfg.strategies.push_back(strategy_from_name(s));
            }
        }
        cfg.federated_model =
            model_kind_from_name(get_field<std::string>(f, "model", "svm"));
    }

    cfg.output_dir = get_field<std::string>(j, "output_dir", cfg.output_dir);
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["dataset"] = dataset;
    j["label_column"] = label_column;
    j["split_ratio"] = split_ratio;
    j["seed"] = seed;
    j["models"] = models;
    j["train"] = {{"n_trees", train.n_trees},
                  {"max_depth", train.max_depth},
                  {"min_samples_split", train.min_samples_split},
                  {"mtry", train.mtry},
                  {"bootstrap", train.bootstrap},
                  {"lambda", train.lambda},
                  {"epochs", train.epochs}};
    j["synthetic"] = {{"n", synthetic.n},
                      {"d", synthetic.d},
                      {"separation", synthetic.separation},
                      {"class_ratio", synthetic.class_ratio}};
    nlohmann::ordered_json f;
    std::vector<std::string> names;
    for (auto s : strategies) names.emplace_back(strategy_name(s));
    f["strategies"] = names;
    f["model"] = model_kind_name(federated_model);
    f["rounds"] = federation.rounds;
    f["clients"] = federation.clients;
    f["local_epochs"] = federation.local_epochs;
    f["validation_fraction"] = federation.validation_fraction;
    f["partition"] = federation.partition == PartitionScheme::IID ? "iid" : "dirichlet";
    f["alpha"] = federation.alpha;
    f["trust_beta"] = federation.trust_beta;
    f["adversary"] = adversary_to_json(federation.adversary);
    j["federation"] = std::move(f);
    j["output_dir"] = output_dir;
    return j;
}

void ExperimentConfig::validate() const {
    if (dataset.empty()) throw ConfigError("config field 'dataset' must not be empty");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw ConfigError("config field 'split_ratio' must be in (0,1)");
    }
    if (models.empty()) throw ConfigError("config field 'models' must not be empty");
    for (const auto& m : models) {
        if (m != "rf" && m != "dt" && m != "svm") {
            throw ConfigError("config field 'models' contains unknown model '" + m + "'");
        }
    }
    if (output_dir.empty()) throw ConfigError("config field 'output_dir' must not be empty");
    if (strategies.empty()) {
        throw ConfigError("config field 'federation.strategies' must not be empty");
    }
    if (dataset == "synthetic") {
        if (synthetic.n < 4) throw ConfigError("config field 'synthetic.n' must be >= 4");
        if (synthetic.d < 1) throw ConfigError("config field 'synthetic.d' must be >= 1");
        if (!(synthetic.separation > 0.0)) {
            throw ConfigError("config field 'synthetic.separation' must be positive");
        }
        if (!(synthetic.class_ratio > 0.0 && synthetic.class_ratio < 1.0)) {
            throw ConfigError("config field 'synthetic.class_ratio' must be in (0,1)");
        }
    }
    federation.validate();
}

FeatureMatrix resolve_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset == "synthetic") {
        return generate_synthetic(cfg.synthetic.n, cfg.synthetic.d, cfg.synthetic.separation,
                                  cfg.synthetic.class_ratio, cfg.seed);
    }
    fs::path path(cfg.dataset);
    if (!fs::exists(path) && path.is_relative()) {
        if (const char* dir = std::getenv(kDataDirEnv)) {
            const fs::path alt = fs::path(dir) / path;
            if (fs::exists(alt)) path = alt;
        }
    }
    if (!fs::exists(path)) throw DataError("dataset not found: " + cfg.dataset);
    if (path.extension() == ".fmx") return load_matrix_cache(path.string());
    return clean(load_flow_csv(path.string()), cfg.label_column);
}

namespace {

nlohmann::ordered_json class_support_json(const FeatureMatrix& m) {
    return {{"benign", m.count_label(0)}, {"attack", m.count_label(1)}};
}

std::string roc_to_csv(const RocCurve& curve) {
    std::string csv = "fpr,tpr\n";
    for (const auto& [fpr, tpr] : curve.points) {
        csv += num(fpr);
        csv += ',';
        csv += num(tpr);
        csv += '\n';
    }
    return csv;
}

std::string trust_to_csv(const std::vector<RoundReport>& rounds) {
    std::string csv = "round,client,trust,weight,validation_f1\n";
    for (const auto& r : rounds) {
        for (std::size_t k = 0; k < r.trust.size(); ++k) {
            csv += std::to_string(r.round);
            csv += ',';
            csv += std::to_string(k);
            csv += ',';
            csv += num(r.trust[k]);
            csv += ',';
            csv += num(r.weights[k]);
            csv += ',';
            csv += num(r.validation_f1[k]);
            csv += '\n';
        }
    }
    return csv;
}

AnyModel train_named_model(const std::string& name, const FeatureMatrix& train,
                           TrainConfig cfg) {
    if (name == "rf") return train_random_forest(train, cfg);
    if (name == "dt") return train_decision_tree(train, cfg);
    return train_linear_svm(train, cfg);
}

}  // namespace

ReportBundle run_experiment(const ExperimentConfig& cfg, ExperimentMode mode) {
    cfg.validate();

    const FeatureMatrix full = resolve_dataset(cfg);
    const SplitPair split = stratified_split(full, cfg.split_ratio, cfg.seed);
    const ScalerParams scaler = fit_scaler(split.train);
    const FeatureMatrix train = apply_scaler(scaler, split.train);
    const FeatureMatrix test = apply_scaler(scaler, split.test);

    fs::create_directories(cfg.output_dir);

    ReportBundle bundle;
    nlohmann::ordered_json& report = bundle.report;
    report["mode"] = mode == ExperimentMode::Baseline ? "baseline" : "federate";
    report["config"] = cfg.to_json();
    report["dataset"] = {{"rows", full.n_rows},
                         {"features", full.n_cols},
                         {"class_support",
                          {{"full", class_support_json(full)},
                           {"train", class_support_json(split.train)},
                           {"test", class_support_json(split.test)}}}};

    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = cfg.seed;

    if (mode == ExperimentMode::Baseline) {
        nlohmann::ordered_json models_json;
        for (const auto& name : cfg.models) {
            const AnyModel model = train_named_model(name, train, train_cfg);
            const std::vector<int> pred = predict(model, test);
            const ConfusionMatrix cm = confusion(test.labels, pred);
            MetricReport metrics = metrics_from_confusion(cm);
            const RocCurve curve = roc_auc(test.labels, decision_scores(model, test));
            metrics.roc_auc = curve.auc;

            const std::string roc_file = "roc_" + name + ".csv";
            write_text_file((fs::path(cfg.output_dir) / roc_file).string(), roc_to_csv(curve),
                            bundle.files_written);

            nlohmann::ordered_json mj;
            mj["confusion"] = confusion_to_json(cm);
            mj["metrics"] = metrics_to_json(metrics);
            const auto [fp, fn] = error_profile(cm);
            mj["error_profile"] = {{"fp", fp}, {"fn", fn}};
            mj["roc_csv"] = roc_file;
            models_json[name] = std::move(mj);
        }
        report["models"] = std::move(models_json);
        const std::string path = (fs::path(cfg.output_dir) / "baseline_report.json").string();
        write_text_file(path, report.dump(2) + "\n", bundle.files_written);
        return bundle;
    }

    nlohmann::ordered_json strategies_json;
    for (const AggregationStrategy strategy : cfg.strategies) {
        AggregationConfig fed = cfg.federation;
        fed.strategy = strategy;
        fed.seed = cfg.seed;
        fed.train = train_cfg;
        const std::vector<RoundReport> rounds = run_federation(train, test, fed, cfg.federated_model);

        nlohmann::ordered_json rounds_json = nlohmann::ordered_json::array();
        for (const auto& r : rounds) {
            rounds_json.push_back({{"round", r.round},
                                   {"trust", r.trust},
                                   {"validation_f1", r.validation_f1},
                                   {"weights", r.weights},
                                   {"test_metrics", metrics_to_json(r.test_metrics)}});
        }
        const std::string trust_file = std::string("trust_") + strategy_name(strategy) + ".csv";
        write_text_file((fs::path(cfg.output_dir) / trust_file).string(), trust_to_csv(rounds),
                        bundle.files_written);

        nlohmann::ordered_json sj;
        sj["rounds"] = std::move(rounds_json);
        sj["final_f1"] = rounds.back().test_metrics.f1;
        sj["trust_csv"] = trust_file;
        strategies_json[strategy_name(strategy)] = std::move(sj);
    }
    report["strategies"] = std::move(strategies_json);
    const std::string path = (fs::path(cfg.output_dir) / "federate_report.json").string();
    write_text_file(path, report.dump(2) + "\n", bundle.files_written);
    return bundle;
}

}  // namespace idsfed
