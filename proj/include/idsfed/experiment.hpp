#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsfed/federated.hpp"
#include "idsfed/matrix.hpp"
#include "idsfed/synthetic.hpp"

namespace idsfed {

// Environment variable naming the default directory for relative dataset
// paths.
inline constexpr const char* kDataDirEnv = "IDSFED_DATA_DIR";

struct SyntheticSpec {
    std::size_t n = 2000;
    std::size_t d = 10;
    double separation = 8.0;
    double class_ratio = 0.5;
};

// Fully resolved experiment description. Serializes to/from the canonical
// JSON schema; the echo embedded in every report reproduces the run.
struct ExperimentConfig {
    std::string dataset = "synthetic";  // CSV path, .fmx cache path, or "synthetic"
    std::string label_column = "Label";
    double split_ratio = 0.8;
    std::uint64_t seed = 42;
    std::vector<std::string> models = {"rf", "dt", "svm"};
    TrainConfig train;
    SyntheticSpec synthetic;
    AggregationConfig federation;
    std::vector<AggregationStrategy> strategies = {AggregationStrategy::FedAvgBaseline,
                                                   AggregationStrategy::TrustAware};
    ModelKind federated_model = ModelKind::Svm;
    std::string output_dir = "out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::ordered_json to_json() const;

    void validate() const;  // throws ConfigError with field-level messages
};

enum class ExperimentMode { Baseline, Federate };

struct ReportBundle {
    nlohmann::ordered_json report;
    std::vector<std::string> files_written;
};

// Baseline mode reproduces the centralized pipeline (ingest -> clean ->
// split -> scale -> train -> evaluate); federate mode runs the simulation
// once per configured strategy. All outputs land in cfg.output_dir with the
// resolved config echoed for provenance.
ReportBundle run_experiment(const ExperimentConfig& cfg, ExperimentMode mode);

// Resolves cfg.dataset to a matrix: synthetic generator, .fmx cache, or a
// cleaned flow CSV (relative paths fall back to $IDSFED_DATA_DIR).
FeatureMatrix resolve_dataset(const ExperimentConfig& cfg);

const char* strategy_name(AggregationStrategy s);
const char* model_kind_name(ModelKind k);

}  // namespace idsfed
