#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "idsfed/forest.hpp"
#include "idsfed/metrics.hpp"
#include "idsfed/model_io.hpp"
#include "idsfed/preprocess.hpp"
#include "idsfed/svm.hpp"

namespace idsfed {

enum class ModelKind { Svm, Forest };
enum class AggregationStrategy { FedAvgBaseline, TrustAware };

struct ForestPayload {
    std::vector<DecisionTreeModel> trees;
    bool operator==(const ForestPayload&) const = default;
};

struct LocalIndicators {
    double train_f1 = 0.0;
    bool single_class_data = false;
};

// One client's contribution to a round: model parameters plus scalar
// indicators. Never carries row-level data.
struct ClientUpdate {
    int client_id = -1;
    std::size_t round = 0;
    std::variant<LinearSvmModel, ForestPayload> payload;
    std::size_t n_samples = 0;
    LocalIndicators local_indicators;
};

// Per-client reliability scores evolved across rounds via an EMA of
// server-side validation F1. Initialized to 1.0.
struct TrustLedger {
    std::vector<double> trust;
    double beta = 0.5;
    std::vector<std::vector<double>> history;  // per round, per client F1

    static TrustLedger init(int clients, double beta);
};

struct LabelFlipAdversary {
    double fraction = 0.0;
    std::vector<int> client_ids;
};

struct WeightNoiseAdversary {
    double sigma = 0.0;
    std::vector<int> client_ids;
};

using Adversary = std::variant<std::monostate, LabelFlipAdversary, WeightNoiseAdversary>;

struct AggregationConfig {
    AggregationStrategy strategy = AggregationStrategy::TrustAware;
    std::size_t rounds = 5;
    int clients = 5;
    std::size_t local_epochs = 2;
    double validation_fraction = 0.2;
    Adversary adversary{};
    std::uint64_t seed = 0;
    PartitionScheme partition = PartitionScheme::IID;
    double alpha = 0.5;       // Dirichlet concentration
    double trust_beta = 0.5;  // EMA memory
    TrainConfig train;        // local model hyperparameters

    void validate() const;  // throws ConfigError
};

struct RoundReport {
    std::size_t round = 0;
    std::vector<double> trust;
    std::vector<double> validation_f1;
    std::vector<double> weights;
    MetricReport test_metrics;
};

// Local training step. SVM continues SGD from the global weights (warm
// start); forests are retrained per round since trees cannot warm-start.
// Single-class SVM client data returns the global model unchanged with an
// indicator flag. Raw rows never leave this function.
ClientUpdate client_local_train(const FeatureMatrix& client_data, ModelKind kind,
                                const std::optional<AnyModel>& global_model,
                                const AggregationConfig& cfg, std::size_t round, int client_id);

// Instantiates the payload as a standalone model and returns its F1 on the
// server validation set.
double score_update(const ClientUpdate& update, const FeatureMatrix& server_validation);

// trust_k <- beta * trust_k + (1 - beta) * clamp(F1_k, 0, 1).
TrustLedger update_trust(const TrustLedger& ledger, const std::vector<double>& scores);

// FedAvgBaseline: w_k proportional to n_k. TrustAware: w_k proportional to
// n_k * trust_k. Normalized to sum 1; all-zero mass is an explicit error.
std::vector<double> aggregation_weights(const std::vector<std::size_t>& n,
                                        const std::vector<double>& trust,
                                        AggregationStrategy strategy);

// SVM: convex combination of weights and bias. Forest: ensemble_size trees
// drawn without replacement from the pooled client trees, per-client counts
// by largest-remainder apportionment of the weights, seeded uniform pick
// within each client's pool.
AnyModel aggregate(const std::vector<ClientUpdate>& updates, const std::vector<double>& weights,
                   std::size_t ensemble_size, std::uint64_t seed);

// Flips labels of floor(fraction * n) seeded uniformly chosen rows.
FeatureMatrix poison_labels(const FeatureMatrix& data, double fraction, std::uint64_t seed);

// Full client/server loop: carve a stratified server validation set from
// the train split, partition the remainder across clients, then per round
// broadcast -> local train -> score -> trust update -> weighted aggregate ->
// test evaluation. Deterministic given cfg.seed.
std::vector<RoundReport> run_federation(const FeatureMatrix& train, const FeatureMatrix& test,
                                        const AggregationConfig& cfg, ModelKind kind);

}  // namespace idsfed
