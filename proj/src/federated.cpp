#include "idsfed/federated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idsfed/errors.hpp"
#include "idsfed/rng.hpp"

namespace idsfed {

TrustLedger TrustLedger::init(int clients, double beta) {
    if (clients < 1) throw std::invalid_argument("TrustLedger: need at least one client");
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument("TrustLedger: beta must be in [0,1)");
    }
    TrustLedger ledger;
    ledger.trust.assign(static_cast<std::size_t>(clients), 1.0);
    ledger.beta = beta;
    return ledger;
}

void AggregationConfig::validate() const {
    if (rounds < 1) throw ConfigError("federation.rounds must be >= 1");
    if (clients < 2) throw ConfigError("federation.clients must be >= 2");
    if (!(validation_fraction > 0.0 && validation_fraction <= 0.5)) {
        throw ConfigError("federation.validation_fraction must be in (0, 0.5]");
    }
    if (partition == PartitionScheme::Dirichlet && !(alpha > 0.0)) {
        throw ConfigError("federation.alpha must be positive for dirichlet partitioning");
    }
    if (!(trust_beta >= 0.0 && trust_beta < 1.0)) {
        throw ConfigError("federation.trust_beta must be in [0,1)");
    }
    const auto check_ids = [this](const std::vector<int>& ids) {
        for (int id : ids) {
            if (id < 0 || id >= clients) {
                throw ConfigError("federation.adversary.clients contains id " +
                                  std::to_string(id) + " outside [0," +
                                  std::to_string(clients) + ")");
            }
        }
    };
    if (const auto* flip = std::get_if<LabelFlipAdversary>(&adversary)) {
        if (!(flip->fraction >= 0.0 && flip->fraction <= 1.0)) {
            throw ConfigError("federation.adversary.fraction must be in [0,1]");
        }
        check_ids(flip->client_ids);
    } else if (const auto* noise = std::get_if<WeightNoiseAdversary>(&adversary)) {
        if (!(noise->sigma >= 0.0)) throw ConfigError("federation.adversary.sigma must be >= 0");
        check_ids(noise->client_ids);
    }
}

namespace {

double train_set_f1(const std::variant<LinearSvmModel, ForestPayload>& payload,
                    const FeatureMatrix& data) {
    std::vector<int> pred;
    if (const auto* svm = std::get_if<LinearSvmModel>(&payload)) {
        pred = predict(*svm, data);
    } else {
        const auto& trees = std::get<ForestPayload>(payload).trees;
        RandomForestModel forest;
        forest.trees = trees;
        forest.n_trees = trees.size();
        pred = predict(forest, data);
    }
    return metrics_from_confusion(confusion(data.labels, pred)).f1;
}

}  // namespace

ClientUpdate client_local_train(const FeatureMatrix& client_data, ModelKind kind,
                                const std::optional<AnyModel>& global_model,
                                const AggregationConfig& cfg, std::size_t round, int client_id) {
    if (client_data.n_rows == 0) throw DataError("client_local_train: empty client data");

    ClientUpdate update;
    update.client_id = client_id;
    update.round = round;
    update.n_samples = client_data.n_rows;

    const std::uint64_t local_seed =
        rng::mix_seed(cfg.seed, 0xC100000000ULL + round, static_cast<std::uint64_t>(client_id));

    if (kind == ModelKind::Svm) {
        if (!global_model || !std::holds_alternative<LinearSvmModel>(*global_model)) {
            throw DataError("client_local_train: SVM round requires a global SVM model");
        }
        const auto& global_svm = std::get<LinearSvmModel>(*global_model);
        const std::size_t pos = client_data.count_label(1);
        if (pos == 0 || pos == client_data.n_rows) {
            // cannot train a margin on one class; hand the global model back
            update.payload = global_svm;
            update.local_indicators.single_class_data = true;
        } else {
            LinearSvmModel local = global_svm;
            local.seed = local_seed;
            local = train_linear_svm_from(local, client_data, cfg.local_epochs);
            update.payload = std::move(local);
        }
    } else {
        TrainConfig tc = cfg.train;
        tc.seed = local_seed;
        RandomForestModel forest = train_random_forest(client_data, tc);
        update.payload = ForestPayload{std::move(forest.trees)};
    }

    update.local_indicators.train_f1 = train_set_f1(update.payload, client_data);
    return update;
}

double score_update(const ClientUpdate& update, const FeatureMatrix& server_validation) {
    const std::size_t pos = server_validation.count_label(1);
    if (server_validation.n_rows == 0 || pos == 0 || pos == server_validation.n_rows) {
        throw DataError("score_update: validation set must contain both classes");
    }
    std::vector<int> pred;
    if (const auto* svm = std::get_if<LinearSvmModel>(&update.payload)) {
        pred = predict(*svm, server_validation);
    } else {
        const auto& trees = std::get<ForestPayload>(update.payload).trees;
        if (trees.empty()) throw DataError("score_update: forest payload has no trees");
        RandomForestModel forest;
        forest.trees = trees;
        forest.n_trees = trees.size();
        pred = predict(forest, server_validation);
    }
    return metrics_from_confusion(confusion(server_validation.labels, pred)).f1;
}

TrustLedger update_trust(const TrustLedger& ledger, const std::vector<double>& scores) {
    if (scores.size() != ledger.trust.size()) {
        throw std::invalid_argument("update_trust: score count does not match known clients");
    }
    TrustLedger next = ledger;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const double s = std::clamp(scores[k], 0.0, 1.0);
        next.trust[k] = ledger.beta * ledger.trust[k] + (1.0 - ledger.beta) * s;
    }
    next.history.push_back(scores);
    return next;
}

std::vector<double> aggregation_weights(const std::vector<std::size_t>& n,
                                        const std::vector<double>& trust,
                                        AggregationStrategy strategy) {
    if (n.size() != trust.size()) {
        throw std::invalid_argument("aggregation_weights: length mismatch");
    }
    if (n.empty()) throw std::invalid_argument("aggregation_weights: no clients");

    std::vector<double> mass(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) {
        mass[k] = strategy == AggregationStrategy::FedAvgBaseline
                      ? static_cast<double>(n[k])
                      : static_cast<double>(n[k]) * trust[k];
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (!(total > 0.0)) {
        throw DataError("aggregation_weights: total mass is zero, aggregation halted");
    }
    for (double& w : mass) w /= total;
    return mass;
}

namespace {

// Integer apportionment by largest remainder; ties to the lower index.
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
    const std::size_t k = weights.size();
    std::vector<std::size_t> counts(k);
    std::vector<double> fracs(k);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const double quota = weights[j] * static_cast<double>(total);
        counts[j] = static_cast<std::size_t>(std::floor(quota));
        fracs[j] = quota - std::floor(quota);
        assigned += counts[j];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fracs[a] > fracs[b]; });
    for (std::size_t i = 0; assigned < total; ++i) {
        counts[order[i % k]] += 1;
        ++assigned;
    }
    return counts;
}

}  // namespace

AnyModel aggregate(const std::vector<ClientUpdate>& updates, const std::vector<double>& weights,
                   std::size_t ensemble_size, std::uint64_t seed) {
    if (updates.empty()) throw std::invalid_argument("aggregate: no updates");
    if (updates.size() != weights.size()) {
        throw std::invalid_argument("aggregate: weight count mismatch");
    }
    const bool svm_kind = std::holds_alternative<LinearSvmModel>(updates[0].payload);
    for (const auto& u : updates) {
        if (std::holds_alternative<LinearSvmModel>(u.payload) != svm_kind) {
            throw DataError("aggregate: payload kind mismatch across clients");
        }
    }

    if (svm_kind) {
        const auto& first = std::get<LinearSvmModel>(updates[0].payload);
        LinearSvmModel global;
        global.weights.assign(first.n_features(), 0.0);
        global.lambda = first.lambda;
        global.standardized_inputs = first.standardized_inputs;
        double steps = 0.0;
        double epochs = 0.0;
        for (std::size_t k = 0; k < updates.size(); ++k) {
            const auto& m = std::get<LinearSvmModel>(updates[k].payload);
            if (m.n_features() != global.weights.size()) {
                throw DataError("aggregate: SVM weight dimension mismatch");
            }
            for (std::size_t c = 0; c < global.weights.size(); ++c) {
                global.weights[c] += weights[k] * m.weights[c];
            }
            global.bias += weights[k] * m.bias;
            steps += weights[k] * static_cast<double>(m.steps);
            epochs += weights[k] * static_cast<double>(m.epochs);
        }
        global.steps = static_cast<std::uint64_t>(std::llround(steps));
        global.epochs = static_cast<std::size_t>(std::llround(epochs));
        global.seed = seed;
        return global;
    }

    const std::vector<std::size_t> counts = apportion(weights, ensemble_size);
    RandomForestModel global;
    global.n_trees = ensemble_size;
    global.seed = seed;
    for (std::size_t k = 0; k < updates.size(); ++k) {
        const auto& pool = std::get<ForestPayload>(updates[k].payload).trees;
        if (counts[k] > pool.size()) {
            throw DataError("aggregate: client " + std::to_string(updates[k].client_id) +
                            " has " + std::to_string(pool.size()) + " trees, needs " +
                            std::to_string(counts[k]));
        }
        auto eng = rng::make_engine(seed, 0xA66, static_cast<std::uint64_t>(k));
        const auto picks = rng::sample_without_replacement(eng, pool.size(), counts[k]);
        for (std::size_t p : picks) global.trees.push_back(pool[p]);
    }
    global.mtry = global.trees.empty() ? 0 : global.trees[0].config.mtry;
    return global;
}

FeatureMatrix poison_labels(const FeatureMatrix& data, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("poison_labels: fraction must be in [0,1]");
    }
    const auto flips = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(data.n_rows)));
    FeatureMatrix out = data;
    auto eng = rng::make_engine(seed, 0xBAD);
    for (std::size_t r : rng::sample_without_replacement(eng, data.n_rows, flips)) {
        out.labels[r] = 1 - out.labels[r];
    }
    return out;
}

namespace {

void apply_weight_noise(ClientUpdate& update, double sigma, rng::Engine& eng) {
    if (auto* svm = std::get_if<LinearSvmModel>(&update.payload)) {
        for (double& w : svm->weights) w += sigma * rng::normal(eng);
        svm->bias += sigma * rng::normal(eng);
    } else {
        for (auto& tree : std::get<ForestPayload>(update.payload).trees) {
            for (auto& node : tree.nodes) {
                if (!node.is_leaf()) node.threshold += sigma * rng::normal(eng);
            }
        }
    }
}

MetricReport evaluate_global(const AnyModel& model, const FeatureMatrix& test) {
    const std::vector<int> pred = predict(model, test);
    MetricReport report = metrics_from_confusion(confusion(test.labels, pred));
    report.roc_auc = roc_auc(test.labels, decision_scores(model, test)).auc;
    return report;
}

}  // namespace

std::vector<RoundReport> run_federation(const FeatureMatrix& train, const FeatureMatrix& test,
                                        const AggregationConfig& cfg, ModelKind kind) {
    cfg.validate();

    // Server validation set is carved from train and never reaches clients.
    const SplitPair carve =
        stratified_split(train, 1.0 - cfg.validation_fraction, rng::mix_seed(cfg.seed, 0xCA));
    const FeatureMatrix& validation = carve.test;
    const PartitionPlan plan = partition_clients(carve.train, cfg.clients, cfg.partition,
                                                 cfg.alpha, rng::mix_seed(cfg.seed, 0x9A));

    std::vector<FeatureMatrix> client_data;
    client_data.reserve(static_cast<std::size_t>(cfg.clients));
    for (const auto& rows : plan.client_rows()) client_data.push_back(carve.train.take_rows(rows));

    if (const auto* flip = std::get_if<LabelFlipAdversary>(&cfg.adversary)) {
        for (int id : flip->client_ids) {
            client_data[static_cast<std::size_t>(id)] =
                poison_labels(client_data[static_cast<std::size_t>(id)], flip->fraction,
                              rng::mix_seed(cfg.seed, 0x1F, static_cast<std::uint64_t>(id)));
        }
    }

    std::optional<AnyModel> global;
    if (kind == ModelKind::Svm) {
        LinearSvmModel zero;
        zero.weights.assign(train.n_cols, 0.0);
        zero.lambda = cfg.train.lambda;
        zero.seed = cfg.seed;
        global = zero;
    }

    TrustLedger ledger = TrustLedger::init(cfg.clients, cfg.trust_beta);
    std::vector<RoundReport> reports;
    reports.reserve(cfg.rounds);

    for (std::size_t round = 1; round <= cfg.rounds; ++round) {
        std::vector<ClientUpdate> updates;
        updates.reserve(static_cast<std::size_t>(cfg.clients));
        std::vector<std::size_t> n_samples;
        std::vector<double> scores;

        for (int k = 0; k < cfg.clients; ++k) {
            try {
                updates.push_back(client_local_train(client_data[static_cast<std::size_t>(k)],
                                                     kind, global, cfg, round, k));
            } catch (const std::exception& e) {
                throw DataError("round " + std::to_string(round) + ", client " +
                                std::to_string(k) + ": " + e.what());
            }
        }

        if (const auto* noise = std::get_if<WeightNoiseAdversary>(&cfg.adversary)) {
            for (int id : noise->client_ids) {
                auto eng = rng::make_engine(cfg.seed, 0x7E00000000ULL + round,
                                            static_cast<std::uint64_t>(id));
                apply_weight_noise(updates[static_cast<std::size_t>(id)], noise->sigma, eng);
            }
        }

        for (int k = 0; k < cfg.clients; ++k) {
            try {
                scores.push_back(score_update(updates[static_cast<std::size_t>(k)], validation));
            } catch (const std::exception& e) {
                throw DataError("round " + std::to_string(round) + ", client " +
                                std::to_string(k) + ": " + e.what());
            }
            n_samples.push_back(updates[static_cast<std::size_t>(k)].n_samples);
        }

        ledger = update_trust(ledger, scores);
        const std::vector<double> weights =
            aggregation_weights(n_samples, ledger.trust, cfg.strategy);
        global = aggregate(updates, weights, cfg.train.n_trees,
                           rng::mix_seed(cfg.seed, 0xA6600000000ULL + round));

        RoundReport report;
        report.round = round;
        report.trust = ledger.trust;
        report.validation_f1 = scores;
        report.weights = weights;
        report.test_metrics = evaluate_global(*global, test);
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace idsfed
