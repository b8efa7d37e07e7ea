#include "idsfed/svm.hpp"

#include <cmath>
#include <numeric>

#include "idsfed/errors.hpp"
#include "idsfed/rng.hpp"

namespace idsfed {

namespace {

void run_epochs(LinearSvmModel& model, const FeatureMatrix& X, std::size_t epochs) {
    const std::size_t n = X.n_rows;
    const std::size_t d = X.n_cols;
    std::vector<std::size_t> order(n);

    for (std::size_t e = 0; e < epochs; ++e) {
        // each epoch's visit order derives from identity, so resuming at an
        // epoch boundary replays exactly the same sequence
        const std::uint64_t epoch_index = model.epochs + e;
        std::iota(order.begin(), order.end(), 0);
        auto eng = rng::make_engine(model.seed, 0x57, epoch_index);
        rng::shuffle(eng, order);

        for (std::size_t i : order) {
            model.steps += 1;
            const double eta = 1.0 / (model.lambda * static_cast<double>(model.steps));
            const double y = X.labels[i] == 1 ? 1.0 : -1.0;
            const double* x = X.values.data() + i * d;

            double margin = model.bias;
            for (std::size_t c = 0; c < d; ++c) margin += model.weights[c] * x[c];
            margin *= y;

            // The bias rides along as an implicit constant-1 feature, so it
            // shrinks on the same schedule as the weights; an unshrunk bias
            // keeps the huge eta_1 = 1/lambda kick for thousands of steps.
            const double shrink = 1.0 - eta * model.lambda;
            if (margin < 1.0) {
                for (std::size_t c = 0; c < d; ++c) {
                    model.weights[c] = shrink * model.weights[c] + eta * y * x[c];
                }
                model.bias = shrink * model.bias + eta * y;
            } else {
                for (std::size_t c = 0; c < d; ++c) model.weights[c] *= shrink;
                model.bias *= shrink;
            }
        }
    }
    model.epochs += epochs;
}

}  // namespace

LinearSvmModel train_linear_svm(const FeatureMatrix& X, const TrainConfig& cfg) {
    if (X.n_rows == 0) throw DataError("train_linear_svm: empty input");
    const std::size_t pos = X.count_label(1);
    if (pos == 0 || pos == X.n_rows) {
        throw DataError("train_linear_svm: single-class input");
    }
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("train_linear_svm: lambda must be positive");

    LinearSvmModel model;
    model.weights.assign(X.n_cols, 0.0);
    model.lambda = cfg.lambda;
    model.seed = cfg.seed;
    run_epochs(model, X, cfg.epochs);
    return model;
}

LinearSvmModel train_linear_svm_from(const LinearSvmModel& init, const FeatureMatrix& X,
                                     std::size_t extra_epochs) {
    if (init.n_features() != X.n_cols) {
        throw DataError("train_linear_svm_from: feature count mismatch");
    }
    LinearSvmModel model = init;
    run_epochs(model, X, extra_epochs);
    return model;
}

double svm_objective(const LinearSvmModel& model, const FeatureMatrix& X) {
    if (model.n_features() != X.n_cols) throw DataError("svm_objective: feature count mismatch");
    double norm_sq = 0.0;
    for (double w : model.weights) norm_sq += w * w;
    double hinge = 0.0;
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        const double y = X.labels[r] == 1 ? 1.0 : -1.0;
        const double m = y * margin_row(model, X.row(r));
        hinge += std::max(0.0, 1.0 - m);
    }
    return 0.5 * model.lambda * norm_sq + hinge / static_cast<double>(X.n_rows);
}

double margin_row(const LinearSvmModel& model, std::span<const double> x) {
    double m = model.bias;
    for (std::size_t c = 0; c < x.size(); ++c) m += model.weights[c] * x[c];
    return m;
}

namespace {

void check_svm(const LinearSvmModel& model, const FeatureMatrix& X) {
    if (model.n_features() != X.n_cols) {
        throw DataError("predict: feature count mismatch (model " +
                        std::to_string(model.n_features()) + ", data " +
                        std::to_string(X.n_cols) + ")");
    }
}

}  // namespace

std::vector<int> predict(const LinearSvmModel& model, const FeatureMatrix& X) {
    check_svm(model, X);
    std::vector<int> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        out[r] = margin_row(model, X.row(r)) >= 0.0 ? 1 : 0;
    }
    return out;
}

std::vector<double> decision_scores(const LinearSvmModel& model, const FeatureMatrix& X) {
    check_svm(model, X);
    std::vector<double> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = margin_row(model, X.row(r));
    return out;
}

}  // namespace idsfed
