#pragma once

#include <cstdint>
#include <vector>

#include "idsfed/matrix.hpp"
#include "idsfed/tree.hpp"

namespace idsfed {

// Primal linear SVM trained with the Pegasos schedule (eta_t = 1/(lambda*t)).
// Expects standardized features; `standardized_inputs` records that contract.
struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    double lambda = 1e-4;
    std::size_t epochs = 0;        // epochs of training this model carries
    std::uint64_t steps = 0;       // SGD steps taken; warm starts continue here
    std::uint64_t seed = 0;
    bool standardized_inputs = true;

    std::size_t n_features() const { return weights.size(); }
    bool operator==(const LinearSvmModel&) const = default;
};

// Fresh training from zero weights for cfg.epochs epochs. Labels map
// {0 -> -1, 1 -> +1}; epoch shuffles are seeded from (cfg.seed, epoch).
// Throws DataError on single-class input.
LinearSvmModel train_linear_svm(const FeatureMatrix& X, const TrainConfig& cfg);

// Continues SGD from an existing model for `extra_epochs` more epochs. The
// step counter and epoch index carry over, so training e epochs and then
// f more equals training e+f epochs in one call.
LinearSvmModel train_linear_svm_from(const LinearSvmModel& init, const FeatureMatrix& X,
                                     std::size_t extra_epochs);

// lambda/2 * ||w||^2 + mean hinge loss on the given data.
double svm_objective(const LinearSvmModel& model, const FeatureMatrix& X);

double margin_row(const LinearSvmModel& model, std::span<const double> x);

// sign(w.x + b); zero margin classifies as attack.
std::vector<int> predict(const LinearSvmModel& model, const FeatureMatrix& X);

// Raw margins w.x + b.
std::vector<double> decision_scores(const LinearSvmModel& model, const FeatureMatrix& X);

}  // namespace idsfed
