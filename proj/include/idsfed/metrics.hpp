#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace idsfed {

// Standard 2x2 contract with class 1 (attack) as positive.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> roc_auc;
    // Metrics whose denominator was zero (value forced to 0).
    std::set<std::string> zero_division_flags;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Accuracy, precision, recall, F1 from counts. Zero denominators yield 0
// plus a flag instead of throwing, so batch reports stay well-formed.
MetricReport metrics_from_confusion(const ConfusionMatrix& cm);

// AUC via the rank (Mann-Whitney) formulation with ties credited 0.5; curve
// points from sweeping descending distinct score thresholds. Throws
// DataError on single-class input rather than returning 0.5.
RocCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

// Trapezoidal area under an ROC curve; used to cross-check the rank AUC.
double trapezoid_area(const RocCurve& curve);

std::pair<std::uint64_t, std::uint64_t> error_profile(const ConfusionMatrix& cm);

double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred);

}  // namespace idsfed
