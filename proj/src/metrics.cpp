#include "idsfed/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "idsfed/errors.hpp"

namespace idsfed {

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("confusion: length mismatch");
    }
    if (y_true.empty()) throw std::invalid_argument("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1) {
            y_pred[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            y_pred[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

MetricReport metrics_from_confusion(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("metrics_from_confusion: zero total");
    MetricReport r;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());

    const std::uint64_t pred_pos = cm.tp + cm.fp;
    if (pred_pos == 0) {
        r.zero_division_flags.insert("precision");
    } else {
        r.precision = static_cast<double>(cm.tp) / static_cast<double>(pred_pos);
    }

    const std::uint64_t actual_pos = cm.tp + cm.fn;
    if (actual_pos == 0) {
        r.zero_division_flags.insert("recall");
    } else {
        r.recall = static_cast<double>(cm.tp) / static_cast<double>(actual_pos);
    }

    if (r.precision + r.recall == 0.0) {
        r.zero_division_flags.insert("f1");
    } else {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    }
    return r;
}

RocCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size()) throw std::invalid_argument("roc_auc: length mismatch");
    const std::size_t n = y_true.size();
    std::uint64_t n_pos = 0;
    for (int y : y_true) n_pos += static_cast<std::uint64_t>(y == 1);
    const std::uint64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("roc_auc: AUC undefined for single-class input");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Rank formulation: sum average ranks of positives, ties share rank.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (y_true[order[k]] == 1) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    const double u = rank_sum_pos - np * (np + 1.0) / 2.0;

    RocCurve curve;
    curve.auc = u / (np * nn);

    // Threshold sweep from the highest score down; one point per distinct
    // score value.
    curve.points.emplace_back(0.0, 0.0);
    std::uint64_t tp = 0, fp = 0;
    std::size_t k = n;
    while (k > 0) {
        std::size_t j = k;
        do {
            --j;
            if (y_true[order[j]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
        } while (j > 0 && scores[order[j - 1]] == scores[order[j]]);
        curve.points.emplace_back(static_cast<double>(fp) / nn, static_cast<double>(tp) / np);
        k = j;
    }
    return curve;
}

double trapezoid_area(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& [x0, y0] = curve.points[i - 1];
        const auto& [x1, y1] = curve.points[i];
        area += (x1 - x0) * (y0 + y1) / 2.0;
    }
    return area;
}

std::pair<std::uint64_t, std::uint64_t> error_profile(const ConfusionMatrix& cm) {
    return {cm.fp, cm.fn};
}

double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return metrics_from_confusion(confusion(y_true, y_pred)).f1;
}

}  // namespace idsfed
