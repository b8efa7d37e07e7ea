#include "idsfed/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "idsfed/errors.hpp"

namespace idsfed {

double gini_impurity(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("gini_impurity: zero total count");
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

double gini2(std::size_t pos, std::size_t n) {
    const double p = static_cast<double>(pos) / static_cast<double>(n);
    const double q = 1.0 - p;
    return 1.0 - p * p - q * q;
}

}  // namespace

std::optional<SplitChoice> best_split(const FeatureMatrix& X,
                                      const std::vector<std::size_t>& rows,
                                      const std::vector<std::size_t>& candidate_features) {
    const std::size_t n = rows.size();
    if (n < 2) return std::nullopt;

    std::size_t pos_total = 0;
    for (std::size_t r : rows) pos_total += static_cast<std::size_t>(X.labels[r]);
    if (pos_total == 0 || pos_total == n) return std::nullopt;  // pure
    const double parent = gini2(pos_total, n);

    std::optional<SplitChoice> best;
    std::vector<std::pair<double, int>> column(n);

    for (std::size_t f : candidate_features) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = {X.at(rows[i], f), X.labels[rows[i]]};
        }
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::size_t pos_left = 0;
        for (std::size_t i = 1; i < n; ++i) {
            pos_left += static_cast<std::size_t>(column[i - 1].second);
            if (column[i].first == column[i - 1].first) continue;

            const std::size_t nl = i;
            const std::size_t nr = n - i;
            const double decrease =
                parent -
                (static_cast<double>(nl) / static_cast<double>(n)) * gini2(pos_left, nl) -
                (static_cast<double>(nr) / static_cast<double>(n)) *
                    gini2(pos_total - pos_left, nr);
            if (decrease <= 0.0) continue;
            if (!best || decrease > best->impurity_decrease) {
                double mid = std::midpoint(column[i - 1].first, column[i].first);
                if (!(mid < column[i].first)) mid = column[i - 1].first;
                best = SplitChoice{f, mid, decrease};
            }
        }
    }
    return best;
}

std::optional<SplitChoice> best_split(const FeatureMatrix& X,
                                      const std::vector<std::size_t>& candidate_features) {
    std::vector<std::size_t> rows(X.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    return best_split(X, rows, candidate_features);
}

namespace {

struct PendingNode {
    std::int32_t index;
    std::vector<std::size_t> rows;
    std::size_t depth;
};

TreeNode make_leaf(const FeatureMatrix& X, const std::vector<std::size_t>& rows) {
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += static_cast<std::size_t>(X.labels[r]);
    TreeNode leaf;
    leaf.n_samples = rows.size();
    leaf.positive_fraction = static_cast<double>(pos) / static_cast<double>(rows.size());
    leaf.leaf_class = (2 * pos >= rows.size()) ? 1 : 0;  // tie -> attack
    return leaf;
}

}  // namespace

DecisionTreeModel train_tree_on_rows(const FeatureMatrix& X, const std::vector<std::size_t>& rows,
                                     const TrainConfig& cfg, std::size_t mtry,
                                     rng::Engine* eng) {
    if (rows.empty()) throw DataError("train_decision_tree: empty input");
    if (cfg.min_samples_split < 2) {
        throw std::invalid_argument("train_decision_tree: min_samples_split must be >= 2");
    }

    DecisionTreeModel model;
    model.config = cfg;
    model.n_features = X.n_cols;

    std::vector<std::size_t> all_features(X.n_cols);
    std::iota(all_features.begin(), all_features.end(), 0);

    std::vector<PendingNode> stack;
    model.nodes.emplace_back();
    stack.push_back({0, rows, 0});

    while (!stack.empty()) {
        PendingNode item = std::move(stack.back());
        stack.pop_back();
        const std::vector<std::size_t>& node_rows = item.rows;

        std::size_t pos = 0;
        for (std::size_t r : node_rows) pos += static_cast<std::size_t>(X.labels[r]);
        const bool pure = (pos == 0 || pos == node_rows.size());
        const bool depth_capped = cfg.max_depth > 0 && item.depth >= cfg.max_depth;
        const bool too_small = node_rows.size() < cfg.min_samples_split;

        std::optional<SplitChoice> choice;
        if (!pure && !depth_capped && !too_small) {
            if (eng != nullptr && mtry < X.n_cols) {
                auto sampled = rng::sample_without_replacement(*eng, X.n_cols, mtry);
                std::vector<std::size_t> candidates(sampled.begin(), sampled.end());
                std::sort(candidates.begin(), candidates.end());
                choice = best_split(X, node_rows, candidates);
            } else {
                choice = best_split(X, node_rows, all_features);
            }
        }

        if (!choice) {
            model.nodes[static_cast<std::size_t>(item.index)] = make_leaf(X, node_rows);
            continue;
        }

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(node_rows.size());
        right_rows.reserve(node_rows.size());
        for (std::size_t r : node_rows) {
            if (X.at(r, choice->feature) <= choice->threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }

        const std::int32_t left_index = static_cast<std::int32_t>(model.nodes.size());
        const std::int32_t right_index = left_index + 1;
        model.nodes.emplace_back();
        model.nodes.emplace_back();

        TreeNode& node = model.nodes[static_cast<std::size_t>(item.index)];
        node.feature_index = static_cast<int>(choice->feature);
        node.threshold = choice->threshold;
        node.leaf_class = 0;
        node.positive_fraction = 0.0;
        node.n_samples = node_rows.size();
        node.left = left_index;
        node.right = right_index;
        // left is processed first; node order (and any RNG draws) stay fixed
        stack.push_back({right_index, std::move(right_rows), item.depth + 1});
        stack.push_back({left_index, std::move(left_rows), item.depth + 1});
    }
    return model;
}

DecisionTreeModel train_decision_tree(const FeatureMatrix& X, const TrainConfig& cfg) {
    std::vector<std::size_t> rows(X.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    return train_tree_on_rows(X, rows, cfg, X.n_cols, nullptr);
}

int predict_row(const DecisionTreeModel& tree, std::span<const double> x) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        node = x[static_cast<std::size_t>(node->feature_index)] <= node->threshold
                   ? &tree.nodes[static_cast<std::size_t>(node->left)]
                   : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return node->leaf_class;
}

double score_row(const DecisionTreeModel& tree, std::span<const double> x) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        node = x[static_cast<std::size_t>(node->feature_index)] <= node->threshold
                   ? &tree.nodes[static_cast<std::size_t>(node->left)]
                   : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return node->positive_fraction;
}

namespace {

void check_width(std::size_t model_features, const FeatureMatrix& X) {
    if (model_features != X.n_cols) {
        throw DataError("predict: feature count mismatch (model " +
                        std::to_string(model_features) + ", data " + std::to_string(X.n_cols) +
                        ")");
    }
}

}  // namespace

std::vector<int> predict(const DecisionTreeModel& tree, const FeatureMatrix& X) {
    check_width(tree.n_features, X);
    std::vector<int> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = predict_row(tree, X.row(r));
    return out;
}

std::vector<double> decision_scores(const DecisionTreeModel& tree, const FeatureMatrix& X) {
    check_width(tree.n_features, X);
    std::vector<double> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = score_row(tree, X.row(r));
    return out;
}

}  // namespace idsfed
