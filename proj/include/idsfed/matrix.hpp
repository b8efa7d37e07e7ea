#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace idsfed {

// Dense numeric flow features plus binary labels. Row-major storage; the
// universal dataset currency between ingestion, training and federation.
// Invariants: all entries finite, labels.size() == n_rows,
// feature_names.size() == n_cols, n_rows >= 1.
struct FeatureMatrix {
    std::vector<double> values;  // n_rows * n_cols, row-major
    std::vector<int> labels;     // 0 = benign, 1 = attack
    std::vector<std::string> feature_names;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;

    double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * n_cols, n_cols};
    }

    // Copies the given rows (in the given order) into a new matrix.
    FeatureMatrix take_rows(const std::vector<std::size_t>& rows) const;

    std::size_t count_label(int label) const;

    // Throws DataError on any invariant violation.
    void validate() const;

    bool operator==(const FeatureMatrix&) const = default;
};

}  // namespace idsfed
