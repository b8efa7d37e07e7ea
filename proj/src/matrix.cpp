#include "idsfed/matrix.hpp"

#include <cmath>

#include "idsfed/errors.hpp"

namespace idsfed {

FeatureMatrix FeatureMatrix::take_rows(const std::vector<std::size_t>& rows) const {
    FeatureMatrix out;
    out.n_rows = rows.size();
    out.n_cols = n_cols;
    out.feature_names = feature_names;
    out.values.reserve(rows.size() * n_cols);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        const auto src = row(r);
        out.values.insert(out.values.end(), src.begin(), src.end());
        out.labels.push_back(labels[r]);
    }
    return out;
}

std::size_t FeatureMatrix::count_label(int label) const {
    std::size_t n = 0;
    for (int y : labels) n += (y == label);
    return n;
}

void FeatureMatrix::validate() const {
    if (n_rows == 0) throw DataError("FeatureMatrix: no rows");
    if (values.size() != n_rows * n_cols) throw DataError("FeatureMatrix: value buffer size mismatch");
    if (labels.size() != n_rows) throw DataError("FeatureMatrix: label count mismatch");
    if (feature_names.size() != n_cols) throw DataError("FeatureMatrix: feature name count mismatch");
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("FeatureMatrix: non-finite value");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("FeatureMatrix: label outside {0,1}");
    }
}

}  // namespace idsfed
