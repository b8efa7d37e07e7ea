#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idsfed/csv.hpp"
#include "idsfed/matrix.hpp"

namespace idsfed {

// Per-feature standardization parameters fitted on training data.
// Population standard deviation; sigma == 0 is replaced by 1 so constant
// columns pass through unchanged.
struct ScalerParams {
    std::vector<double> means;
    std::vector<double> std_devs;

    bool operator==(const ScalerParams&) const = default;
};

struct SplitPair {
    FeatureMatrix train;
    FeatureMatrix test;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

enum class PartitionScheme { IID, Dirichlet };

// Assignment of every train row to one of k simulated clients.
struct PartitionPlan {
    std::vector<int> assignments;  // train row index -> client id in [0, k)
    PartitionScheme scheme = PartitionScheme::IID;
    double alpha = 0.0;  // Dirichlet concentration, unused for IID
    std::uint64_t seed = 0;
    int n_clients = 0;

    std::vector<std::vector<std::size_t>> client_rows() const;
};

// Maps raw label text to {0,1}: "BENIGN" (case-insensitive, trimmed) -> 0,
// anything else -> 1. Empty labels are an error naming the row index.
std::vector<int> binarize_labels(const std::vector<std::string>& raw_labels);

// Turns a raw CSV table into a FeatureMatrix: drops identifier and
// non-numeric columns, treats infinities as missing, drops rows with missing
// values, drops exact duplicate rows, binarizes the label column.
// Throws DataError if the label column is absent or no rows survive.
FeatureMatrix clean(const RawTable& table, const std::string& label_column);
FeatureMatrix clean_serial(const RawTable& table, const std::string& label_column);

// Row-level cleaning rules applied to an existing matrix (drop non-finite
// rows, drop exact duplicates). clean() ends with this, so applying it to an
// already-clean matrix is the identity.
FeatureMatrix clean_matrix(const FeatureMatrix& m);

ScalerParams fit_scaler(const FeatureMatrix& train);

// (x - mean) / std per cell; labels untouched.
FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& m);
FeatureMatrix apply_scaler_serial(const ScalerParams& params, const FeatureMatrix& m);

// Deterministic per-class shuffle + prefix take. Test size per class is
// round((1 - ratio) * class size).
SplitPair stratified_split(const FeatureMatrix& m, double ratio, std::uint64_t seed);

// IID: seeded uniform shuffle, round-robin. Dirichlet: per-class client
// proportions drawn from Dirichlet(alpha * 1_k). Every client is guaranteed
// at least one row (repaired deterministically if needed).
PartitionPlan partition_clients(const FeatureMatrix& train, int k, PartitionScheme scheme,
                                double alpha, std::uint64_t seed);

// Binary FeatureMatrix cache plus sidecar JSON metadata (feature names,
// optional scaler params, seed) so experiments are resumable. `path` gets
// a ".fmx" payload and a ".meta.json" sidecar.
void save_matrix_cache(const FeatureMatrix& m, const std::string& path,
                       const std::optional<ScalerParams>& scaler, std::uint64_t seed);
FeatureMatrix load_matrix_cache(const std::string& path);

}  // namespace idsfed
