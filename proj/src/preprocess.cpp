#include "idsfed/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "idsfed/errors.hpp"
#include "idsfed/rng.hpp"

namespace idsfed {

namespace {

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Identifier columns carry endpoint identity, not flow statistics.
bool is_identifier_column(const std::string& header) {
    static const std::unordered_set<std::string> kIdColumns = {
        "flow id", "source ip", "src ip", "destination ip", "dst ip", "timestamp",
    };
    return kIdColumns.count(to_lower(trim(header))) > 0;
}

enum class CellStatus : std::uint8_t { Ok, Missing, NonNumeric };

bool is_missing_token(const std::string& token) {
    static const std::unordered_set<std::string> kMissing = {
        "nan", "inf", "infinity", "+inf", "-inf", "+infinity", "-infinity",
    };
    return kMissing.count(token) > 0;
}

CellStatus parse_cell(const std::string& raw, double& out) {
    const std::string cell = trim(raw);
    if (cell.empty()) return CellStatus::Missing;
    if (is_missing_token(to_lower(cell))) return CellStatus::Missing;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return CellStatus::NonNumeric;
    if (!std::isfinite(value)) return CellStatus::Missing;
    out = value;
    return CellStatus::Ok;
}

std::uint64_t hash_row(const double* vals, std::size_t n, int label) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(label);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &vals[i], sizeof(bits));
        h ^= bits;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Drops exact duplicate rows (features + label), keeping first occurrences.
std::vector<std::size_t> dedupe_rows(const std::vector<double>& values,
                                     const std::vector<int>& labels, std::size_t n_rows,
                                     std::size_t n_cols) {
    std::vector<std::size_t> keep;
    keep.reserve(n_rows);
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    buckets.reserve(n_rows * 2);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* row = values.data() + r * n_cols;
        const std::uint64_t h = hash_row(row, n_cols, labels[r]);
        auto& bucket = buckets[h];
        bool duplicate = false;
        for (std::size_t prior : bucket) {
            const double* prow = values.data() + prior * n_cols;
            if (labels[prior] == labels[r] &&
                std::memcmp(prow, row, n_cols * sizeof(double)) == 0) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            bucket.push_back(r);
            keep.push_back(r);
        }
    }
    return keep;
}

FeatureMatrix clean_impl(const RawTable& table, const std::string& label_column, bool parallel) {
    const auto label_it =
        std::find(table.headers.begin(), table.headers.end(), trim(label_column));
    if (label_it == table.headers.end()) {
        throw DataError(table.source_path + ": label column '" + label_column + "' not found");
    }
    const std::size_t label_col = static_cast<std::size_t>(label_it - table.headers.begin());
    const std::size_t n_rows = table.rows.size();
    const std::size_t n_cols = table.headers.size();
    if (n_rows == 0) throw DataError(table.source_path + ": no data rows");

    std::vector<std::string> raw_labels(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) raw_labels[r] = table.rows[r][label_col];
    const std::vector<int> all_labels = binarize_labels(raw_labels);

    // Candidate feature columns: everything except the label and identifiers.
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == label_col || is_identifier_column(table.headers[c])) continue;
        candidates.push_back(c);
    }
    const std::size_t n_cand = candidates.size();

    std::vector<double> parsed(n_rows * n_cand, 0.0);
    std::vector<std::uint8_t> status(n_rows * n_cand, 0);

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n_rows); ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r)];
        for (std::size_t j = 0; j < n_cand; ++j) {
            double v = 0.0;
            const CellStatus st = parse_cell(row[candidates[j]], v);
            parsed[r * n_cand + j] = v;
            status[r * n_cand + j] = static_cast<std::uint8_t>(st);
        }
    }

    // A column that fails numeric parse on any row is dropped entirely;
    // missing/infinite cells instead drop the row.
    std::vector<bool> col_numeric(n_cand, true);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t j = 0; j < n_cand; ++j) {
            if (status[r * n_cand + j] == static_cast<std::uint8_t>(CellStatus::NonNumeric)) {
                col_numeric[j] = false;
            }
        }
    }
    std::vector<std::size_t> retained;
    for (std::size_t j = 0; j < n_cand; ++j) {
        if (col_numeric[j]) retained.push_back(j);
    }
    if (retained.empty()) throw DataError(table.source_path + ": no numeric feature columns");

    std::vector<double> values;
    values.reserve(n_rows * retained.size());
    std::vector<int> labels;
    labels.reserve(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        bool missing = false;
        for (std::size_t j : retained) {
            if (status[r * n_cand + j] != static_cast<std::uint8_t>(CellStatus::Ok)) {
                missing = true;
                break;
            }
        }
        if (missing) continue;
        for (std::size_t j : retained) values.push_back(parsed[r * n_cand + j]);
        labels.push_back(all_labels[r]);
    }
    const std::size_t survivors = labels.size();
    if (survivors == 0) throw DataError(table.source_path + ": no rows survive cleaning");

    const std::vector<std::size_t> keep =
        dedupe_rows(values, labels, survivors, retained.size());

    FeatureMatrix m;
    m.n_cols = retained.size();
    m.n_rows = keep.size();
    for (std::size_t j : retained) m.feature_names.push_back(table.headers[candidates[j]]);
    m.values.reserve(keep.size() * m.n_cols);
    m.labels.reserve(keep.size());
    for (std::size_t r : keep) {
        const double* row = values.data() + r * m.n_cols;
        m.values.insert(m.values.end(), row, row + m.n_cols);
        m.labels.push_back(labels[r]);
    }
    return m;
}

}  // namespace

std::vector<int> binarize_labels(const std::vector<std::string>& raw_labels) {
    std::vector<int> out;
    out.reserve(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        const std::string t = trim(raw_labels[i]);
        if (t.empty()) {
            throw DataError("empty label at row " + std::to_string(i));
        }
        out.push_back(to_lower(t) == "benign" ? 0 : 1);
    }
    return out;
}

FeatureMatrix clean(const RawTable& table, const std::string& label_column) {
    return clean_impl(table, label_column, true);
}

FeatureMatrix clean_serial(const RawTable& table, const std::string& label_column) {
    return clean_impl(table, label_column, false);
}

FeatureMatrix clean_matrix(const FeatureMatrix& m) {
    std::vector<std::size_t> finite_rows;
    finite_rows.reserve(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        const auto row = m.row(r);
        if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            finite_rows.push_back(r);
        }
    }
    if (finite_rows.empty()) throw DataError("no rows survive cleaning");

    FeatureMatrix filtered = m.take_rows(finite_rows);
    const std::vector<std::size_t> keep =
        dedupe_rows(filtered.values, filtered.labels, filtered.n_rows, filtered.n_cols);
    if (keep.size() == filtered.n_rows) return filtered;
    return filtered.take_rows(keep);
}

ScalerParams fit_scaler(const FeatureMatrix& train) {
    if (train.n_rows < 2) throw DataError("fit_scaler: need at least 2 rows");
    ScalerParams p;
    p.means.resize(train.n_cols);
    p.std_devs.resize(train.n_cols);
    const double n = static_cast<double>(train.n_rows);
    for (std::size_t c = 0; c < train.n_cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < train.n_rows; ++r) sum += train.at(r, c);
        const double mean = sum / n;
        double sq = 0.0;
        for (std::size_t r = 0; r < train.n_rows; ++r) {
            const double d = train.at(r, c) - mean;
            sq += d * d;
        }
        const double sigma = std::sqrt(sq / n);  // population std dev
        p.means[c] = mean;
        p.std_devs[c] = sigma > 0.0 ? sigma : 1.0;
    }
    return p;
}

namespace {

FeatureMatrix apply_scaler_impl(const ScalerParams& params, const FeatureMatrix& m,
                                bool parallel) {
    if (params.means.size() != m.n_cols || params.std_devs.size() != m.n_cols) {
        throw DataError("apply_scaler: dimension mismatch");
    }
    FeatureMatrix out = m;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(m.n_rows); ++r) {
        for (std::size_t c = 0; c < m.n_cols; ++c) {
            out.values[r * m.n_cols + c] =
                (m.values[r * m.n_cols + c] - params.means[c]) / params.std_devs[c];
        }
    }
    return out;
}

}  // namespace

FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& m) {
    return apply_scaler_impl(params, m, true);
}

FeatureMatrix apply_scaler_serial(const ScalerParams& params, const FeatureMatrix& m) {
    return apply_scaler_impl(params, m, false);
}

SplitPair stratified_split(const FeatureMatrix& m, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("stratified_split: ratio must be in (0,1)");
    }
    std::vector<std::size_t> class_rows[2];
    for (std::size_t r = 0; r < m.n_rows; ++r) class_rows[m.labels[r]].push_back(r);
    for (int c = 0; c < 2; ++c) {
        if (class_rows[c].size() < 2) {
            throw DataError("stratified_split: class " + std::to_string(c) +
                            " has fewer than 2 rows");
        }
    }

    std::vector<std::size_t> train_rows, test_rows;
    for (int c = 0; c < 2; ++c) {
        auto rows = class_rows[c];
        auto eng = rng::make_engine(seed, 0x5B, static_cast<std::uint64_t>(c));
        rng::shuffle(eng, rows);
        const auto n_test = static_cast<std::size_t>(
            std::llround((1.0 - ratio) * static_cast<double>(rows.size())));
        test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + n_test);
        train_rows.insert(train_rows.end(), rows.begin() + n_test, rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    SplitPair pair;
    pair.train = m.take_rows(train_rows);
    pair.test = m.take_rows(test_rows);
    pair.seed = seed;
    pair.ratio = ratio;
    return pair;
}

std::vector<std::vector<std::size_t>> PartitionPlan::client_rows() const {
    std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(n_clients));
    for (std::size_t r = 0; r < assignments.size(); ++r) {
        rows[static_cast<std::size_t>(assignments[r])].push_back(r);
    }
    return rows;
}

namespace {

// Integer apportionment of `total` by proportions `p` (largest remainder,
// ties to the lower index). Sums exactly to total.
std::vector<std::size_t> largest_remainder(const std::vector<double>& p, std::size_t total) {
    const std::size_t k = p.size();
    std::vector<std::size_t> counts(k);
    std::vector<double> fracs(k);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const double quota = p[j] * static_cast<double>(total);
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

PartitionPlan partition_clients(const FeatureMatrix& train, int k, PartitionScheme scheme,
                                double alpha, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("partition_clients: k must be >= 2");
    if (static_cast<std::size_t>(k) > train.n_rows) {
        throw DataError("partition_clients: more clients than rows");
    }
    if (scheme == PartitionScheme::Dirichlet && !(alpha > 0.0)) {
        throw std::invalid_argument("partition_clients: alpha must be positive");
    }

    PartitionPlan plan;
    plan.scheme = scheme;
    plan.alpha = scheme == PartitionScheme::Dirichlet ? alpha : 0.0;
    plan.seed = seed;
    plan.n_clients = k;
    plan.assignments.assign(train.n_rows, -1);

    if (scheme == PartitionScheme::IID) {
        std::vector<std::size_t> rows(train.n_rows);
        std::iota(rows.begin(), rows.end(), 0);
        auto eng = rng::make_engine(seed, 0x11D);
        rng::shuffle(eng, rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            plan.assignments[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    } else {
        for (int c = 0; c < 2; ++c) {
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < train.n_rows; ++r) {
                if (train.labels[r] == c) rows.push_back(r);
            }
            if (rows.empty()) continue;
            auto eng = rng::make_engine(seed, 0xD1, static_cast<std::uint64_t>(c));
            const std::vector<double> p = rng::dirichlet(eng, alpha, static_cast<std::size_t>(k));
            rng::shuffle(eng, rows);
            const std::vector<std::size_t> counts = largest_remainder(p, rows.size());
            std::size_t pos = 0;
            for (int j = 0; j < k; ++j) {
                for (std::size_t i = 0; i < counts[static_cast<std::size_t>(j)]; ++i) {
                    plan.assignments[rows[pos++]] = j;
                }
            }
        }
    }

    // Repair empty clients by moving a row from the largest client.
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int a : plan.assignments) sizes[static_cast<std::size_t>(a)] += 1;
    for (int j = 0; j < k; ++j) {
        while (sizes[static_cast<std::size_t>(j)] == 0) {
            const std::size_t donor = static_cast<std::size_t>(
                std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
            // last row owned by the donor; deterministic choice
            for (std::size_t r = plan.assignments.size(); r-- > 0;) {
                if (plan.assignments[r] == static_cast<int>(donor)) {
                    plan.assignments[r] = j;
                    break;
                }
            }
            sizes[donor] -= 1;
            sizes[static_cast<std::size_t>(j)] += 1;
        }
    }
    return plan;
}

namespace {

constexpr char kCacheMagic[4] = {'F', 'M', 'X', '1'};

std::string strip_fmx_suffix(const std::string& path) {
    const std::string suffix = ".fmx";
    if (path.size() > suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return path.substr(0, path.size() - suffix.size());
    }
    return path;
}

}  // namespace

void save_matrix_cache(const FeatureMatrix& m, const std::string& path,
                       const std::optional<ScalerParams>& scaler, std::uint64_t seed) {
    const std::string base = strip_fmx_suffix(path);
    std::ofstream out(base + ".fmx", std::ios::binary);
    if (!out) throw DataError("cannot write cache file: " + base + ".fmx");
    out.write(kCacheMagic, sizeof(kCacheMagic));
    const std::uint64_t dims[2] = {m.n_rows, m.n_cols};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(m.values.data()),
              static_cast<std::streamsize>(m.values.size() * sizeof(double)));
    std::vector<std::uint8_t> labels(m.labels.begin(), m.labels.end());
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    if (!out) throw DataError("short write on cache file: " + base + ".fmx");

    nlohmann::ordered_json meta;
    meta["version"] = 1;
    meta["n_rows"] = m.n_rows;
    meta["n_cols"] = m.n_cols;
    meta["feature_names"] = m.feature_names;
    meta["seed"] = seed;
    if (scaler) {
        meta["scaler"] = {{"means", scaler->means}, {"std_devs", scaler->std_devs}};
    } else {
        meta["scaler"] = nullptr;
    }
    std::ofstream meta_out(base + ".meta.json");
    if (!meta_out) throw DataError("cannot write cache metadata: " + base + ".meta.json");
    meta_out << meta.dump(2) << "\n";
}

FeatureMatrix load_matrix_cache(const std::string& path) {
    const std::string base = strip_fmx_suffix(path);
    std::ifstream in(base + ".fmx", std::ios::binary);
    if (!in) throw DataError("cannot open cache file: " + base + ".fmx");
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
        throw DataError("bad cache magic in " + base + ".fmx");
    }
    std::uint64_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw DataError("truncated cache file: " + base + ".fmx");

    FeatureMatrix m;
    m.n_rows = dims[0];
    m.n_cols = dims[1];
    m.values.resize(m.n_rows * m.n_cols);
    in.read(reinterpret_cast<char*>(m.values.data()),
            static_cast<std::streamsize>(m.values.size() * sizeof(double)));
    std::vector<std::uint8_t> labels(m.n_rows);
    in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!in) throw DataError("truncated cache file: " + base + ".fmx");
    m.labels.assign(labels.begin(), labels.end());

    std::ifstream meta_in(base + ".meta.json");
    if (!meta_in) throw DataError("missing cache metadata: " + base + ".meta.json");
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    m.feature_names = meta.at("feature_names").get<std::vector<std::string>>();

    m.validate();
    return m;
}

}  // namespace idsfed
