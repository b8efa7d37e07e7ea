#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "idsfed/csv.hpp"
#include "idsfed/errors.hpp"
#include "idsfed/preprocess.hpp"

using namespace idsfed;

namespace {

FeatureMatrix make_matrix(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    FeatureMatrix m;
    m.n_rows = rows.size();
    m.n_cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < m.n_cols; ++c) m.feature_names.push_back("f" + std::to_string(c));
    for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
    m.labels = std::move(labels);
    return m;
}

}  // namespace

TEST_CASE("binarize_labels maps BENIGN to 0 and everything else to 1") {
    CHECK(binarize_labels({"BENIGN", "DDoS", "BENIGN"}) == std::vector<int>{0, 1, 0});
    CHECK(binarize_labels({"benign "}) == std::vector<int>{0});
    CHECK(binarize_labels({" PortScan", "Bot"}) == std::vector<int>{1, 1});
}

TEST_CASE("binarize_labels rejects empty labels naming the row") {
    try {
        binarize_labels({"BENIGN", "  ", "DDoS"});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("clean drops rows containing infinities or missing cells") {
    const RawTable t = parse_csv(
        "Flow Bytes/s,Flow Packets/s,Label\n"
        "1.0,2.0,BENIGN\n"
        "Infinity,3.0,DDoS\n"
        "4.0,inf,DDoS\n"
        "5.0,NaN,BENIGN\n"
        "6.0,,BENIGN\n"
        "7.0,8.0,DDoS\n");
    const FeatureMatrix m = clean(t, "Label");
    REQUIRE(m.n_rows == 2);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(1, 0) == 7.0);
    CHECK(m.labels == std::vector<int>{0, 1});
}

TEST_CASE("clean drops exact duplicate rows keeping the first") {
    const RawTable t = parse_csv(
        "a,b,Label\n"
        "1,2,BENIGN\n"
        "1,2,BENIGN\n"
        "1,2,DDoS\n");  // same features, different label: not a duplicate
    const FeatureMatrix m = clean(t, "Label");
    CHECK(m.n_rows == 2);
    CHECK(m.labels == std::vector<int>{0, 1});
}

TEST_CASE("clean passes through a defect-free numeric table") {
    const RawTable t = parse_csv(
        "a,b,c,Label\n"
        "1,2,3,BENIGN\n"
        "4,5,6,DDoS\n"
        "7,8,9,BENIGN\n"
        "10,11,12,DDoS\n");
    const FeatureMatrix m = clean(t, "Label");
    CHECK(m.n_rows == 4);
    CHECK(m.n_cols == 3);
    CHECK(m.feature_names == std::vector<std::string>{"a", "b", "c"});
    m.validate();
}

TEST_CASE("clean drops identifier and non-numeric columns") {
    const RawTable t = parse_csv(
        "Flow ID,Source IP,Destination IP,Timestamp,Dur,Proto,Label\n"
        "1-2,10.0.0.1,10.0.0.2,2017-07-07 10:00,1.5,tcp,BENIGN\n"
        "3-4,10.0.0.3,10.0.0.4,2017-07-07 10:01,2.5,udp,DDoS\n");
    const FeatureMatrix m = clean(t, "Label");
    // Proto fails numeric parse, identifiers are dropped by name
    CHECK(m.feature_names == std::vector<std::string>{"Dur"});
    CHECK(m.n_rows == 2);
}

TEST_CASE("clean errors when nothing survives or the label is missing") {
    const RawTable all_bad = parse_csv("a,Label\ninf,BENIGN\nnan,DDoS\n");
    CHECK_THROWS_AS(clean(all_bad, "Label"), DataError);
    const RawTable ok = parse_csv("a,Label\n1,BENIGN\n");
    CHECK_THROWS_AS(clean(ok, "label_typo"), DataError);
}

TEST_CASE("cleaning an already-clean matrix is the identity") {
    const RawTable t = parse_csv(
        "a,b,Label\n1,2,BENIGN\n1,2,BENIGN\n3,inf,DDoS\n4,5,DDoS\n");
    const FeatureMatrix once = clean(t, "Label");
    CHECK(clean_matrix(once) == once);
}

TEST_CASE("fit_scaler computes population statistics with a constant-column guard") {
    const FeatureMatrix m =
        make_matrix({{1, 5, 0}, {3, 5, 0}, {1, 5, 4}, {3, 5, 4}}, {0, 0, 1, 1});
    const ScalerParams p = fit_scaler(m);
    CHECK(p.means[0] == doctest::Approx(2.0));
    CHECK(p.std_devs[0] == doctest::Approx(1.0));
    CHECK(p.means[1] == doctest::Approx(5.0));
    CHECK(p.std_devs[1] == 1.0);  // sigma 0 -> guard
    // population sigma of [0,0,4,4] is 2, not the sample value
    CHECK(p.means[2] == doctest::Approx(2.0));
    CHECK(p.std_devs[2] == doctest::Approx(2.0));
}

TEST_CASE("fit_scaler needs at least two rows") {
    CHECK_THROWS_AS(fit_scaler(make_matrix({{1.0}}, {0})), DataError);
}

TEST_CASE("apply_scaler standardizes its own fitting data to mean zero") {
    const FeatureMatrix m =
        make_matrix({{1, 10}, {2, 20}, {3, 35}, {4, 41}, {7, 55}}, {0, 0, 1, 1, 1});
    const FeatureMatrix s = apply_scaler(fit_scaler(m), m);
    for (std::size_t c = 0; c < s.n_cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < s.n_rows; ++r) mean += s.at(r, c);
        mean /= static_cast<double>(s.n_rows);
        CHECK(std::abs(mean) < 1e-9);
    }
    CHECK(s.labels == m.labels);
}

TEST_CASE("apply_scaler maps value 4 with mean 2, std 2 to exactly 1") {
    ScalerParams p{{2.0}, {2.0}};
    const FeatureMatrix m = make_matrix({{4.0}}, {1});
    CHECK(apply_scaler(p, m).at(0, 0) == 1.0);
}

TEST_CASE("scaler fitted on train is not refit on test") {
    const FeatureMatrix train = make_matrix({{0}, {1}, {2}, {3}}, {0, 0, 1, 1});
    const FeatureMatrix test = make_matrix({{10}, {11}, {12}, {13}}, {0, 0, 1, 1});
    const ScalerParams p = fit_scaler(train);
    const FeatureMatrix scaled = apply_scaler(p, test);
    double mean = 0.0;
    for (std::size_t r = 0; r < scaled.n_rows; ++r) mean += scaled.at(r, 0);
    mean /= static_cast<double>(scaled.n_rows);
    CHECK(std::abs(mean) > 1.0);  // shifted distribution stays shifted
}

TEST_CASE("standardizing already-standardized data is a fixed point") {
    const FeatureMatrix m =
        make_matrix({{1, 9}, {4, 7}, {2, 3}, {8, 1}, {5, 2}}, {0, 0, 1, 1, 1});
    const FeatureMatrix once = apply_scaler(fit_scaler(m), m);
    const FeatureMatrix twice = apply_scaler(fit_scaler(once), once);
    for (std::size_t i = 0; i < once.values.size(); ++i) {
        CHECK(std::abs(once.values[i] - twice.values[i]) < 1e-9);
    }
}

TEST_CASE("apply_scaler rejects dimension mismatches") {
    ScalerParams p{{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(apply_scaler(p, make_matrix({{1.0}}, {0})), DataError);
}

TEST_CASE("stratified_split keeps exact per-class proportions on a 5/5 input") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i < 5 ? 0 : 1);
    }
    const FeatureMatrix m = make_matrix(rows, labels);
    for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
        const SplitPair split = stratified_split(m, 0.8, seed);
        CHECK(split.train.n_rows == 8);
        CHECK(split.test.n_rows == 2);
        CHECK(split.test.count_label(0) == 1);
        CHECK(split.test.count_label(1) == 1);
    }
}

TEST_CASE("stratified_split is deterministic given the seed") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        rows.push_back({static_cast<double>(i), static_cast<double>(i * i)});
        labels.push_back(i % 3 == 0 ? 1 : 0);
    }
    const FeatureMatrix m = make_matrix(rows, labels);
    const SplitPair a = stratified_split(m, 0.8, 123);
    const SplitPair b = stratified_split(m, 0.8, 123);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    const SplitPair c = stratified_split(m, 0.8, 124);
    CHECK(a.train.values != c.train.values);
}

TEST_CASE("stratified_split preserves class proportions within 1/n per class") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    const int n = 97;  // awkward size on purpose
    for (int i = 0; i < n; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i % 4 == 0 ? 1 : 0);
    }
    const FeatureMatrix m = make_matrix(rows, labels);
    const double full_prop = static_cast<double>(m.count_label(1)) / static_cast<double>(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SplitPair split = stratified_split(m, 0.75, seed);
        const double train_prop = static_cast<double>(split.train.count_label(1)) /
                                  static_cast<double>(split.train.n_rows);
        CHECK(std::abs(train_prop - full_prop) <= 1.0 / static_cast<double>(n) + 1e-12);
        CHECK(split.train.n_rows + split.test.n_rows == static_cast<std::size_t>(n));
    }
}

TEST_CASE("stratified_split validates inputs") {
    const FeatureMatrix tiny = make_matrix({{1}, {2}, {3}}, {0, 0, 1});
    CHECK_THROWS_AS(stratified_split(tiny, 0.8, 1), DataError);  // class 1 has 1 row
    const FeatureMatrix ok = make_matrix({{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
    CHECK_THROWS_AS(stratified_split(ok, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(stratified_split(ok, 1.0, 1), std::invalid_argument);
}

namespace {

FeatureMatrix balanced_matrix(int n) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i % 2);
    }
    return make_matrix(rows, labels);
}

}  // namespace

TEST_CASE("IID partition deals 100 rows to 5 clients as 20 each") {
    const FeatureMatrix m = balanced_matrix(100);
    const PartitionPlan plan = partition_clients(m, 5, PartitionScheme::IID, 0.0, 42);
    for (const auto& rows : plan.client_rows()) CHECK(rows.size() == 20);
}

TEST_CASE("partition assignments form an exact partition") {
    const FeatureMatrix m = balanced_matrix(101);
    for (auto scheme : {PartitionScheme::IID, PartitionScheme::Dirichlet}) {
        const PartitionPlan plan = partition_clients(m, 4, scheme, 0.5, 9);
        std::vector<bool> seen(m.n_rows, false);
        std::size_t total = 0;
        for (const auto& rows : plan.client_rows()) {
            CHECK(!rows.empty());
            for (std::size_t r : rows) {
                CHECK(!seen[r]);
                seen[r] = true;
                ++total;
            }
        }
        CHECK(total == m.n_rows);
    }
}

TEST_CASE("Dirichlet with huge alpha approaches the global class mix") {
    const FeatureMatrix m = balanced_matrix(1000);
    const PartitionPlan plan = partition_clients(m, 5, PartitionScheme::Dirichlet, 1e6, 3);
    const double global = 0.5;
    for (const auto& rows : plan.client_rows()) {
        std::size_t pos = 0;
        for (std::size_t r : rows) pos += static_cast<std::size_t>(m.labels[r]);
        const double frac = static_cast<double>(pos) / static_cast<double>(rows.size());
        CHECK(std::abs(frac - global) <= 0.02);
    }
}

TEST_CASE("Dirichlet with small alpha skews most clients toward one class") {
    const FeatureMatrix m = balanced_matrix(1000);
    int seeds_with_skewed_client = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PartitionPlan plan = partition_clients(m, 5, PartitionScheme::Dirichlet, 0.1, seed);
        bool found = false;
        for (const auto& rows : plan.client_rows()) {
            std::size_t pos = 0;
            for (std::size_t r : rows) pos += static_cast<std::size_t>(m.labels[r]);
            const double frac = static_cast<double>(pos) / static_cast<double>(rows.size());
            if (frac > 0.8 || frac < 0.2) found = true;
        }
        seeds_with_skewed_client += found;
    }
    CHECK(seeds_with_skewed_client >= 11);  // majority of the 20 seeds
}

TEST_CASE("partition is deterministic and validates inputs") {
    const FeatureMatrix m = balanced_matrix(50);
    const PartitionPlan a = partition_clients(m, 5, PartitionScheme::Dirichlet, 0.5, 77);
    const PartitionPlan b = partition_clients(m, 5, PartitionScheme::Dirichlet, 0.5, 77);
    CHECK(a.assignments == b.assignments);
    CHECK_THROWS_AS(partition_clients(m, 1, PartitionScheme::IID, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(partition_clients(m, 51, PartitionScheme::IID, 0.0, 1), DataError);
}

TEST_CASE("every client is repaired to own at least one row") {
    const FeatureMatrix m = balanced_matrix(12);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const PartitionPlan plan =
            partition_clients(m, 6, PartitionScheme::Dirichlet, 0.05, seed);
        for (const auto& rows : plan.client_rows()) CHECK(!rows.empty());
    }
}

TEST_CASE("matrix cache round-trips through disk with its sidecar") {
    const FeatureMatrix m = make_matrix({{1.5, -2.25}, {0.125, 3.75}, {2.0, 0.5}}, {0, 1, 1});
    const ScalerParams scaler = fit_scaler(m);
    const std::string base = "/tmp/idsfed_test_cache";
    save_matrix_cache(m, base, scaler, 42);
    const FeatureMatrix loaded = load_matrix_cache(base + ".fmx");
    CHECK(loaded == m);
    std::remove((base + ".fmx").c_str());
    std::remove((base + ".meta.json").c_str());
}
