// Times the OpenMP kernels against their serial reference implementations
// and verifies both produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "idsfed/csv.hpp"
#include "idsfed/forest.hpp"
#include "idsfed/preprocess.hpp"
#include "idsfed/synthetic.hpp"

using namespace idsfed;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(const char* kernel, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-16s %10.1f ms %10.1f ms %7.2fx   %s\n", kernel, serial_ms, parallel_ms,
                serial_ms / parallel_ms, equal ? "identical" : "MISMATCH");
}

RawTable to_table(const FeatureMatrix& m) {
    RawTable t;
    t.headers = m.feature_names;
    t.headers.push_back("Label");
    t.rows.reserve(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        std::vector<std::string> row;
        row.reserve(m.n_cols + 1);
        for (std::size_t c = 0; c < m.n_cols; ++c) row.push_back(std::to_string(m.at(r, c)));
        row.push_back(m.labels[r] == 0 ? "BENIGN" : "DDoS");
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t rows = 20000;
    std::size_t cols = 30;
    std::size_t trees = 40;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const std::string value = argv[i + 1];
        if (flag == "--rows") rows = std::stoul(value);
        if (flag == "--cols") cols = std::stoul(value);
        if (flag == "--trees") trees = std::stoul(value);
    }

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n");
#endif
    std::printf("%zu rows x %zu cols, %zu trees\n\n", rows, cols, trees);
    std::printf("%-16s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const FeatureMatrix data = generate_synthetic(rows, cols, 4.0, 0.5, 7);
    TrainConfig cfg;
    cfg.n_trees = trees;
    cfg.max_depth = 12;
    cfg.seed = 7;

    {
        const RawTable table = to_table(data);
        auto t0 = Clock::now();
        const FeatureMatrix a = clean_serial(table, "Label");
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const FeatureMatrix b = clean(table, "Label");
        report("clean", serial_ms, ms_since(t0), a == b);
    }
    {
        const ScalerParams scaler = fit_scaler(data);
        auto t0 = Clock::now();
        const FeatureMatrix a = apply_scaler_serial(scaler, data);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const FeatureMatrix b = apply_scaler(scaler, data);
        report("apply_scaler", serial_ms, ms_since(t0), a == b);
    }
    RandomForestModel forest;
    {
        auto t0 = Clock::now();
        const RandomForestModel a = train_random_forest_serial(data, cfg);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        forest = train_random_forest(data, cfg);
        report("forest_train", serial_ms, ms_since(t0), a == forest);
    }
    {
        auto t0 = Clock::now();
        const std::vector<int> a = predict_forest_serial(forest, data);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const std::vector<int> b = predict(forest, data);
        report("forest_predict", serial_ms, ms_since(t0), a == b);
    }
    return 0;
}
