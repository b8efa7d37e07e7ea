#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "idsfed/csv.hpp"
#include "idsfed/errors.hpp"
#include "idsfed/experiment.hpp"
#include "idsfed/preprocess.hpp"

namespace fs = std::filesystem;
using namespace idsfed;

namespace {

std::string resolve_input_path(const std::string& given) {
    fs::path path(given);
    if (!fs::exists(path) && path.is_relative()) {
        if (const char* dir = std::getenv(kDataDirEnv)) {
            const fs::path alt = fs::path(dir) / path;
            if (fs::exists(alt)) return alt.string();
        }
    }
    return path.string();
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void run_prepare(const std::string& csv_path, const std::string& label_col,
                 const std::string& out_path, std::uint64_t seed) {
    const RawTable table = load_flow_csv(resolve_input_path(csv_path));
    const FeatureMatrix m = clean(table, label_col);
    save_matrix_cache(m, out_path, std::nullopt, seed);
    std::cout << "cached " << m.n_rows << " rows x " << m.n_cols << " features to " << out_path
              << ".fmx (+ .meta.json)\n";
}

ExperimentConfig load_config(const std::string& config_path) {
    if (config_path.empty()) return ExperimentConfig{};
    return ExperimentConfig::from_file(config_path);
}

void print_baseline_summary(const nlohmann::ordered_json& report) {
    std::cout << "model  accuracy  precision  recall  f1  roc_auc\n";
    for (const auto& [name, mj] : report.at("models").items()) {
        const auto& m = mj.at("metrics");
        std::cout << name << "  " << m.at("accuracy") << "  " << m.at("precision") << "  "
                  << m.at("recall") << "  " << m.at("f1") << "  " << m.at("roc_auc") << "\n";
    }
}

void print_federate_summary(const nlohmann::ordered_json& report) {
    std::cout << "strategy  final_f1\n";
    for (const auto& [name, sj] : report.at("strategies").items()) {
        std::cout << name << "  " << sj.at("final_f1") << "\n";
    }
}

void run_report(const std::string& in_path, const std::string& format) {
    std::ifstream in(in_path);
    if (!in) throw DataError("cannot open report file: " + in_path);
    nlohmann::ordered_json report;
    try {
        report = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report file " + in_path + " is not valid JSON: " + e.what());
    }

    if (format == "json") {
        std::cout << report.dump(2) << "\n";
        return;
    }
    const std::string mode = report.value("mode", "");
    if (mode == "baseline") {
        std::cout << "model,accuracy,precision,recall,f1,roc_auc,tp,tn,fp,fn\n";
        for (const auto& [name, mj] : report.at("models").items()) {
            const auto& m = mj.at("metrics");
            const auto& cm = mj.at("confusion");
            std::cout << name << "," << m.at("accuracy") << "," << m.at("precision") << ","
                      << m.at("recall") << "," << m.at("f1") << "," << m.at("roc_auc") << ","
                      << cm.at("tp") << "," << cm.at("tn") << "," << cm.at("fp") << ","
                      << cm.at("fn") << "\n";
        }
    } else if (mode == "federate") {
        std::cout << "strategy,round,accuracy,f1,roc_auc\n";
        for (const auto& [name, sj] : report.at("strategies").items()) {
            for (const auto& r : sj.at("rounds")) {
                const auto& m = r.at("test_metrics");
                std::cout << name << "," << r.at("round") << "," << m.at("accuracy") << ","
                          << m.at("f1") << "," << m.at("roc_auc") << "\n";
            }
        }
    } else {
        throw DataError("report file has unknown mode '" + mode + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrusion-detection baselines and trust-aware federated simulation"};
    app.require_subcommand(1);

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Clean a flow CSV into a reusable feature cache");
    std::string prep_csv, prep_label = "Label", prep_out;
    std::uint64_t prep_seed = 0;
    prepare->add_option("csv", prep_csv, "flow CSV file")->required();
    prepare->add_option("--label-col", prep_label, "label column name");
    prepare->add_option("--out", prep_out, "output path prefix")->required();
    prepare->add_option("--seed", prep_seed, "seed recorded in the cache metadata");

    // shared experiment flags
    std::string config_path, dataset_override, out_override, models_override;
    bool have_seed_override = false;
    std::uint64_t seed_override = 0;

    auto add_experiment_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config JSON");
        cmd->add_option("--dataset", dataset_override, "dataset path or 'synthetic'");
        cmd->add_option("--out", out_override, "output directory");
        cmd->add_option_function<std::uint64_t>(
            "--seed",
            [&](std::uint64_t v) {
                have_seed_override = true;
                seed_override = v;
            },
            "experiment seed");
    };

    auto* baseline = app.add_subcommand("baseline", "Train and evaluate the centralized models");
    add_experiment_flags(baseline);
    baseline->add_option("--models", models_override, "comma list: rf,dt,svm or 'all'");

    auto* federate = app.add_subcommand("federate", "Run the federated simulation");
    add_experiment_flags(federate);
    std::string strategy_override;
    federate->add_option("--strategy", strategy_override, "trust|fedavg|both");

    auto* report_cmd = app.add_subcommand("report", "Re-emit a report file as json or csv");
    std::string report_in, report_format = "json";
    report_cmd->add_option("--in", report_in, "report JSON file")->required();
    report_cmd->add_option("--format", report_format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (prepare->parsed()) {
            run_prepare(prep_csv, prep_label, prep_out, prep_seed);
            return 0;
        }
        if (report_cmd->parsed()) {
            run_report(report_in, report_format);
            return 0;
        }

        ExperimentConfig cfg = load_config(config_path);
        if (!dataset_override.empty()) cfg.dataset = dataset_override;
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (have_seed_override) cfg.seed = seed_override;

        if (baseline->parsed()) {
            if (!models_override.empty()) {
                cfg.models = models_override == "all" ? std::vector<std::string>{"rf", "dt", "svm"}
                                                      : split_list(models_override);
            }
            const ReportBundle bundle = run_experiment(cfg, ExperimentMode::Baseline);
            print_baseline_summary(bundle.report);
            std::cout << "report: " << bundle.files_written.back() << "\n";
            return 0;
        }

        if (!strategy_override.empty()) {
            if (strategy_override == "both") {
                cfg.strategies = {AggregationStrategy::FedAvgBaseline,
                                  AggregationStrategy::TrustAware};
            } else if (strategy_override == "trust") {
                cfg.strategies = {AggregationStrategy::TrustAware};
            } else if (strategy_override == "fedavg") {
                cfg.strategies = {AggregationStrategy::FedAvgBaseline};
            } else {
                throw ConfigError("--strategy must be trust|fedavg|both");
            }
        }
        const ReportBundle bundle = run_experiment(cfg, ExperimentMode::Federate);
        print_federate_summary(bundle.report);
        std::cout << "report: " << bundle.files_written.back() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
