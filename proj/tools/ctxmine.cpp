// Command-line front end for the context-mining pipeline and the evaluation
// harness. Subcommands: mine, build, rank-issues, eval, ensemble, report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ctxmine/config.hpp"
#include "ctxmine/dataset.hpp"
#include "ctxmine/errors.hpp"
#include "ctxmine/eval.hpp"
#include "ctxmine/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using ctxmine::pipeline::PipelineConfig;

PipelineConfig load_config_or_default(const std::string& config_path) {
    if (config_path.empty()) {
        PipelineConfig config;
        config.datasets = ctxmine::pipeline::default_dataset_specs();
        return config;
    }
    return ctxmine::pipeline::load_config(config_path);
}

void apply_overrides(PipelineConfig& config, const std::optional<int>& workers,
                     const std::optional<std::uint64_t>& seed) {
    if (workers) config.workers = *workers;
    if (seed) config.seed = *seed;
}

std::vector<std::pair<std::string, std::vector<ctxmine::eval::PredictionRecord>>>
load_prediction_files(const std::vector<std::string>& paths) {
    std::vector<std::pair<std::string, std::vector<ctxmine::eval::PredictionRecord>>> models;
    for (const auto& path : paths) {
        auto preds = ctxmine::eval::read_predictions(path);
        if (preds.empty()) {
            throw ctxmine::Error("prediction file has no records: " + path);
        }
        models.emplace_back(preds.front().model_name, std::move(preds));
    }
    return models;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ctxmine::IoError("cannot write " + path.string());
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus mining and evaluation toolkit for context-augmented code completion"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "pipeline configuration JSON")->envname("CTX_CONFIG");
    app.add_option("--workers", workers, "worker pool size");
    app.add_option("--seed", seed, "seed override");

    // mine
    auto* mine = app.add_subcommand("mine", "extract methods, blame and issues into a store");
    std::string mine_out = "store";
    mine->add_option("--out", mine_out, "corpus store directory");

    // build
    auto* build = app.add_subcommand("build", "build per-context datasets from a store");
    std::string build_store = "store";
    std::string build_out = "datasets";
    build->add_option("--store", build_store, "corpus store directory");
    build->add_option("--out", build_out, "dataset output directory");

    // rank-issues
    auto* rank = app.add_subcommand("rank-issues", "rank open issues per instance and report MRR");
    std::string rank_store = "store";
    std::string rank_out = "rankings.json";
    rank->add_option("--store", rank_store, "corpus store directory");
    rank->add_option("--out", rank_out, "rankings output file");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score prediction files against a dataset");
    std::string eval_dataset;
    std::vector<std::string> eval_preds;
    std::string eval_baseline;
    std::string eval_out = "report";
    bool eval_no_ensemble = false;
    eval_cmd->add_option("--dataset", eval_dataset, "dataset JSONL (test split)")->required();
    eval_cmd->add_option("--preds", eval_preds, "prediction JSONL files")->required();
    eval_cmd->add_option("--baseline", eval_baseline, "baseline model name");
    eval_cmd->add_option("--out", eval_out, "report path prefix");
    eval_cmd->add_flag("--no-ensemble", eval_no_ensemble, "skip the confidence-based ensemble row");

    // ensemble
    auto* ensemble_cmd =
        app.add_subcommand("ensemble", "emit the highest-confidence prediction per instance");
    std::vector<std::string> ens_preds;
    std::string ens_out = "ensemble.jsonl";
    ensemble_cmd->add_option("--preds", ens_preds, "prediction JSONL files")->required();
    ensemble_cmd->add_option("--out", ens_out, "merged prediction file");

    // report
    auto* report_cmd = app.add_subcommand("report", "re-render a saved JSON report");
    std::string report_in;
    std::string report_out = "report";
    report_cmd->add_option("--in", report_in, "report JSON produced by eval")->required();
    report_cmd->add_option("--out", report_out, "output path prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig config = load_config_or_default(config_path);
        apply_overrides(config, workers, seed);

        if (mine->parsed()) {
            ctxmine::pipeline::run_mine(config, mine_out, std::cout);
            return 0;
        }
        if (build->parsed()) {
            ctxmine::pipeline::run_build(config, build_store, build_out, std::cout);
            return 0;
        }
        if (rank->parsed()) {
            ctxmine::pipeline::run_rank_issues(config, rank_store, rank_out, std::cout);
            return 0;
        }
        if (eval_cmd->parsed()) {
            const auto dataset = ctxmine::data::read_dataset(eval_dataset);
            auto models = load_prediction_files(eval_preds);
            // Order models by configured priority when one is given.
            if (!config.model_priority.empty()) {
                std::stable_sort(models.begin(), models.end(), [&](const auto& a, const auto& b) {
                    auto pos = [&](const std::string& name) {
                        auto it = std::find(config.model_priority.begin(),
                                            config.model_priority.end(), name);
                        return it == config.model_priority.end()
                                   ? config.model_priority.size()
                                   : static_cast<std::size_t>(
                                         it - config.model_priority.begin());
                    };
                    return pos(a.first) < pos(b.first);
                });
            }
            const std::string baseline =
                eval_baseline.empty() ? models.front().first : eval_baseline;
            const auto report =
                ctxmine::eval::build_report(dataset, models, baseline, !eval_no_ensemble);
            write_file(eval_out + ".txt", ctxmine::eval::render_text(report));
            write_file(eval_out + ".json", ctxmine::eval::render_json(report));
            write_file(eval_out + ".csv", ctxmine::eval::render_buckets_csv(report));
            std::cout << ctxmine::eval::render_text(report);
            return 0;
        }
        if (ensemble_cmd->parsed()) {
            auto models = load_prediction_files(ens_preds);
            const auto selected = ctxmine::eval::ensemble_select(models);
            ctxmine::eval::write_predictions(selected, ens_out);
            std::cout << "[ensemble] wrote " << selected.size() << " predictions to " << ens_out
                      << "\n";
            return 0;
        }
        if (report_cmd->parsed()) {
            std::ifstream in(report_in);
            if (!in) throw ctxmine::IoError("cannot read " + report_in);
            std::cout << in.rdbuf();
            return 0;
        }
    } catch (const ctxmine::CoverageGap& e) {
        std::cerr << "coverage gap: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
