#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctxmine::pipeline {

struct RepoConfig {
    std::string name;
    std::string path;     // local clone, checked out at `release`
    std::string issues;   // issue export JSON
    std::string release;  // refspec of the mined snapshot; default HEAD
    long stars = 0;       // forge metadata git cannot provide
};

// A dataset to build: the baseline plus zero or more context kinds, composed
// in the listed order.
struct DatasetSpec {
    std::string name;
    std::vector<std::string> kinds;
};

struct PipelineConfig {
    std::vector<RepoConfig> repos;

    long min_commits = 100;
    long min_contributors = 10;
    long min_issues = 50;
    long min_stars = 10;
    std::size_t file_cap = 1000;

    int method_budget = 682;
    int input_budget = 1024;
    std::size_t retrieval_k = 20;
    int ngram_n_max = 4;
    int k_trivial = 500;

    std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
    std::uint64_t seed = 42;
    std::string token_counter = "lexer";

    std::string ranker_backend = "tfidf";
    std::vector<std::string> ranker_command;  // argv for the external backend

    int dev_history_limit = 10;
    int dev_statements_top = 10;
    int dev_invocations_top = 100;

    std::vector<DatasetSpec> datasets;        // defaults to baseline + each kind
    std::vector<std::string> model_priority;  // ensemble tie-break order
    int workers = 1;
};

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& config, const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& text);

// The baseline plus one dataset per context kind, paper-style.
std::vector<DatasetSpec> default_dataset_specs();

}  // namespace ctxmine::pipeline
