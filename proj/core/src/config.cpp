#include "ctxmine/config.hpp"

#include <fstream>

#include <json.hpp>

#include "ctxmine/context.hpp"
#include "ctxmine/errors.hpp"

namespace ctxmine::pipeline {
namespace {

using nlohmann::json;

}  // namespace

std::vector<DatasetSpec> default_dataset_specs() {
    std::vector<DatasetSpec> specs;
    specs.push_back(DatasetSpec{"baseline", {}});
    for (context::ContextKind kind : context::all_kinds()) {
        const std::string name(context::kind_name(kind));
        specs.push_back(DatasetSpec{name, {name}});
    }
    return specs;
}

std::string config_to_json(const PipelineConfig& c) {
    json j;
    j["repos"] = json::array();
    for (const auto& r : c.repos) {
        j["repos"].push_back({{"name", r.name},
                              {"path", r.path},
                              {"issues", r.issues},
                              {"release", r.release},
                              {"stars", r.stars}});
    }
    j["filters"] = {{"min_commits", c.min_commits},
                    {"min_contributors", c.min_contributors},
                    {"min_issues", c.min_issues},
                    {"min_stars", c.min_stars},
                    {"file_cap", c.file_cap}};
    j["budgets"] = {{"method", c.method_budget}, {"input", c.input_budget}};
    j["retrieval"] = {{"k", c.retrieval_k},
                      {"ngram_n_max", c.ngram_n_max},
                      {"k_trivial", c.k_trivial}};
    j["split"] = {{"ratios", c.split_ratios}, {"seed", c.seed}};
    j["token_counter"] = c.token_counter;
    j["ranker"] = {{"backend", c.ranker_backend}, {"command", c.ranker_command}};
    j["developer"] = {{"history_limit", c.dev_history_limit},
                      {"statements_top", c.dev_statements_top},
                      {"invocations_top", c.dev_invocations_top}};
    j["datasets"] = json::array();
    for (const auto& d : c.datasets) {
        j["datasets"].push_back({{"name", d.name}, {"kinds", d.kinds}});
    }
    j["model_priority"] = c.model_priority;
    j["workers"] = c.workers;
    return j.dump(2);
}

PipelineConfig config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("malformed config JSON");
    PipelineConfig c;
    try {
        for (const auto& r : j.value("repos", json::array())) {
            RepoConfig rc;
            rc.name = r.at("name").get<std::string>();
            rc.path = r.at("path").get<std::string>();
            rc.issues = r.value("issues", std::string{});
            rc.release = r.value("release", std::string{"HEAD"});
            rc.stars = r.value("stars", 0L);
            c.repos.push_back(std::move(rc));
        }
        if (j.contains("filters")) {
            const auto& f = j["filters"];
            c.min_commits = f.value("min_commits", c.min_commits);
            c.min_contributors = f.value("min_contributors", c.min_contributors);
            c.min_issues = f.value("min_issues", c.min_issues);
            c.min_stars = f.value("min_stars", c.min_stars);
            c.file_cap = f.value("file_cap", c.file_cap);
        }
        if (j.contains("budgets")) {
            c.method_budget = j["budgets"].value("method", c.method_budget);
            c.input_budget = j["budgets"].value("input", c.input_budget);
        }
        if (j.contains("retrieval")) {
            const auto& r = j["retrieval"];
            c.retrieval_k = r.value("k", c.retrieval_k);
            c.ngram_n_max = r.value("ngram_n_max", c.ngram_n_max);
            c.k_trivial = r.value("k_trivial", c.k_trivial);
        }
        if (j.contains("split")) {
            if (j["split"].contains("ratios")) {
                c.split_ratios = j["split"]["ratios"].get<std::array<double, 3>>();
            }
            c.seed = j["split"].value("seed", c.seed);
        }
        c.token_counter = j.value("token_counter", c.token_counter);
        if (j.contains("ranker")) {
            c.ranker_backend = j["ranker"].value("backend", c.ranker_backend);
            c.ranker_command =
                j["ranker"].value("command", std::vector<std::string>{});
        }
        if (j.contains("developer")) {
            const auto& d = j["developer"];
            c.dev_history_limit = d.value("history_limit", c.dev_history_limit);
            c.dev_statements_top = d.value("statements_top", c.dev_statements_top);
            c.dev_invocations_top = d.value("invocations_top", c.dev_invocations_top);
        }
        for (const auto& d : j.value("datasets", json::array())) {
            DatasetSpec spec;
            spec.name = d.at("name").get<std::string>();
            spec.kinds = d.value("kinds", std::vector<std::string>{});
            c.datasets.push_back(std::move(spec));
        }
        c.model_priority = j.value("model_priority", std::vector<std::string>{});
        c.workers = j.value("workers", c.workers);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }

    const double sum = c.split_ratios[0] + c.split_ratios[1] + c.split_ratios[2];
    if (sum < 0.999 || sum > 1.001) throw ConfigError("split ratios must sum to 1");
    if (c.method_budget <= 0 || c.input_budget <= 0) {
        throw ConfigError("budgets must be positive");
    }
    for (const auto& d : c.datasets) {
        for (const auto& kind : d.kinds) {
            if (!context::parse_kind(kind)) {
                throw ConfigError("unknown context kind '" + kind + "' in dataset " + d.name);
            }
        }
    }
    if (c.datasets.empty()) c.datasets = default_dataset_specs();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

void save_config(const PipelineConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config " + path.string());
    out << config_to_json(config) << '\n';
}

}  // namespace ctxmine::pipeline
