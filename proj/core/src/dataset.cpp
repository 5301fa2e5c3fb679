#include "ctxmine/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ctxmine/errors.hpp"
#include "ctxmine/strings.hpp"
#include "ctxmine/token_counter.hpp"

namespace ctxmine::data {

std::vector<MaskedInstance> mask_method(const code::MethodRecord& method,
                                        const std::vector<int>& changed,
                                        const repo::CommitRecord& commit, UtcSeconds t,
                                        const std::string& repo_name) {
    std::vector<int> sorted = changed;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::vector<int>> chunks;
    for (std::size_t i = 0; i < sorted.size();) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i] + 1) {
            chunks.push_back({sorted[i], sorted[i + 1]});
            i += 2;
        } else {
            chunks.push_back({sorted[i]});
            i += 1;
        }
    }

    std::vector<MaskedInstance> instances;
    instances.reserve(chunks.size());
    for (const auto& chunk : chunks) {
        const auto& first = method.statements.at(static_cast<std::size_t>(chunk.front()));
        const auto& last = method.statements.at(static_cast<std::size_t>(chunk.back()));

        std::string masked = method.text.substr(0, first.begin);
        masked.append(code::kMissingCodeMarker);
        masked.append(method.text.substr(last.end));

        MaskedInstance inst;
        inst.method_id = method.id;
        inst.im_text = collapse_whitespace(masked);
        inst.target = collapse_whitespace(method.text.substr(first.begin, last.end - first.begin));
        inst.masked_indices.insert(chunk.begin(), chunk.end());
        inst.repo = repo_name;
        inst.commit_sha = commit.sha;
        inst.commit_message = commit.message;
        inst.author_name = commit.author_name;
        inst.author_email = commit.author_email;
        inst.t = t;

        std::string key = method.id;
        for (int idx : chunk) key += ":" + std::to_string(idx);
        inst.instance_id = fnv1a64_hex(key);
        instances.push_back(std::move(inst));
    }
    return instances;
}

std::vector<MaskedInstance> dedup_instances(std::vector<MaskedInstance> instances) {
    std::unordered_set<std::string> seen;
    std::vector<MaskedInstance> kept;
    kept.reserve(instances.size());
    for (auto& inst : instances) {
        if (seen.insert(inst.im_text).second) kept.push_back(std::move(inst));
    }
    return kept;
}

std::set<std::string> intersect_datasets(
    const std::map<std::string, std::vector<MaskedInstance>>& datasets) {
    if (datasets.size() < 2) {
        throw Error("intersect_datasets: need at least two datasets");
    }
    std::set<std::string> common;
    bool first = true;
    for (const auto& [kind, instances] : datasets) {
        std::set<std::string> ids;
        for (const auto& inst : instances) ids.insert(inst.instance_id);
        if (first) {
            common = std::move(ids);
            first = false;
            continue;
        }
        std::set<std::string> next;
        std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(),
                              std::inserter(next, next.begin()));
        common = std::move(next);
    }
    return common;
}

DatasetSplit split_dataset(std::span<const MaskedInstance> instances,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (sum < 0.999 || sum > 1.001) {
        throw Error("split_dataset: ratios must sum to 1");
    }

    std::vector<std::string> methods;
    std::unordered_map<std::string, std::vector<const MaskedInstance*>> by_method;
    for (const auto& inst : instances) {
        auto& bucket = by_method[inst.method_id];
        if (bucket.empty()) methods.push_back(inst.method_id);
        bucket.push_back(&inst);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(methods.begin(), methods.end(), rng);

    const auto total = static_cast<double>(instances.size());
    const auto eval_target = static_cast<std::size_t>(total * ratios[1]);
    const auto test_target = static_cast<std::size_t>(total * ratios[2]);

    DatasetSplit split;
    std::size_t eval_count = 0, test_count = 0;
    for (const auto& method : methods) {
        const auto& bucket = by_method[method];
        std::vector<std::string>* dest;
        if (eval_count < eval_target) {
            dest = &split.eval;
            eval_count += bucket.size();
        } else if (test_count < test_target) {
            dest = &split.test;
            test_count += bucket.size();
        } else {
            dest = &split.train;
        }
        for (const auto* inst : bucket) dest->push_back(inst->instance_id);
    }
    return split;
}

void write_dataset(const std::vector<DatasetRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset " + path.string());
    for (const auto& row : rows) {
        nlohmann::json j;
        j["instance_id"] = row.instance_id;
        j["method_id"] = row.method_id;
        j["input"] = row.input;
        j["target"] = row.target;
        j["context_kinds"] = row.context_kinds;
        j["truncated_tokens"] = row.truncated_tokens;
        j["repo"] = row.repo;
        j["commit_sha"] = row.commit_sha;
        j["t"] = format_iso8601(row.t);
        out << j.dump() << '\n';
    }
}

std::vector<DatasetRow> read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dataset " + path.string());
    std::vector<DatasetRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw SchemaError("malformed dataset line", line_no);
        }
        try {
            DatasetRow row;
            row.instance_id = j.at("instance_id").get<std::string>();
            row.method_id = j.at("method_id").get<std::string>();
            row.input = j.at("input").get<std::string>();
            row.target = j.at("target").get<std::string>();
            row.context_kinds = j.at("context_kinds").get<std::vector<std::string>>();
            row.truncated_tokens = j.at("truncated_tokens").get<int>();
            row.repo = j.at("repo").get<std::string>();
            row.commit_sha = j.at("commit_sha").get<std::string>();
            row.t = parse_iso8601(j.at("t").get<std::string>());
            rows.push_back(std::move(row));
        } catch (const nlohmann::json::exception&) {
            throw SchemaError("dataset line missing required field", line_no);
        }
    }
    return rows;
}

}  // namespace ctxmine::data
