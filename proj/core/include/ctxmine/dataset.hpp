#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctxmine/method.hpp"
#include "ctxmine/repo_types.hpp"

namespace ctxmine::data {

// One IM_i -> C_r pair plus provenance. im_text is the whitespace-collapsed
// method with the masked chunk replaced by the <MISSING CODE> marker; target
// holds the masked statements verbatim (whitespace-collapsed).
struct MaskedInstance {
    std::string instance_id;
    std::string method_id;
    std::string im_text;
    std::string target;
    std::set<int> masked_indices;  // 1 or 2 consecutive statement indices
    std::string repo;
    std::string commit_sha;        // l_c
    std::string commit_message;
    std::string author_name;       // D_j
    std::string author_email;
    UtcSeconds t = 0;              // committer time of l_c
};

struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> eval;
    std::vector<std::string> test;
};

// Greedily pairs consecutive changed statements into chunks of at most two (a
// trailing odd statement forms a chunk of one); non-adjacent statements are
// never bridged. One instance per chunk.
std::vector<MaskedInstance> mask_method(const code::MethodRecord& method,
                                        const std::vector<int>& changed,
                                        const repo::CommitRecord& commit, UtcSeconds t,
                                        const std::string& repo_name);

// Keeps the first instance per distinct im_text; order preserved.
std::vector<MaskedInstance> dedup_instances(std::vector<MaskedInstance> instances);

// Instance ids present in every per-context dataset. Requires >= 2 datasets.
std::set<std::string> intersect_datasets(
    const std::map<std::string, std::vector<MaskedInstance>>& datasets);

// Methods (not instances) are shuffled by seed and assigned greedily until
// eval and test reach their instance-count targets; train takes the
// remainder, so all instances of one method land in one split.
DatasetSplit split_dataset(std::span<const MaskedInstance> instances,
                           const std::array<double, 3>& ratios, std::uint64_t seed);

// A serialized dataset line: the composed model input plus provenance.
struct DatasetRow {
    std::string instance_id;
    std::string method_id;
    std::string input;
    std::string target;
    std::vector<std::string> context_kinds;
    int truncated_tokens = 0;
    std::string repo;
    std::string commit_sha;
    UtcSeconds t = 0;
};

// Line-delimited JSON; read . write is the identity on all fields. Throws
// IoError / SchemaError (with the offending line number).
void write_dataset(const std::vector<DatasetRow>& rows, const std::filesystem::path& path);
std::vector<DatasetRow> read_dataset(const std::filesystem::path& path);

}  // namespace ctxmine::data
