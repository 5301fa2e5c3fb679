#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ctxmine/config.hpp"
#include "ctxmine/dataset.hpp"
#include "ctxmine/issue_rank.hpp"
#include "ctxmine/method.hpp"
#include "ctxmine/repo_types.hpp"

namespace ctxmine::pipeline {

// Everything the build step needs, extracted once so building is git-free.
struct MinedChange {
    std::string method_id;
    repo::CommitRecord commit;  // l_c, no diff
    std::vector<int> changed_statements;
};

struct MinedRepo {
    std::string name;
    repo::ReleaseRef release;
    std::vector<code::MethodRecord> methods;
    std::vector<MinedChange> changes;
    std::vector<repo::IssueRecord> issues;
    // Developer history per l_c sha, diffs attached, newest first.
    std::map<std::string, std::vector<repo::CommitRecord>> histories;
};

struct CorpusStore {
    std::vector<MinedRepo> repos;
};

void save_store(const CorpusStore& store, const std::filesystem::path& dir,
                const PipelineConfig& config);
CorpusStore load_store(const std::filesystem::path& dir);

// Mines every configured repository (filters applied; per-repo failures are
// logged and skipped) and writes the corpus store.
CorpusStore run_mine(const PipelineConfig& config, const std::filesystem::path& store_dir,
                     std::ostream& log);

// Masks, dedups, intersects, splits, builds every configured dataset, and
// writes one JSONL per dataset per split plus a manifest. Partial outputs are
// removed on failure.
void run_build(const PipelineConfig& config, const std::filesystem::path& store_dir,
               const std::filesystem::path& out_dir, std::ostream& log);

struct RankReport {
    double backend_mrr = 0.0;
    double random_mrr = 0.0;
    long queries = 0;
    std::string backend;
};

// Ranks open issues for every instance whose commit links to one and scores
// the backend with MRR against the linked issue; the random baseline runs on
// the same list lengths.
RankReport run_rank_issues(const PipelineConfig& config, const std::filesystem::path& store_dir,
                           const std::filesystem::path& out_file, std::ostream& log);

// Derives the baseline instance set from a store (mask + global dedup).
std::vector<data::MaskedInstance> instances_from_store(const CorpusStore& store);

std::unique_ptr<rank::RankerBackend> make_ranker_backend(const PipelineConfig& config);

// Runs fn(0..n-1) on up to `workers` threads; the first exception rethrows
// after all threads join. Results must go to disjoint slots.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace ctxmine::pipeline
