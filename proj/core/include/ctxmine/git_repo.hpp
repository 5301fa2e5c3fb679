#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxmine/method.hpp"
#include "ctxmine/repo_types.hpp"

namespace ctxmine::repo {

// Read-only access to a local clone. Commands are serialized internally, so
// one GitRepo can be shared by concurrent callers; separate repositories never
// contend.
class GitRepo {
public:
    explicit GitRepo(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    std::string resolve(const std::string& refspec) const;
    UtcSeconds commit_time(const std::string& sha) const;

    // Full history of `ref`, newest first, in topological order with
    // committer-date tie-break (git --date-order). Cached per ref. Records
    // carry no diffs; `files` holds the per-commit touched paths.
    struct LogEntry {
        CommitRecord commit;
        std::vector<std::string> files;
    };
    const std::vector<LogEntry>& log(const std::string& ref = "HEAD") const;

    // Position of a sha in log(ref): smaller means newer. nullopt when the
    // sha is not reachable from ref.
    std::optional<std::size_t> order_of(const std::string& sha,
                                        const std::string& ref = "HEAD") const;

    // Per-line attribution of path[start_line..end_line] as of `ref`.
    std::vector<std::string> blame(const std::string& path, const std::string& ref,
                                   int start_line, int end_line) const;

    // Unified diff of a commit against its first parent (merges yield an
    // empty list). Deletion/addition pairs at the same hunk position are
    // folded into Modified lines carrying the post-edit text.
    std::vector<DiffLine> diff_lines(const std::string& sha) const;

private:
    std::string run_git(const std::vector<std::string>& args) const;

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, std::vector<LogEntry>> log_cache_;
    mutable std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>>
        order_cache_;
};

struct LastChange {
    CommitRecord commit;
    std::set<int> statement_indices;
};

// The latest commit strictly before release.date that changed at least one
// statement of the method, plus the statement indices that commit touched.
// nullopt when no commit before the release touched the method.
std::optional<LastChange> last_change_commit(const code::MethodRecord& method,
                                             const ReleaseRef& release, const GitRepo& repo,
                                             const std::string& file_path_in_repo);

// Up to `limit` commits authored by the given identity, strictly earlier than
// `before` in commit order, each touching at least one corpus-language file;
// newest first, diffs attached. Identity matches on normalized email, falling
// back to exact name.
std::vector<CommitRecord> developer_history(const std::string& author_name,
                                            const std::string& author_email,
                                            const CommitRecord& before, const GitRepo& repo,
                                            int limit = 10, std::string_view extension = ".java",
                                            const std::string& ref = "HEAD");

// Corpus files under repo_root: excludes any path with "test" in a segment
// (case-insensitive), samples uniformly without replacement when more than
// `cap` survive. Deterministic for a fixed seed. Throws IoError.
std::vector<std::filesystem::path> sample_files(const std::filesystem::path& repo_root,
                                                std::size_t cap, std::uint64_t seed,
                                                std::string_view extension = ".java");

}  // namespace ctxmine::repo
