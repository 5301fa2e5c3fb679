#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctxmine/timeutil.hpp"

namespace ctxmine::repo {

struct DiffLine {
    enum class Kind { Added, Deleted, Modified };
    Kind kind = Kind::Added;
    std::string text;  // single source line, no +/- prefix
    std::string file_path;
};

struct CommitRecord {
    std::string sha;
    std::string author_name;
    std::string author_email;
    UtcSeconds timestamp = 0;  // committer time anchors "before"/"latest"
    std::string message;
    std::vector<DiffLine> diff;

    std::string identity() const { return author_name + " <" + author_email + ">"; }
};

struct IssueRecord {
    long id = 0;
    std::string title;
    std::string body;
    UtcSeconds opened_at = 0;
    std::optional<UtcSeconds> closed_at;
    std::string url;
};

struct ReleaseRef {
    std::string tag;
    std::string sha;
    UtcSeconds date = 0;
};

struct RepoMeta {
    std::string name;
    long commits = 0;
    long contributors = 0;
    long issues = 0;
    long stars = 0;
    std::vector<ReleaseRef> releases;
};

// Keeps candidates with commits > min_commits (strict, "more than 100
// commits") and contributors/issues/stars at or above their minimums.
std::vector<RepoMeta> select_repositories(const std::vector<RepoMeta>& candidates,
                                          long min_commits = 100, long min_contributors = 10,
                                          long min_issues = 50, long min_stars = 10);

// Issues open at t: opened_at <= t and not yet closed (close is exclusive:
// an issue closed exactly at t is no longer open).
std::vector<IssueRecord> open_issues_at(const std::vector<IssueRecord>& issues, UtcSeconds t);

// Finds "#<id>" or "issues/<id>" references; the first occurrence in the
// message that names an open issue wins.
std::optional<long> link_commit_to_issue(const std::string& message,
                                         const std::vector<IssueRecord>& open_issues);

// Issue export: JSON array of {id, title, body, opened_at, closed_at, url}.
std::vector<IssueRecord> load_issue_export(const std::filesystem::path& path);
void save_issue_export(const std::vector<IssueRecord>& issues, const std::filesystem::path& path);

}  // namespace ctxmine::repo
