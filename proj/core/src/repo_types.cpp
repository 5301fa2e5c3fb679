#include "ctxmine/repo_types.hpp"

#include <cctype>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ctxmine/errors.hpp"

namespace ctxmine::repo {

std::vector<RepoMeta> select_repositories(const std::vector<RepoMeta>& candidates,
                                          long min_commits, long min_contributors,
                                          long min_issues, long min_stars) {
    std::vector<RepoMeta> kept;
    for (const auto& repo : candidates) {
        if (repo.commits > min_commits && repo.contributors >= min_contributors &&
            repo.issues >= min_issues && repo.stars >= min_stars) {
            kept.push_back(repo);
        }
    }
    return kept;
}

std::vector<IssueRecord> open_issues_at(const std::vector<IssueRecord>& issues, UtcSeconds t) {
    std::vector<IssueRecord> open;
    for (const auto& issue : issues) {
        if (issue.opened_at <= t && (!issue.closed_at || *issue.closed_at > t)) {
            open.push_back(issue);
        }
    }
    return open;
}

std::optional<long> link_commit_to_issue(const std::string& message,
                                         const std::vector<IssueRecord>& open_issues) {
    std::unordered_set<long> open_ids;
    for (const auto& issue : open_issues) open_ids.insert(issue.id);

    auto digits_at = [&](std::size_t pos, long& value, std::size_t& len) {
        value = 0;
        len = 0;
        while (pos + len < message.size() &&
               std::isdigit(static_cast<unsigned char>(message[pos + len]))) {
            value = value * 10 + (message[pos + len] - '0');
            ++len;
        }
        return len > 0;
    };

    static constexpr std::string_view kUrlFragment = "issues/";
    for (std::size_t i = 0; i < message.size(); ++i) {
        long id = 0;
        std::size_t len = 0;
        if (message[i] == '#' && digits_at(i + 1, id, len)) {
            if (open_ids.count(id)) return id;
            i += len;
            continue;
        }
        if (message.compare(i, kUrlFragment.size(), kUrlFragment) == 0 &&
            digits_at(i + kUrlFragment.size(), id, len)) {
            if (open_ids.count(id)) return id;
            i += kUrlFragment.size() + len - 1;
        }
    }
    return std::nullopt;
}

std::vector<IssueRecord> load_issue_export(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read issue export " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed issue export " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw ParseError("issue export must be a JSON array: " + path.string());

    std::vector<IssueRecord> issues;
    issues.reserve(doc.size());
    for (const auto& item : doc) {
        IssueRecord issue;
        issue.id = item.at("id").get<long>();
        issue.title = item.at("title").get<std::string>();
        issue.body = item.at("body").get<std::string>();
        issue.opened_at = parse_iso8601(item.at("opened_at").get<std::string>());
        if (item.contains("closed_at") && !item.at("closed_at").is_null()) {
            issue.closed_at = parse_iso8601(item.at("closed_at").get<std::string>());
        }
        issue.url = item.value("url", std::string{});
        issues.push_back(std::move(issue));
    }
    return issues;
}

void save_issue_export(const std::vector<IssueRecord>& issues,
                       const std::filesystem::path& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& issue : issues) {
        nlohmann::json item;
        item["id"] = issue.id;
        item["title"] = issue.title;
        item["body"] = issue.body;
        item["opened_at"] = format_iso8601(issue.opened_at);
        item["closed_at"] = issue.closed_at ? nlohmann::json(format_iso8601(*issue.closed_at))
                                            : nlohmann::json(nullptr);
        item["url"] = issue.url;
        doc.push_back(std::move(item));
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write issue export " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace ctxmine::repo
