#include "ctxmine/git_repo.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "ctxmine/errors.hpp"
#include "ctxmine/process.hpp"
#include "ctxmine/strings.hpp"

namespace ctxmine::repo {
namespace {

constexpr char kFieldSep = '\x1f';
constexpr char kRecordSep = '\x1e';

std::string normalize_email(std::string_view email) {
    std::string out;
    for (char c : email) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

bool is_hex_sha(std::string_view s) {
    if (s.size() != 40) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

}  // namespace

GitRepo::GitRepo(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::exists(root_ / ".git")) {
        throw IoError("not a git repository: " + root_.string());
    }
}

std::string GitRepo::run_git(const std::vector<std::string>& args) const {
    std::vector<std::string> argv = {"git", "-C", root_.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    ProcessResult result = run_process(argv);
    if (result.exit_code != 0) {
        throw IoError("git " + (args.empty() ? "" : args[0]) + " failed in " + root_.string() +
                      ": " + result.err);
    }
    return result.out;
}

std::string GitRepo::resolve(const std::string& refspec) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string out = run_git({"rev-parse", refspec});
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    return out;
}

UtcSeconds GitRepo::commit_time(const std::string& sha) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string out = run_git({"show", "-s", "--format=%ct", sha});
    return std::stoll(out);
}

const std::vector<GitRepo::LogEntry>& GitRepo::log(const std::string& ref) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = log_cache_.find(ref);
    if (it != log_cache_.end()) return it->second;

    const std::string format = std::string("%x1e%H%x1f%an%x1f%ae%x1f%ct%x1f%B%x1f");
    std::string out = run_git({"log", "--date-order", "--name-only", "--format=" + format, ref});

    std::vector<LogEntry> entries;
    std::size_t pos = 0;
    while (pos < out.size()) {
        if (out[pos] != kRecordSep) {
            ++pos;
            continue;
        }
        std::size_t end = out.find(kRecordSep, pos + 1);
        if (end == std::string::npos) end = out.size();
        std::string_view record(out.data() + pos + 1, end - pos - 1);

        std::vector<std::string> fields;
        std::size_t begin = 0;
        for (int f = 0; f < 5 && begin <= record.size(); ++f) {
            std::size_t sep = record.find(kFieldSep, begin);
            if (sep == std::string_view::npos) sep = record.size();
            fields.emplace_back(record.substr(begin, sep - begin));
            begin = sep + 1;
        }
        if (fields.size() == 5) {
            LogEntry entry;
            entry.commit.sha = fields[0];
            entry.commit.author_name = fields[1];
            entry.commit.author_email = fields[2];
            entry.commit.timestamp = std::stoll(fields[3]);
            entry.commit.message = fields[4];
            while (!entry.commit.message.empty() &&
                   std::isspace(static_cast<unsigned char>(entry.commit.message.back()))) {
                entry.commit.message.pop_back();
            }
            for (const auto& line : split(std::string(record.substr(begin)), '\n')) {
                if (!line.empty()) entry.files.push_back(line);
            }
            entries.push_back(std::move(entry));
        }
        pos = end;
    }

    auto [ins, _] = log_cache_.emplace(ref, std::move(entries));
    auto& order = order_cache_[ref];
    for (std::size_t i = 0; i < ins->second.size(); ++i) {
        order[ins->second[i].commit.sha] = i;
    }
    return ins->second;
}

std::optional<std::size_t> GitRepo::order_of(const std::string& sha,
                                             const std::string& ref) const {
    log(ref);  // populate caches
    std::lock_guard<std::mutex> lock(mutex_);
    const auto& order = order_cache_.at(ref);
    auto it = order.find(sha);
    if (it == order.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> GitRepo::blame(const std::string& path, const std::string& ref,
                                        int start_line, int end_line) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string range = std::to_string(start_line) + "," + std::to_string(end_line);
    std::string out = run_git({"blame", "--line-porcelain", "-L", range, ref, "--", path});

    std::vector<std::string> shas;
    std::string current;
    for (const auto& line : split(out, '\n')) {
        if (!line.empty() && line[0] == '\t') {
            shas.push_back(current);
            continue;
        }
        std::size_t space = line.find(' ');
        if (space == 40 && is_hex_sha(std::string_view(line).substr(0, 40))) {
            current = line.substr(0, 40);
        }
    }
    return shas;
}

std::vector<DiffLine> GitRepo::diff_lines(const std::string& sha) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string out = run_git({"diff-tree", "-r", "-p", "-U0", "--no-commit-id", sha});

    std::vector<DiffLine> lines;
    std::string current_file;
    std::vector<std::string> deleted;
    std::vector<std::string> added;

    auto flush_hunk = [&]() {
        const std::size_t paired = std::min(deleted.size(), added.size());
        for (std::size_t i = 0; i < paired; ++i) {
            lines.push_back(DiffLine{DiffLine::Kind::Modified, added[i], current_file});
        }
        for (std::size_t i = paired; i < deleted.size(); ++i) {
            lines.push_back(DiffLine{DiffLine::Kind::Deleted, deleted[i], current_file});
        }
        for (std::size_t i = paired; i < added.size(); ++i) {
            lines.push_back(DiffLine{DiffLine::Kind::Added, added[i], current_file});
        }
        deleted.clear();
        added.clear();
    };

    for (const auto& line : split(out, '\n')) {
        if (line.rfind("+++ ", 0) == 0 || line.rfind("--- ", 0) == 0) {
            std::string path = line.substr(4);
            const bool is_null = path == "/dev/null";
            if (!is_null && (path.rfind("b/", 0) == 0 || path.rfind("a/", 0) == 0)) {
                path = path.substr(2);
            }
            if (line[0] == '+' && !is_null) {
                current_file = path;
            } else if (line[0] == '-' && !is_null && current_file.empty()) {
                current_file = path;
            }
            continue;
        }
        if (line.rfind("@@", 0) == 0) {
            flush_hunk();
            continue;
        }
        if (line.rfind("diff ", 0) == 0 || line.rfind("index ", 0) == 0 ||
            line.rfind("\\ No newline", 0) == 0 || line.rfind("new file", 0) == 0 ||
            line.rfind("deleted file", 0) == 0 || line.rfind("old mode", 0) == 0 ||
            line.rfind("new mode", 0) == 0 || line.rfind("similarity", 0) == 0 ||
            line.rfind("rename ", 0) == 0 || line.rfind("Binary ", 0) == 0) {
            flush_hunk();
            if (line.rfind("diff ", 0) == 0) current_file.clear();
            continue;
        }
        if (!line.empty() && line[0] == '+') {
            added.push_back(line.substr(1));
        } else if (!line.empty() && line[0] == '-') {
            deleted.push_back(line.substr(1));
        }
    }
    flush_hunk();
    return lines;
}

std::optional<LastChange> last_change_commit(const code::MethodRecord& method,
                                             const ReleaseRef& release, const GitRepo& repo,
                                             const std::string& file_path_in_repo) {
    const auto line_shas =
        repo.blame(file_path_in_repo, release.sha, method.line_start, method.line_end);

    // sha attributed to each statement line; line i of the blame output is
    // method.line_start + i.
    auto sha_for_line = [&](int line) -> const std::string* {
        const int idx = line - method.line_start;
        if (idx < 0 || idx >= static_cast<int>(line_shas.size())) return nullptr;
        return &line_shas[static_cast<std::size_t>(idx)];
    };

    // Candidates: commits attributed to some statement line, strictly before
    // the release date.
    std::unordered_map<std::string, UtcSeconds> when;
    for (const auto& stmt : method.statements) {
        for (int line = stmt.line_start; line <= stmt.line_end; ++line) {
            const std::string* sha = sha_for_line(line);
            if (sha == nullptr || sha->empty() || when.count(*sha)) continue;
            when[*sha] = repo.commit_time(*sha);
        }
    }

    // Order commits relative to the release ref: every blamed sha is an
    // ancestor of the release by construction.
    const std::string* latest = nullptr;
    std::size_t latest_order = 0;
    for (const auto& [sha, time] : when) {
        if (time >= release.date) continue;
        const auto order = repo.order_of(sha, release.sha);
        if (!order) continue;
        if (latest == nullptr || *order < latest_order) {
            latest = &sha;
            latest_order = *order;
        }
    }
    if (latest == nullptr) return std::nullopt;

    LastChange result;
    result.commit = repo.log(release.sha)[latest_order].commit;
    for (const auto& stmt : method.statements) {
        for (int line = stmt.line_start; line <= stmt.line_end; ++line) {
            const std::string* sha = sha_for_line(line);
            if (sha != nullptr && *sha == *latest) {
                result.statement_indices.insert(stmt.index);
                break;
            }
        }
    }
    return result;
}

std::vector<CommitRecord> developer_history(const std::string& author_name,
                                            const std::string& author_email,
                                            const CommitRecord& before, const GitRepo& repo,
                                            int limit, std::string_view extension,
                                            const std::string& ref) {
    const auto& entries = repo.log(ref);
    const auto before_order = repo.order_of(before.sha, ref);
    if (!before_order) return {};

    const std::string email = normalize_email(author_email);
    std::vector<CommitRecord> history;
    for (std::size_t i = *before_order + 1; i < entries.size(); ++i) {
        const auto& entry = entries[i];
        const bool same_author = !email.empty()
                                     ? normalize_email(entry.commit.author_email) == email
                                     : entry.commit.author_name == author_name;
        if (!same_author) continue;
        const bool touches_lang = std::any_of(
            entry.files.begin(), entry.files.end(), [&](const std::string& f) {
                return f.size() >= extension.size() &&
                       f.compare(f.size() - extension.size(), extension.size(), extension) == 0;
            });
        if (!touches_lang) continue;
        CommitRecord commit = entry.commit;
        commit.diff = repo.diff_lines(commit.sha);
        history.push_back(std::move(commit));
        if (static_cast<int>(history.size()) >= limit) break;
    }
    return history;
}

std::vector<std::filesystem::path> sample_files(const std::filesystem::path& repo_root,
                                                std::size_t cap, std::uint64_t seed,
                                                std::string_view extension) {
    if (!std::filesystem::is_directory(repo_root)) {
        throw IoError("repository root is not readable: " + repo_root.string());
    }
    std::vector<std::filesystem::path> eligible;
    std::error_code ec;
    for (std::filesystem::recursive_directory_iterator it(repo_root, ec), end; it != end;
         it.increment(ec)) {
        if (ec) throw IoError("cannot walk " + repo_root.string() + ": " + ec.message());
        if (it->is_directory() && it->path().filename() == ".git") {
            it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file()) continue;
        const auto relative = std::filesystem::relative(it->path(), repo_root);
        const std::string name = relative.filename().string();
        if (name.size() < extension.size() ||
            name.compare(name.size() - extension.size(), extension.size(), extension) != 0) {
            continue;
        }
        bool excluded = false;
        for (const auto& part : relative) {
            if (contains_ci(part.string(), "test")) {
                excluded = true;
                break;
            }
        }
        if (!excluded) eligible.push_back(relative);
    }
    std::sort(eligible.begin(), eligible.end());
    if (eligible.size() > cap) {
        std::mt19937_64 rng(seed);
        std::shuffle(eligible.begin(), eligible.end(), rng);
        eligible.resize(cap);
        std::sort(eligible.begin(), eligible.end());
    }
    return eligible;
}

}  // namespace ctxmine::repo
