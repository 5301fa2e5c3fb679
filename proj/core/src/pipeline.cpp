#include "ctxmine/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ctxmine/call_graph.hpp"
#include "ctxmine/context.hpp"
#include "ctxmine/errors.hpp"
#include "ctxmine/extractor.hpp"
#include "ctxmine/git_repo.hpp"
#include "ctxmine/strings.hpp"
#include "ctxmine/terms.hpp"

namespace ctxmine::pipeline {
namespace {

using nlohmann::json;

std::string sanitize_dir(std::string name) {
    for (char& c : name) {
        if (c == '/' || c == '\\' || c == ':') c = '_';
    }
    return name;
}

json statement_to_json(const code::Statement& s) {
    return json{{"text", s.text},         {"index", s.index}, {"line_start", s.line_start},
                {"line_end", s.line_end}, {"begin", s.begin}, {"end", s.end}};
}

code::Statement statement_from_json(const json& j) {
    code::Statement s;
    s.text = j.at("text").get<std::string>();
    s.index = j.at("index").get<int>();
    s.line_start = j.at("line_start").get<int>();
    s.line_end = j.at("line_end").get<int>();
    s.begin = j.at("begin").get<std::size_t>();
    s.end = j.at("end").get<std::size_t>();
    return s;
}

json method_to_json(const code::MethodRecord& m) {
    json j;
    j["id"] = m.id;
    j["file_path"] = m.file_path;
    j["class_name"] = m.class_name;
    j["name"] = m.name;
    j["arity"] = m.arity;
    j["signature"] = m.signature;
    j["text"] = m.text;
    j["body"] = m.body;
    j["line_start"] = m.line_start;
    j["line_end"] = m.line_end;
    j["token_count"] = m.token_count;
    j["statements"] = json::array();
    for (const auto& s : m.statements) j["statements"].push_back(statement_to_json(s));
    return j;
}

code::MethodRecord method_from_json(const json& j) {
    code::MethodRecord m;
    m.id = j.at("id").get<std::string>();
    m.file_path = j.at("file_path").get<std::string>();
    m.class_name = j.at("class_name").get<std::string>();
    m.name = j.at("name").get<std::string>();
    m.arity = j.at("arity").get<int>();
    m.signature = j.at("signature").get<std::string>();
    m.text = j.at("text").get<std::string>();
    m.body = j.at("body").get<std::string>();
    m.line_start = j.at("line_start").get<int>();
    m.line_end = j.at("line_end").get<int>();
    m.token_count = j.at("token_count").get<int>();
    for (const auto& s : j.at("statements")) m.statements.push_back(statement_from_json(s));
    return m;
}

json commit_to_json(const repo::CommitRecord& c, bool with_diff) {
    json j;
    j["sha"] = c.sha;
    j["author_name"] = c.author_name;
    j["author_email"] = c.author_email;
    j["timestamp"] = c.timestamp;
    j["message"] = c.message;
    if (with_diff) {
        j["diff"] = json::array();
        for (const auto& d : c.diff) {
            const char* kind = d.kind == repo::DiffLine::Kind::Added     ? "added"
                               : d.kind == repo::DiffLine::Kind::Deleted ? "deleted"
                                                                         : "modified";
            j["diff"].push_back({{"kind", kind}, {"text", d.text}, {"file", d.file_path}});
        }
    }
    return j;
}

repo::CommitRecord commit_from_json(const json& j) {
    repo::CommitRecord c;
    c.sha = j.at("sha").get<std::string>();
    c.author_name = j.at("author_name").get<std::string>();
    c.author_email = j.at("author_email").get<std::string>();
    c.timestamp = j.at("timestamp").get<UtcSeconds>();
    c.message = j.at("message").get<std::string>();
    if (j.contains("diff")) {
        for (const auto& d : j.at("diff")) {
            repo::DiffLine line;
            const std::string kind = d.at("kind").get<std::string>();
            line.kind = kind == "added"     ? repo::DiffLine::Kind::Added
                        : kind == "deleted" ? repo::DiffLine::Kind::Deleted
                                            : repo::DiffLine::Kind::Modified;
            line.text = d.at("text").get<std::string>();
            line.file_path = d.at("file").get<std::string>();
            c.diff.push_back(std::move(line));
        }
    }
    return c;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& row : rows) out << row.dump() << '\n';
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<json> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("malformed store line in " + path.string(), line_no);
        rows.push_back(std::move(j));
    }
    return rows;
}

}  // namespace

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

void save_store(const CorpusStore& store, const std::filesystem::path& dir,
                const PipelineConfig& config) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["config"] = json::parse(config_to_json(config));
    manifest["repos"] = json::array();
    for (const auto& repo : store.repos) {
        const auto repo_dir = dir / sanitize_dir(repo.name);
        std::filesystem::create_directories(repo_dir);

        std::vector<json> methods;
        for (const auto& m : repo.methods) methods.push_back(method_to_json(m));
        write_jsonl(repo_dir / "methods.jsonl", methods);

        std::vector<json> changes;
        for (const auto& c : repo.changes) {
            changes.push_back(json{{"method_id", c.method_id},
                                   {"commit", commit_to_json(c.commit, false)},
                                   {"changed", c.changed_statements}});
        }
        write_jsonl(repo_dir / "changes.jsonl", changes);

        std::vector<json> histories;
        for (const auto& [sha, commits] : repo.histories) {
            json h;
            h["commit_sha"] = sha;
            h["commits"] = json::array();
            for (const auto& c : commits) h["commits"].push_back(commit_to_json(c, true));
            histories.push_back(std::move(h));
        }
        write_jsonl(repo_dir / "history.jsonl", histories);

        repo::save_issue_export(repo.issues, repo_dir / "issues.json");

        std::ofstream release(repo_dir / "release.json");
        release << json{{"tag", repo.release.tag},
                        {"sha", repo.release.sha},
                        {"date", repo.release.date}}
                       .dump(2)
                << '\n';

        manifest["repos"].push_back(json{{"name", repo.name},
                                         {"dir", sanitize_dir(repo.name)},
                                         {"methods", repo.methods.size()},
                                         {"changes", repo.changes.size()},
                                         {"issues", repo.issues.size()}});
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write store manifest");
    out << manifest.dump(2) << '\n';
}

CorpusStore load_store(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("cannot read store manifest in " + dir.string());
    json manifest;
    in >> manifest;

    CorpusStore store;
    for (const auto& entry : manifest.at("repos")) {
        MinedRepo repo;
        repo.name = entry.at("name").get<std::string>();
        const auto repo_dir = dir / entry.at("dir").get<std::string>();

        for (const auto& j : read_jsonl(repo_dir / "methods.jsonl")) {
            repo.methods.push_back(method_from_json(j));
        }
        for (const auto& j : read_jsonl(repo_dir / "changes.jsonl")) {
            MinedChange change;
            change.method_id = j.at("method_id").get<std::string>();
            change.commit = commit_from_json(j.at("commit"));
            change.changed_statements = j.at("changed").get<std::vector<int>>();
            repo.changes.push_back(std::move(change));
        }
        for (const auto& j : read_jsonl(repo_dir / "history.jsonl")) {
            std::vector<repo::CommitRecord> commits;
            for (const auto& c : j.at("commits")) commits.push_back(commit_from_json(c));
            repo.histories[j.at("commit_sha").get<std::string>()] = std::move(commits);
        }
        repo.issues = repo::load_issue_export(repo_dir / "issues.json");

        std::ifstream rel(repo_dir / "release.json");
        json rj;
        rel >> rj;
        repo.release.tag = rj.at("tag").get<std::string>();
        repo.release.sha = rj.at("sha").get<std::string>();
        repo.release.date = rj.at("date").get<UtcSeconds>();

        store.repos.push_back(std::move(repo));
    }
    return store;
}

CorpusStore run_mine(const PipelineConfig& config, const std::filesystem::path& store_dir,
                     std::ostream& log) {
    CorpusStore store;
    for (const auto& repo_cfg : config.repos) {
        try {
            repo::GitRepo git(repo_cfg.path);

            // Repository filters; stars come from configuration.
            repo::RepoMeta meta;
            meta.name = repo_cfg.name;
            meta.stars = repo_cfg.stars;
            const auto& head_log = git.log();
            meta.commits = static_cast<long>(head_log.size());
            std::unordered_set<std::string> authors;
            for (const auto& e : head_log) authors.insert(to_lower_ascii(e.commit.author_email));
            meta.contributors = static_cast<long>(authors.size());
            std::vector<repo::IssueRecord> issues;
            if (!repo_cfg.issues.empty()) {
                issues = repo::load_issue_export(repo_cfg.issues);
            }
            meta.issues = static_cast<long>(issues.size());
            if (repo::select_repositories({meta}, config.min_commits, config.min_contributors,
                                          config.min_issues, config.min_stars)
                    .empty()) {
                log << "[mine] " << repo_cfg.name << ": filtered out (commits=" << meta.commits
                    << " contributors=" << meta.contributors << " issues=" << meta.issues
                    << " stars=" << meta.stars << ")\n";
                continue;
            }

            MinedRepo mined;
            mined.name = repo_cfg.name;
            mined.issues = std::move(issues);
            const std::string release_ref =
                repo_cfg.release.empty() ? std::string("HEAD") : repo_cfg.release;
            mined.release.tag = release_ref;
            mined.release.sha = git.resolve(release_ref);
            mined.release.date = git.commit_time(mined.release.sha);
            if (git.resolve("HEAD") != mined.release.sha) {
                log << "[mine] " << repo_cfg.name
                    << ": working tree is not checked out at release " << release_ref
                    << "; skipping\n";
                continue;
            }

            const auto files =
                repo::sample_files(repo_cfg.path, config.file_cap, config.seed);

            std::vector<std::vector<code::MethodRecord>> per_file(files.size());
            std::mutex log_mutex;
            parallel_for(files.size(), config.workers, [&](std::size_t i) {
                const auto full = std::filesystem::path(repo_cfg.path) / files[i];
                std::ifstream src(full);
                if (!src) return;
                std::string content((std::istreambuf_iterator<char>(src)),
                                    std::istreambuf_iterator<char>());
                try {
                    auto methods = code::extract_methods(
                        content, repo_cfg.name + "/" + files[i].generic_string());
                    per_file[i] = code::filter_by_length(methods, config.method_budget);
                } catch (const ParseError& e) {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    log << "[mine] skip unparsable file: " << e.what() << "\n";
                }
            });
            for (std::size_t i = 0; i < files.size(); ++i) {
                for (auto& m : per_file[i]) mined.methods.push_back(std::move(m));
            }

            for (const auto& method : mined.methods) {
                // method.file_path carries the repo-name prefix; git wants the
                // repo-relative path.
                const std::string rel = method.file_path.substr(repo_cfg.name.size() + 1);
                const auto change = repo::last_change_commit(method, mined.release, git, rel);
                if (!change) continue;
                MinedChange mc;
                mc.method_id = method.id;
                mc.commit = change->commit;
                mc.changed_statements.assign(change->statement_indices.begin(),
                                             change->statement_indices.end());
                if (!mined.histories.count(mc.commit.sha)) {
                    mined.histories[mc.commit.sha] = repo::developer_history(
                        mc.commit.author_name, mc.commit.author_email, mc.commit, git,
                        config.dev_history_limit, ".java", mined.release.sha);
                }
                mined.changes.push_back(std::move(mc));
            }

            log << "[mine] " << repo_cfg.name << ": " << mined.methods.size() << " methods, "
                << mined.changes.size() << " blamed changes, " << mined.issues.size()
                << " issues\n";
            store.repos.push_back(std::move(mined));
        } catch (const std::exception& e) {
            log << "[mine] " << repo_cfg.name << " failed: " << e.what() << "\n";
        }
    }
    save_store(store, store_dir, config);
    return store;
}

std::vector<data::MaskedInstance> instances_from_store(const CorpusStore& store) {
    std::vector<data::MaskedInstance> instances;
    for (const auto& repo : store.repos) {
        std::unordered_map<std::string, const code::MethodRecord*> by_id;
        for (const auto& m : repo.methods) by_id[m.id] = &m;
        for (const auto& change : repo.changes) {
            auto it = by_id.find(change.method_id);
            if (it == by_id.end()) continue;
            auto masked = data::mask_method(*it->second, change.changed_statements,
                                            change.commit, change.commit.timestamp, repo.name);
            for (auto& inst : masked) instances.push_back(std::move(inst));
        }
    }
    return data::dedup_instances(std::move(instances));
}

std::unique_ptr<rank::RankerBackend> make_ranker_backend(const PipelineConfig& config) {
    if (config.ranker_backend == "tfidf") {
        return std::make_unique<rank::TfIdfBackend>();
    }
    if (config.ranker_backend == "external") {
        if (config.ranker_command.empty()) {
            throw ConfigError("ranker.backend=external requires ranker.command");
        }
        return std::make_unique<rank::ExternalProcessBackend>("external", config.ranker_command);
    }
    throw ConfigError("unknown ranker backend '" + config.ranker_backend + "'");
}

namespace {

struct RepoContextData {
    const MinedRepo* mined = nullptr;
    std::unique_ptr<context::MethodIndex> index;
    graph::CallGraph call_graph;
};

}  // namespace

void run_build(const PipelineConfig& config, const std::filesystem::path& store_dir,
               const std::filesystem::path& out_dir, std::ostream& log) {
    const CorpusStore store = load_store(store_dir);
    const code::TokenCounter* counter = code::find_token_counter(config.token_counter);
    if (counter == nullptr) {
        throw ConfigError("unknown token counter '" + config.token_counter + "'");
    }

    auto instances = instances_from_store(store);
    log << "[build] " << instances.size() << " deduplicated instances\n";

    std::unordered_map<std::string, const MinedRepo*> repo_by_name;
    for (const auto& repo : store.repos) repo_by_name[repo.name] = &repo;

    // Issue availability decides dataset membership for the issue kinds.
    const bool any_issue_kind = std::any_of(
        config.datasets.begin(), config.datasets.end(), [](const DatasetSpec& d) {
            return std::find(d.kinds.begin(), d.kinds.end(), "issue_title") != d.kinds.end() ||
                   std::find(d.kinds.begin(), d.kinds.end(), "issue_body") != d.kinds.end();
        });
    std::unordered_set<std::string> has_open_issue;
    if (any_issue_kind) {
        for (const auto& inst : instances) {
            const MinedRepo* repo = repo_by_name.at(inst.repo);
            if (!repo::open_issues_at(repo->issues, inst.t).empty()) {
                has_open_issue.insert(inst.instance_id);
            }
        }
    }

    auto dataset_needs_issues = [](const DatasetSpec& d) {
        return std::find(d.kinds.begin(), d.kinds.end(), "issue_title") != d.kinds.end() ||
               std::find(d.kinds.begin(), d.kinds.end(), "issue_body") != d.kinds.end();
    };

    // Intersection across all configured datasets.
    std::set<std::string> surviving;
    if (config.datasets.size() >= 2) {
        std::map<std::string, std::vector<data::MaskedInstance>> per_dataset;
        for (const auto& spec : config.datasets) {
            std::vector<data::MaskedInstance> members;
            for (const auto& inst : instances) {
                if (dataset_needs_issues(spec) && !has_open_issue.count(inst.instance_id)) {
                    continue;
                }
                members.push_back(inst);
            }
            per_dataset[spec.name] = std::move(members);
        }
        surviving = data::intersect_datasets(per_dataset);
    } else {
        for (const auto& inst : instances) surviving.insert(inst.instance_id);
    }
    if (surviving.empty()) {
        throw Error("no instances survive the dataset intersection (mined " +
                    std::to_string(instances.size()) + ", with open issue " +
                    std::to_string(has_open_issue.size()) + ")");
    }

    std::vector<data::MaskedInstance> kept;
    for (auto& inst : instances) {
        if (surviving.count(inst.instance_id)) kept.push_back(std::move(inst));
    }
    log << "[build] " << kept.size() << " instances after intersection\n";

    const data::DatasetSplit split = data::split_dataset(kept, config.split_ratios, config.seed);
    std::unordered_map<std::string, char> split_of;
    for (const auto& id : split.train) split_of[id] = 't';
    for (const auto& id : split.eval) split_of[id] = 'e';
    for (const auto& id : split.test) split_of[id] = 's';

    // Training-set structures: retrieval pool and the trivial n-gram set are
    // computed from the train split only, so retrieval never sees eval/test.
    std::unordered_set<std::string> train_method_ids;
    for (const auto& inst : kept) {
        if (split_of[inst.instance_id] == 't') train_method_ids.insert(inst.method_id);
    }
    std::vector<const code::MethodRecord*> train_methods;
    std::unordered_map<std::string, const code::MethodRecord*> method_by_id;
    for (const auto& repo : store.repos) {
        for (const auto& m : repo.methods) {
            method_by_id[m.id] = &m;
            if (train_method_ids.count(m.id)) train_methods.push_back(&m);
        }
    }

    const bool needs_retrieval = std::any_of(
        config.datasets.begin(), config.datasets.end(), [](const DatasetSpec& d) {
            return std::find(d.kinds.begin(), d.kinds.end(), "most_similar_method") !=
                   d.kinds.end();
        });

    sim::TrivialNGramSet trivial(config.ngram_n_max, config.k_trivial);
    std::unique_ptr<context::RetrievalPool> pool;
    if (needs_retrieval) {
        if (train_methods.empty()) {
            throw Error("most_similar_method requires a non-empty training pool");
        }
        std::vector<std::vector<std::string>> corpus;
        std::string cache_key;
        for (const auto* m : train_methods) {
            corpus.push_back(code::token_texts(code::tokenize_code(m->text)));
            cache_key += m->id;
            cache_key += '\n';
        }
        cache_key += std::to_string(config.ngram_n_max) + ":" + std::to_string(config.k_trivial);

        const char* cache_env = std::getenv("CTX_CACHE");
        std::filesystem::path cache_file;
        if (cache_env != nullptr && *cache_env != '\0') {
            std::filesystem::create_directories(cache_env);
            cache_file = std::filesystem::path(cache_env) /
                         ("trivial_" + fnv1a64_hex(cache_key) + ".txt");
        }
        if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
            trivial = sim::TrivialNGramSet::load(cache_file, config.ngram_n_max, config.k_trivial);
            log << "[build] trivial n-grams loaded from cache\n";
        } else {
            trivial = sim::trivially_shared_ngrams(corpus, config.ngram_n_max, config.k_trivial);
            if (!cache_file.empty()) trivial.save(cache_file);
        }
        pool = std::make_unique<context::RetrievalPool>(train_methods);
    }

    std::map<std::string, RepoContextData> repo_data;
    for (const auto& repo : store.repos) {
        RepoContextData data;
        data.mined = &repo;
        data.index = std::make_unique<context::MethodIndex>(repo.methods);
        data.call_graph = graph::build_call_graph(repo.methods);
        repo_data[repo.name] = std::move(data);
    }

    auto backend = make_ranker_backend(config);
    std::mutex backend_mutex;

    std::vector<std::filesystem::path> written;
    auto cleanup = [&]() {
        for (const auto& path : written) {
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
    };

    try {
        std::filesystem::create_directories(out_dir);
        json manifest;
        manifest["config"] = json::parse(config_to_json(config));
        manifest["notes"] = json::array({
            "instance time t is the committer time of l_c",
            "trivial n-grams and the retrieval pool come from the train split only",
            "unmasked sibling chunks of a multi-chunk edit stay in post-edit form",
        });
        manifest["datasets"] = json::object();

        for (const auto& spec : config.datasets) {
            std::vector<const data::MaskedInstance*> members;
            for (const auto& inst : kept) {
                if (dataset_needs_issues(spec) && !has_open_issue.count(inst.instance_id)) {
                    continue;
                }
                members.push_back(&inst);
            }

            std::vector<data::DatasetRow> rows(members.size());
            parallel_for(members.size(), config.workers, [&](std::size_t i) {
                const data::MaskedInstance& inst = *members[i];
                const RepoContextData& rd = repo_data.at(inst.repo);

                std::vector<repo::IssueRecord> ranked;
                const bool wants_issue =
                    std::find(spec.kinds.begin(), spec.kinds.end(), "issue_title") !=
                        spec.kinds.end() ||
                    std::find(spec.kinds.begin(), spec.kinds.end(), "issue_body") !=
                        spec.kinds.end();
                if (wants_issue) {
                    const auto open = repo::open_issues_at(rd.mined->issues, inst.t);
                    std::lock_guard<std::mutex> lock(backend_mutex);
                    ranked = rank::rank_issues(inst, open, *backend);
                }

                std::vector<context::ContextBlock> blocks;
                for (const auto& kind_name : spec.kinds) {
                    const auto kind = *context::parse_kind(kind_name);
                    switch (kind) {
                        case context::ContextKind::MethodCalls:
                            blocks.push_back(
                                context::build_method_calls_context(inst, rd.call_graph));
                            break;
                        case context::ContextKind::ClassSignatures:
                            blocks.push_back(
                                context::build_class_signatures_context(inst, *rd.index));
                            break;
                        case context::ContextKind::MostSimilarMethod:
                            blocks.push_back(context::build_most_similar_method_context(
                                inst, *pool, trivial, config.retrieval_k));
                            break;
                        case context::ContextKind::IssueTitle:
                            blocks.push_back(context::build_issue_context(
                                inst, ranked, context::IssuePart::Title));
                            break;
                        case context::ContextKind::IssueBody:
                            blocks.push_back(context::build_issue_context(
                                inst, ranked, context::IssuePart::Body));
                            break;
                        case context::ContextKind::DevSimilarStatements: {
                            auto it = rd.mined->histories.find(inst.commit_sha);
                            static const std::vector<repo::CommitRecord> kEmpty;
                            blocks.push_back(context::build_dev_statements_context(
                                inst, it == rd.mined->histories.end() ? kEmpty : it->second,
                                config.dev_statements_top));
                            break;
                        }
                        case context::ContextKind::DevFrequentInvocations: {
                            auto it = rd.mined->histories.find(inst.commit_sha);
                            static const std::vector<repo::CommitRecord> kEmpty;
                            blocks.push_back(context::build_dev_invocations_context(
                                inst, it == rd.mined->histories.end() ? kEmpty : it->second,
                                config.dev_invocations_top));
                            break;
                        }
                    }
                }

                const auto composed = context::compose_input(
                    inst, blocks, config.input_budget, config.method_budget, *counter);
                data::DatasetRow row;
                row.instance_id = inst.instance_id;
                row.method_id = inst.method_id;
                row.input = composed.text;
                row.target = inst.target;
                row.context_kinds = spec.kinds;
                row.truncated_tokens = composed.truncated_tokens;
                row.repo = inst.repo;
                row.commit_sha = inst.commit_sha;
                row.t = inst.t;
                rows[i] = std::move(row);
            });

            const auto dataset_dir = out_dir / sanitize_dir(spec.name);
            std::filesystem::create_directories(dataset_dir);
            std::map<char, std::vector<data::DatasetRow>> by_split;
            for (auto& row : rows) by_split[split_of[row.instance_id]].push_back(std::move(row));

            const std::map<char, std::string> names = {{'t', "train"}, {'e', "eval"}, {'s', "test"}};
            json counts;
            for (const auto& [tag, file_name] : names) {
                const auto path = dataset_dir / (file_name + ".jsonl");
                data::write_dataset(by_split[tag], path);
                written.push_back(path);
                counts[file_name] = by_split[tag].size();
            }
            manifest["datasets"][spec.name] = counts;
            log << "[build] dataset " << spec.name << ": train=" << by_split['t'].size()
                << " eval=" << by_split['e'].size() << " test=" << by_split['s'].size() << "\n";
        }

        const auto manifest_path = out_dir / "manifest.json";
        std::ofstream out(manifest_path);
        if (!out) throw IoError("cannot write build manifest");
        out << manifest.dump(2) << '\n';
    } catch (...) {
        cleanup();
        throw;
    }
}

RankReport run_rank_issues(const PipelineConfig& config, const std::filesystem::path& store_dir,
                           const std::filesystem::path& out_file, std::ostream& log) {
    const CorpusStore store = load_store(store_dir);
    auto backend = make_ranker_backend(config);

    RankReport report;
    report.backend = std::string(backend->name());
    std::vector<int> list_lengths;
    double reciprocal_sum = 0.0;
    std::vector<json> rows;

    for (const auto& repo : store.repos) {
        std::unordered_map<std::string, const code::MethodRecord*> by_id;
        for (const auto& m : repo.methods) by_id[m.id] = &m;

        std::vector<data::MaskedInstance> instances;
        for (const auto& change : repo.changes) {
            auto it = by_id.find(change.method_id);
            if (it == by_id.end()) continue;
            auto masked = data::mask_method(*it->second, change.changed_statements,
                                            change.commit, change.commit.timestamp, repo.name);
            for (auto& inst : masked) instances.push_back(std::move(inst));
        }
        instances = data::dedup_instances(std::move(instances));

        const auto pairs = rank::build_linked_pairs(instances, repo.issues);
        std::unordered_map<std::string, const data::MaskedInstance*> inst_by_id;
        for (const auto& inst : instances) inst_by_id[inst.instance_id] = &inst;

        for (const auto& pair : pairs) {
            const data::MaskedInstance& inst = *inst_by_id.at(pair.instance_id);
            const auto open = repo::open_issues_at(repo.issues, inst.t);
            const auto ranked = rank::rank_issues(inst, open, *backend);
            long rank_pos = 0;
            std::vector<long> ranked_ids;
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                ranked_ids.push_back(ranked[i].id);
                if (ranked[i].id == pair.issue_id) rank_pos = static_cast<long>(i) + 1;
            }
            if (rank_pos == 0) continue;
            reciprocal_sum += 1.0 / static_cast<double>(rank_pos);
            list_lengths.push_back(static_cast<int>(ranked.size()));
            ++report.queries;
            rows.push_back(json{{"instance_id", pair.instance_id},
                                {"relevant", pair.issue_id},
                                {"rank", rank_pos},
                                {"ranked_ids", ranked_ids}});
        }
    }

    if (report.queries > 0) {
        report.backend_mrr = reciprocal_sum / static_cast<double>(report.queries);
        report.random_mrr = rank::random_baseline_mrr(list_lengths, 10000, config.seed);
    }
    log << "[rank-issues] " << report.queries << " linked queries, MRR=" << report.backend_mrr
        << " (random baseline " << report.random_mrr << ")\n";

    json out;
    out["backend"] = report.backend;
    out["queries"] = report.queries;
    out["mrr"] = report.backend_mrr;
    out["random_mrr"] = report.random_mrr;
    out["rankings"] = rows;
    std::ofstream f(out_file);
    if (!f) throw IoError("cannot write " + out_file.string());
    f << out.dump(2) << '\n';
    return report;
}

}  // namespace ctxmine::pipeline
