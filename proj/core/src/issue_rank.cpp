#include "ctxmine/issue_rank.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ctxmine/errors.hpp"
#include "ctxmine/terms.hpp"

namespace ctxmine::rank {

std::vector<double> TfIdfBackend::score_batch(
    const std::vector<std::string>& query_terms,
    const std::vector<std::vector<std::string>>& issue_terms) {
    const std::size_t n = issue_terms.size();
    std::vector<double> scores(n, 0.0);
    if (n == 0) return scores;

    std::unordered_map<std::string, int> df;
    for (const auto& doc : issue_terms) {
        std::unordered_set<std::string> distinct(doc.begin(), doc.end());
        for (const auto& term : distinct) ++df[term];
    }
    auto idf = [&](const std::string& term) {
        auto it = df.find(term);
        if (it == df.end()) return 0.0;
        return std::log(static_cast<double>(n) / static_cast<double>(it->second));
    };

    std::unordered_map<std::string, int> query_tf;
    for (const auto& term : query_terms) ++query_tf[term];
    std::unordered_map<std::string, double> query_vec;
    double query_norm2 = 0.0;
    for (const auto& [term, tf] : query_tf) {
        const double w = tf * idf(term);
        query_vec[term] = w;
        query_norm2 += w * w;
    }
    if (query_norm2 == 0.0) return scores;

    for (std::size_t i = 0; i < n; ++i) {
        std::unordered_map<std::string, int> tf;
        for (const auto& term : issue_terms[i]) ++tf[term];
        double dot = 0.0, norm2 = 0.0;
        for (const auto& [term, count] : tf) {
            const double w = count * idf(term);
            norm2 += w * w;
            auto it = query_vec.find(term);
            if (it != query_vec.end()) dot += w * it->second;
        }
        if (norm2 > 0.0) scores[i] = dot / std::sqrt(norm2 * query_norm2);
    }
    return scores;
}

ExternalProcessBackend::ExternalProcessBackend(std::string name,
                                               const std::vector<std::string>& argv)
    : name_(std::move(name)), process_(argv) {}

std::vector<double> ExternalProcessBackend::score_batch(
    const std::vector<std::string>& query_terms,
    const std::vector<std::vector<std::string>>& issue_terms) {
    nlohmann::json request;
    request["query_terms"] = query_terms;
    request["issue_terms"] = issue_terms;
    process_.write_line(request.dump());
    nlohmann::json response = nlohmann::json::parse(process_.read_line(), nullptr, false);
    if (response.is_discarded() || !response.contains("scores")) {
        throw IoError("external ranker backend returned a malformed response");
    }
    auto scores = response.at("scores").get<std::vector<double>>();
    if (scores.size() != issue_terms.size()) {
        throw IoError("external ranker backend returned " + std::to_string(scores.size()) +
                      " scores for " + std::to_string(issue_terms.size()) + " issues");
    }
    return scores;
}

std::vector<LinkedPair> build_linked_pairs(std::span<const data::MaskedInstance> instances,
                                           const std::vector<repo::IssueRecord>& issues) {
    std::vector<LinkedPair> pairs;
    for (const auto& inst : instances) {
        const auto open = repo::open_issues_at(issues, inst.t);
        const auto id = repo::link_commit_to_issue(inst.commit_message, open);
        if (id) pairs.push_back(LinkedPair{inst.instance_id, *id, inst.t});
    }
    return pairs;
}

std::vector<repo::IssueRecord> rank_issues(const data::MaskedInstance& inst,
                                           const std::vector<repo::IssueRecord>& open_issues,
                                           RankerBackend& backend) {
    if (open_issues.empty()) return {};
    const auto query = code::preprocess_terms(inst.im_text);
    std::vector<std::vector<std::string>> issue_terms;
    issue_terms.reserve(open_issues.size());
    for (const auto& issue : open_issues) {
        issue_terms.push_back(code::preprocess_terms(issue.title + " " + issue.body));
    }
    const auto scores = backend.score_batch(query, issue_terms);

    std::vector<std::size_t> order(open_issues.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return open_issues[a].id < open_issues[b].id;
    });
    std::vector<repo::IssueRecord> ranked;
    ranked.reserve(order.size());
    for (std::size_t i : order) ranked.push_back(open_issues[i]);
    return ranked;
}

double mean_reciprocal_rank(
    const std::vector<std::pair<std::vector<long>, long>>& rankings) {
    if (rankings.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [ranked, relevant] : rankings) {
        auto it = std::find(ranked.begin(), ranked.end(), relevant);
        if (it == ranked.end()) {
            throw RelevantMissing("relevant issue " + std::to_string(relevant) +
                                  " missing from its ranked list");
        }
        sum += 1.0 / static_cast<double>(std::distance(ranked.begin(), it) + 1);
    }
    return sum / static_cast<double>(rankings.size());
}

double random_baseline_mrr(const std::vector<int>& list_lengths, int trials,
                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double sum = 0.0;
    long count = 0;
    for (int trial = 0; trial < trials; ++trial) {
        for (int n : list_lengths) {
            // A uniformly random permutation puts the relevant item at a
            // uniformly random rank.
            std::uniform_int_distribution<int> rank(1, n);
            sum += 1.0 / static_cast<double>(rank(rng));
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace ctxmine::rank
