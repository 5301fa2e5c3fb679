#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctxmine/dataset.hpp"
#include "ctxmine/process.hpp"
#include "ctxmine/repo_types.hpp"

namespace ctxmine::rank {

// Scores issues against a query; higher means more relevant. Implementations
// must be deterministic. score_batch scores every issue of one query at once
// so an embedding backend can amortize its work.
class RankerBackend {
public:
    virtual ~RankerBackend() = default;
    virtual std::string_view name() const = 0;
    virtual std::vector<double> score_batch(
        const std::vector<std::string>& query_terms,
        const std::vector<std::vector<std::string>>& issue_terms) = 0;
};

// Default lexical backend: TF-IDF cosine. Term frequency is the raw count,
// inverse document frequency is ln(N/df) over the open-issue set per query.
class TfIdfBackend final : public RankerBackend {
public:
    std::string_view name() const override { return "tfidf"; }
    std::vector<double> score_batch(
        const std::vector<std::string>& query_terms,
        const std::vector<std::vector<std::string>>& issue_terms) override;
};

// Bridges to any external scorer over a child-process pipe. One JSON request
// per line: {"query_terms":[...], "issue_terms":[[...],...]}; one JSON
// response per line: {"scores":[...]}.
class ExternalProcessBackend final : public RankerBackend {
public:
    ExternalProcessBackend(std::string name, const std::vector<std::string>& argv);
    std::string_view name() const override { return name_; }
    std::vector<double> score_batch(
        const std::vector<std::string>& query_terms,
        const std::vector<std::vector<std::string>>& issue_terms) override;

private:
    std::string name_;
    LineProcess process_;
};

struct LinkedPair {
    std::string instance_id;
    long issue_id = 0;
    UtcSeconds t = 0;
};

// Pairs each instance with the open issue its l_c commit message references,
// when there is one.
std::vector<LinkedPair> build_linked_pairs(std::span<const data::MaskedInstance> instances,
                                           const std::vector<repo::IssueRecord>& issues);

// Issues sorted by descending backend score of (instance terms, title+body
// terms); ties by issue id ascending.
std::vector<repo::IssueRecord> rank_issues(const data::MaskedInstance& inst,
                                           const std::vector<repo::IssueRecord>& open_issues,
                                           RankerBackend& backend);

// Mean over queries of 1/rank(relevant). Throws RelevantMissing when a
// relevant id does not appear in its ranked list.
double mean_reciprocal_rank(
    const std::vector<std::pair<std::vector<long>, long>>& rankings);

// Monte-Carlo MRR of a uniformly random ranker over the given list lengths;
// for a single length n this converges to H(n)/n.
double random_baseline_mrr(const std::vector<int>& list_lengths, int trials, std::uint64_t seed);

}  // namespace ctxmine::rank
