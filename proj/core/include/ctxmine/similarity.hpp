#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctxmine/method.hpp"

namespace ctxmine::sim {

enum class Metric { Jaccard, CrystalBleu, StatementOverlap };

struct SimilarityScore {
    double value = 0.0;
    Metric metric = Metric::Jaccard;
};

// N-grams a corpus shares "trivially": the k most frequent per order n in
// [1, n_max]. CrystalBLEU deletes these from both sides before matching.
class TrivialNGramSet {
public:
    TrivialNGramSet() = default;
    TrivialNGramSet(int n_max, int k_trivial) : n_max_(n_max), k_trivial_(k_trivial) {}

    int n_max() const { return n_max_; }
    int k_trivial() const { return k_trivial_; }
    std::size_t size() const { return grams_.size(); }
    bool contains(const std::string& joined) const { return grams_.count(joined) > 0; }
    void insert(const std::string& joined) { grams_.insert(joined); }
    const std::unordered_set<std::string>& grams() const { return grams_; }

    // Cache format: one n-gram per line, tokens space-separated, sorted.
    void save(const std::filesystem::path& path) const;
    static TrivialNGramSet load(const std::filesystem::path& path, int n_max, int k_trivial);

private:
    int n_max_ = 4;
    int k_trivial_ = 500;
    std::unordered_set<std::string> grams_;
};

// Joins an n-gram window with an unambiguous separator for set keys.
std::string join_ngram(std::span<const std::string> window);

SimilarityScore jaccard(std::span<const std::string> a, std::span<const std::string> b);

// Throws EmptyCorpus. Frequency ties break lexicographically on the joined
// gram so two runs over the same corpus agree.
TrivialNGramSet trivially_shared_ngrams(const std::vector<std::vector<std::string>>& corpus,
                                        int n_max = 4, int k_trivial = 500);

// BLEU over orders 1..n_max after deleting trivial n-grams from both sides.
// Zero-match orders get add-one smoothing; orders with no surviving candidate
// n-grams are skipped. Standard brevity penalty. Throws EmptySequence.
SimilarityScore crystal_bleu(std::span<const std::string> candidate,
                             std::span<const std::string> reference,
                             const TrivialNGramSet& trivial);

// |set(S) ∩ set(M)| / |set(S)| over preprocessed term sets; 0 when the
// statement has no terms left after filtering.
SimilarityScore statement_overlap(std::span<const std::string> statement_terms,
                                  std::span<const std::string> method_terms);

// Two-stage retrieval: Jaccard prefilter to the top k (ties by pool order),
// CrystalBLEU re-rank (ties by higher Jaccard, then pool order). Returns the
// winning pool index. Throws EmptyPool.
std::size_t pick_most_similar(std::span<const std::string> query_tokens,
                              const std::vector<std::vector<std::string>>& pool_tokens,
                              std::size_t k, const TrivialNGramSet& trivial);

// Same, over method records; tokens are derived from each method's text.
const code::MethodRecord& retrieve_most_similar(std::span<const std::string> query_tokens,
                                                std::span<const code::MethodRecord> pool,
                                                std::size_t k, const TrivialNGramSet& trivial);

}  // namespace ctxmine::sim
