#include "ctxmine/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ctxmine/errors.hpp"
#include "ctxmine/lexer.hpp"
#include "ctxmine/strings.hpp"

namespace ctxmine::sim {
namespace {

constexpr char kGramSep = '\x1f';

std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> tokens, int n,
                                                  const TrivialNGramSet* trivial) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        std::string key = join_ngram(tokens.subspan(i, static_cast<std::size_t>(n)));
        if (trivial != nullptr && trivial->contains(key)) continue;
        ++counts[std::move(key)];
    }
    return counts;
}

}  // namespace

std::string join_ngram(std::span<const std::string> window) {
    std::string key;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (i > 0) key.push_back(kGramSep);
        key.append(window[i]);
    }
    return key;
}

void TrivialNGramSet::save(const std::filesystem::path& path) const {
    std::vector<std::string> lines;
    lines.reserve(grams_.size());
    for (const auto& g : grams_) {
        std::string line = g;
        std::replace(line.begin(), line.end(), kGramSep, ' ');
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& line : lines) out << line << '\n';
}

TrivialNGramSet TrivialNGramSet::load(const std::filesystem::path& path, int n_max,
                                      int k_trivial) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    TrivialNGramSet set(n_max, k_trivial);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::string key = line;
        std::replace(key.begin(), key.end(), ' ', kGramSep);
        set.insert(key);
    }
    return set;
}

SimilarityScore jaccard(std::span<const std::string> a, std::span<const std::string> b) {
    std::unordered_set<std::string> sa(a.begin(), a.end());
    std::unordered_set<std::string> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty()) return {1.0, Metric::Jaccard};
    std::size_t intersection = 0;
    for (const auto& t : sa) {
        if (sb.count(t)) ++intersection;
    }
    const std::size_t uni = sa.size() + sb.size() - intersection;
    return {static_cast<double>(intersection) / static_cast<double>(uni), Metric::Jaccard};
}

TrivialNGramSet trivially_shared_ngrams(const std::vector<std::vector<std::string>>& corpus,
                                        int n_max, int k_trivial) {
    if (corpus.empty()) throw EmptyCorpus("trivially_shared_ngrams: empty corpus");
    TrivialNGramSet result(n_max, k_trivial);
    for (int n = 1; n <= n_max; ++n) {
        std::unordered_map<std::string, long> counts;
        for (const auto& snippet : corpus) {
            if (static_cast<int>(snippet.size()) < n) continue;
            for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= snippet.size(); ++i) {
                ++counts[join_ngram(std::span<const std::string>(snippet).subspan(
                    i, static_cast<std::size_t>(n)))];
            }
        }
        std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second > y.second;
            return x.first < y.first;
        });
        const std::size_t keep = std::min(ranked.size(), static_cast<std::size_t>(k_trivial));
        for (std::size_t i = 0; i < keep; ++i) result.insert(ranked[i].first);
    }
    return result;
}

SimilarityScore crystal_bleu(std::span<const std::string> candidate,
                             std::span<const std::string> reference,
                             const TrivialNGramSet& trivial) {
    if (candidate.empty() || reference.empty()) {
        throw EmptySequence("crystal_bleu: empty token sequence");
    }
    double log_sum = 0.0;
    int orders_used = 0;
    for (int n = 1; n <= trivial.n_max(); ++n) {
        const auto cand = ngram_counts(candidate, n, &trivial);
        if (cand.empty()) continue;
        const auto ref = ngram_counts(reference, n, &trivial);
        long total = 0, matched = 0;
        for (const auto& [gram, count] : cand) {
            total += count;
            auto it = ref.find(gram);
            if (it != ref.end()) matched += std::min<long>(count, it->second);
        }
        const double p = matched > 0
                             ? static_cast<double>(matched) / static_cast<double>(total)
                             : 1.0 / static_cast<double>(total + 1);
        log_sum += std::log(p);
        ++orders_used;
    }
    if (orders_used == 0) return {0.0, Metric::CrystalBleu};
    const double geo = std::exp(log_sum / orders_used);
    const double c = static_cast<double>(candidate.size());
    const double r = static_cast<double>(reference.size());
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return {std::clamp(geo * bp, 0.0, 1.0), Metric::CrystalBleu};
}

SimilarityScore statement_overlap(std::span<const std::string> statement_terms,
                                  std::span<const std::string> method_terms) {
    std::unordered_set<std::string> stmt(statement_terms.begin(), statement_terms.end());
    if (stmt.empty()) return {0.0, Metric::StatementOverlap};
    std::unordered_set<std::string> method(method_terms.begin(), method_terms.end());
    std::size_t hit = 0;
    for (const auto& t : stmt) {
        if (method.count(t)) ++hit;
    }
    return {static_cast<double>(hit) / static_cast<double>(stmt.size()),
            Metric::StatementOverlap};
}

std::size_t pick_most_similar(std::span<const std::string> query_tokens,
                              const std::vector<std::vector<std::string>>& pool_tokens,
                              std::size_t k, const TrivialNGramSet& trivial) {
    if (pool_tokens.empty()) throw EmptyPool("pick_most_similar: empty pool");

    std::vector<double> jac(pool_tokens.size());
    for (std::size_t i = 0; i < pool_tokens.size(); ++i) {
        jac[i] = jaccard(query_tokens, pool_tokens[i]).value;
    }
    std::vector<std::size_t> order(pool_tokens.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return jac[a] > jac[b]; });
    const std::size_t cut = std::min(k, order.size());

    std::size_t best = order[0];
    double best_cb = -1.0, best_jac = -1.0;
    for (std::size_t rank = 0; rank < cut; ++rank) {
        const std::size_t idx = order[rank];
        double cb = 0.0;
        if (!pool_tokens[idx].empty() && !query_tokens.empty()) {
            cb = crystal_bleu(pool_tokens[idx], query_tokens, trivial).value;
        }
        const bool wins =
            cb > best_cb || (cb == best_cb && jac[idx] > best_jac) ||
            (cb == best_cb && jac[idx] == best_jac && idx < best);
        if (wins) {
            best = idx;
            best_cb = cb;
            best_jac = jac[idx];
        }
    }
    return best;
}

const code::MethodRecord& retrieve_most_similar(std::span<const std::string> query_tokens,
                                                std::span<const code::MethodRecord> pool,
                                                std::size_t k, const TrivialNGramSet& trivial) {
    if (pool.empty()) throw EmptyPool("retrieve_most_similar: empty pool");
    std::vector<std::vector<std::string>> pool_tokens;
    pool_tokens.reserve(pool.size());
    for (const auto& m : pool) {
        pool_tokens.push_back(code::token_texts(code::tokenize_code(m.text)));
    }
    return pool[pick_most_similar(query_tokens, pool_tokens, k, trivial)];
}

}  // namespace ctxmine::sim
