#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "ctxmine/errors.hpp"
#include "ctxmine/similarity.hpp"

using namespace ctxmine::sim;

namespace {

using Tokens = std::vector<std::string>;

// Brute-force re-ranking oracle: CrystalBLEU against every pool member with
// the retrieval tie rules (higher Jaccard, then pool order).
std::size_t brute_force_best(const Tokens& query, const std::vector<Tokens>& pool,
                             const TrivialNGramSet& trivial) {
    std::size_t best = 0;
    double best_cb = -1.0, best_jac = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double jac = jaccard(query, pool[i]).value;
        const double cb = pool[i].empty() ? 0.0 : crystal_bleu(pool[i], query, trivial).value;
        if (cb > best_cb || (cb == best_cb && jac > best_jac)) {
            best = i;
            best_cb = cb;
            best_jac = jac;
        }
    }
    return best;
}

std::vector<Tokens> random_pool(std::mt19937_64& rng, std::size_t size) {
    const std::vector<std::string> vocab = {
        "if",   "(",    ")",   "{",    "}",  ";",      "=",    "x",   "y",   "count",
        "list", "get",  "add", "size", "i",  "return", "for",  "++",  "<",   "0",
        "1",    "null", "==",  "new",  "map", "key",   "value", "put", ".",  "close",
    };
    std::vector<Tokens> pool(size);
    for (auto& method : pool) {
        const std::size_t len = 5 + rng() % 36;
        for (std::size_t i = 0; i < len; ++i) {
            method.push_back(vocab[rng() % vocab.size()]);
        }
    }
    return pool;
}

}  // namespace

TEST_CASE("jaccard basics") {
    CHECK(jaccard(Tokens{"a", "b"}, Tokens{"a", "b"}).value == doctest::Approx(1.0));
    CHECK(jaccard(Tokens{"a"}, Tokens{"b"}).value == doctest::Approx(0.0));
    // |{a,b,c} ∩ {b,c,d}| = 2, |union| = 4.
    CHECK(jaccard(Tokens{"a", "b", "c"}, Tokens{"b", "c", "d"}).value == doctest::Approx(0.5));
    // Multiset duplicates fold into the set.
    CHECK(jaccard(Tokens{"a", "a", "b"}, Tokens{"a", "b", "b"}).value == doctest::Approx(1.0));
    CHECK(jaccard(Tokens{}, Tokens{}).value == doctest::Approx(1.0));
    // Symmetry.
    std::mt19937_64 rng(3);
    auto pool = random_pool(rng, 20);
    for (std::size_t i = 0; i + 1 < pool.size(); i += 2) {
        CHECK(jaccard(pool[i], pool[i + 1]).value ==
              doctest::Approx(jaccard(pool[i + 1], pool[i]).value));
    }
}

TEST_CASE("trivially_shared_ngrams picks the most frequent per order") {
    SUBCASE("single dominant unigram") {
        const std::vector<Tokens> corpus = {{"a", "a", "a"}};
        const auto trivial = trivially_shared_ngrams(corpus, 4, 1);
        CHECK(trivial.contains("a"));
    }
    SUBCASE("semicolon dominates a synthetic corpus") {
        // Brute-force count: ';' appears 6 times, every other token at most 2.
        const std::vector<Tokens> corpus = {
            {"x", "=", "1", ";", "y", "=", "2", ";", ";"},
            {"z", ";", ";", ";"},
        };
        const auto trivial = trivially_shared_ngrams(corpus, 2, 1);
        CHECK(trivial.contains(";"));
        CHECK_FALSE(trivial.contains("x"));
    }
    SUBCASE("deterministic across runs") {
        std::mt19937_64 rng(17);
        const auto pool = random_pool(rng, 30);
        const auto a = trivially_shared_ngrams(pool, 4, 10);
        const auto b = trivially_shared_ngrams(pool, 4, 10);
        CHECK(a.grams() == b.grams());
        CHECK(a.size() <= 4u * 10u);
    }
    CHECK_THROWS_AS(trivially_shared_ngrams({}, 4, 500), ctxmine::EmptyCorpus);
}

TEST_CASE("trivial n-gram set round-trips through its cache file") {
    const std::vector<Tokens> corpus = {{"a", "b", "a", "b", "c", ";", ";", ";"}};
    const auto trivial = trivially_shared_ngrams(corpus, 3, 2);
    const auto path = std::filesystem::temp_directory_path() / "ctxmine_trivial_test.txt";
    trivial.save(path);
    const auto loaded = TrivialNGramSet::load(path, 3, 2);
    CHECK(loaded.grams() == trivial.grams());
    std::filesystem::remove(path);
}

TEST_CASE("crystal_bleu identity and floor") {
    const TrivialNGramSet empty_trivial(4, 500);
    const Tokens x = {"if", "(", "a", ")", "return", "b", ";"};
    CHECK(crystal_bleu(x, x, empty_trivial).value == doctest::Approx(1.0));

    // 30 disjoint tokens each side: every order smooths, and the geometric
    // mean (1/31 * 1/30 * 1/29 * 1/28)^(1/4) ~= 0.034 sits under 0.05.
    Tokens left, right;
    for (int i = 0; i < 30; ++i) {
        left.push_back("l" + std::to_string(i));
        right.push_back("r" + std::to_string(i));
    }
    const double floor_score = crystal_bleu(left, right, empty_trivial).value;
    CHECK(floor_score < 0.05);
    CHECK(floor_score > 0.0);

    CHECK_THROWS_AS(crystal_bleu({}, x, empty_trivial), ctxmine::EmptySequence);
    CHECK_THROWS_AS(crystal_bleu(x, {}, empty_trivial), ctxmine::EmptySequence);
}

TEST_CASE("trivial-only overlap scores strictly lower than with no trivial set") {
    // Hand-enumerated on the 6-token pair below (shared content: "a b").
    //   trivial = {}: p1=2/6, p2=1/5, p3=1/(4+1), p4=1/(3+1)
    //     -> (1/300)^(1/4) = 0.240281...
    //   trivial = {a, b, a b}: p1=1/5, p2=1/5, p3=1/5, p4=1/4
    //     -> (1/500)^(1/4) = 0.211474...
    const Tokens cand = {"a", "b", "x1", "x2", "x3", "x4"};
    const Tokens ref = {"a", "b", "y1", "y2", "y3", "y4"};

    const TrivialNGramSet none(4, 500);
    TrivialNGramSet shared(4, 500);
    shared.insert("a");
    shared.insert("b");
    shared.insert(join_ngram(Tokens{"a", "b"}));

    const double with_none = crystal_bleu(cand, ref, none).value;
    const double with_trivial = crystal_bleu(cand, ref, shared).value;
    CHECK(with_none == doctest::Approx(0.2402811).epsilon(1e-5));
    CHECK(with_trivial == doctest::Approx(0.2114743).epsilon(1e-5));
    CHECK(with_trivial < with_none);
}

TEST_CASE("crystal_bleu identity holds with a trivial set present") {
    TrivialNGramSet trivial(4, 500);
    trivial.insert(";");
    const Tokens x = {"a", ";", "b", ";", "c"};
    CHECK(crystal_bleu(x, x, trivial).value == doctest::Approx(1.0));
}

TEST_CASE("statement_overlap ratios") {
    // Terms already preprocessed.
    CHECK(statement_overlap(Tokens{"open", "stream"}, Tokens{"open", "x", "y"}).value ==
          doctest::Approx(0.5));
    CHECK(statement_overlap(Tokens{"open"}, Tokens{"open", "z"}).value == doctest::Approx(1.0));
    CHECK(statement_overlap(Tokens{"a"}, Tokens{"b"}).value == doctest::Approx(0.0));
    CHECK(statement_overlap(Tokens{}, Tokens{"b"}).value == doctest::Approx(0.0));
}

TEST_CASE("retrieval equals the brute-force oracle when k covers the pool") {
    std::mt19937_64 rng(29);
    const auto pool = random_pool(rng, 50);
    const auto trivial = trivially_shared_ngrams(pool, 4, 5);
    for (int q = 0; q < 40; ++q) {
        Tokens query = pool[rng() % pool.size()];
        if (q % 2 == 0) {
            std::shuffle(query.begin(), query.end(), rng);
            query.resize(std::max<std::size_t>(3, query.size() / 2));
        }
        const std::size_t expected = brute_force_best(query, pool, trivial);
        const std::size_t got = pick_most_similar(query, pool, pool.size(), trivial);
        CHECK(got == expected);
    }
}

TEST_CASE("retrieval finds an exact copy of the query") {
    std::mt19937_64 rng(31);
    auto pool = random_pool(rng, 10);
    const Tokens query = pool[7];
    const auto trivial = trivially_shared_ngrams(pool, 4, 3);
    CHECK(pick_most_similar(query, pool, 20, trivial) == 7);
}

TEST_CASE("under-k pools degenerate to the full re-rank") {
    std::mt19937_64 rng(37);
    const auto pool = random_pool(rng, 3);
    const auto trivial = trivially_shared_ngrams(pool, 4, 2);
    const Tokens query = pool[1];
    CHECK(pick_most_similar(query, pool, 20, trivial) ==
          brute_force_best(query, pool, trivial));
}

TEST_CASE("enlarging k never lowers the winner's crystal_bleu score") {
    std::mt19937_64 rng(41);
    const auto pool = random_pool(rng, 25);
    const auto trivial = trivially_shared_ngrams(pool, 4, 4);
    for (int q = 0; q < 10; ++q) {
        Tokens query = pool[rng() % pool.size()];
        std::shuffle(query.begin(), query.end(), rng);
        double prev = -1.0;
        for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{5}, std::size_t{10},
                              std::size_t{25}}) {
            const std::size_t idx = pick_most_similar(query, pool, k, trivial);
            const double cb = crystal_bleu(pool[idx], query, trivial).value;
            CHECK(cb >= prev - 1e-12);
            prev = cb;
        }
    }
}

TEST_CASE("empty pool throws") {
    const TrivialNGramSet trivial(4, 500);
    CHECK_THROWS_AS(pick_most_similar(Tokens{"a"}, {}, 20, trivial), ctxmine::EmptyPool);
}

TEST_CASE("scores stay within [0, 1]") {
    std::mt19937_64 rng(43);
    const auto pool = random_pool(rng, 30);
    const auto trivial = trivially_shared_ngrams(pool, 4, 5);
    for (std::size_t i = 0; i + 1 < pool.size(); i += 2) {
        const double j = jaccard(pool[i], pool[i + 1]).value;
        const double c = crystal_bleu(pool[i], pool[i + 1], trivial).value;
        CHECK(j >= 0.0);
        CHECK(j <= 1.0);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
    }
}
