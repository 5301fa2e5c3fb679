#include <doctest.h>

#include <random>

#include "ctxmine/strings.hpp"
#include "ctxmine/terms.hpp"

using namespace ctxmine::code;
using ctxmine::join;

TEST_CASE("split_camel_case basic splits") {
    CHECK(split_camel_case("handleDataProcessException") ==
          std::vector<std::string>{"handle", "data", "process", "exception"});
    CHECK(split_camel_case("x") == std::vector<std::string>{"x"});
    // Acronym rule: the run of capitals splits before its last member.
    CHECK(split_camel_case("HTTPServer2") == std::vector<std::string>{"http", "server2"});
    CHECK(split_camel_case("closeConnection") == std::vector<std::string>{"close", "connection"});
    CHECK(split_camel_case("snake_case_name") ==
          std::vector<std::string>{"snake", "case", "name"});
    CHECK(split_camel_case("v2Engine") == std::vector<std::string>{"v2", "engine"});
}

TEST_CASE("split_camel_case concatenation invariant") {
    std::mt19937_64 rng(11);
    const std::string alphabet = "abcDEFgh_19$Z";
    for (int trial = 0; trial < 300; ++trial) {
        std::string ident;
        const int len = 1 + static_cast<int>(rng() % 18);
        for (int i = 0; i < len; ++i) ident.push_back(alphabet[rng() % alphabet.size()]);
        std::string lowered;
        for (char c : ident) {
            if (c != '_') lowered.push_back(static_cast<char>(std::tolower(c)));
        }
        CAPTURE(ident);
        CHECK(join(split_camel_case(ident), "") == lowered);
    }
}

TEST_CASE("preprocess_terms drops keywords and punctuation") {
    CHECK(preprocess_terms("public void closeConnection()") ==
          std::vector<std::string>{"close", "connection"});
    CHECK(preprocess_terms("if (x) return;") == std::vector<std::string>{"x"});
    // Plain English goes through the same pipeline; "in" is not a Java keyword.
    CHECK(preprocess_terms("Fix NPE in DataProcessor") ==
          std::vector<std::string>{"fix", "npe", "in", "data", "processor"});
}

TEST_CASE("preprocess_terms output carries no reserved words or punctuation") {
    const auto& keywords = java_keywords();
    const std::string inputs[] = {
        "public static void main(String[] args) { System.out.println(\"hi there\"); }",
        "while (true) { x += 1.5; /* tick */ }",
        "class Foo extends Bar implements Baz { int count = 0; }",
    };
    for (const auto& input : inputs) {
        for (const auto& term : preprocess_terms(input)) {
            CAPTURE(term);
            CHECK(keywords.count(term) == 0);
            for (char c : term) {
                CHECK(std::isalnum(static_cast<unsigned char>(c)));
            }
        }
    }
}
