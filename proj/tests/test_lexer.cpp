#include <doctest.h>

#include <random>
#include <string>

#include "ctxmine/lexer.hpp"
#include "ctxmine/token_counter.hpp"

using namespace ctxmine::code;

namespace {

std::string non_whitespace(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

// Joins token texts with single spaces, then strips whitespace so literal and
// comment tokens (which may carry interior spaces) compare cleanly.
std::string joined_tokens(const std::string& input) {
    std::string out;
    for (const auto& t : tokenize_code(input)) {
        out += t.text;
        out += ' ';
    }
    return non_whitespace(out);
}

}  // namespace

TEST_CASE("tokenize classifies a simple declaration") {
    const auto toks = tokenize_code("int x = 0;");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0].text == "int");
    CHECK(toks[0].kind == TokenKind::Keyword);
    CHECK(toks[1].text == "x");
    CHECK(toks[1].kind == TokenKind::Identifier);
    CHECK(toks[2].text == "=");
    CHECK(toks[2].kind == TokenKind::Operator);
    CHECK(toks[3].text == "0");
    CHECK(toks[3].kind == TokenKind::Literal);
    CHECK(toks[4].text == ";");
    CHECK(toks[4].kind == TokenKind::Punctuation);
}

TEST_CASE("tokenize on empty input") {
    CHECK(tokenize_code("").empty());
}

TEST_CASE("tokenize splits qualified calls") {
    // Hand-applied lexing of "a.b(c)": six single tokens.
    const auto toks = tokenize_code("a.b(c)");
    REQUIRE(toks.size() == 6);
    CHECK(toks[0].text == "a");
    CHECK(toks[1].text == ".");
    CHECK(toks[2].text == "b");
    CHECK(toks[3].text == "(");
    CHECK(toks[4].text == "c");
    CHECK(toks[5].text == ")");
}

TEST_CASE("string literals and comments are single tokens") {
    const auto toks = tokenize_code("s = \"a + b\"; // trailing ; note");
    REQUIRE(toks.size() == 5);
    CHECK(toks[2].text == "\"a + b\"");
    CHECK(toks[2].kind == TokenKind::Literal);
    CHECK(toks[4].text == "// trailing ; note");
    CHECK(is_comment_token(toks[4]));
}

TEST_CASE("operators use maximal munch") {
    const auto toks = tokenize_code("a >>>= b >>> c >> d != e");
    CHECK(toks[1].text == ">>>=");
    CHECK(toks[3].text == ">>>");
    CHECK(toks[5].text == ">>");
    CHECK(toks[7].text == "!=");
}

TEST_CASE("numeric literals stay together") {
    const auto toks = tokenize_code("x = 0x1F + 1_000 + 1.5e-3;");
    CHECK(toks[2].text == "0x1F");
    CHECK(toks[4].text == "1_000");
    CHECK(toks[6].text == "1.5e-3");
}

TEST_CASE("lexer round-trip preserves non-whitespace characters") {
    const std::string samples[] = {
        "public void f() { int x = 0; }",
        "a.b(c) /* block ; { } */ \"str \\\" esc\" 'c'",
        "weird €–chars ~!?# @annotations\n// line comment\nx+=2;",
        "",
        "   \t\n  ",
    };
    for (const auto& s : samples) {
        CHECK(joined_tokens(s) == non_whitespace(s));
    }
}

TEST_CASE("lexer round-trip holds on random ASCII soup") {
    std::mt19937_64 rng(7);
    const std::string alphabet =
        "abcXYZ019 _$(){};,.<>=+-*/&|!\"'\\\n\t@#%^?:[]~";
    for (int trial = 0; trial < 200; ++trial) {
        std::string s;
        const int len = static_cast<int>(rng() % 120);
        for (int i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        CAPTURE(s);
        CHECK(joined_tokens(s) == non_whitespace(s));
    }
}

TEST_CASE("tokenize is deterministic") {
    const std::string input = "for (int i = 0; i < n; i++) { sum += a[i]; }";
    const auto a = tokenize_code(input);
    const auto b = tokenize_code(input);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].text == b[i].text);
        CHECK(a[i].kind == b[i].kind);
    }
}

TEST_CASE("strip_comments blanks comments but keeps line structure") {
    const std::string src = "int a; // set\n/* multi\nline */ int b;";
    const std::string out = strip_comments(src);
    CHECK(out.size() == src.size());
    CHECK(std::count(out.begin(), out.end(), '\n') == std::count(src.begin(), src.end(), '\n'));
    CHECK(out.find("set") == std::string::npos);
    CHECK(out.find("multi") == std::string::npos);
    CHECK(out.find("int b;") != std::string::npos);
    // Comment markers inside string literals survive.
    const std::string with_str = "s = \"// not a comment\";";
    CHECK(strip_comments(with_str) == with_str);
}

TEST_CASE("budget tokens treat markers as atoms") {
    CHECK(count_budget_tokens("") == 0);
    CHECK(count_budget_tokens("int x = 0;") == 5);
    CHECK(count_budget_tokens("<MISSING CODE>") == 1);
    CHECK(count_budget_tokens("a <OUT> b <IN> c <S> d <CTX:method_calls>") == 8);
    // Same text, same counter, identical counts.
    const std::string text = "void f() { <MISSING CODE> }";
    CHECK(count_budget_tokens(text) == count_budget_tokens(text));
    CHECK(count_budget_tokens(text) == 7);
}

TEST_CASE("token counter registry resolves the default") {
    const TokenCounter* counter = find_token_counter("lexer");
    REQUIRE(counter != nullptr);
    CHECK(counter->name() == "lexer");
    CHECK(find_token_counter("no-such-counter") == nullptr);
    CHECK(count_budget_tokens("a b c", *counter) == 3);
}
