#include "ctxmine/lexer.hpp"

#include <array>
#include <cctype>

namespace ctxmine::code {
namespace {

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

// Longest-first so maximal munch falls out of a linear scan.
constexpr std::array<std::string_view, 24> kOperators = {
    ">>>=", ">>>", ">>=", "<<=", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=",   ">=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
};

constexpr std::string_view kSingleOperators = "+-*/%<>!~&|^?:=";
constexpr std::string_view kSinglePunctuation = "(){}[];,.@";

}  // namespace

const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert",   "boolean",    "break",    "byte",      "case",    "catch",
        "char",     "class",    "const",      "continue", "default",   "do",      "double",
        "else",     "enum",     "extends",    "final",    "finally",   "float",   "for",
        "goto",     "if",       "implements", "import",   "instanceof", "int",    "interface",
        "long",     "native",   "new",        "package",  "private",   "protected", "public",
        "return",   "short",    "static",     "strictfp", "super",     "switch",  "synchronized",
        "this",     "throw",    "throws",     "transient", "try",      "void",    "volatile",
        "while",    "true",     "false",      "null",
    };
    return kw;
}

std::vector<Token> tokenize_code(std::string_view src) {
    std::vector<Token> out;
    const std::size_t n = src.size();
    std::size_t i = 0;
    std::uint32_t line = 1;

    auto push = [&](std::size_t begin, std::size_t end, TokenKind kind, std::uint32_t tok_line) {
        out.push_back(Token{std::string(src.substr(begin, end - begin)), kind, tok_line, begin});
    };

    while (i < n) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::uint32_t tok_line = line;

        // Comments become a single opaque token.
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            std::size_t begin = i;
            while (i < n && src[i] != '\n') ++i;
            push(begin, i, TokenKind::Punctuation, tok_line);
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            std::size_t begin = i;
            i += 2;
            while (i < n && !(src[i] == '*' && i + 1 < n && src[i + 1] == '/')) {
                if (src[i] == '\n') ++line;
                ++i;
            }
            i = i < n ? i + 2 : n;
            push(begin, i, TokenKind::Punctuation, tok_line);
            continue;
        }

        // String and char literals; an unterminated literal closes at the
        // newline so one bad file cannot swallow the rest of the stream.
        if (c == '"' || c == '\'') {
            const char quote = c;
            std::size_t begin = i;
            ++i;
            while (i < n && src[i] != quote && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < n && src[i + 1] != '\n') {
                    i += 2;
                } else {
                    ++i;
                }
            }
            if (i < n && src[i] == quote) ++i;
            push(begin, i, TokenKind::Literal, tok_line);
            continue;
        }

        // Numbers, including hex/binary forms, underscores, floats, exponents.
        const bool dot_number = c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1]));
        if (std::isdigit(static_cast<unsigned char>(c)) || dot_number) {
            std::size_t begin = i;
            bool seen_hex = false;
            ++i;
            while (i < n) {
                const char d = src[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    if (d == 'x' || d == 'X') seen_hex = true;
                    ++i;
                    continue;
                }
                if ((d == '+' || d == '-') && !seen_hex && (src[i - 1] == 'e' || src[i - 1] == 'E')) {
                    ++i;
                    continue;
                }
                break;
            }
            push(begin, i, TokenKind::Literal, tok_line);
            continue;
        }

        if (is_ident_start(static_cast<unsigned char>(c))) {
            std::size_t begin = i;
            while (i < n && is_ident_part(static_cast<unsigned char>(src[i]))) ++i;
            std::string text(src.substr(begin, i - begin));
            const TokenKind kind =
                java_keywords().count(text) ? TokenKind::Keyword : TokenKind::Identifier;
            out.push_back(Token{std::move(text), kind, tok_line, begin});
            continue;
        }

        bool matched = false;
        for (std::string_view op : kOperators) {
            if (src.substr(i, op.size()) == op) {
                push(i, i + op.size(), TokenKind::Operator, tok_line);
                i += op.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;

        if (kSingleOperators.find(c) != std::string_view::npos) {
            push(i, i + 1, TokenKind::Operator, tok_line);
            ++i;
            continue;
        }
        // Known punctuation and anything unrecognized.
        push(i, i + 1, TokenKind::Punctuation, tok_line);
        ++i;
    }
    return out;
}

std::string strip_comments(std::string_view source) {
    std::string out(source);
    const std::size_t n = source.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = source[i];
        if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            while (i < n && source[i] != quote && source[i] != '\n') {
                if (source[i] == '\\' && i + 1 < n && source[i + 1] != '\n') {
                    i += 2;
                } else {
                    ++i;
                }
            }
            if (i < n) ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            while (i < n && source[i] != '\n') out[i++] = ' ';
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '*') {
            out[i] = ' ';
            out[i + 1] = ' ';
            i += 2;
            while (i < n && !(source[i] == '*' && i + 1 < n && source[i + 1] == '/')) {
                if (source[i] != '\n') out[i] = ' ';
                ++i;
            }
            if (i < n) {
                out[i] = ' ';
                if (i + 1 < n) out[i + 1] = ' ';
                i += 2;
            }
            continue;
        }
        ++i;
    }
    return out;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
    std::vector<std::string> texts;
    texts.reserve(tokens.size());
    for (const auto& t : tokens) texts.push_back(t.text);
    return texts;
}

bool is_comment_token(const Token& token) {
    return token.kind == TokenKind::Punctuation && token.text.size() >= 2 &&
           token.text[0] == '/' && (token.text[1] == '/' || token.text[1] == '*');
}

}  // namespace ctxmine::code
