#include "ctxmine/terms.hpp"

#include <cctype>

namespace ctxmine::code {
namespace {

void append_camel_words(std::string_view identifier, std::vector<std::string>& out) {
    std::string word;
    const std::size_t n = identifier.size();
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char c = static_cast<unsigned char>(identifier[i]);
        if (c == '_') {
            if (!word.empty()) {
                out.push_back(word);
                word.clear();
            }
            continue;
        }
        if (!word.empty() && std::isupper(c)) {
            const unsigned char prev = static_cast<unsigned char>(identifier[i - 1]);
            const bool after_lower = std::islower(prev) || std::isdigit(prev);
            const bool acronym_end = std::isupper(prev) && i + 1 < n &&
                                     std::islower(static_cast<unsigned char>(identifier[i + 1]));
            if (after_lower || acronym_end) {
                out.push_back(word);
                word.clear();
            }
        }
        word.push_back(static_cast<char>(std::tolower(c)));
    }
    if (!word.empty()) out.push_back(word);
}

void append_literal_terms(std::string_view literal, std::vector<std::string>& out) {
    std::string run;
    for (char ch : literal) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '_' || c == '$' || c >= 0x80) {
            run.push_back(ch);
        } else if (!run.empty()) {
            append_camel_words(run, out);
            run.clear();
        }
    }
    if (!run.empty()) append_camel_words(run, out);
}

}  // namespace

std::vector<std::string> split_camel_case(std::string_view identifier) {
    std::vector<std::string> words;
    append_camel_words(identifier, words);
    return words;
}

std::vector<std::string> preprocess_terms(const std::vector<Token>& tokens) {
    std::vector<std::string> terms;
    for (const auto& token : tokens) {
        switch (token.kind) {
            case TokenKind::Identifier:
                append_camel_words(token.text, terms);
                break;
            case TokenKind::Literal:
                append_literal_terms(token.text, terms);
                break;
            case TokenKind::Keyword:
            case TokenKind::Punctuation:
            case TokenKind::Operator:
                break;
        }
    }
    return terms;
}

std::vector<std::string> preprocess_terms(std::string_view text) {
    return preprocess_terms(tokenize_code(text));
}

}  // namespace ctxmine::code
