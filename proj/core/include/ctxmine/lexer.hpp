#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ctxmine::code {

enum class TokenKind { Identifier, Keyword, Literal, Punctuation, Operator };

struct Token {
    std::string text;
    TokenKind kind = TokenKind::Punctuation;
    // Position in the lexed text; 1-based line, byte offset of the first char.
    std::uint32_t line = 1;
    std::size_t offset = 0;
};

// Java reserved words (JLS keywords plus the reserved literals true/false/null).
const std::unordered_set<std::string>& java_keywords();

// Deterministic lexer for the corpus language. Joining the token texts with
// single spaces preserves every non-whitespace character of the input; unknown
// characters come out as single-character punctuation tokens and comments come
// out as one punctuation token each.
std::vector<Token> tokenize_code(std::string_view text);

// Replaces comment bytes with spaces (newlines kept) so downstream passes see
// comment-free source with unchanged line numbers and byte offsets.
std::string strip_comments(std::string_view source);

std::vector<std::string> token_texts(const std::vector<Token>& tokens);

bool is_comment_token(const Token& token);

}  // namespace ctxmine::code
