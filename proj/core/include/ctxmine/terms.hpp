#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctxmine/lexer.hpp"

namespace ctxmine::code {

// Splits at lower-to-upper transitions and underscores; a run of uppercase
// letters followed by a lowercase letter splits before its last uppercase
// ("HTTPServer" -> http, server). Digits stay attached to the preceding word.
// Output is lowercase; concatenated it equals the lowercased identifier with
// underscores removed.
std::vector<std::string> split_camel_case(std::string_view identifier);

// Lexes the text, drops keywords, punctuation and operators, camel-splits
// identifiers, and lowercases everything. Literals contribute their
// alphanumeric runs.
std::vector<std::string> preprocess_terms(std::string_view text);

// Same filtering applied to an existing token stream.
std::vector<std::string> preprocess_terms(const std::vector<Token>& tokens);

}  // namespace ctxmine::code
