#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ctxmine::code {

// Input serialization markers. They are atomic for budget purposes, the way a
// trained tokenizer would treat special tokens.
inline constexpr std::string_view kMissingCodeMarker = "<MISSING CODE>";
inline constexpr std::string_view kCalleeMarker = "<OUT>";
inline constexpr std::string_view kCallerMarker = "<IN>";
inline constexpr std::string_view kStatementSeparator = "<S>";
inline constexpr std::string_view kContextTagPrefix = "<CTX:";

bool is_marker(std::string_view token);

// Splits text into budget units: markers count as one unit each, everything
// else is lexed with tokenize_code.
std::vector<std::string> budget_tokens(std::string_view text);

// Pluggable budget-unit counter. Budgets only gate truncation, so any
// deterministic counter works; the default counts lexer tokens with markers
// as single units.
class TokenCounter {
public:
    virtual ~TokenCounter() = default;
    virtual std::string_view name() const = 0;
    virtual int count(std::string_view text) const = 0;
};

const TokenCounter& default_token_counter();

// Registry so alternative counters (e.g. a subword counter fed from model
// tooling) can be selected by name from configuration.
void register_token_counter(std::shared_ptr<TokenCounter> counter);
const TokenCounter* find_token_counter(std::string_view name);

int count_budget_tokens(std::string_view text, const TokenCounter& counter);
int count_budget_tokens(std::string_view text);

}  // namespace ctxmine::code
