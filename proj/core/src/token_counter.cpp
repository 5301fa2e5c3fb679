#include "ctxmine/token_counter.hpp"

#include <map>
#include <mutex>

#include "ctxmine/lexer.hpp"

namespace ctxmine::code {
namespace {

bool marker_at(std::string_view text, std::size_t pos, std::size_t& length) {
    const std::string_view rest = text.substr(pos);
    for (std::string_view fixed :
         {kMissingCodeMarker, kCalleeMarker, kCallerMarker, kStatementSeparator}) {
        if (rest.substr(0, fixed.size()) == fixed) {
            length = fixed.size();
            return true;
        }
    }
    if (rest.substr(0, kContextTagPrefix.size()) == kContextTagPrefix) {
        std::size_t end = kContextTagPrefix.size();
        while (end < rest.size() && rest[end] != '>' && rest[end] != '<' && rest[end] != '\n') {
            ++end;
        }
        if (end < rest.size() && rest[end] == '>') {
            length = end + 1;
            return true;
        }
    }
    return false;
}

class LexerTokenCounter final : public TokenCounter {
public:
    std::string_view name() const override { return "lexer"; }
    int count(std::string_view text) const override {
        return static_cast<int>(budget_tokens(text).size());
    }
};

std::map<std::string, std::shared_ptr<TokenCounter>, std::less<>>& registry() {
    static std::map<std::string, std::shared_ptr<TokenCounter>, std::less<>> counters = {
        {"lexer", std::make_shared<LexerTokenCounter>()},
    };
    return counters;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

bool is_marker(std::string_view token) {
    if (token == kMissingCodeMarker || token == kCalleeMarker || token == kCallerMarker ||
        token == kStatementSeparator) {
        return true;
    }
    return token.size() > kContextTagPrefix.size() &&
           token.substr(0, kContextTagPrefix.size()) == kContextTagPrefix && token.back() == '>';
}

std::vector<std::string> budget_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t gap_begin = 0;
    std::size_t i = 0;
    auto flush_gap = [&](std::size_t end) {
        if (end > gap_begin) {
            for (auto& tok : tokenize_code(text.substr(gap_begin, end - gap_begin))) {
                out.push_back(std::move(tok.text));
            }
        }
    };
    while (i < text.size()) {
        if (text[i] == '<') {
            std::size_t len = 0;
            if (marker_at(text, i, len)) {
                flush_gap(i);
                out.emplace_back(text.substr(i, len));
                i += len;
                gap_begin = i;
                continue;
            }
        }
        ++i;
    }
    flush_gap(text.size());
    return out;
}

const TokenCounter& default_token_counter() {
    std::lock_guard<std::mutex> lock(registry_mutex());
    return *registry().find("lexer")->second;
}

void register_token_counter(std::shared_ptr<TokenCounter> counter) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry()[std::string(counter->name())] = std::move(counter);
}

const TokenCounter* find_token_counter(std::string_view name) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(name);
    return it == registry().end() ? nullptr : it->second.get();
}

int count_budget_tokens(std::string_view text, const TokenCounter& counter) {
    return counter.count(text);
}

int count_budget_tokens(std::string_view text) {
    return default_token_counter().count(text);
}

}  // namespace ctxmine::code
