#include "ctxmine/context.hpp"

#include <algorithm>
#include <unordered_map>

#include "ctxmine/errors.hpp"
#include "ctxmine/strings.hpp"
#include "ctxmine/terms.hpp"

namespace ctxmine::context {
namespace {

// Flattens raw source for use inside a context block: lexer tokens joined by
// single spaces, comments dropped, so the result re-lexes to the same stream.
std::string flatten_code(std::string_view raw) {
    std::string out;
    for (const auto& tok : code::tokenize_code(raw)) {
        if (code::is_comment_token(tok)) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(tok.text);
    }
    return out;
}

ContextBlock make_block(ContextKind kind, std::string text) {
    ContextBlock block;
    block.kind = kind;
    block.text = std::move(text);
    block.token_count = code::count_budget_tokens(block.text);
    return block;
}

}  // namespace

std::string_view kind_name(ContextKind kind) {
    switch (kind) {
        case ContextKind::MethodCalls: return "method_calls";
        case ContextKind::ClassSignatures: return "class_signatures";
        case ContextKind::MostSimilarMethod: return "most_similar_method";
        case ContextKind::IssueTitle: return "issue_title";
        case ContextKind::IssueBody: return "issue_body";
        case ContextKind::DevSimilarStatements: return "dev_similar_statements";
        case ContextKind::DevFrequentInvocations: return "dev_frequent_invocations";
    }
    return "unknown";
}

std::optional<ContextKind> parse_kind(std::string_view name) {
    for (ContextKind kind : all_kinds()) {
        if (kind_name(kind) == name) return kind;
    }
    return std::nullopt;
}

std::vector<ContextKind> all_kinds() {
    return {ContextKind::MethodCalls,          ContextKind::ClassSignatures,
            ContextKind::MostSimilarMethod,    ContextKind::IssueTitle,
            ContextKind::IssueBody,            ContextKind::DevSimilarStatements,
            ContextKind::DevFrequentInvocations};
}

MethodIndex::MethodIndex(std::span<const code::MethodRecord> corpus) {
    for (const auto& m : corpus) {
        by_id_[m.id] = &m;
        by_class_[m.file_path + '\x1f' + m.class_name].push_back(&m);
    }
}

const code::MethodRecord* MethodIndex::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : it->second;
}

std::span<const code::MethodRecord* const> MethodIndex::class_members(
    const std::string& file_path, const std::string& class_name) const {
    auto it = by_class_.find(file_path + '\x1f' + class_name);
    if (it == by_class_.end()) return {};
    return it->second;
}

RetrievalPool::RetrievalPool(std::vector<const code::MethodRecord*> methods)
    : methods_(std::move(methods)) {
    tokens_.reserve(methods_.size());
    for (const auto* m : methods_) {
        tokens_.push_back(code::token_texts(code::tokenize_code(m->text)));
    }
}

const code::MethodRecord* RetrievalPool::retrieve(std::span<const std::string> query,
                                                  std::size_t k,
                                                  const sim::TrivialNGramSet& trivial,
                                                  const std::string& exclude_method_id) const {
    std::vector<std::vector<std::string>> candidates;
    std::vector<std::size_t> remap;
    candidates.reserve(methods_.size());
    for (std::size_t i = 0; i < methods_.size(); ++i) {
        if (!exclude_method_id.empty() && methods_[i]->id == exclude_method_id) continue;
        candidates.push_back(tokens_[i]);
        remap.push_back(i);
    }
    if (candidates.empty()) throw EmptyPool("retrieval pool is empty");
    const std::size_t winner = sim::pick_most_similar(query, candidates, k, trivial);
    return methods_[remap[winner]];
}

std::vector<std::string> query_tokens(const data::MaskedInstance& inst) {
    std::vector<std::string> tokens;
    for (auto& tok : code::budget_tokens(inst.im_text)) {
        if (!code::is_marker(tok)) tokens.push_back(std::move(tok));
    }
    return tokens;
}

ContextBlock build_method_calls_context(const data::MaskedInstance& inst,
                                        const graph::CallGraph& graph) {
    const graph::Neighbors n = graph::neighbors(graph, inst.method_id, inst.masked_indices);
    std::string text;
    for (const auto& sig : n.callees) {
        if (!text.empty()) text.push_back(' ');
        text.append(code::kCalleeMarker);
        text.push_back(' ');
        text.append(sig);
    }
    for (const auto& sig : n.callers) {
        if (!text.empty()) text.push_back(' ');
        text.append(code::kCallerMarker);
        text.push_back(' ');
        text.append(sig);
    }
    return make_block(ContextKind::MethodCalls, std::move(text));
}

ContextBlock build_class_signatures_context(const data::MaskedInstance& inst,
                                            const MethodIndex& index) {
    const code::MethodRecord* self = index.find(inst.method_id);
    std::string text;
    if (self != nullptr) {
        for (const auto* sibling : index.class_members(self->file_path, self->class_name)) {
            if (sibling->id == self->id) continue;
            if (!text.empty()) text.push_back(' ');
            text.append(sibling->signature);
        }
    }
    return make_block(ContextKind::ClassSignatures, std::move(text));
}

ContextBlock build_most_similar_method_context(const data::MaskedInstance& inst,
                                               const RetrievalPool& training_pool,
                                               const sim::TrivialNGramSet& trivial,
                                               std::size_t k) {
    if (training_pool.empty()) throw EmptyPool("most-similar-method pool is empty");
    const auto query = query_tokens(inst);
    const code::MethodRecord* best = training_pool.retrieve(query, k, trivial, inst.method_id);
    return make_block(ContextKind::MostSimilarMethod, flatten_code(best->text));
}

ContextBlock build_issue_context(const data::MaskedInstance& /*inst*/,
                                 const std::vector<repo::IssueRecord>& ranked, IssuePart part) {
    const ContextKind kind =
        part == IssuePart::Title ? ContextKind::IssueTitle : ContextKind::IssueBody;
    if (ranked.empty()) return make_block(kind, "");
    const repo::IssueRecord& top = ranked.front();
    const std::string& raw = part == IssuePart::Title ? top.title : top.body;
    return make_block(kind, collapse_whitespace(raw));
}

ContextBlock build_dev_statements_context(const data::MaskedInstance& inst,
                                          std::span<const repo::CommitRecord> history,
                                          int top_n) {
    const auto method_terms = code::preprocess_terms(inst.im_text);

    struct Candidate {
        double score;
        std::size_t commit_pos;
        std::size_t line_pos;
        std::string text;
    };
    std::vector<Candidate> candidates;
    for (std::size_t c = 0; c < history.size(); ++c) {
        for (std::size_t l = 0; l < history[c].diff.size(); ++l) {
            std::string flat = flatten_code(history[c].diff[l].text);
            if (flat.empty()) continue;
            const auto line_terms = code::preprocess_terms(flat);
            const double score = sim::statement_overlap(line_terms, method_terms).value;
            candidates.push_back(Candidate{score, c, l, std::move(flat)});
        }
    }
    // Descending score; ties by recency (history is newest first), then by
    // line order within the commit.
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.commit_pos != b.commit_pos) return a.commit_pos < b.commit_pos;
        return a.line_pos < b.line_pos;
    });
    if (static_cast<int>(candidates.size()) > top_n) {
        candidates.resize(static_cast<std::size_t>(top_n));
    }

    std::string text;
    for (const auto& cand : candidates) {
        if (!text.empty()) {
            text.push_back(' ');
            text.append(code::kStatementSeparator);
            text.push_back(' ');
        }
        text.append(cand.text);
    }
    return make_block(ContextKind::DevSimilarStatements, std::move(text));
}

ContextBlock build_dev_invocations_context(const data::MaskedInstance& /*inst*/,
                                           std::span<const repo::CommitRecord> history,
                                           int top_n) {
    std::unordered_map<std::string, int> freq;
    std::vector<std::string> order;  // first occurrence
    for (const auto& commit : history) {
        for (const auto& line : commit.diff) {
            const auto tokens = code::tokenize_code(line.text);
            for (const auto& call : graph::extract_invocations(tokens)) {
                if (freq[call.name]++ == 0) order.push_back(call.name);
            }
        }
    }
    std::vector<std::size_t> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[i] = i;
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        return freq[order[a]] > freq[order[b]];
    });
    if (static_cast<int>(rank.size()) > top_n) rank.resize(static_cast<std::size_t>(top_n));

    std::string text;
    for (std::size_t i : rank) {
        if (!text.empty()) text.push_back(' ');
        text.append(order[i]);
    }
    return make_block(ContextKind::DevFrequentInvocations, std::move(text));
}

SerializedInput compose_input(const data::MaskedInstance& inst,
                              std::span<const ContextBlock> blocks, int budget,
                              int method_budget, const code::TokenCounter& counter) {
    const int method_tokens = counter.count(inst.im_text);
    if (method_tokens > method_budget) {
        throw MethodOverBudget("method " + inst.method_id + " occupies " +
                               std::to_string(method_tokens) + " tokens (budget " +
                               std::to_string(method_budget) + ")");
    }

    std::vector<std::string> context_tokens;
    for (const auto& block : blocks) {
        if (block.text.empty()) continue;
        std::string tag = std::string(code::kContextTagPrefix);
        tag.append(kind_name(block.kind));
        tag.push_back('>');
        context_tokens.push_back(std::move(tag));
        for (auto& tok : code::budget_tokens(block.text)) {
            context_tokens.push_back(std::move(tok));
        }
    }

    auto render = [&](std::size_t keep) {
        std::string text = inst.im_text;
        for (std::size_t i = 0; i < keep; ++i) {
            text.push_back(' ');
            text.append(context_tokens[i]);
        }
        return text;
    };

    const int total = method_tokens + static_cast<int>(context_tokens.size());
    std::size_t keep = context_tokens.size();
    if (total > budget) {
        keep -= static_cast<std::size_t>(total - budget);
    }
    SerializedInput out;
    out.text = render(keep);
    // Lexer units and counter units coincide for the default counter; a
    // custom counter may need a few more tokens dropped.
    while (keep > 0 && counter.count(out.text) > budget) {
        --keep;
        out.text = render(keep);
    }
    out.truncated_tokens = keep == context_tokens.size() ? 0 : total - counter.count(out.text);
    return out;
}

}  // namespace ctxmine::context
