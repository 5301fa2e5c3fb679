#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxmine/call_graph.hpp"
#include "ctxmine/dataset.hpp"
#include "ctxmine/method.hpp"
#include "ctxmine/repo_types.hpp"
#include "ctxmine/similarity.hpp"
#include "ctxmine/token_counter.hpp"

namespace ctxmine::context {

enum class ContextKind {
    MethodCalls,
    ClassSignatures,
    MostSimilarMethod,
    IssueTitle,
    IssueBody,
    DevSimilarStatements,
    DevFrequentInvocations,
};

std::string_view kind_name(ContextKind kind);
std::optional<ContextKind> parse_kind(std::string_view name);
std::vector<ContextKind> all_kinds();

// One serialized context. text carries internal markers (<OUT>, <IN>, <S>)
// but not the <CTX:kind> prefix, which compose_input adds. An empty text
// means "nothing to say"; compose_input skips such blocks.
struct ContextBlock {
    ContextKind kind = ContextKind::MethodCalls;
    std::string text;
    int token_count = 0;
};

struct SerializedInput {
    std::string text;
    int truncated_tokens = 0;
};

// Method lookup shared by the builders: id resolution plus per-class sibling
// lists in declaration order.
class MethodIndex {
public:
    explicit MethodIndex(std::span<const code::MethodRecord> corpus);
    const code::MethodRecord* find(const std::string& id) const;
    // Declaration-ordered methods of (file, class).
    std::span<const code::MethodRecord* const> class_members(const std::string& file_path,
                                                             const std::string& class_name) const;

private:
    std::map<std::string, const code::MethodRecord*> by_id_;
    std::map<std::string, std::vector<const code::MethodRecord*>> by_class_;
};

// Tokenized training-set methods for most-similar-method retrieval.
class RetrievalPool {
public:
    explicit RetrievalPool(std::vector<const code::MethodRecord*> methods);
    bool empty() const { return methods_.empty(); }
    std::size_t size() const { return methods_.size(); }
    const std::vector<std::vector<std::string>>& tokens() const { return tokens_; }

    // Two-stage retrieval, skipping pool entries of `exclude_method_id` so a
    // training instance never retrieves its own method.
    const code::MethodRecord* retrieve(std::span<const std::string> query_tokens, std::size_t k,
                                       const sim::TrivialNGramSet& trivial,
                                       const std::string& exclude_method_id) const;

private:
    std::vector<const code::MethodRecord*> methods_;
    std::vector<std::vector<std::string>> tokens_;
};

// Query tokens for retrieval: the instance's input stream with the masked
// statements already removed.
std::vector<std::string> query_tokens(const data::MaskedInstance& inst);

ContextBlock build_method_calls_context(const data::MaskedInstance& inst,
                                        const graph::CallGraph& graph);

ContextBlock build_class_signatures_context(const data::MaskedInstance& inst,
                                            const MethodIndex& index);

ContextBlock build_most_similar_method_context(const data::MaskedInstance& inst,
                                               const RetrievalPool& training_pool,
                                               const sim::TrivialNGramSet& trivial,
                                               std::size_t k = 20);

enum class IssuePart { Title, Body };
ContextBlock build_issue_context(const data::MaskedInstance& inst,
                                 const std::vector<repo::IssueRecord>& ranked, IssuePart part);

ContextBlock build_dev_statements_context(const data::MaskedInstance& inst,
                                          std::span<const repo::CommitRecord> history,
                                          int top_n = 10);

ContextBlock build_dev_invocations_context(const data::MaskedInstance& inst,
                                           std::span<const repo::CommitRecord> history,
                                           int top_n = 100);

// IM_i first, then each non-empty block prefixed by its <CTX:kind> tag.
// Context tokens are cut from the end until the total fits the budget; the
// method portion is never cut. Throws MethodOverBudget.
SerializedInput compose_input(const data::MaskedInstance& inst,
                              std::span<const ContextBlock> blocks, int budget = 1024,
                              int method_budget = 682,
                              const code::TokenCounter& counter = code::default_token_counter());

}  // namespace ctxmine::context
