#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxmine/lexer.hpp"
#include "ctxmine/method.hpp"

namespace ctxmine::graph {

// A syntactic call site: identifier followed by an argument list.
struct Invocation {
    std::string name;
    int arity = 0;
};

// Scans a token stream for invocations. Declaration headers ("void run(") and
// constructor calls ("new Foo(") are not invocations.
std::vector<Invocation> extract_invocations(const std::vector<code::Token>& tokens);

struct CallSite {
    std::string callee;       // method id
    int statement_index = 0;  // call-site statement in the caller
};

struct CallGraph {
    std::vector<std::string> nodes;  // corpus order
    std::unordered_map<std::string, std::vector<CallSite>> out_edges;
    std::unordered_map<std::string, std::vector<std::string>> in_edges;   // deduplicated callers
    std::unordered_map<std::string, std::string> signatures;              // id -> signature
    bool has_node(const std::string& id) const { return signatures.count(id) > 0; }
};

// Static name+arity resolution: same class first, then same file, then a
// unique corpus-wide match. An ambiguous stage (two or more candidates)
// produces no edge.
CallGraph build_call_graph(std::span<const code::MethodRecord> corpus);

struct Neighbors {
    std::vector<std::string> callees;  // signatures, first-occurrence order
    std::vector<std::string> callers;
};

// Callees whose call-site statement is not excluded, plus all callers.
// Throws UnknownMethod.
Neighbors neighbors(const CallGraph& graph, const std::string& id,
                    const std::set<int>& exclude_statements);

// One line per edge: "caller_id<TAB>callee_id<TAB>stmt_index".
void write_edge_dump(const CallGraph& graph, const std::filesystem::path& path);

}  // namespace ctxmine::graph
