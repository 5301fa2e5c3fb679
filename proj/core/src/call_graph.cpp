#include "ctxmine/call_graph.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <unordered_set>

#include "ctxmine/errors.hpp"

namespace ctxmine::graph {
namespace {

bool is_primitive_type(const std::string& text) {
    static const std::unordered_set<std::string> prims = {
        "void", "int", "long", "short", "byte", "char", "boolean", "float", "double",
    };
    return prims.count(text) > 0;
}

int call_arity(const std::vector<code::Token>& tokens, std::size_t open_paren) {
    int parens = 0, braces = 0, brackets = 0;
    bool any_content = false;
    int commas = 0;
    for (std::size_t i = open_paren; i < tokens.size(); ++i) {
        const std::string& t = tokens[i].text;
        if (t == "(") {
            ++parens;
            continue;
        }
        if (t == ")") {
            if (--parens == 0) break;
            continue;
        }
        if (t == "{") ++braces;
        else if (t == "}") --braces;
        else if (t == "[") ++brackets;
        else if (t == "]") --brackets;
        else if (t == "," && parens == 1 && braces == 0 && brackets == 0) ++commas;
        if (parens >= 1) any_content = true;
    }
    if (!any_content) return 0;
    return commas + 1;
}

std::string resolution_key(const std::string& scope, const std::string& name, int arity) {
    return scope + '\x1f' + name + '\x1f' + std::to_string(arity);
}

}  // namespace

std::vector<Invocation> extract_invocations(const std::vector<code::Token>& tokens) {
    std::vector<Invocation> calls;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].kind != code::TokenKind::Identifier) continue;
        if (tokens[i + 1].text != "(") continue;
        if (i > 0) {
            const code::Token& prev = tokens[i - 1];
            if (prev.text == "new") continue;  // constructor, not a method call
            // Two adjacent names form a declaration header, not a call.
            if (prev.kind == code::TokenKind::Identifier || is_primitive_type(prev.text)) continue;
            if (prev.text == ">" || prev.text == ">>") continue;  // generic return type
        }
        calls.push_back(Invocation{tokens[i].text, call_arity(tokens, i + 1)});
    }
    return calls;
}

CallGraph build_call_graph(std::span<const code::MethodRecord> corpus) {
    CallGraph graph;

    // name+arity candidate lists at class, file, and corpus scope.
    std::unordered_map<std::string, std::vector<const code::MethodRecord*>> by_class;
    std::unordered_map<std::string, std::vector<const code::MethodRecord*>> by_file;
    std::unordered_map<std::string, std::vector<const code::MethodRecord*>> by_name;
    for (const auto& m : corpus) {
        graph.nodes.push_back(m.id);
        graph.signatures[m.id] = m.signature;
        const std::string na = m.name + '\x1f' + std::to_string(m.arity);
        by_class[resolution_key(m.file_path + '\x1f' + m.class_name, m.name, m.arity)].push_back(&m);
        by_file[resolution_key(m.file_path, m.name, m.arity)].push_back(&m);
        by_name[na].push_back(&m);
    }

    using Index = std::unordered_map<std::string, std::vector<const code::MethodRecord*>>;
    auto resolve = [&](const code::MethodRecord& caller, const Invocation& call)
        -> const code::MethodRecord* {
        const std::array<std::pair<const Index*, std::string>, 3> stages = {{
            {&by_class,
             resolution_key(caller.file_path + '\x1f' + caller.class_name, call.name, call.arity)},
            {&by_file, resolution_key(caller.file_path, call.name, call.arity)},
            {&by_name, call.name + '\x1f' + std::to_string(call.arity)},
        }};
        for (const auto& [index, key] : stages) {
            auto it = index->find(key);
            if (it == index->end() || it->second.empty()) continue;
            // Two or more candidates at the deciding stage: ambiguous, no edge.
            return it->second.size() == 1 ? it->second.front() : nullptr;
        }
        return nullptr;
    };

    for (const auto& caller : corpus) {
        for (const auto& stmt : caller.statements) {
            const auto tokens = code::tokenize_code(stmt.text);
            for (const auto& call : extract_invocations(tokens)) {
                const code::MethodRecord* callee = resolve(caller, call);
                if (callee == nullptr) continue;
                graph.out_edges[caller.id].push_back(CallSite{callee->id, stmt.index});
                auto& callers = graph.in_edges[callee->id];
                if (std::find(callers.begin(), callers.end(), caller.id) == callers.end()) {
                    callers.push_back(caller.id);
                }
            }
        }
    }
    return graph;
}

Neighbors neighbors(const CallGraph& graph, const std::string& id,
                    const std::set<int>& exclude_statements) {
    if (!graph.has_node(id)) throw UnknownMethod("neighbors: unknown method id " + id);
    Neighbors result;
    std::unordered_set<std::string> seen;
    auto out_it = graph.out_edges.find(id);
    if (out_it != graph.out_edges.end()) {
        for (const auto& site : out_it->second) {
            if (exclude_statements.count(site.statement_index)) continue;
            if (seen.insert(site.callee).second) {
                result.callees.push_back(graph.signatures.at(site.callee));
            }
        }
    }
    seen.clear();
    auto in_it = graph.in_edges.find(id);
    if (in_it != graph.in_edges.end()) {
        for (const auto& caller : in_it->second) {
            if (seen.insert(caller).second) {
                result.callers.push_back(graph.signatures.at(caller));
            }
        }
    }
    return result;
}

void write_edge_dump(const CallGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& caller : graph.nodes) {
        auto it = graph.out_edges.find(caller);
        if (it == graph.out_edges.end()) continue;
        for (const auto& site : it->second) {
            out << caller << '\t' << site.callee << '\t' << site.statement_index << '\n';
        }
    }
}

}  // namespace ctxmine::graph
