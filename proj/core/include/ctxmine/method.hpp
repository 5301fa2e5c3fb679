#pragma once

#include <string>
#include <vector>

namespace ctxmine::code {

// One segmentation unit of a method body: a simple statement ending in ';' or
// the header of a compound statement (braces attached to the header; a bare
// closing brace extends the statement emitted before it).
struct Statement {
    std::string text;
    int index = 0;
    int line_start = 0;  // 1-based source lines
    int line_end = 0;
    // Byte span within MethodRecord::text.
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct MethodRecord {
    std::string id;          // file path + qualified name + signature; unique per corpus
    std::string file_path;
    std::string class_name;  // lexically enclosing class, dotted for nesting
    std::string name;
    int arity = 0;
    std::string signature;   // normalized "ReturnType name(Type a, Type b)"
    std::string text;        // source slice of the whole declaration, comments blanked
    std::string body;        // source slice from '{' to '}' inclusive
    std::vector<Statement> statements;
    int line_start = 0;
    int line_end = 0;
    int token_count = 0;     // budget units of `text` under the default counter
};

// Keeps exactly the records with token_count <= max_tokens; order preserved.
std::vector<MethodRecord> filter_by_length(const std::vector<MethodRecord>& methods,
                                           int max_tokens = 682);

}  // namespace ctxmine::code
