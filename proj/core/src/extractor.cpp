#include "ctxmine/extractor.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "ctxmine/errors.hpp"
#include "ctxmine/lexer.hpp"
#include "ctxmine/strings.hpp"
#include "ctxmine/token_counter.hpp"

namespace ctxmine::code {
namespace {

const std::unordered_set<std::string>& member_modifiers() {
    static const std::unordered_set<std::string> mods = {
        "public", "private",      "protected", "static",   "final",    "abstract",
        "native", "synchronized", "strictfp",  "default",  "transient", "volatile",
        "sealed",
    };
    return mods;
}

bool is_type_keyword(const Token& t) {
    return (t.text == "class" || t.text == "interface" || t.text == "enum" ||
            t.text == "record");
}

int angle_delta(const std::string& text) {
    int d = 0;
    for (char c : text) {
        if (c == '<') ++d;
        if (c == '>') --d;
    }
    return d;
}

// Signature pretty-printer: deterministic single-line rendering.
std::string render_signature(const std::vector<const Token*>& tokens) {
    static const std::unordered_set<std::string> no_space_before = {
        ")", "]", ",", ";", ".", "(", "<", ">", ">>", ">>>", "[", "...",
    };
    static const std::unordered_set<std::string> no_space_after = {"(", "[", "<", ".", "@"};
    std::string out;
    std::string prev;
    for (const Token* t : tokens) {
        if (!out.empty() && no_space_before.count(t->text) == 0 && no_space_after.count(prev) == 0) {
            out.push_back(' ');
        }
        out.append(t->text);
        prev = t->text;
    }
    return out;
}

struct MemberSignature {
    std::string name;
    int arity = 0;
    std::string signature;
    std::size_t open_paren = 0;  // index within the member token list
};

// Matches "<modifiers> <type tokens> name ( params ) [throws ...]". Returns
// nullopt for constructors (no type tokens), fields, and anything else.
std::optional<MemberSignature> match_method_header(const std::vector<const Token*>& m) {
    std::size_t p = m.size();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]->text == "(") {
            p = i;
            break;
        }
    }
    if (p == m.size() || p == 0) return std::nullopt;
    const Token* name = m[p - 1];
    if (name->kind != TokenKind::Identifier) return std::nullopt;

    std::size_t q = m.size();
    int depth = 0;
    for (std::size_t i = p; i < m.size(); ++i) {
        if (m[i]->text == "(") ++depth;
        if (m[i]->text == ")") {
            if (--depth == 0) {
                q = i;
                break;
            }
        }
    }
    if (q == m.size()) return std::nullopt;

    if (q + 1 < m.size()) {
        if (m[q + 1]->text != "throws") return std::nullopt;
        for (std::size_t i = q + 2; i < m.size(); ++i) {
            const bool ok = m[i]->kind == TokenKind::Identifier || m[i]->text == "." ||
                            m[i]->text == ",";
            if (!ok) return std::nullopt;
        }
    }

    std::size_t s = 0;
    while (s + 1 < p && member_modifiers().count(m[s]->text)) ++s;
    if (s == p - 1) return std::nullopt;  // constructor: nothing between modifiers and name
    for (std::size_t i = s; i + 1 < p; ++i) {
        if (m[i]->text == "=" || m[i]->text == "new") return std::nullopt;
    }

    MemberSignature sig;
    sig.name = name->text;
    sig.open_paren = p;

    int arity = q > p + 1 ? 1 : 0;
    int parens = 0, angles = 0, brackets = 0;
    for (std::size_t i = p + 1; i < q; ++i) {
        const std::string& t = m[i]->text;
        if (t == "(") ++parens;
        else if (t == ")") --parens;
        else if (t == "[") ++brackets;
        else if (t == "]") --brackets;
        else if (t == "," && parens == 0 && brackets == 0 && angles == 0) ++arity;
        else angles += angle_delta(t);
    }
    sig.arity = arity;

    std::vector<const Token*> sig_tokens(m.begin() + static_cast<std::ptrdiff_t>(s),
                                         m.begin() + static_cast<std::ptrdiff_t>(q) + 1);
    sig.signature = render_signature(sig_tokens);
    return sig;
}

struct PendingMethod {
    std::string class_name;
    MemberSignature sig;
    std::size_t start_tok = 0;
    std::size_t open_brace_tok = 0;
};

struct Scope {
    enum class Kind { TypeBody, MethodBody, Block };
    Kind kind = Kind::Block;
    bool named_type = false;
    int method_slot = -1;
    std::vector<std::size_t> member;
    std::optional<std::size_t> member_start_tok;
};

std::vector<Statement> segment_statements(const std::vector<Token>& toks, std::size_t open_idx,
                                          std::size_t close_idx, std::size_t method_start_off,
                                          const std::string& clean) {
    std::vector<Statement> statements;
    int parens = 0;
    std::ptrdiff_t cur = -1;

    auto emit = [&](std::size_t a, std::size_t b) {
        Statement st;
        st.index = static_cast<int>(statements.size());
        st.begin = toks[a].offset - method_start_off;
        st.end = toks[b].offset + toks[b].text.size() - method_start_off;
        st.text = clean.substr(toks[a].offset, st.end - st.begin);
        st.line_start = static_cast<int>(toks[a].line);
        st.line_end = static_cast<int>(toks[b].line);
        statements.push_back(std::move(st));
    };
    auto extend = [&](std::size_t b) {
        Statement& st = statements.back();
        st.end = toks[b].offset + toks[b].text.size() - method_start_off;
        st.text = clean.substr(st.begin + method_start_off, st.end - st.begin);
        st.line_end = static_cast<int>(toks[b].line);
    };

    for (std::size_t i = open_idx + 1; i < close_idx; ++i) {
        const std::string& t = toks[i].text;
        if (t == "(") ++parens;
        else if (t == ")" && parens > 0) --parens;

        if (t == "{") {
            if (cur < 0) cur = static_cast<std::ptrdiff_t>(i);
            emit(static_cast<std::size_t>(cur), i);
            cur = -1;
            continue;
        }
        if (t == "}") {
            if (cur >= 0) {
                emit(static_cast<std::size_t>(cur), i);
                cur = -1;
            } else if (!statements.empty()) {
                extend(i);
            }
            continue;
        }
        if (t == ";" && parens == 0) {
            if (cur < 0) cur = static_cast<std::ptrdiff_t>(i);
            emit(static_cast<std::size_t>(cur), i);
            cur = -1;
            continue;
        }
        if (cur < 0) cur = static_cast<std::ptrdiff_t>(i);
    }
    if (cur >= 0 && static_cast<std::size_t>(cur) < close_idx) {
        emit(static_cast<std::size_t>(cur), close_idx - 1);
    }
    return statements;
}

// True when the '{' at `brace` closes a "new Qualified.Name<...>(args)"
// expression, i.e. opens an anonymous class body.
bool anonymous_class_before(const std::vector<Token>& toks, std::size_t brace) {
    if (brace == 0) return false;
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(brace) - 1;
    if (toks[static_cast<std::size_t>(j)].text != ")") return false;
    int depth = 0;
    for (; j >= 0; --j) {
        const std::string& t = toks[static_cast<std::size_t>(j)].text;
        if (t == ")") ++depth;
        else if (t == "(" && --depth == 0) break;
    }
    if (j <= 0) return false;
    --j;
    // Optional generic argument list, possibly with fused ">>" tokens.
    if (j >= 0) {
        int closes = 0;
        for (char c : toks[static_cast<std::size_t>(j)].text) {
            if (c == '>') ++closes;
        }
        if (closes > 0 && angle_delta(toks[static_cast<std::size_t>(j)].text) < 0) {
            int ad = -angle_delta(toks[static_cast<std::size_t>(j)].text);
            --j;
            while (j >= 0 && ad > 0) {
                ad -= angle_delta(toks[static_cast<std::size_t>(j)].text);
                --j;
            }
        }
    }
    bool saw_name = false;
    while (j >= 0 && toks[static_cast<std::size_t>(j)].kind == TokenKind::Identifier) {
        saw_name = true;
        --j;
        if (j >= 0 && toks[static_cast<std::size_t>(j)].text == ".") {
            --j;
        } else {
            break;
        }
    }
    return saw_name && j >= 0 && toks[static_cast<std::size_t>(j)].text == "new";
}

}  // namespace

std::vector<MethodRecord> extract_methods(std::string_view source, std::string_view file_path) {
    const std::string clean = strip_comments(source);
    const std::vector<Token> toks = tokenize_code(clean);

    std::vector<MethodRecord> out;
    std::vector<Scope> scopes;
    std::vector<std::string> class_stack;
    std::vector<PendingMethod> pending_methods;
    std::optional<std::string> pending_type;

    auto dotted_class = [&]() { return join(class_stack, "."); };

    std::size_t i = 0;
    const std::size_t n = toks.size();
    while (i < n) {
        const Token& tok = toks[i];
        Scope* top = scopes.empty() ? nullptr : &scopes.back();

        // Annotation uses inside a type body are skipped wholesale so their
        // argument lists cannot confuse member parsing; @interface opens an
        // annotation type declaration instead.
        if (top && top->kind == Scope::Kind::TypeBody && tok.text == "@") {
            if (!top->member_start_tok) top->member_start_tok = i;
            std::size_t j = i + 1;
            if (j < n && toks[j].text == "interface") {
                if (j + 1 < n && toks[j + 1].kind == TokenKind::Identifier) {
                    pending_type = toks[j + 1].text;
                    i = j + 2;
                } else {
                    i = j + 1;
                }
                continue;
            }
            while (j < n && toks[j].kind == TokenKind::Identifier) {
                ++j;
                if (j < n && toks[j].text == ".") ++j;
                else break;
            }
            if (j < n && toks[j].text == "(") {
                int depth = 0;
                for (; j < n; ++j) {
                    if (toks[j].text == "(") ++depth;
                    if (toks[j].text == ")" && --depth == 0) {
                        ++j;
                        break;
                    }
                }
            }
            i = j;
            continue;
        }

        if (is_type_keyword(tok) && (i == 0 || toks[i - 1].text != ".") && i + 1 < n &&
            toks[i + 1].kind == TokenKind::Identifier) {
            pending_type = toks[i + 1].text;
            if (top && top->kind == Scope::Kind::TypeBody) {
                if (!top->member_start_tok) top->member_start_tok = i;
            }
            i += 2;
            continue;
        }

        if (tok.text == "{") {
            Scope next;
            if (pending_type) {
                next.kind = Scope::Kind::TypeBody;
                next.named_type = true;
                class_stack.push_back(*pending_type);
                pending_type.reset();
            } else if (top && top->kind == Scope::Kind::TypeBody && top->member_start_tok) {
                std::vector<const Token*> member;
                member.reserve(top->member.size());
                for (std::size_t idx : top->member) member.push_back(&toks[idx]);
                if (auto sig = match_method_header(member)) {
                    PendingMethod pm;
                    pm.class_name = dotted_class();
                    pm.sig = std::move(*sig);
                    pm.start_tok = *top->member_start_tok;
                    pm.open_brace_tok = i;
                    pending_methods.push_back(std::move(pm));
                    next.kind = Scope::Kind::MethodBody;
                    next.method_slot = static_cast<int>(pending_methods.size() - 1);
                } else if (anonymous_class_before(toks, i)) {
                    next.kind = Scope::Kind::TypeBody;
                } else {
                    next.kind = Scope::Kind::Block;
                }
            } else if (anonymous_class_before(toks, i)) {
                next.kind = Scope::Kind::TypeBody;
            } else {
                next.kind = Scope::Kind::Block;
            }
            if (top) {
                top->member.clear();
                top->member_start_tok.reset();
            }
            scopes.push_back(std::move(next));
            ++i;
            continue;
        }

        if (tok.text == "}") {
            if (scopes.empty()) {
                throw ParseError("unbalanced '}' in " + std::string(file_path));
            }
            Scope closed = std::move(scopes.back());
            scopes.pop_back();
            if (closed.kind == Scope::Kind::TypeBody && closed.named_type) {
                class_stack.pop_back();
            }
            if (closed.kind == Scope::Kind::MethodBody) {
                const PendingMethod& pm = pending_methods[static_cast<std::size_t>(closed.method_slot)];
                MethodRecord rec;
                rec.file_path = std::string(file_path);
                rec.class_name = pm.class_name;
                rec.name = pm.sig.name;
                rec.arity = pm.sig.arity;
                rec.signature = pm.sig.signature;
                const std::size_t start_off = toks[pm.start_tok].offset;
                const std::size_t end_off = tok.offset + 1;
                rec.text = clean.substr(start_off, end_off - start_off);
                rec.body = clean.substr(toks[pm.open_brace_tok].offset,
                                        end_off - toks[pm.open_brace_tok].offset);
                rec.line_start = static_cast<int>(toks[pm.start_tok].line);
                rec.line_end = static_cast<int>(tok.line);
                rec.statements = segment_statements(toks, pm.open_brace_tok, i, start_off, clean);
                rec.token_count = count_budget_tokens(rec.text);
                rec.id = std::string(file_path) + "::" + rec.class_name + "::" + rec.signature;
                out.push_back(std::move(rec));
            }
            ++i;
            continue;
        }

        if (tok.text == ";") {
            pending_type.reset();
            if (top && top->kind == Scope::Kind::TypeBody) {
                top->member.clear();
                top->member_start_tok.reset();
            }
            ++i;
            continue;
        }

        if (top && top->kind == Scope::Kind::TypeBody) {
            if (!top->member_start_tok) top->member_start_tok = i;
            top->member.push_back(i);
        }
        ++i;
    }

    if (!scopes.empty()) {
        throw ParseError("unbalanced '{' in " + std::string(file_path));
    }

    // Anonymous classes can yield colliding ids (same enclosing class, same
    // signature); disambiguate in order.
    std::unordered_map<std::string, int> seen;
    for (auto& rec : out) {
        int& count = seen[rec.id];
        ++count;
        if (count > 1) rec.id += "#" + std::to_string(count);
    }
    // Records are emitted at their closing brace; order them by position.
    std::stable_sort(out.begin(), out.end(), [](const MethodRecord& a, const MethodRecord& b) {
        return a.line_start < b.line_start;
    });
    return out;
}

std::vector<MethodRecord> filter_by_length(const std::vector<MethodRecord>& methods,
                                           int max_tokens) {
    std::vector<MethodRecord> kept;
    for (const auto& m : methods) {
        if (m.token_count <= max_tokens) kept.push_back(m);
    }
    return kept;
}

}  // namespace ctxmine::code
