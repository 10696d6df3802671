#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "namekit/corpus.hpp"
#include "namekit/errors.hpp"
#include "namekit/splitter.hpp"

namespace namekit {

namespace {

enum class TokKind { Ident, Keyword, Punct, Number, Literal, End };

struct Tok {
    TokKind kind;
    std::string text;
    int line;
    int col;
};

const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
        "class", "const", "continue", "default", "do", "double", "else", "enum",
        "extends", "final", "finally", "float", "for", "goto", "if", "implements",
        "import", "instanceof", "int", "interface", "long", "native", "new",
        "package", "private", "protected", "public", "return", "short", "static",
        "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
        "transient", "try", "void", "volatile", "while", "true", "false", "null"};
    return kw;
}

bool is_primitive_type(const std::string& s) {
    static const std::unordered_set<std::string> prim = {
        "boolean", "byte", "char", "short", "int", "long", "float", "double"};
    return prim.count(s) > 0;
}

bool is_modifier(const std::string& s) {
    static const std::unordered_set<std::string> mods = {
        "public", "private", "protected", "static", "final", "abstract",
        "synchronized", "native", "transient", "volatile", "strictfp", "default"};
    return mods.count(s) > 0;
}

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Strips comments and string/char literals, keeps everything else as
// single-character punctuation, identifiers, keywords, and numbers.
std::vector<Tok> lex(std::string_view text) {
    std::vector<Tok> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(c);
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') {
                advance(text[i]);
                ++i;
            }
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            int start_line = line, start_col = col;
            advance(text[i]);
            advance(text[i + 1]);
            i += 2;
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '*' && i + 1 < text.size() && text[i + 1] == '/') {
                    advance(text[i]);
                    advance(text[i + 1]);
                    i += 2;
                    closed = true;
                    break;
                }
                advance(text[i]);
                ++i;
            }
            if (!closed) throw ParseError("unterminated block comment", start_line, start_col);
            continue;
        }
        if (c == '"' || c == '\'') {
            int start_line = line, start_col = col;
            char quote = c;
            advance(c);
            ++i;
            bool closed = false;
            while (i < text.size()) {
                char d = text[i];
                if (d == '\\' && i + 1 < text.size()) {
                    advance(d);
                    advance(text[i + 1]);
                    i += 2;
                    continue;
                }
                advance(d);
                ++i;
                if (d == quote) {
                    closed = true;
                    break;
                }
                if (d == '\n' && quote == '"') break;
            }
            if (!closed) throw ParseError("unterminated literal", start_line, start_col);
            out.push_back({TokKind::Literal, std::string(1, quote), start_line, start_col});
            continue;
        }
        if (ident_start(c)) {
            int start_line = line, start_col = col;
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) {
                advance(text[j]);
                ++j;
            }
            std::string word(text.substr(i, j - i));
            i = j;
            TokKind kind = java_keywords().count(word) ? TokKind::Keyword : TokKind::Ident;
            out.push_back({kind, std::move(word), start_line, start_col});
            continue;
        }
        if (c >= '0' && c <= '9') {
            int start_line = line, start_col = col;
            std::size_t j = i;
            // Numbers never feed sub-tokens, so a loose scan is enough.
            while (j < text.size() &&
                   (ident_char(text[j]) || text[j] == '.' ||
                    ((text[j] == '+' || text[j] == '-') && j > i &&
                     (text[j - 1] == 'e' || text[j - 1] == 'E')))) {
                advance(text[j]);
                ++j;
            }
            out.push_back({TokKind::Number, std::string(text.substr(i, j - i)), start_line, start_col});
            i = j;
            continue;
        }
        out.push_back({TokKind::Punct, std::string(1, c), line, col});
        advance(c);
        ++i;
    }
    out.push_back({TokKind::End, "", line, col});
    return out;
}

class Parser {
public:
    Parser(std::vector<Tok> toks, std::string file_label)
        : toks_(std::move(toks)), label_(std::move(file_label)) {}

    ParsedFile run() {
        skip_header();
        while (!at_end()) {
            if (is_punct(";")) {
                ++pos_;
                continue;
            }
            parse_type_decl("");
        }
        return std::move(out_);
    }

private:
    std::vector<Tok> toks_;
    std::string label_;
    std::size_t pos_ = 0;
    ParsedFile out_;

    const Tok& cur() const { return toks_[pos_]; }
    const Tok& peek(std::size_t n = 1) const {
        std::size_t i = pos_ + n;
        return toks_[std::min(i, toks_.size() - 1)];
    }
    bool at_end() const { return cur().kind == TokKind::End; }
    bool is_punct(const char* s) const {
        return cur().kind == TokKind::Punct && cur().text == s;
    }
    bool is_keyword(const char* s) const {
        return cur().kind == TokKind::Keyword && cur().text == s;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur().line, cur().col);
    }
    void expect_punct(const char* s) {
        if (!is_punct(s)) fail(std::string("expected '") + s + "'");
        ++pos_;
    }

    void skip_header() {
        while (is_keyword("package") || is_keyword("import")) {
            while (!at_end() && !is_punct(";")) ++pos_;
            if (at_end()) fail("unterminated package/import");
            ++pos_;
        }
    }

    void skip_annotation() {
        ++pos_;  // '@'
        if (cur().kind != TokKind::Ident && !is_keyword("interface")) fail("bad annotation");
        if (is_keyword("interface")) fail("annotation declarations are unsupported");
        ++pos_;
        while (is_punct(".")) {
            ++pos_;
            if (cur().kind != TokKind::Ident) fail("bad annotation name");
            ++pos_;
        }
        if (is_punct("(")) skip_balanced("(", ")");
    }

    void skip_modifiers() {
        for (;;) {
            if (cur().kind == TokKind::Keyword && is_modifier(cur().text)) {
                ++pos_;
            } else if (is_punct("@")) {
                skip_annotation();
            } else {
                return;
            }
        }
    }

    void skip_balanced(const char* open, const char* close) {
        if (!is_punct(open)) fail(std::string("expected '") + open + "'");
        int depth = 0;
        while (!at_end()) {
            if (is_punct(open)) ++depth;
            else if (is_punct(close)) {
                --depth;
                if (depth == 0) {
                    ++pos_;
                    return;
                }
            }
            ++pos_;
        }
        fail(std::string("unbalanced '") + open + "'");
    }

    // Angle brackets have no dedicated lexer support; generic argument lists
    // only appear in declarations here, so plain < > counting suffices.
    void skip_generics() {
        if (!is_punct("<")) return;
        int depth = 0;
        while (!at_end()) {
            if (is_punct("<")) ++depth;
            else if (is_punct(">")) {
                --depth;
                if (depth == 0) {
                    ++pos_;
                    return;
                }
            } else if (is_punct("{") || is_punct(";")) {
                fail("unbalanced generic argument list");
            }
            ++pos_;
        }
        fail("unbalanced generic argument list");
    }

    // Parses a type usage and returns its base identifier: the last segment of
    // a qualified name, with generic arguments and array brackets dropped.
    std::string parse_type() {
        std::string base;
        if (cur().kind == TokKind::Keyword && is_primitive_type(cur().text)) {
            base = cur().text;
            ++pos_;
        } else if (is_keyword("void")) {
            base = "void";
            ++pos_;
        } else if (cur().kind == TokKind::Ident) {
            base = cur().text;
            ++pos_;
            while (is_punct(".") && peek().kind == TokKind::Ident) {
                pos_ += 2;
                base = toks_[pos_ - 1].text;
            }
        } else {
            fail("expected a type");
        }
        skip_generics();
        while (is_punct("[") && peek().text == "]") pos_ += 2;
        return base;
    }

    void parse_type_decl(const std::string& outer) {
        skip_modifiers();
        if (is_keyword("enum")) fail("enum declarations are unsupported");
        if (!is_keyword("class") && !is_keyword("interface")) fail("expected a type declaration");
        ++pos_;
        if (cur().kind != TokKind::Ident) fail("expected a type name");
        std::string simple = cur().text;
        ++pos_;
        skip_generics();
        while (!at_end() && !is_punct("{")) ++pos_;  // extends / implements
        if (at_end()) fail("missing class body");
        std::string qualified = outer.empty() ? simple : outer + "." + simple;
        parse_class_body(qualified, simple);
    }

    void parse_class_body(const std::string& qualified, const std::string& simple) {
        expect_punct("{");
        ClassRecord rec;
        rec.id = label_ + "#" + qualified;
        rec.name = simple;
        std::size_t rec_slot = out_.classes.size();
        out_.classes.push_back(rec);

        while (!at_end() && !is_punct("}")) {
            if (is_punct(";")) {
                ++pos_;
                continue;
            }
            parse_member(rec_slot, qualified, simple);
        }
        if (at_end()) fail("missing '}' at end of class body");
        ++pos_;
    }

    void parse_member(std::size_t rec_slot, const std::string& qualified,
                      const std::string& simple) {
        skip_modifiers();
        if (is_keyword("class") || is_keyword("interface") || is_keyword("enum")) {
            parse_type_decl(qualified);  // nested type; modifier re-scan is a no-op
            return;
        }
        if (is_punct("{")) {  // instance or static initializer block
            skip_balanced("{", "}");
            return;
        }
        if (is_punct("<")) skip_generics();  // generic method declaration

        // Constructor: the class's simple name directly followed by '('.
        if (cur().kind == TokKind::Ident && cur().text == simple && peek().text == "(") {
            ++pos_;
            skip_balanced("(", ")");
            while (!at_end() && !is_punct("{") && !is_punct(";")) ++pos_;
            if (is_punct("{")) skip_balanced("{", "}");
            else ++pos_;
            return;
        }

        std::string type = parse_type();
        if (cur().kind != TokKind::Ident) fail("expected a member name");
        std::string name = cur().text;
        int name_line = cur().line;
        ++pos_;

        if (is_punct("(")) {
            parse_method(rec_slot, qualified, type, name, name_line);
        } else {
            parse_field_tail(rec_slot, name);
        }
    }

    // After "Type name", collects this declarator and any comma-separated
    // siblings. Field names and initializer identifiers land in entity_names.
    void parse_field_tail(std::size_t rec_slot, std::string first_name) {
        ClassRecord& rec = out_.classes[rec_slot];
        std::string name = std::move(first_name);
        for (;;) {
            while (is_punct("[") && peek().text == "]") pos_ += 2;
            rec.field_names.push_back(name);
            rec.entity_names.push_back(name);
            if (is_punct("=")) {
                ++pos_;
                scan_initializer(rec.entity_names);
            }
            if (is_punct(",")) {
                ++pos_;
                if (cur().kind != TokKind::Ident) fail("expected a field name");
                name = cur().text;
                ++pos_;
                continue;
            }
            expect_punct(";");
            return;
        }
    }

    // Reads tokens up to the next top-level ',' or ';', keeping identifiers
    // and primitive type keywords.
    void scan_initializer(std::vector<std::string>& sink) {
        int paren = 0, brace = 0, bracket = 0;
        while (!at_end()) {
            if (paren == 0 && brace == 0 && bracket == 0 &&
                (is_punct(",") || is_punct(";"))) {
                return;
            }
            const Tok& t = cur();
            if (t.kind == TokKind::Punct) {
                if (t.text == "(") ++paren;
                else if (t.text == ")") --paren;
                else if (t.text == "{") ++brace;
                else if (t.text == "}") --brace;
                else if (t.text == "[") ++bracket;
                else if (t.text == "]") --bracket;
                if (paren < 0 || brace < 0 || bracket < 0) fail("unbalanced initializer");
            } else if (t.kind == TokKind::Ident) {
                sink.push_back(t.text);
            } else if (t.kind == TokKind::Keyword && is_primitive_type(t.text)) {
                sink.push_back(t.text);
            }
            ++pos_;
        }
        fail("unterminated initializer");
    }

    void parse_method(std::size_t rec_slot, const std::string& qualified,
                      const std::string& return_type, const std::string& name,
                      int name_line) {
        MethodRecord m;
        m.name = name;
        m.name_subtokens = split_identifier(name);
        m.return_type = return_type;
        m.class_id = out_.classes[rec_slot].id;

        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                skip_modifiers();  // final / annotations on parameters
                std::string ptype = parse_type();
                while (is_punct(".")) {  // varargs '...'
                    ++pos_;
                    if (is_punct(".")) ++pos_;
                }
                if (cur().kind != TokKind::Ident) fail("expected a parameter name");
                std::string pname = cur().text;
                ++pos_;
                while (is_punct("[") && peek().text == "]") pos_ += 2;
                m.params.emplace_back(ptype, pname);
                if (is_punct(",")) {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        while (!at_end() && !is_punct("{") && !is_punct(";")) ++pos_;  // throws
        int end_line = name_line;
        if (is_punct(";")) {
            ++pos_;  // abstract or interface method: empty body
        } else if (is_punct("{")) {
            end_line = scan_body(m);
        } else {
            fail("expected a method body");
        }
        m.line_count = std::max(1, end_line - name_line + 1);

        std::string base =
            label_ + "#" + qualified + "#" + m.name + "/" + std::to_string(m.params.size());
        std::string id = base;
        for (int k = 2; used_ids_.count(id); ++k) id = base + "#" + std::to_string(k);
        used_ids_.insert(id);
        m.id = id;
        out_.classes[rec_slot].method_ids.push_back(id);
        out_.methods.push_back(std::move(m));
    }

    // Walks the brace-balanced body, collecting the identifier stream and the
    // call sites. `name(` is a call site unless preceded by `new` (constructor
    // invocation) or `.` after `this`/`super` handled naturally as keywords.
    int scan_body(MethodRecord& m) {
        int depth = 0;
        bool after_new = false;
        int last_line = cur().line;
        while (!at_end()) {
            const Tok& t = cur();
            last_line = t.line;
            if (t.kind == TokKind::Punct) {
                if (t.text == "{") ++depth;
                else if (t.text == "}") {
                    --depth;
                    if (depth == 0) {
                        ++pos_;
                        return last_line;
                    }
                }
                if (t.text != "@") after_new = false;
                if (t.text == "@") {
                    skip_annotation();
                    continue;
                }
                ++pos_;
                continue;
            }
            if (t.kind == TokKind::Ident) {
                m.body_tokens.push_back(t.text);
                if (peek().text == "(" && !after_new) {
                    m.callee_sites.emplace_back(t.text, site_arity(pos_ + 1));
                }
                after_new = false;
                ++pos_;
                continue;
            }
            if (t.kind == TokKind::Keyword) {
                if (is_primitive_type(t.text)) m.body_tokens.push_back(t.text);
                after_new = (t.text == "new");
                ++pos_;
                continue;
            }
            after_new = false;
            ++pos_;
        }
        fail("unterminated method body");
    }

    // Counts top-level commas between the parens starting at open_pos without
    // consuming anything.
    int site_arity(std::size_t open_pos) const {
        int depth = 0;
        int commas = 0;
        bool any_token = false;
        for (std::size_t i = open_pos; i < toks_.size(); ++i) {
            const Tok& t = toks_[i];
            if (t.kind == TokKind::End) break;
            if (t.kind == TokKind::Punct) {
                if (t.text == "(") {
                    ++depth;
                    if (depth == 1) continue;
                } else if (t.text == ")") {
                    --depth;
                    if (depth == 0) return any_token ? commas + 1 : 0;
                } else if (t.text == "," && depth == 1) {
                    ++commas;
                }
            }
            if (depth >= 1) any_token = true;
        }
        throw ParseError("unbalanced call arguments", toks_[open_pos].line,
                         toks_[open_pos].col);
    }

    std::unordered_set<std::string> used_ids_;
};

}  // namespace

ParsedFile parse_source(std::string_view text, std::string_view file_label) {
    Parser p(lex(text), std::string(file_label));
    return p.run();
}

void Corpus::add(ParsedFile&& file) {
    for (auto& c : file.classes) classes.push_back(std::move(c));
    for (auto& m : file.methods) methods.push_back(std::move(m));
}

void Corpus::rebuild_index() {
    method_index_.clear();
    class_index_.clear();
    for (std::size_t i = 0; i < methods.size(); ++i) method_index_[methods[i].id] = i;
    for (std::size_t i = 0; i < classes.size(); ++i) class_index_[classes[i].id] = i;
}

const MethodRecord* Corpus::find_method(const std::string& id) const {
    auto it = method_index_.find(id);
    return it == method_index_.end() ? nullptr : &methods[it->second];
}

const ClassRecord* Corpus::find_class(const std::string& id) const {
    auto it = class_index_.find(id);
    return it == class_index_.end() ? nullptr : &classes[it->second];
}

}  // namespace namekit
