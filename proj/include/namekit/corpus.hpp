#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace namekit {

// One parsed method. body_tokens is the ordered stream of identifiers that
// appear in the body (entity names, call names, field accesses, types);
// callee_sites lists every `name(' occurrence with its argument count.
struct MethodRecord {
    std::string id;
    std::string name;
    std::vector<std::string> name_subtokens;
    std::string return_type;
    std::vector<std::pair<std::string, std::string>> params;  // (type, name)
    std::vector<std::string> body_tokens;
    std::string class_id;
    std::vector<std::pair<std::string, int>> callee_sites;  // (simple name, arg count)
    int line_count = 1;
};

// entity_names collects, in source order, the class-level declarations a
// reader would see outside any method body: field names plus the identifiers
// referenced in field initializers. Field types stay out; sibling method
// bodies belong to the sibling context, not here.
struct ClassRecord {
    std::string id;
    std::string name;
    std::vector<std::string> field_names;
    std::vector<std::string> method_ids;
    std::vector<std::string> entity_names;
};

struct ParsedFile {
    std::vector<ClassRecord> classes;
    std::vector<MethodRecord> methods;
};

// Parses one source file in the supported Java subset. file_label becomes the
// id prefix, so callers should pass a stable relative path.
// Throws ParseError on anything outside the subset.
ParsedFile parse_source(std::string_view text, std::string_view file_label);

struct Corpus {
    std::vector<ClassRecord> classes;
    std::vector<MethodRecord> methods;

    void add(ParsedFile&& file);
    void rebuild_index();

    const MethodRecord* find_method(const std::string& id) const;
    const ClassRecord* find_class(const std::string& id) const;

private:
    std::unordered_map<std::string, std::size_t> method_index_;
    std::unordered_map<std::string, std::size_t> class_index_;
};

struct IngestStats {
    std::size_t files = 0;
    std::size_t classes = 0;
    std::size_t methods = 0;
};

// Walks root for .java files (sorted by relative path), parses them in
// parallel, and merges results in path order so output is stable.
Corpus ingest_directory(const std::string& root, IngestStats* stats = nullptr);

// JSON-lines round trip. Methods and classes live in separate files; every
// line carries "schema": 1.
void save_corpus(const Corpus& corpus, const std::string& methods_path,
                 const std::string& classes_path);
Corpus load_corpus(const std::string& methods_path, const std::string& classes_path);

}  // namespace namekit
