#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "namekit/corpus.hpp"
#include "namekit/errors.hpp"
#include "namekit/parallel.hpp"

namespace namekit {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ordered_json method_to_json(const MethodRecord& m) {
    ordered_json j;
    j["schema"] = 1;
    j["id"] = m.id;
    j["name"] = m.name;
    j["name_subtokens"] = m.name_subtokens;
    j["return_type"] = m.return_type;
    ordered_json params = ordered_json::array();
    for (const auto& [type, name] : m.params) params.push_back({type, name});
    j["params"] = params;
    j["body_tokens"] = m.body_tokens;
    j["class_id"] = m.class_id;
    ordered_json sites = ordered_json::array();
    for (const auto& [name, arity] : m.callee_sites) sites.push_back({name, arity});
    j["callee_sites"] = sites;
    j["line_count"] = m.line_count;
    return j;
}

MethodRecord method_from_json(const ordered_json& j) {
    if (j.value("schema", 0) != 1) throw IoError("unsupported method schema");
    MethodRecord m;
    m.id = j.at("id").get<std::string>();
    m.name = j.at("name").get<std::string>();
    m.name_subtokens = j.at("name_subtokens").get<std::vector<std::string>>();
    m.return_type = j.at("return_type").get<std::string>();
    for (const auto& p : j.at("params"))
        m.params.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    m.body_tokens = j.at("body_tokens").get<std::vector<std::string>>();
    m.class_id = j.at("class_id").get<std::string>();
    for (const auto& s : j.at("callee_sites"))
        m.callee_sites.emplace_back(s.at(0).get<std::string>(), s.at(1).get<int>());
    m.line_count = j.at("line_count").get<int>();
    return m;
}

ordered_json class_to_json(const ClassRecord& c) {
    ordered_json j;
    j["schema"] = 1;
    j["id"] = c.id;
    j["name"] = c.name;
    j["field_names"] = c.field_names;
    j["method_ids"] = c.method_ids;
    j["entity_names"] = c.entity_names;
    return j;
}

ClassRecord class_from_json(const ordered_json& j) {
    if (j.value("schema", 0) != 1) throw IoError("unsupported class schema");
    ClassRecord c;
    c.id = j.at("id").get<std::string>();
    c.name = j.at("name").get<std::string>();
    c.field_names = j.at("field_names").get<std::vector<std::string>>();
    c.method_ids = j.at("method_ids").get<std::vector<std::string>>();
    c.entity_names = j.at("entity_names").get<std::vector<std::string>>();
    return c;
}

}  // namespace

Corpus ingest_directory(const std::string& root, IngestStats* stats) {
    fs::path base(root);
    if (!fs::exists(base) || !fs::is_directory(base))
        throw ConfigError("corpus root is not a directory: " + root);

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(base)) {
        if (entry.is_regular_file() && entry.path().extension() == ".java")
            files.push_back(entry.path());
    }
    std::vector<std::string> labels(files.size());
    for (std::size_t i = 0; i < files.size(); ++i)
        labels[i] = fs::relative(files[i], base).generic_string();
    std::vector<std::size_t> order(files.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

    // Parse in parallel, merge in path order so corpus layout never depends on
    // scheduling.
    std::vector<ParsedFile> parsed(files.size());
    parallel_for(order.size(), [&](std::size_t k) {
        std::size_t i = order[k];
        parsed[k] = parse_source(read_file(files[i]), labels[i]);
    });

    Corpus corpus;
    for (auto& file : parsed) corpus.add(std::move(file));
    corpus.rebuild_index();
    if (stats) {
        stats->files = files.size();
        stats->classes = corpus.classes.size();
        stats->methods = corpus.methods.size();
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& methods_path,
                 const std::string& classes_path) {
    std::ofstream mo(methods_path, std::ios::binary);
    if (!mo) throw IoError("cannot write " + methods_path);
    for (const auto& m : corpus.methods) mo << method_to_json(m).dump() << '\n';
    std::ofstream co(classes_path, std::ios::binary);
    if (!co) throw IoError("cannot write " + classes_path);
    for (const auto& c : corpus.classes) co << class_to_json(c).dump() << '\n';
}

Corpus load_corpus(const std::string& methods_path, const std::string& classes_path) {
    Corpus corpus;
    auto each_line = [](const std::string& path, auto&& fn) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            fn(ordered_json::parse(line));
        }
    };
    each_line(methods_path,
              [&](const ordered_json& j) { corpus.methods.push_back(method_from_json(j)); });
    each_line(classes_path,
              [&](const ordered_json& j) { corpus.classes.push_back(class_from_json(j)); });
    corpus.rebuild_index();
    return corpus;
}

}  // namespace namekit
