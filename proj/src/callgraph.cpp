#include "namekit/callgraph.hpp"

#include <algorithm>
#include <unordered_map>

namespace namekit {

namespace {
const std::vector<std::string> kNoCallees;
const std::set<std::string> kNoCallers;
}  // namespace

const std::vector<std::string>& CallGraph::callees_of(const std::string& id) const {
    auto it = callees.find(id);
    return it == callees.end() ? kNoCallees : it->second;
}

const std::set<std::string>& CallGraph::callers_of(const std::string& id) const {
    auto it = callers.find(id);
    return it == callers.end() ? kNoCallers : it->second;
}

CallGraph build_call_graph(const Corpus& corpus) {
    // (simple name, arity) -> method ids, in corpus order so ambiguous edges
    // come out sorted the same way every run.
    std::unordered_map<std::string, std::vector<std::string>> by_signature;
    for (const auto& m : corpus.methods) {
        by_signature[m.name + "/" + std::to_string(m.params.size())].push_back(m.id);
    }
    for (auto& [sig, ids] : by_signature) std::sort(ids.begin(), ids.end());

    CallGraph graph;
    for (const auto& m : corpus.methods) {
        std::vector<std::string> edges;
        for (const auto& [name, arity] : m.callee_sites) {
            auto it = by_signature.find(name + "/" + std::to_string(arity));
            if (it == by_signature.end()) {
                ++graph.unresolved_sites;
                continue;
            }
            for (const auto& target : it->second) {
                edges.push_back(target);
                graph.callers[target].insert(m.id);
            }
        }
        if (!edges.empty()) graph.callees[m.id] = std::move(edges);
    }
    return graph;
}

}  // namespace namekit
