#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "namekit/corpus.hpp"

namespace namekit {

// Call edges resolved by (simple name, arity) across the whole corpus;
// receiver types and inheritance are ignored. An ambiguous site produces an
// edge to every matching method. callers is the exact inverse of callees.
struct CallGraph {
    std::map<std::string, std::vector<std::string>> callees;  // call-site order
    std::map<std::string, std::set<std::string>> callers;
    std::size_t unresolved_sites = 0;

    const std::vector<std::string>& callees_of(const std::string& id) const;
    const std::set<std::string>& callers_of(const std::string& id) const;
};

CallGraph build_call_graph(const Corpus& corpus);

}  // namespace namekit
