#include "namekit/vocab.hpp"

#include <algorithm>
#include <map>

#include "namekit/errors.hpp"

namespace namekit {

std::size_t Vocabulary::lookup(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? kUnkIndex : it->second;
}

bool Vocabulary::in_dic_all(const std::string& token) const {
    if (token == kEonToken) return true;
    auto it = index.find(token);
    return it != index.end() && !is_special(it->second);
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& tok : tokens) {
        for (char c : tok) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        h ^= 0xff;  // separator so ["ab","c"] != ["a","bc"]
        h *= 1099511628211ULL;
    }
    return h;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sequences,
                             std::uint64_t min_count) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& seq : sequences) {
        for (const auto& tok : seq) {
            if (tok == kPadToken || tok == kUnkToken || tok == kEonToken) continue;
            ++counts[tok];
        }
    }

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [tok, n] : counts) {
        if (n >= min_count) kept.emplace_back(tok, n);
    }
    if (kept.empty()) throw DegenerateCorpus("no sub-token reaches min_count");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.tokens = {kPadToken, kUnkToken, kEonToken};
    v.freq = {0, 0, 0};
    for (auto& [tok, n] : kept) {
        v.tokens.push_back(std::move(tok));
        v.freq.push_back(n);
    }
    for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index[v.tokens[i]] = i;
    return v;
}

std::vector<std::size_t> to_indices(const std::vector<std::string>& tokens,
                                    const Vocabulary& vocab) {
    std::vector<std::size_t> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) out.push_back(vocab.lookup(tok));
    return out;
}

}  // namespace namekit
