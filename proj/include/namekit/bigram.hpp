#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace namekit {

// Unigram/bigram counts over training-name sub-token sequences. The sentinel
// kEonToken is appended to every name before bigram counting, so "name ends
// here" is a followable event; unigrams count only real sub-tokens.
struct BigramStats {
    std::map<std::string, std::uint64_t> unigram;
    std::map<std::pair<std::string, std::string>, std::uint64_t> bigram;

    std::uint64_t count(const std::string& token) const;
    std::uint64_t count_pair(const std::string& prev, const std::string& next) const;
    bool empty() const { return unigram.empty() && bigram.empty(); }
};

// names carry plain sub-token sequences (no sentinel); empty names are skipped.
BigramStats build_bigram_stats(const std::vector<std::vector<std::string>>& names);

}  // namespace namekit
