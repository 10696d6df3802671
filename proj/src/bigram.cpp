#include "namekit/bigram.hpp"

#include "namekit/specials.hpp"

namespace namekit {

std::uint64_t BigramStats::count(const std::string& token) const {
    auto it = unigram.find(token);
    return it == unigram.end() ? 0 : it->second;
}

std::uint64_t BigramStats::count_pair(const std::string& prev,
                                      const std::string& next) const {
    auto it = bigram.find({prev, next});
    return it == bigram.end() ? 0 : it->second;
}

BigramStats build_bigram_stats(const std::vector<std::vector<std::string>>& names) {
    BigramStats stats;
    for (const auto& name : names) {
        if (name.empty()) continue;
        for (std::size_t i = 0; i < name.size(); ++i) {
            ++stats.unigram[name[i]];
            const std::string& next = i + 1 < name.size() ? name[i + 1] : kEonToken;
            ++stats.bigram[{name[i], next}];
        }
    }
    return stats;
}

}  // namespace namekit
