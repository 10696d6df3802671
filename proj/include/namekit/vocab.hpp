#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "namekit/specials.hpp"

namespace namekit {

// Dense token index with PAD(0), UNK(1), EON(2) reserved. Non-special tokens
// are ordered by descending frequency, ties by token text, so the layout is a
// pure function of the counted corpus.
struct Vocabulary {
    std::vector<std::string> tokens;
    std::vector<std::uint64_t> freq;  // specials carry 0
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return tokens.size(); }
    std::size_t lookup(const std::string& token) const;  // UNK when absent
    bool contains(const std::string& token) const { return index.count(token) > 0; }
    bool is_special(std::size_t idx) const { return idx < 3; }

    // Membership in the training dictionary for scoring purposes: every
    // non-special vocabulary token, plus the end-of-name sentinel.
    bool in_dic_all(const std::string& token) const;

    // FNV-1a over the token list; model checkpoints refuse to load against a
    // different vocabulary.
    std::uint64_t hash() const;

    static Vocabulary build(const std::vector<std::vector<std::string>>& sequences,
                            std::uint64_t min_count);
};

// Maps a token sequence to indices (UNK for out-of-vocabulary tokens).
std::vector<std::size_t> to_indices(const std::vector<std::string>& tokens,
                                    const Vocabulary& vocab);

}  // namespace namekit
