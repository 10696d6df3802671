#include "namekit/cooccurrence.hpp"

#include <numeric>

#include "namekit/errors.hpp"
#include "namekit/parallel.hpp"
#include "namekit/specials.hpp"

namespace namekit {

namespace {

std::uint64_t lcm_upto(int n) {
    std::uint64_t acc = 1;
    for (int k = 2; k <= n; ++k) acc = std::lcm(acc, static_cast<std::uint64_t>(k));
    return acc;
}

void count_range(const std::vector<std::vector<std::size_t>>& sequences,
                 std::size_t begin, std::size_t end, int window,
                 CooccurrenceTable& table) {
    for (std::size_t s = begin; s < end; ++s) {
        const auto& seq = sequences[s];
        for (std::size_t p = 0; p < seq.size(); ++p) {
            if (seq[p] == kPadIndex) continue;
            std::size_t limit = std::min(seq.size(), p + static_cast<std::size_t>(window) + 1);
            for (std::size_t q = p + 1; q < limit; ++q) {
                if (seq[q] == kPadIndex) continue;
                table.add(seq[p], seq[q], static_cast<int>(q - p));
            }
        }
    }
}

}  // namespace

CooccurrenceTable::CooccurrenceTable(int window)
    : window_(window), scale_(lcm_upto(window)) {
    if (window < 1 || window > 40)
        throw ConfigError("co-occurrence window must be in [1, 40]");
}

void CooccurrenceTable::add(std::size_t i, std::size_t j, int distance) {
    auto key = i <= j ? std::make_pair(i, j) : std::make_pair(j, i);
    cells_[key] += scale_ / static_cast<std::uint64_t>(distance);
}

void CooccurrenceTable::merge(const CooccurrenceTable& other) {
    for (const auto& [key, numerator] : other.cells_) cells_[key] += numerator;
}

double CooccurrenceTable::value(std::size_t i, std::size_t j) const {
    auto key = i <= j ? std::make_pair(i, j) : std::make_pair(j, i);
    auto it = cells_.find(key);
    if (it == cells_.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(scale_);
}

CooccurrenceTable build_cooccurrence_serial(
    const std::vector<std::vector<std::size_t>>& sequences, int window) {
    CooccurrenceTable table(window);
    count_range(sequences, 0, sequences.size(), window, table);
    return table;
}

CooccurrenceTable build_cooccurrence(const std::vector<std::vector<std::size_t>>& sequences,
                                     int window) {
    // Fixed shard layout regardless of thread count; integer cell adds make
    // the merged table independent of scheduling anyway.
    const std::size_t shards = std::min<std::size_t>(sequences.size(), 64);
    if (shards <= 1 || !parallel_enabled())
        return build_cooccurrence_serial(sequences, window);

    std::vector<CooccurrenceTable> partial(shards, CooccurrenceTable(window));
    const std::size_t per = (sequences.size() + shards - 1) / shards;
    parallel_for(shards, [&](std::size_t s) {
        std::size_t begin = s * per;
        std::size_t end = std::min(sequences.size(), begin + per);
        if (begin < end) count_range(sequences, begin, end, window, partial[s]);
    });
    CooccurrenceTable table(window);
    for (const auto& p : partial) table.merge(p);
    return table;
}

}  // namespace namekit
