#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace namekit {

// Sparse symmetric co-occurrence counts. Every pair within window distance k
// contributes 1/k. Counts are stored as integer multiples of 1/lcm(1..window)
// so accumulation is exact: sharded parallel counting and the serial
// reference produce bit-identical tables, and X(i,j) == X(j,i) exactly.
class CooccurrenceTable {
public:
    explicit CooccurrenceTable(int window = 1);

    void add(std::size_t i, std::size_t j, int distance);
    void merge(const CooccurrenceTable& other);

    double value(std::size_t i, std::size_t j) const;
    bool empty() const { return cells_.empty(); }
    std::size_t pair_count() const { return cells_.size(); }
    int window() const { return window_; }
    std::uint64_t scale() const { return scale_; }

    // Canonical cells (i <= j) with exact numerators, in key order.
    const std::map<std::pair<std::size_t, std::size_t>, std::uint64_t>& cells() const {
        return cells_;
    }

private:
    int window_;
    std::uint64_t scale_;  // lcm(1..window)
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cells_;
};

// Counts over index sequences (PAD index 0 must already be excluded by the
// caller; it is skipped defensively). Window must be in [1, 40] so the lcm
// scale fits in 64 bits with room for desk-scale counts.
CooccurrenceTable build_cooccurrence(const std::vector<std::vector<std::size_t>>& sequences,
                                     int window);

// Single-threaded reference used by tests and the benchmark.
CooccurrenceTable build_cooccurrence_serial(
    const std::vector<std::vector<std::size_t>>& sequences, int window);

}  // namespace namekit
