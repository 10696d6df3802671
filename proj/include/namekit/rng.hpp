#pragma once

#include <cstdint>
#include <vector>

namespace namekit {

// Deterministic random source. xoshiro256** seeded through splitmix64, plus a
// Box-Muller normal generator. Hand-rolled so streams are identical across
// platforms and standard-library versions; std::mt19937 distributions are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    // Standard normal. Generates pairs and caches the spare.
    double normal();

    // Uniform index in [0, n). n must be > 0.
    std::size_t index(std::size_t n);

    // Fisher-Yates, identical order for a given seed regardless of element type.
    template <class T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace namekit
