#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace qawa {

// splitmix64 finalizer; used to derive independent substreams from a seed.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic RNG. std::mt19937_64 has a standard-specified sequence and
// the bounded draw below avoids std::uniform_int_distribution, whose output
// is implementation-defined; results are therefore identical across
// platforms and standard libraries for a given seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(mix64(seed)) {}

    // Substream for (seed, index) so per-item work can run concurrently
    // without changing outputs.
    static Rng derive(uint64_t seed, uint64_t stream) {
        return Rng(mix64(seed) ^ mix64(stream + 0x51ed2701ull));
    }

    uint64_t next_u64() { return engine_(); }

    // Unbiased draw in [0, n) via rejection sampling.
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r = next_u64();
        while (r >= limit) r = next_u64();
        return r % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double range(double lo, double hi) { return lo + unit() * (hi - lo); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace qawa
