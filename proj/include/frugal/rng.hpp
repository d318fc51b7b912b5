#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace frugal {

// splitmix64 finalizer; used to derive decorrelated sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ull));
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base, a), b);
}

// Deterministic PRNG. All sampling goes through the helpers below rather than
// <random> distributions, whose output is implementation-defined; the mt19937_64
// engine itself is pinned by the standard, so runs reproduce across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    // uniform in [lo, hi)
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n); rejection sampling avoids modulo bias
    std::uint64_t next_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    int next_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_index(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::mt19937_64 engine_;
};

// Fisher-Yates with our own index draws, so shuffles are reproducible
// independent of the standard library in use.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.next_index(i)]);
    }
}

}  // namespace frugal
