#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace loopsim::rng {

inline constexpr double kPi = 3.14159265358979323846;

// Every random consumer derives its own generator state from
// (master seed, purpose string, index) so that results depend only on the
// master seed and not on evaluation order or thread count. The derivation
// is splitmix64 over the master seed xor'd with an FNV-1a hash of the
// purpose and the index. Frame-level operations use index = frame number.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a(std::string_view text) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view purpose, uint64_t index = 0) {
    uint64_t s = master ^ fnv1a(purpose);
    uint64_t h = splitmix64(s);
    s ^= index;
    return h ^ splitmix64(s);
}

// Deterministic pseudo-random stream (splitmix64 core). Self-contained so
// that sequences do not depend on the C++ standard library implementation.
class Stream {
public:
    Stream(uint64_t master, std::string_view purpose, uint64_t index = 0)
        : state_(derive_seed(master, purpose, index)) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound), bound > 0; unbiased via rejection
    uint64_t next_below(uint64_t bound) {
        const uint64_t threshold = -bound % bound;
        for (;;) {
            const uint64_t r = next_u64();
            const auto wide = static_cast<unsigned __int128>(r) * bound;
            if (static_cast<uint64_t>(wide) >= threshold) {
                return static_cast<uint64_t>(wide >> 64);
            }
        }
    }

    // standard normal via Box-Muller; consumes exactly two uniforms per call
    double next_gaussian() {
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

private:
    uint64_t state_;
};

}  // namespace loopsim::rng
