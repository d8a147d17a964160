#pragma once

#include <cstdint>
#include <random>

namespace gms {

// splitmix64 finalizer (Steele/Lea/Flood); full-avalanche 64-bit mixer.
inline constexpr uint64_t mix64(uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child seed from a master seed and up to two salts.
// Used to split one experiment seed into per-(replica, variable) hash seeds
// and per-(run, role) stream seeds, so whole experiments replay from one seed.
inline constexpr uint64_t derive_seed(uint64_t master, uint64_t salt_a, uint64_t salt_b = 0) noexcept {
    uint64_t s = mix64(master + 0x9e3779b97f4a7c15ULL);
    s = mix64(s ^ (salt_a + 0xbf58476d1ce4e5b9ULL));
    s = mix64(s ^ (salt_b + 0x94d049bb133111ebULL));
    return s;
}

// Unbiased draw from [lo, hi]. Hand-rolled rejection instead of
// std::uniform_int_distribution, whose output differs across standard
// libraries; frozen test values depend on the exact draw sequence.
template <class Engine>
uint64_t uniform_u64(Engine& eng, uint64_t lo, uint64_t hi) {
    const uint64_t span = hi - lo + 1;  // hi >= lo; span == 0 means the full 2^64 range
    if (span == 0) return eng();
    uint64_t x, r;
    do {
        x = eng();
        r = x % span;
    } while (x - r > uint64_t(0) - span);
    return lo + r;
}

template <class Engine>
double uniform_unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace gms
