#pragma once

#include <cstdint>
#include <vector>

#include "gms/rng.hpp"

namespace gms {

// Field prime for the multiply-add family: the Mersenne prime 2^61 - 1.
inline constexpr uint64_t kHashPrime = (uint64_t{1} << 61) - 1;

// (x * y) mod (2^61 - 1) for x, y < 2^61.
inline uint64_t mulmod_prime(uint64_t x, uint64_t y) noexcept {
    unsigned __int128 z = static_cast<unsigned __int128>(x) * y;
    uint64_t s = static_cast<uint64_t>(z & kHashPrime) + static_cast<uint64_t>(z >> 61);
    if (s >= kHashPrime) s -= kHashPrime;
    return s;
}

inline uint64_t addmod_prime(uint64_t x, uint64_t y) noexcept {
    uint64_t s = x + y;  // both < 2^61, no overflow
    if (s >= kHashPrime) s -= kHashPrime;
    return s;
}

// Seeded hash function from naturals to bins 1..m, drawn from the 2-wise
// independent multiply-add family
//
//     bin(key) = ((a * key + b) mod p) mod m + 1,   p = 2^61 - 1,
//
// with (a, b) derived deterministically from the seed. Two distinct keys
// below p collide with probability 1/m (up to O(m/p) bias). Immutable after
// construction; safe to evaluate concurrently.
class HashFn {
public:
    HashFn() = default;
    HashFn(uint64_t seed, uint64_t bins);

    // 1-indexed bin in [1, bins].
    uint64_t bin(uint64_t key) const noexcept { return index(key) + 1; }

    // 0-indexed bin in [0, bins); the table subscript.
    uint64_t index(uint64_t key) const noexcept {
        if (key >= kHashPrime) key %= kHashPrime;
        return addmod_prime(mulmod_prime(a_, key), b_) % m_;
    }

    uint64_t bins() const noexcept { return m_; }
    uint64_t seed() const noexcept { return seed_; }

    friend bool operator==(const HashFn&, const HashFn&) = default;

private:
    uint64_t seed_ = 0;
    uint64_t a_ = 0;
    uint64_t b_ = 0;
    uint64_t m_ = 1;
};

// Tuple of per-variable hash functions sharing one bin count: entry k serves
// both the value table and the pair table of variable k+1. Each entry is
// independently seeded from (seed, replica, variable).
class Hash {
public:
    Hash() = default;
    Hash(uint64_t seed, uint32_t replica, size_t variables, uint64_t bins);

    const HashFn& fn(size_t variable_index) const noexcept { return fns_[variable_index]; }
    size_t size() const noexcept { return fns_.size(); }

    friend bool operator==(const Hash&, const Hash&) = default;

private:
    std::vector<HashFn> fns_;
};

namespace detail {
[[noreturn]] void pair_key_out_of_range(uint64_t child_value, uint64_t parent_value,
                                        uint64_t child_cardinality);
}

// Encodes a (child, parent) value pair as one natural:
//     child + child_cardinality * (parent - 1).
// Injective on [child_cardinality] x N+. Throws std::invalid_argument when
// child is outside [1, child_cardinality] or parent == 0.
inline uint64_t pair_key(uint64_t child_value, uint64_t parent_value,
                         uint64_t child_cardinality) {
    if (child_value == 0 || child_value > child_cardinality || parent_value == 0)
        detail::pair_key_out_of_range(child_value, parent_value, child_cardinality);
    return child_value + child_cardinality * (parent_value - 1);
}

}  // namespace gms
