#include "gms/hashing.hpp"

#include <stdexcept>
#include <string>

namespace gms {

HashFn::HashFn(uint64_t seed, uint64_t bins) : seed_(seed), m_(bins) {
    if (bins == 0) throw std::invalid_argument("HashFn: bin count must be positive");
    uint64_t state = derive_seed(seed, 0x68617368);
    a_ = mix64(state += 0x9e3779b97f4a7c15ULL) % kHashPrime;
    b_ = mix64(state += 0x9e3779b97f4a7c15ULL) % kHashPrime;
}

Hash::Hash(uint64_t seed, uint32_t replica, size_t variables, uint64_t bins) {
    fns_.reserve(variables);
    for (size_t k = 0; k < variables; ++k)
        fns_.emplace_back(derive_seed(seed, replica, k + 1), bins);
}

namespace detail {

void pair_key_out_of_range(uint64_t child_value, uint64_t parent_value,
                           uint64_t child_cardinality) {
    if (child_value == 0 || child_value > child_cardinality)
        throw std::invalid_argument("pair_key: child value " + std::to_string(child_value) +
                                    " outside [1, " + std::to_string(child_cardinality) + "]");
    throw std::invalid_argument("pair_key: parent value " + std::to_string(parent_value) +
                                " must be >= 1");
}

}  // namespace detail

}  // namespace gms
