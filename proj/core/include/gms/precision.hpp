#pragma once

#include <cstdint>
#include <span>

#include "gms/exact.hpp"

namespace gms {

// True iff p_hat is within a multiplicative factor e of p_true:
//     p_true / e <= p_hat <= e * p_true.
// Throws std::domain_error when p_true <= 0 (the predicate is undefined).
bool is_precise(double p_hat, double p_true);

// Multiplicative error envelope around the exact factored estimate:
// the estimate should fall inside
//     [ exact * lower_factor, exact * upper_factor ]
// with the advertised probability over the hash draw.
struct Envelope {
    double lower_factor = 1.0;  // prod_k (1 - eps_k), <= 1 (may be negative)
    double upper_factor = 1.0;  // prod_k (1 + eps_k), >= 1

    bool contains(double p_hat, double p_exact) const {
        return p_exact * lower_factor <= p_hat && p_hat <= p_exact * upper_factor;
    }
};

// Envelope for the single-replica hash estimator at bin count m and failure
// budget delta: eps_k = 2K / (freq_k * delta * m), where freq_k is the exact
// root-value frequency (k = 1) or the exact pair frequency of edge k.
// Throws std::domain_error when any factor frequency along x is zero.
Envelope gm_hash_envelope(const ExactEstimator& exact, std::span<const Value> x, uint64_t m,
                          double delta);

// Envelope for the factored count-min estimator: eps_k = e / (freq_k * m).
Envelope gm_factor_envelope(const ExactEstimator& exact, std::span<const Value> x, uint64_t m);

}  // namespace gms
