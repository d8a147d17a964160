#include "gms/precision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gms {

namespace {

constexpr double kE = 2.718281828459045;

// Exact factor frequencies along x: the root-value frequency followed by one
// pair frequency per edge. Throws when any of them is zero.
std::vector<double> factor_frequencies(const ExactEstimator& exact, std::span<const Value> x) {
    const TreeModel& model = exact.model();
    model.check_observation(x);
    std::vector<double> freqs;
    freqs.reserve(model.variable_count());
    freqs.push_back(exact.value_freq(1, x[0]));
    for (uint32_t k = 2; k <= model.variable_count(); ++k) {
        const uint32_t pa = model.parent(k);
        freqs.push_back(exact.pair_freq(k, x[k - 1], x[pa - 1]));
    }
    for (double f : freqs)
        if (f == 0.0)
            throw std::domain_error("envelope: zero factor frequency along the query");
    return freqs;
}

Envelope envelope_from(const std::vector<double>& epsilons) {
    Envelope env;
    for (double eps : epsilons) {
        // A slack of 1 or more makes the factor's lower bound vacuous;
        // estimates are nonnegative, so it contributes 0, not a negative
        // number whose product could flip sign.
        env.lower_factor *= std::max(1.0 - eps, 0.0);
        env.upper_factor *= 1.0 + eps;
    }
    return env;
}

}  // namespace

bool is_precise(double p_hat, double p_true) {
    if (!(p_true > 0.0)) throw std::domain_error("is_precise: undefined for p_true <= 0");
    return p_true / kE <= p_hat && p_hat <= kE * p_true;
}

Envelope gm_hash_envelope(const ExactEstimator& exact, std::span<const Value> x, uint64_t m,
                          double delta) {
    if (m == 0) throw std::invalid_argument("envelope: m must be positive");
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("envelope: delta must lie in (0, 1)");
    const auto freqs = factor_frequencies(exact, x);
    const double k_count = static_cast<double>(freqs.size());
    std::vector<double> eps;
    eps.reserve(freqs.size());
    for (double f : freqs) eps.push_back(2.0 * k_count / (f * delta * static_cast<double>(m)));
    return envelope_from(eps);
}

Envelope gm_factor_envelope(const ExactEstimator& exact, std::span<const Value> x, uint64_t m) {
    if (m == 0) throw std::invalid_argument("envelope: m must be positive");
    const auto freqs = factor_frequencies(exact, x);
    std::vector<double> eps;
    eps.reserve(freqs.size());
    for (double f : freqs) eps.push_back(kE / (f * static_cast<double>(m)));
    return envelope_from(eps);
}

}  // namespace gms
