#include "gms/exact.hpp"

#include <stdexcept>
#include <string>

namespace gms {

ExactEstimator::ExactEstimator(TreeModel model) : model_(std::move(model)) {
    const uint32_t k_count = model_.variable_count();
    value_counts_.resize(k_count);
    pair_counts_.resize(k_count);
    for (uint32_t k = 1; k <= k_count; ++k) {
        value_counts_[k - 1].assign(model_.cardinality(k), 0);
        if (k >= 2) {
            const size_t cells =
                static_cast<size_t>(model_.cardinality(k)) * model_.cardinality(model_.parent(k));
            pair_counts_[k - 1].assign(cells, 0);
        }
    }
}

void ExactEstimator::update(std::span<const Value> x) {
    model_.check_observation(x);
    const uint32_t k_count = model_.variable_count();
    for (uint32_t k = 1; k <= k_count; ++k) {
        ++value_counts_[k - 1][x[k - 1] - 1];
        if (k >= 2) {
            const uint32_t pa = model_.parent(k);
            const size_t cell =
                static_cast<size_t>(x[pa - 1] - 1) * model_.cardinality(k) + (x[k - 1] - 1);
            ++pair_counts_[k - 1][cell];
        }
    }
    ++n_;
}

double ExactEstimator::query(std::span<const Value> x) const {
    if (n_ == 0) throw std::logic_error("ExactEstimator::query: no observations");
    model_.check_observation(x);
    double p = static_cast<double>(value_counts_[0][x[0] - 1]) / static_cast<double>(n_);
    if (p == 0.0) return 0.0;
    for (uint32_t k = 2; k <= model_.variable_count(); ++k) {
        const uint32_t pa = model_.parent(k);
        const uint64_t num = pair_count(k, x[k - 1], x[pa - 1]);
        if (num == 0) return 0.0;  // covers zero-count parents: num <= parent count
        const uint64_t den = value_counts_[pa - 1][x[pa - 1] - 1];
        p *= static_cast<double>(num) / static_cast<double>(den);
    }
    return p;
}

double ExactEstimator::delta(std::span<const Value> x) const {
    if (n_ == 0) throw std::logic_error("ExactEstimator::delta: no observations");
    if (model_.variable_count() < 2)
        throw std::invalid_argument("ExactEstimator::delta: undefined for models without edges");
    model_.check_observation(x);
    uint64_t min_pairs = n_;
    for (uint32_t k = 2; k <= model_.variable_count(); ++k) {
        const uint32_t pa = model_.parent(k);
        min_pairs = std::min(min_pairs, pair_count(k, x[k - 1], x[pa - 1]));
    }
    return static_cast<double>(min_pairs) / static_cast<double>(n_);
}

uint64_t ExactEstimator::value_count(uint32_t var, Value v) const {
    if (v == 0 || v > model_.cardinality(var))
        throw std::invalid_argument("value_count: value out of range");
    return value_counts_[var - 1][v - 1];
}

uint64_t ExactEstimator::pair_count(uint32_t var, Value child, Value parent) const {
    const uint32_t pa = model_.parent(var);  // throws for the root
    if (child == 0 || child > model_.cardinality(var) || parent == 0 ||
        parent > model_.cardinality(pa))
        throw std::invalid_argument("pair_count: value out of range");
    return pair_counts_[var - 1][static_cast<size_t>(parent - 1) * model_.cardinality(var) +
                                 (child - 1)];
}

double ExactEstimator::value_freq(uint32_t var, Value v) const {
    if (n_ == 0) throw std::logic_error("ExactEstimator::value_freq: no observations");
    return static_cast<double>(value_count(var, v)) / static_cast<double>(n_);
}

double ExactEstimator::pair_freq(uint32_t var, Value child, Value parent) const {
    if (n_ == 0) throw std::logic_error("ExactEstimator::pair_freq: no observations");
    return static_cast<double>(pair_count(var, child, parent)) / static_cast<double>(n_);
}

}  // namespace gms
