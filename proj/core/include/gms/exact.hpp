#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gms/model.hpp"

namespace gms {

// Dense factored maximum-likelihood estimator over a tree model: exact
// per-variable value counts and per-edge joint counts. This is the test
// oracle and the hardness-constant calculator; space is
// O(sum_k M_k + sum_{k>=2} M_k * M_pa(k)), so it is meant for desk-scale
// cardinalities only (roughly M_k <= 2^16 on any one edge).
//
// Single writer; queries must not interleave with updates.
class ExactEstimator {
public:
    explicit ExactEstimator(TreeModel model);

    void update(std::span<const Value> x);

    // Product of the root prior and one conditional per edge. A factor with
    // zero numerator makes the whole product 0; a zero-count parent value
    // forces a zero numerator (the joint table marginalizes to the parent
    // table), so 0/0 conditionals yield 0 rather than an error.
    // Throws std::logic_error when no observations have been seen.
    double query(std::span<const Value> x) const;

    // Minimum joint frequency over the (child, parent) value pairs of x;
    // the query-hardness constant. Throws std::logic_error when n == 0 and
    // std::invalid_argument for single-variable models (no edges).
    double delta(std::span<const Value> x) const;

    uint64_t count() const noexcept { return n_; }
    const TreeModel& model() const noexcept { return model_; }

    uint64_t value_count(uint32_t var, Value v) const;
    uint64_t pair_count(uint32_t var, Value child, Value parent) const;  // var >= 2

    double value_freq(uint32_t var, Value v) const;
    double pair_freq(uint32_t var, Value child, Value parent) const;

private:
    TreeModel model_;
    uint64_t n_ = 0;
    std::vector<std::vector<uint64_t>> value_counts_;  // [var-1][value-1]
    std::vector<std::vector<uint64_t>> pair_counts_;   // [var-1][(parent-1) * M_var + child-1]
};

}  // namespace gms
