#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gms/hashing.hpp"
#include "gms/model.hpp"

namespace gms {

// Shared configuration of the four streaming estimators. Hash functions are
// derived from (seed, replica, variable), so equal configs mean equal hashes
// and merge-compatible sketches.
struct SketchConfig {
    TreeModel model;
    uint64_t bins = 1;   // m, per hash table
    uint32_t depth = 1;  // d, hash replicas (always 1 for GmHash)
    uint64_t seed = 0;

    friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

// Lower median: the element of rank ceil(d/2) (1-indexed) in sorted order,
// so even replica counts degrade gracefully. Takes its argument by value.
double lower_median(std::vector<double> values);

// Estimates are deliberately never clamped to [0, 1]: the estimators are
// not normalized, and clamping would bias the multiplicative-error checks.

// Count-min sketch over whole observation vectors: d rows of m counters,
// frequency estimated as the row-minimum of the matching bins. The
// whole-vector key is the mixed-radix encoding
//     x_1 + M_1 (x_2 - 1) + M_1 M_2 (x_3 - 1) + ...
// evaluated modulo the hash field prime (injective whenever prod M_k fits
// below the prime). Estimates never undershoot the true frequency.
class CountMinSketch {
public:
    explicit CountMinSketch(SketchConfig config);

    void update(std::span<const Value> x);

    // Row-minimum estimate of the empirical frequency of x.
    // Throws std::logic_error when the sketch is empty.
    double query(std::span<const Value> x) const;

    uint64_t count() const noexcept { return n_; }
    const SketchConfig& config() const noexcept { return config_; }
    std::span<const uint64_t> row(uint32_t i) const;
    const HashFn& row_hash(uint32_t i) const;
    uint64_t whole_vector_key(std::span<const Value> x) const;

    static CountMinSketch restore(SketchConfig config, uint64_t n, std::vector<uint64_t> table);
    friend CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b);
    friend bool operator==(const CountMinSketch&, const CountMinSketch&) = default;

private:
    SketchConfig config_;
    std::vector<uint64_t> radix_;     // cardinality multiplier chain
    std::vector<HashFn> row_hashes_;  // one per row, over the whole-vector key
    std::vector<uint64_t> table_;     // depth * bins
    uint64_t n_ = 0;
};

// Single-replica graphical-model estimator: one hash function per variable
// feeding one value table per variable and one pair table per edge. A query
// multiplies the hashed root prior by one hashed-bin ratio per edge.
class GmHash {
public:
    // Requires config.depth == 1.
    explicit GmHash(SketchConfig config);

    // Replica hook used by GmSketch; hash seeds derive from (seed, replica, k).
    GmHash(SketchConfig config, uint32_t replica);

    void update(std::span<const Value> x);

    // prior(x_1) * prod_k pair_bin / parent_bin. A zero denominator bin makes
    // the whole estimate 0 (division-safe convention; the paper-side math
    // leaves 0-denominators undefined). Not clamped; may exceed 1.
    // Throws std::logic_error when the sketch is empty.
    double query(std::span<const Value> x) const;

    uint64_t count() const noexcept { return n_; }
    const SketchConfig& config() const noexcept { return config_; }
    uint32_t replica() const noexcept { return replica_; }
    std::span<const uint64_t> value_table(uint32_t var) const;
    std::span<const uint64_t> pair_table(uint32_t var) const;  // var >= 2
    const HashFn& hash_fn(uint32_t var) const;

    static GmHash restore(SketchConfig config, uint32_t replica, uint64_t n,
                          std::vector<std::vector<uint64_t>> value_tables,
                          std::vector<std::vector<uint64_t>> pair_tables);
    friend GmHash merge(const GmHash& a, const GmHash& b);
    friend bool operator==(const GmHash&, const GmHash&) = default;

private:
    friend class GmSketch;
    void update_prehashed(std::span<const Value> x, std::span<const uint64_t> pair_keys);

    SketchConfig config_;
    uint32_t replica_ = 1;
    Hash hash_;
    std::vector<std::vector<uint64_t>> value_tables_;  // [var-1], bins each
    std::vector<std::vector<uint64_t>> pair_tables_;   // [var-1], empty at the root
    uint64_t n_ = 0;
};

// Median amplification of GmHash: d independent replicas, query answered by
// the lower median of the replica estimates.
class GmSketch {
public:
    explicit GmSketch(SketchConfig config);

    void update(std::span<const Value> x);
    double query(std::span<const Value> x) const;

    uint64_t count() const noexcept { return n_; }
    const SketchConfig& config() const noexcept { return config_; }
    const GmHash& replica(uint32_t i) const;  // 0-indexed

    static GmSketch restore(SketchConfig config, uint64_t n, std::vector<GmHash> replicas);
    friend GmSketch merge(const GmSketch& a, const GmSketch& b);
    friend bool operator==(const GmSketch&, const GmSketch&) = default;

private:
    SketchConfig config_;
    std::vector<GmHash> replicas_;
    uint64_t n_ = 0;
};

// Factored count-min estimator: an independent d x m count-min table per
// variable and per edge; every factor of the product is itself a count-min
// (row-minimum) estimate, so each factor never undershoots its true
// frequency.
class GmFactorSketch {
public:
    explicit GmFactorSketch(SketchConfig config);

    void update(std::span<const Value> x);

    // prior_cm(x_1) * prod_k pair_cm / parent_cm. A zero denominator makes
    // the estimate 0 even when the numerator bin is polluted by collisions;
    // the true pair frequency is provably 0 in that case.
    // Throws std::logic_error when the sketch is empty.
    double query(std::span<const Value> x) const;

    // Count-min estimates of the per-variable and per-edge frequencies.
    double value_estimate(uint32_t var, Value v) const;
    double pair_estimate(uint32_t var, Value child, Value parent) const;

    uint64_t count() const noexcept { return n_; }
    const SketchConfig& config() const noexcept { return config_; }
    std::span<const uint64_t> value_table(uint32_t var) const;  // depth * bins
    std::span<const uint64_t> pair_table(uint32_t var) const;   // var >= 2

    static GmFactorSketch restore(SketchConfig config, uint64_t n,
                                  std::vector<std::vector<uint64_t>> value_tables,
                                  std::vector<std::vector<uint64_t>> pair_tables);
    friend GmFactorSketch merge(const GmFactorSketch& a, const GmFactorSketch& b);
    friend bool operator==(const GmFactorSketch&, const GmFactorSketch&) = default;

private:
    uint64_t value_bin_min(uint32_t var, Value v) const;
    uint64_t pair_bin_min(uint32_t var, uint64_t key) const;

    SketchConfig config_;
    std::vector<Hash> hashes_;                         // one per replica
    std::vector<std::vector<uint64_t>> value_tables_;  // [var-1], depth * bins
    std::vector<std::vector<uint64_t>> pair_tables_;   // [var-1], empty at the root
    uint64_t n_ = 0;
};

}  // namespace gms
