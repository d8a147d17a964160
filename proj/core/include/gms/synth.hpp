#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gms/model.hpp"

namespace gms {

// Two-class naive Bayes family: a binary class variable with prior
// (0.5, 0.5) and `children` conditionally-uniform child variables. Class 1
// draws every child uniformly from [1, heavy_support]; class 2 from
// [heavy_support + 1, cardinality]. The two class supports are disjoint.
struct NaiveBayesSpec {
    uint32_t children = 1;       // K
    Value cardinality = 2;       // M
    Value heavy_support = 1;     // N, 1 <= N < M

    friend bool operator==(const NaiveBayesSpec&, const NaiveBayesSpec&) = default;
};

// Throws std::invalid_argument unless children >= 1 and 1 <= N < M.
void check_spec(const NaiveBayesSpec& spec);

// Star tree over children + 1 variables: the class variable is the root,
// cardinalities (2, M, ..., M).
TreeModel tree_of(const NaiveBayesSpec& spec);

// Row-major batch of fixed-width observations.
class ObservationBatch {
public:
    ObservationBatch(size_t width, size_t rows = 0) : width_(width), data_(width * rows) {}
    ObservationBatch(size_t width, std::vector<Value> data);

    size_t width() const noexcept { return width_; }
    size_t size() const noexcept { return width_ == 0 ? 0 : data_.size() / width_; }
    std::span<const Value> row(size_t t) const { return {data_.data() + t * width_, width_}; }
    std::span<Value> row(size_t t) { return {data_.data() + t * width_, width_}; }

    friend bool operator==(const ObservationBatch&, const ObservationBatch&) = default;

private:
    size_t width_;
    std::vector<Value> data_;
};

// n i.i.d. draws from the naive Bayes distribution; deterministic given seed.
ObservationBatch sample_stream(const NaiveBayesSpec& spec, size_t n, uint64_t seed);

struct LabeledQuery {
    Observation x;
    double true_p = 0.0;
    bool heavy = false;

    friend bool operator==(const LabeledQuery&, const LabeledQuery&) = default;
};

// i.i.d. draws conditioned on class 1 (heavy) or class 2 (light); true_p is
// the analytic point probability, 0.5 * N^-K or 0.5 * (M - N)^-K.
std::vector<LabeledQuery> sample_heavy_queries(const NaiveBayesSpec& spec, size_t count,
                                               uint64_t seed);
std::vector<LabeledQuery> sample_light_queries(const NaiveBayesSpec& spec, size_t count,
                                               uint64_t seed);

double heavy_probability(const NaiveBayesSpec& spec);
double light_probability(const NaiveBayesSpec& spec);

// Stream files: one observation per line, width space-separated 1-indexed
// integers. Query files append one probability column in exact form.
void write_stream(const std::filesystem::path& path, const ObservationBatch& batch);
ObservationBatch read_stream(const std::filesystem::path& path, size_t width);

void write_queries(const std::filesystem::path& path, std::span<const LabeledQuery> queries);

// "2^-193" for exact powers of two, decimal text otherwise.
std::string format_probability(double p);
double parse_probability(std::string_view text);

}  // namespace gms
