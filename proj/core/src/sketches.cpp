#include "gms/sketches.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gms {

namespace {

void check_config(const SketchConfig& config) {
    if (config.bins == 0) throw std::invalid_argument("sketch: bin count must be positive");
    if (config.depth == 0) throw std::invalid_argument("sketch: depth must be positive");
}

void check_mergeable(const SketchConfig& a, const SketchConfig& b) {
    if (!(a == b))
        throw std::invalid_argument(
            "merge: sketch configs differ (model, bins, depth and seed must all match)");
}

// Flattened topology so update loops avoid per-variable range checks.
struct Topology {
    std::vector<uint32_t> parent_index;  // 0-indexed parent per variable; 0 for the root slot
    std::vector<uint64_t> child_card;

    explicit Topology(const TreeModel& model) {
        const uint32_t k_count = model.variable_count();
        parent_index.assign(k_count, 0);
        child_card.assign(k_count, 0);
        for (uint32_t k = 1; k <= k_count; ++k) {
            child_card[k - 1] = model.cardinality(k);
            if (k >= 2) parent_index[k - 1] = model.parent(k) - 1;
        }
    }
};

// Pair-key scratch: stack storage for every realistic variable count.
constexpr size_t kKeyScratch = 64;

std::span<uint64_t> scratch_span(uint32_t variable_count, uint64_t (&stack)[kKeyScratch],
                                 std::vector<uint64_t>& heap) {
    const size_t edges = variable_count - 1;
    if (edges <= kKeyScratch) return {stack, edges};
    heap.resize(edges);
    return heap;
}

uint64_t checked_sum_matches(const std::vector<uint64_t>& table, size_t row_width, uint64_t n,
                             const char* what) {
    if (row_width == 0 || table.size() % row_width != 0)
        throw std::invalid_argument(std::string("restore: malformed ") + what + " table");
    for (size_t r = 0; r < table.size() / row_width; ++r) {
        uint64_t sum = 0;
        for (size_t j = 0; j < row_width; ++j) sum += table[r * row_width + j];
        if (sum != n)
            throw std::invalid_argument(std::string("restore: ") + what +
                                        " row sum does not match the stream count");
    }
    return n;
}

}  // namespace

double lower_median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("lower_median: empty input");
    const size_t rank = (values.size() + 1) / 2;  // 1-indexed rank ceil(d/2)
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values[rank - 1];
}

// ---------------------------------------------------------------------------
// CountMinSketch

CountMinSketch::CountMinSketch(SketchConfig config) : config_(std::move(config)) {
    check_config(config_);
    const uint32_t k_count = config_.model.variable_count();
    for (uint32_t k = 1; k <= k_count; ++k) radix_.push_back(config_.model.cardinality(k));
    row_hashes_.reserve(config_.depth);
    for (uint32_t i = 1; i <= config_.depth; ++i)
        row_hashes_.emplace_back(derive_seed(config_.seed, i, 0), config_.bins);
    table_.assign(static_cast<size_t>(config_.depth) * config_.bins, 0);
}

uint64_t CountMinSketch::whole_vector_key(std::span<const Value> x) const {
    config_.model.check_observation(x);
    // Horner over the mixed-radix digits, reduced in the hash field.
    uint64_t acc = 0;
    for (size_t k = x.size(); k >= 2; --k)
        acc = addmod_prime((x[k - 1] - 1) % kHashPrime, mulmod_prime(radix_[k - 1], acc));
    return addmod_prime(x[0] % kHashPrime, mulmod_prime(radix_[0], acc));
}

void CountMinSketch::update(std::span<const Value> x) {
    const uint64_t key = whole_vector_key(x);
    for (uint32_t i = 0; i < config_.depth; ++i)
        ++table_[static_cast<size_t>(i) * config_.bins + row_hashes_[i].index(key)];
    ++n_;
}

double CountMinSketch::query(std::span<const Value> x) const {
    if (n_ == 0) throw std::logic_error("CountMinSketch::query: empty sketch");
    const uint64_t key = whole_vector_key(x);
    uint64_t best = UINT64_MAX;
    for (uint32_t i = 0; i < config_.depth; ++i)
        best = std::min(best, table_[static_cast<size_t>(i) * config_.bins + row_hashes_[i].index(key)]);
    return static_cast<double>(best) / static_cast<double>(n_);
}

std::span<const uint64_t> CountMinSketch::row(uint32_t i) const {
    if (i >= config_.depth) throw std::invalid_argument("CountMinSketch::row: no such row");
    return {table_.data() + static_cast<size_t>(i) * config_.bins, config_.bins};
}

const HashFn& CountMinSketch::row_hash(uint32_t i) const {
    if (i >= config_.depth) throw std::invalid_argument("CountMinSketch::row_hash: no such row");
    return row_hashes_[i];
}

CountMinSketch CountMinSketch::restore(SketchConfig config, uint64_t n,
                                       std::vector<uint64_t> table) {
    CountMinSketch s(std::move(config));
    if (table.size() != s.table_.size())
        throw std::invalid_argument("restore: count-min table has the wrong shape");
    checked_sum_matches(table, s.config_.bins, n, "count-min");
    s.table_ = std::move(table);
    s.n_ = n;
    return s;
}

CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b) {
    check_mergeable(a.config_, b.config_);
    CountMinSketch out = a;
    for (size_t i = 0; i < out.table_.size(); ++i) out.table_[i] += b.table_[i];
    out.n_ += b.n_;
    return out;
}

// ---------------------------------------------------------------------------
// GmHash

GmHash::GmHash(SketchConfig config) : GmHash(std::move(config), 1) {
    if (config_.depth != 1)
        throw std::invalid_argument("GmHash: depth must be 1 (use GmSketch for replicas)");
}

GmHash::GmHash(SketchConfig config, uint32_t replica)
    : config_(std::move(config)), replica_(replica) {
    check_config(config_);
    const uint32_t k_count = config_.model.variable_count();
    hash_ = Hash(config_.seed, replica_, k_count, config_.bins);
    value_tables_.resize(k_count);
    pair_tables_.resize(k_count);
    for (uint32_t k = 1; k <= k_count; ++k) {
        value_tables_[k - 1].assign(config_.bins, 0);
        if (k >= 2) pair_tables_[k - 1].assign(config_.bins, 0);
    }
}

void GmHash::update(std::span<const Value> x) {
    config_.model.check_observation(x);
    update_prehashed(x, {});
}

void GmHash::update_prehashed(std::span<const Value> x, std::span<const uint64_t> pair_keys) {
    const size_t k_count = value_tables_.size();
    for (size_t k = 0; k < k_count; ++k) ++value_tables_[k][hash_.fn(k).index(x[k])];
    if (pair_keys.empty()) {
        const TreeModel& model = config_.model;
        for (uint32_t k = 2; k <= k_count; ++k) {
            const uint64_t key =
                pair_key(x[k - 1], x[model.parent(k) - 1], model.cardinality(k));
            ++pair_tables_[k - 1][hash_.fn(k - 1).index(key)];
        }
    } else {
        for (size_t k = 1; k < k_count; ++k)
            ++pair_tables_[k][hash_.fn(k).index(pair_keys[k - 1])];
    }
    ++n_;
}

double GmHash::query(std::span<const Value> x) const {
    if (n_ == 0) throw std::logic_error("GmHash::query: empty sketch");
    config_.model.check_observation(x);
    const TreeModel& model = config_.model;
    double p = static_cast<double>(value_tables_[0][hash_.fn(0).index(x[0])]) /
               static_cast<double>(n_);
    for (uint32_t k = 2; k <= model.variable_count() && p != 0.0; ++k) {
        const uint32_t pa = model.parent(k);
        const uint64_t den = value_tables_[pa - 1][hash_.fn(pa - 1).index(x[pa - 1])];
        if (den == 0) return 0.0;
        const uint64_t key = pair_key(x[k - 1], x[pa - 1], model.cardinality(k));
        const uint64_t num = pair_tables_[k - 1][hash_.fn(k - 1).index(key)];
        p *= static_cast<double>(num) / static_cast<double>(den);
    }
    return p;
}

std::span<const uint64_t> GmHash::value_table(uint32_t var) const {
    if (var == 0 || var > value_tables_.size())
        throw std::invalid_argument("GmHash::value_table: no such variable");
    return value_tables_[var - 1];
}

std::span<const uint64_t> GmHash::pair_table(uint32_t var) const {
    if (var < 2 || var > pair_tables_.size())
        throw std::invalid_argument("GmHash::pair_table: no such edge");
    return pair_tables_[var - 1];
}

const HashFn& GmHash::hash_fn(uint32_t var) const {
    if (var == 0 || var > value_tables_.size())
        throw std::invalid_argument("GmHash::hash_fn: no such variable");
    return hash_.fn(var - 1);
}

GmHash GmHash::restore(SketchConfig config, uint32_t replica, uint64_t n,
                       std::vector<std::vector<uint64_t>> value_tables,
                       std::vector<std::vector<uint64_t>> pair_tables) {
    GmHash s(std::move(config), replica);
    const size_t k_count = s.value_tables_.size();
    if (value_tables.size() != k_count || pair_tables.size() != k_count)
        throw std::invalid_argument("restore: wrong table count");
    for (size_t k = 0; k < k_count; ++k) {
        if (value_tables[k].size() != s.config_.bins)
            throw std::invalid_argument("restore: value table has the wrong shape");
        checked_sum_matches(value_tables[k], s.config_.bins, n, "value");
        const size_t want = k == 0 ? 0 : s.config_.bins;
        if (pair_tables[k].size() != want)
            throw std::invalid_argument("restore: pair table has the wrong shape");
        if (k > 0) checked_sum_matches(pair_tables[k], s.config_.bins, n, "pair");
    }
    s.value_tables_ = std::move(value_tables);
    s.pair_tables_ = std::move(pair_tables);
    s.n_ = n;
    return s;
}

GmHash merge(const GmHash& a, const GmHash& b) {
    check_mergeable(a.config_, b.config_);
    if (a.replica_ != b.replica_)
        throw std::invalid_argument("merge: sketches built from different hash replicas");
    GmHash out = a;
    for (size_t k = 0; k < out.value_tables_.size(); ++k) {
        for (size_t j = 0; j < out.value_tables_[k].size(); ++j)
            out.value_tables_[k][j] += b.value_tables_[k][j];
        for (size_t j = 0; j < out.pair_tables_[k].size(); ++j)
            out.pair_tables_[k][j] += b.pair_tables_[k][j];
    }
    out.n_ += b.n_;
    return out;
}

// ---------------------------------------------------------------------------
// GmSketch

GmSketch::GmSketch(SketchConfig config) : config_(std::move(config)) {
    check_config(config_);
    replicas_.reserve(config_.depth);
    for (uint32_t i = 1; i <= config_.depth; ++i) replicas_.emplace_back(GmHash(config_, i));
}

void GmSketch::update(std::span<const Value> x) {
    const TreeModel& model = config_.model;
    model.check_observation(x);
    // Pair keys are replica-independent; compute them once.
    uint64_t stack_keys[kKeyScratch];
    std::vector<uint64_t> heap_keys;
    std::span<uint64_t> keys = scratch_span(model.variable_count(), stack_keys, heap_keys);
    for (uint32_t k = 2; k <= model.variable_count(); ++k)
        keys[k - 2] = pair_key(x[k - 1], x[model.parent(k) - 1], model.cardinality(k));
    for (GmHash& r : replicas_) r.update_prehashed(x, keys);
    ++n_;
}

double GmSketch::query(std::span<const Value> x) const {
    if (n_ == 0) throw std::logic_error("GmSketch::query: empty sketch");
    std::vector<double> estimates;
    estimates.reserve(replicas_.size());
    for (const GmHash& r : replicas_) estimates.push_back(r.query(x));
    return lower_median(std::move(estimates));
}

const GmHash& GmSketch::replica(uint32_t i) const {
    if (i >= replicas_.size()) throw std::invalid_argument("GmSketch::replica: no such replica");
    return replicas_[i];
}

GmSketch GmSketch::restore(SketchConfig config, uint64_t n, std::vector<GmHash> replicas) {
    GmSketch s(std::move(config));
    if (replicas.size() != s.replicas_.size())
        throw std::invalid_argument("restore: wrong replica count");
    for (size_t i = 0; i < replicas.size(); ++i) {
        if (replicas[i].replica() != i + 1 || !(replicas[i].config() == s.config_) ||
            replicas[i].count() != n)
            throw std::invalid_argument("restore: replica does not match the sketch config");
    }
    s.replicas_ = std::move(replicas);
    s.n_ = n;
    return s;
}

GmSketch merge(const GmSketch& a, const GmSketch& b) {
    check_mergeable(a.config_, b.config_);
    GmSketch out = a;
    for (size_t i = 0; i < out.replicas_.size(); ++i)
        out.replicas_[i] = merge(out.replicas_[i], b.replicas_[i]);
    out.n_ += b.n_;
    return out;
}

// ---------------------------------------------------------------------------
// GmFactorSketch

GmFactorSketch::GmFactorSketch(SketchConfig config) : config_(std::move(config)) {
    check_config(config_);
    const uint32_t k_count = config_.model.variable_count();
    hashes_.reserve(config_.depth);
    for (uint32_t i = 1; i <= config_.depth; ++i)
        hashes_.emplace_back(Hash(config_.seed, i, k_count, config_.bins));
    value_tables_.resize(k_count);
    pair_tables_.resize(k_count);
    const size_t cells = static_cast<size_t>(config_.depth) * config_.bins;
    for (uint32_t k = 1; k <= k_count; ++k) {
        value_tables_[k - 1].assign(cells, 0);
        if (k >= 2) pair_tables_[k - 1].assign(cells, 0);
    }
}

void GmFactorSketch::update(std::span<const Value> x) {
    const TreeModel& model = config_.model;
    model.check_observation(x);
    const uint32_t k_count = model.variable_count();
    const uint64_t m = config_.bins;
    uint64_t stack_keys[kKeyScratch];
    std::vector<uint64_t> heap_keys;
    std::span<uint64_t> keys = scratch_span(k_count, stack_keys, heap_keys);
    for (uint32_t k = 2; k <= k_count; ++k)
        keys[k - 2] = pair_key(x[k - 1], x[model.parent(k) - 1], model.cardinality(k));
    for (uint32_t i = 0; i < config_.depth; ++i) {
        const Hash& h = hashes_[i];
        const size_t base = static_cast<size_t>(i) * m;
        for (uint32_t k = 0; k < k_count; ++k)
            ++value_tables_[k][base + h.fn(k).index(x[k])];
        for (uint32_t k = 1; k < k_count; ++k)
            ++pair_tables_[k][base + h.fn(k).index(keys[k - 1])];
    }
    ++n_;
}

uint64_t GmFactorSketch::value_bin_min(uint32_t var, Value v) const {
    uint64_t best = UINT64_MAX;
    for (uint32_t i = 0; i < config_.depth; ++i)
        best = std::min(best, value_tables_[var - 1][static_cast<size_t>(i) * config_.bins +
                                                     hashes_[i].fn(var - 1).index(v)]);
    return best;
}

uint64_t GmFactorSketch::pair_bin_min(uint32_t var, uint64_t key) const {
    uint64_t best = UINT64_MAX;
    for (uint32_t i = 0; i < config_.depth; ++i)
        best = std::min(best, pair_tables_[var - 1][static_cast<size_t>(i) * config_.bins +
                                                    hashes_[i].fn(var - 1).index(key)]);
    return best;
}

double GmFactorSketch::value_estimate(uint32_t var, Value v) const {
    if (n_ == 0) throw std::logic_error("GmFactorSketch::value_estimate: empty sketch");
    if (var == 0 || var > config_.model.variable_count() || v == 0 ||
        v > config_.model.cardinality(var))
        throw std::invalid_argument("GmFactorSketch::value_estimate: value out of range");
    return static_cast<double>(value_bin_min(var, v)) / static_cast<double>(n_);
}

double GmFactorSketch::pair_estimate(uint32_t var, Value child, Value parent) const {
    if (n_ == 0) throw std::logic_error("GmFactorSketch::pair_estimate: empty sketch");
    const uint32_t pa = config_.model.parent(var);
    if (parent == 0 || parent > config_.model.cardinality(pa))
        throw std::invalid_argument("GmFactorSketch::pair_estimate: parent value out of range");
    const uint64_t key = pair_key(child, parent, config_.model.cardinality(var));
    return static_cast<double>(pair_bin_min(var, key)) / static_cast<double>(n_);
}

double GmFactorSketch::query(std::span<const Value> x) const {
    if (n_ == 0) throw std::logic_error("GmFactorSketch::query: empty sketch");
    const TreeModel& model = config_.model;
    model.check_observation(x);
    double p = static_cast<double>(value_bin_min(1, x[0])) / static_cast<double>(n_);
    for (uint32_t k = 2; k <= model.variable_count() && p != 0.0; ++k) {
        const uint32_t pa = model.parent(k);
        const uint64_t den = value_bin_min(pa, x[pa - 1]);
        if (den == 0) return 0.0;
        const uint64_t key = pair_key(x[k - 1], x[pa - 1], model.cardinality(k));
        const uint64_t num = pair_bin_min(k, key);
        p *= static_cast<double>(num) / static_cast<double>(den);
    }
    return p;
}

std::span<const uint64_t> GmFactorSketch::value_table(uint32_t var) const {
    if (var == 0 || var > value_tables_.size())
        throw std::invalid_argument("GmFactorSketch::value_table: no such variable");
    return value_tables_[var - 1];
}

std::span<const uint64_t> GmFactorSketch::pair_table(uint32_t var) const {
    if (var < 2 || var > pair_tables_.size())
        throw std::invalid_argument("GmFactorSketch::pair_table: no such edge");
    return pair_tables_[var - 1];
}

GmFactorSketch GmFactorSketch::restore(SketchConfig config, uint64_t n,
                                       std::vector<std::vector<uint64_t>> value_tables,
                                       std::vector<std::vector<uint64_t>> pair_tables) {
    GmFactorSketch s(std::move(config));
    const size_t k_count = s.value_tables_.size();
    const size_t cells = static_cast<size_t>(s.config_.depth) * s.config_.bins;
    if (value_tables.size() != k_count || pair_tables.size() != k_count)
        throw std::invalid_argument("restore: wrong table count");
    for (size_t k = 0; k < k_count; ++k) {
        if (value_tables[k].size() != cells)
            throw std::invalid_argument("restore: value table has the wrong shape");
        checked_sum_matches(value_tables[k], s.config_.bins, n, "value");
        const size_t want = k == 0 ? 0 : cells;
        if (pair_tables[k].size() != want)
            throw std::invalid_argument("restore: pair table has the wrong shape");
        if (k > 0) checked_sum_matches(pair_tables[k], s.config_.bins, n, "pair");
    }
    s.value_tables_ = std::move(value_tables);
    s.pair_tables_ = std::move(pair_tables);
    s.n_ = n;
    return s;
}

GmFactorSketch merge(const GmFactorSketch& a, const GmFactorSketch& b) {
    check_mergeable(a.config_, b.config_);
    GmFactorSketch out = a;
    for (size_t k = 0; k < out.value_tables_.size(); ++k) {
        for (size_t j = 0; j < out.value_tables_[k].size(); ++j)
            out.value_tables_[k][j] += b.value_tables_[k][j];
        for (size_t j = 0; j < out.pair_tables_[k].size(); ++j)
            out.pair_tables_[k][j] += b.pair_tables_[k][j];
    }
    out.n_ += b.n_;
    return out;
}

}  // namespace gms
