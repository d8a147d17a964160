#include "gms/synth.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gms/rng.hpp"

namespace gms {

void check_spec(const NaiveBayesSpec& spec) {
    if (spec.children == 0)
        throw std::invalid_argument("NaiveBayesSpec: needs at least one child variable");
    if (spec.heavy_support == 0 || spec.heavy_support >= spec.cardinality)
        throw std::invalid_argument("NaiveBayesSpec: requires 1 <= N < M, got N=" +
                                    std::to_string(spec.heavy_support) +
                                    ", M=" + std::to_string(spec.cardinality));
}

TreeModel tree_of(const NaiveBayesSpec& spec) {
    check_spec(spec);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    std::vector<Value> cards(spec.children + 1, spec.cardinality);
    cards[0] = 2;
    for (uint32_t k = 2; k <= spec.children + 1; ++k) edges.emplace_back(k, 1);
    return TreeModel(std::move(edges), std::move(cards));
}

ObservationBatch sample_stream(const NaiveBayesSpec& spec, size_t n, uint64_t seed) {
    check_spec(spec);
    std::mt19937_64 eng(derive_seed(seed, 0x73747265));
    ObservationBatch batch(spec.children + 1, n);
    for (size_t t = 0; t < n; ++t) {
        auto x = batch.row(t);
        const Value cls = static_cast<Value>(uniform_u64(eng, 1, 2));
        x[0] = cls;
        if (cls == 1)
            for (uint32_t k = 1; k <= spec.children; ++k)
                x[k] = static_cast<Value>(uniform_u64(eng, 1, spec.heavy_support));
        else
            for (uint32_t k = 1; k <= spec.children; ++k)
                x[k] = static_cast<Value>(
                    uniform_u64(eng, spec.heavy_support + 1, spec.cardinality));
    }
    return batch;
}

double heavy_probability(const NaiveBayesSpec& spec) {
    return 0.5 * std::pow(static_cast<double>(spec.heavy_support),
                          -static_cast<double>(spec.children));
}

double light_probability(const NaiveBayesSpec& spec) {
    return 0.5 * std::pow(static_cast<double>(spec.cardinality - spec.heavy_support),
                          -static_cast<double>(spec.children));
}

namespace {

std::vector<LabeledQuery> sample_class_queries(const NaiveBayesSpec& spec, size_t count,
                                               uint64_t seed, bool heavy) {
    check_spec(spec);
    if (count == 0) throw std::invalid_argument("sample queries: count must be >= 1");
    std::mt19937_64 eng(derive_seed(seed, heavy ? 0x68657679 : 0x6c696768));
    const double p = heavy ? heavy_probability(spec) : light_probability(spec);
    const Value lo = heavy ? 1 : spec.heavy_support + 1;
    const Value hi = heavy ? spec.heavy_support : spec.cardinality;
    std::vector<LabeledQuery> out(count);
    for (auto& q : out) {
        q.x.resize(spec.children + 1);
        q.x[0] = heavy ? 1 : 2;
        for (uint32_t k = 1; k <= spec.children; ++k)
            q.x[k] = static_cast<Value>(uniform_u64(eng, lo, hi));
        q.true_p = p;
        q.heavy = heavy;
    }
    return out;
}

}  // namespace

std::vector<LabeledQuery> sample_heavy_queries(const NaiveBayesSpec& spec, size_t count,
                                               uint64_t seed) {
    return sample_class_queries(spec, count, seed, true);
}

std::vector<LabeledQuery> sample_light_queries(const NaiveBayesSpec& spec, size_t count,
                                               uint64_t seed) {
    return sample_class_queries(spec, count, seed, false);
}

void write_stream(const std::filesystem::path& path, const ObservationBatch& batch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (size_t t = 0; t < batch.size(); ++t) {
        const auto x = batch.row(t);
        for (size_t k = 0; k < x.size(); ++k) {
            if (k) out << ' ';
            out << x[k];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ObservationBatch::ObservationBatch(size_t width, std::vector<Value> data)
    : width_(width), data_(std::move(data)) {
    if (width_ == 0 || data_.size() % width_ != 0)
        throw std::invalid_argument("ObservationBatch: data size is not a multiple of width");
}

ObservationBatch read_stream(const std::filesystem::path& path, size_t width) {
    if (width == 0) throw std::invalid_argument("read_stream: width must be >= 1");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stream file: " + path.string());
    std::vector<Value> data;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        size_t got = 0;
        uint64_t v;
        while (fields >> v) {
            data.push_back(static_cast<Value>(v));
            ++got;
        }
        if (got != width)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(width) + " values, got " +
                                     std::to_string(got));
    }
    return ObservationBatch(width, std::move(data));
}

void write_queries(const std::filesystem::path& path, std::span<const LabeledQuery> queries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const auto& q : queries) {
        for (size_t k = 0; k < q.x.size(); ++k) out << q.x[k] << ' ';
        out << format_probability(q.true_p) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_probability(double p) {
    int exp = 0;
    const double mantissa = std::frexp(p, &exp);
    if (p > 0.0 && mantissa == 0.5) return "2^" + std::to_string(exp - 1);
    std::ostringstream s;
    s.precision(17);
    s << p;
    return s.str();
}

double parse_probability(std::string_view text) {
    if (text.starts_with("2^")) {
        int exp = 0;
        const auto* first = text.data() + 2;
        const auto* last = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, exp);
        if (ec != std::errc{} || ptr != last)
            throw std::invalid_argument("bad probability literal: " + std::string(text));
        return std::ldexp(1.0, exp);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("bad probability literal: " + std::string(text));
    return v;
}

}  // namespace gms
