// Release-gate validation suite. Each check prints one PASS/FAIL line; the
// exit code is nonzero when any selected check fails. Run with no arguments
// for all checks or with a list of check numbers (1-8).

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gms/exact.hpp"
#include "gms/experiment.hpp"
#include "gms/hashing.hpp"
#include "gms/precision.hpp"
#include "gms/rng.hpp"
#include "gms/sketches.hpp"
#include "gms/snapshot.hpp"
#include "gms/synth.hpp"
#include "test_support.hpp"

using namespace gms;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double binomial_se(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

int log2_of(uint64_t v) { return static_cast<int>(std::lround(std::log2(double(v)))); }

void print_sweep(const ExperimentResult& result, const ExperimentConfig& config) {
    std::map<uint64_t, std::map<Estimator, double>> by_budget;
    for (const CellResult& c : result.cells) by_budget[c.budget][c.estimator] = c.mean;
    std::printf("    %-10s", "budget");
    for (Estimator est : config.estimators) std::printf(" %9s", std::string(estimator_name(est)).c_str());
    std::printf("\n");
    for (const auto& [budget, row] : by_budget) {
        std::printf("    2^%-8d", log2_of(budget));
        for (Estimator est : config.estimators) {
            const auto it = row.find(est);
            if (it == row.end() || std::isnan(it->second))
                std::printf(" %9s", "-");
            else
                std::printf(" %9.4f", it->second);
        }
        std::printf("\n");
    }
}

// Smallest budget whose mean imprecise fraction is <= the target.
std::optional<uint64_t> crossing_budget(const ExperimentResult& result,
                                        const ExperimentConfig& config, Estimator est,
                                        double target) {
    for (uint64_t budget : config.budgets) {
        const CellResult& cell = result.cell(est, budget);
        if (cell.supported() && cell.mean <= target) return budget;
    }
    return std::nullopt;
}

// --- 1: easy synthetic problem, space crossings ----------------------------

Outcome check_easy_crossings() {
    ExperimentConfig config = easy_synth_preset();
    config.estimators = {Estimator::CountMin, Estimator::GmFactor};
    const ExperimentResult result = run_experiment(config);
    print_sweep(result, config);

    const auto gmf = crossing_budget(result, config, Estimator::GmFactor, 0.05);
    const auto cm = crossing_budget(result, config, Estimator::CountMin, 0.05);
    Outcome out;
    std::ostringstream detail;
    if (!gmf || !cm) {
        out.pass = false;
        detail << "an estimator never reached a 0.05 imprecise fraction";
    } else {
        const int gmf_log2 = log2_of(*gmf), cm_log2 = log2_of(*cm);
        detail << "gmfactor crosses 0.05 at 2^" << gmf_log2 << " (expected 2^10 +- 1), cm at 2^"
               << cm_log2 << " (expected 2^15 +- 1)";
        out.pass = std::abs(gmf_log2 - 10) <= 1 && std::abs(cm_log2 - 15) <= 1;
    }
    out.detail = detail.str();
    return out;
}

// --- 2: hard synthetic problem, orderings ----------------------------------

Outcome check_hard_problem() {
    const ExperimentConfig config = hard_synth_preset();
    const ExperimentResult result = run_experiment(config);
    print_sweep(result, config);

    Outcome out;
    std::ostringstream detail;

    // The count-min baseline stays imprecise at every feasible budget.
    double cm_min = 1.0;
    for (uint64_t budget : config.budgets)
        cm_min = std::min(cm_min, result.cell(Estimator::CountMin, budget).mean);
    if (cm_min < 0.95) {
        out.pass = false;
        detail << "cm dipped to " << cm_min << " (< 0.95); ";
    }

    const auto gmf = crossing_budget(result, config, Estimator::GmFactor, 0.05);
    if (!gmf) {
        out.pass = false;
        detail << "gmfactor never reached 0.05; ";
    } else {
        detail << "gmfactor reaches 0.05 at 2^" << log2_of(*gmf) << "; ";
    }

    // Low-error region: budgets where all three structured estimators are at
    // or below 0.05. There the residual error must order
    // gmhash >= gmsketch >= gmfactor up to 3 pooled standard errors.
    size_t region = 0;
    bool ordered = true;
    for (uint64_t budget : config.budgets) {
        const CellResult& gh = result.cell(Estimator::GmHash, budget);
        const CellResult& gs = result.cell(Estimator::GmSketch, budget);
        const CellResult& gf = result.cell(Estimator::GmFactor, budget);
        if (!(gh.mean <= 0.05 && gs.mean <= 0.05 && gf.mean <= 0.05)) continue;
        ++region;
        const auto pooled = [](const CellResult& a, const CellResult& b) {
            return std::sqrt(a.stddev * a.stddev / a.runs + b.stddev * b.stddev / b.runs);
        };
        if (gh.mean < gs.mean - 3 * pooled(gh, gs)) ordered = false;
        if (gs.mean < gf.mean - 3 * pooled(gs, gf)) ordered = false;
    }
    if (region == 0) {
        out.pass = false;
        detail << "low-error region is empty";
    } else {
        detail << "ordering gmhash >= gmsketch >= gmfactor holds at " << region
               << " low-error budgets: " << (ordered ? "yes" : "NO");
        if (!ordered) out.pass = false;
    }
    out.detail = detail.str();
    return out;
}

// --- 3: count-min one-sidedness ---------------------------------------------

Outcome check_one_sidedness() {
    std::mt19937_64 eng(1031);
    uint64_t checked = 0, violations = 0;
    for (int round = 0; round < 25; ++round) {
        const uint32_t k_count = static_cast<uint32_t>(uniform_u64(eng, 1, 4));
        const Value card = static_cast<Value>(uniform_u64(eng, 2, 8));
        const TreeModel model = round % 2 ? gms::test::chain_model(k_count, card)
                                          : gms::test::star_model(k_count, card);
        CountMinSketch sketch(SketchConfig{model, uniform_u64(eng, 2, 64),
                                           static_cast<uint32_t>(uniform_u64(eng, 1, 4)),
                                           eng()});
        gms::test::FrequencyOracle oracle;
        for (int t = 0; t < 2000; ++t) {
            const Observation x = gms::test::random_observation(model, eng);
            sketch.update(x);
            oracle.add(x);
        }
        for (int q = 0; q < 4000; ++q) {
            const Observation x = gms::test::random_observation(model, eng);
            ++checked;
            violations += sketch.query(x) < oracle.frequency(x);
        }
    }
    Outcome out;
    out.pass = violations == 0 && checked == 100000;
    std::ostringstream detail;
    detail << checked << " random queries, " << violations << " undershoots (tolerance 0)";
    out.detail = detail.str();
    return out;
}

// --- 4: oracle equivalence under audited collision-free hashing -------------

Outcome check_oracle_equivalence() {
    std::mt19937_64 eng(47);
    uint64_t points = 0, mismatches = 0;
    const std::vector<TreeModel> models = {
        gms::test::chain_model(3, 8), gms::test::star_model(3, 8), gms::test::chain_model(2, 8),
        TreeModel({{2, 1}, {3, 2}}, {2, 8, 4}), TreeModel({}, {8})};
    for (const TreeModel& model : models) {
        const uint64_t bins = uint64_t{1} << 16;
        const auto seed = gms::test::find_collision_free_seed(model, 3, bins, 500);
        if (!seed) return {false, "no collision-free seed found in 500 tries"};

        GmHash gh(SketchConfig{model, bins, 1, *seed});
        GmSketch gs(SketchConfig{model, bins, 3, *seed});
        GmFactorSketch gf(SketchConfig{model, bins, 3, *seed});
        ExactEstimator exact(model);
        for (int t = 0; t < 1000; ++t) {
            const Observation x = gms::test::random_observation(model, eng);
            gh.update(x);
            gs.update(x);
            gf.update(x);
            exact.update(x);
        }
        for (const Observation& x : gms::test::enumerate_domain(model)) {
            const double truth = exact.query(x);
            const double tol = 1e-12 * std::max(truth, 1e-300);
            ++points;
            if (std::fabs(gh.query(x) - truth) > tol || std::fabs(gs.query(x) - truth) > tol ||
                std::fabs(gf.query(x) - truth) > tol)
                ++mismatches;
        }
    }
    Outcome out;
    out.pass = mismatches == 0;
    std::ostringstream detail;
    detail << points << " exhaustive domain points across " << models.size() << " models, "
           << mismatches << " mismatches (tolerance 1e-12 relative)";
    out.detail = detail.str();
    return out;
}

// --- 5: multiplicative envelope coverage ------------------------------------

Outcome check_envelope_coverage() {
    const NaiveBayesSpec spec{3, 256, 8};  // 4 variables, M = 256
    const TreeModel model = tree_of(spec);
    const ObservationBatch stream = sample_stream(spec, 10000, 2025);
    ExactEstimator exact(model);
    for (size_t t = 0; t < stream.size(); ++t) exact.update(stream.row(t));
    const Observation x = sample_heavy_queries(spec, 1, 2026)[0].x;
    const double exact_p = exact.query(x);
    const double delta = 0.25;
    const int trials = 400;
    const double bound = delta + 3 * binomial_se(delta, trials);

    // Single-hash regime: any m is admissible for the matching slack.
    const uint64_t m_hash = 1 << 12;
    const Envelope hash_env = gm_hash_envelope(exact, x, m_hash, delta);
    int hash_violations = 0;
    for (int s = 0; s < trials; ++s) {
        GmHash sketch(SketchConfig{model, m_hash, 1, derive_seed(424242, s)});
        for (size_t t = 0; t < stream.size(); ++t) sketch.update(stream.row(t));
        hash_violations += !hash_env.contains(sketch.query(x), exact_p);
    }

    // Factored count-min regime: d >= log(2K / delta) = log(32) -> 4 rows.
    const uint64_t m_factor = 256;
    const uint32_t depth = 4;
    const Envelope factor_env = gm_factor_envelope(exact, x, m_factor);
    int factor_violations = 0;
    for (int s = 0; s < trials; ++s) {
        GmFactorSketch sketch(SketchConfig{model, m_factor, depth, derive_seed(515151, s)});
        for (size_t t = 0; t < stream.size(); ++t) sketch.update(stream.row(t));
        factor_violations += !factor_env.contains(sketch.query(x), exact_p);
    }

    Outcome out;
    const double hash_rate = double(hash_violations) / trials;
    const double factor_rate = double(factor_violations) / trials;
    out.pass = hash_rate <= bound && factor_rate <= bound;
    std::ostringstream detail;
    detail << "violation rates over " << trials << " seeds: single-hash " << hash_rate
           << ", factored " << factor_rate << " (bound " << bound << ")";
    out.detail = detail.str();
    return out;
}

// --- 6: ratio-decomposition property ----------------------------------------

Outcome check_ratio_decomposition() {
    std::mt19937_64 eng(6161);
    const size_t wanted = 1000000;
    size_t accepted = 0, violations = 0;
    uint64_t attempts = 0;
    const uint64_t max_attempts = 200000000;
    while (accepted < wanted && attempts < max_attempts) {
        ++attempts;
        const double n = std::floor(uniform_unit(eng) * 999999.0) + 1.0;
        const double alpha = 1e-6 + uniform_unit(eng) * (1.0 - 1e-6);
        const double floor_v = alpha * n;
        const double v = floor_v + uniform_unit(eng) * (n - floor_v < 0 ? 0.0 : n - floor_v);
        const double u = uniform_unit(eng) * v;
        const double eps = 1e-4 + uniform_unit(eng) * 0.9;
        const double scale = eps * alpha * n;
        // Mixed perturbation scales straddle the decision boundary.
        const auto bump = [&]() {
            const double r = uniform_unit(eng);
            if (r < 0.4) return uniform_unit(eng) * scale;          // below threshold
            if (r < 0.7) return (0.8 + 0.4 * uniform_unit(eng)) * scale;  // near threshold
            return uniform_unit(eng) * 10.0 * scale;                // far above
        };
        const double u_h = u + bump();
        const double v_h = v + bump();
        if (std::fabs(u_h / v_h - u / v) <= eps) continue;
        ++accepted;
        if (!(v_h - v > scale || u_h - u > scale)) ++violations;
    }
    Outcome out;
    out.pass = accepted == wanted && violations == 0;
    std::ostringstream detail;
    detail << accepted << " qualifying tuples (from " << attempts << " draws), " << violations
           << " violations (tolerance 0)";
    out.detail = detail.str();
    return out;
}

// --- 7: uniform-collision tail bound ----------------------------------------

Outcome check_collision_tail_bound() {
    // Fixed stream of 1e4 draws over 1e3 values; excess-collision frequency
    // against a fixed point x, over 1e4 independent hash functions.
    std::mt19937_64 eng(7373);
    const uint64_t domain = 1000;
    const uint64_t n = 10000;
    std::vector<uint64_t> histogram(domain + 1, 0);
    for (uint64_t t = 0; t < n; ++t) ++histogram[uniform_u64(eng, 1, domain)];
    const uint64_t x = 17;

    Outcome out;
    std::ostringstream detail;
    for (const uint64_t m : {uint64_t{16}, uint64_t{64}}) {
        for (const double eps : {0.05, 0.1}) {
            const int trials = 10000;
            int exceed = 0;
            for (int s = 0; s < trials; ++s) {
                HashFn h(derive_seed(880000, s), m);
                const uint64_t target = h.index(x);
                uint64_t collided = 0;
                for (uint64_t v = 1; v <= domain; ++v)
                    if (v != x && h.index(v) == target) collided += histogram[v];
                exceed += static_cast<double>(collided) / static_cast<double>(n) > eps;
            }
            const double rate = double(exceed) / trials;
            const double markov = 1.0 / (double(m) * eps);
            const double bound = std::min(markov, 1.0) + 3 * binomial_se(std::min(markov, 1.0), trials);
            detail << "m=" << m << ",eps=" << eps << ": " << rate << "<=" << bound << "; ";
            if (rate > bound) out.pass = false;
        }
    }
    out.detail = detail.str();
    return out;
}

// --- 8: merge homomorphism ----------------------------------------------------

Outcome check_merge_homomorphism() {
    std::mt19937_64 eng(8888);
    int mismatches = 0;
    for (int round = 0; round < 100; ++round) {
        const uint32_t k_count = static_cast<uint32_t>(uniform_u64(eng, 1, 4));
        const Value card = static_cast<Value>(uniform_u64(eng, 2, 9));
        const TreeModel model = round % 2 ? gms::test::chain_model(k_count, card)
                                          : gms::test::star_model(k_count, card);
        const SketchConfig config{model, uniform_u64(eng, 2, 32),
                                  static_cast<uint32_t>(uniform_u64(eng, 1, 4)), eng()};
        const SketchConfig single{model, config.bins, 1, config.seed};
        const size_t total = uniform_u64(eng, 2, 1000);
        const size_t cut = uniform_u64(eng, 1, total - 1);

        CountMinSketch cm_a(config), cm_b(config), cm_all(config);
        GmHash gh_a(single), gh_b(single), gh_all(single);
        GmSketch gs_a(config), gs_b(config), gs_all(config);
        GmFactorSketch gf_a(config), gf_b(config), gf_all(config);
        for (size_t t = 0; t < total; ++t) {
            const Observation x = gms::test::random_observation(model, eng);
            (t < cut ? cm_a : cm_b).update(x);
            (t < cut ? gh_a : gh_b).update(x);
            (t < cut ? gs_a : gs_b).update(x);
            (t < cut ? gf_a : gf_b).update(x);
            cm_all.update(x);
            gh_all.update(x);
            gs_all.update(x);
            gf_all.update(x);
        }
        if (!(merge(cm_a, cm_b) == cm_all) || !(merge(gh_a, gh_b) == gh_all) ||
            !(merge(gs_a, gs_b) == gs_all) || !(merge(gf_a, gf_b) == gf_all))
            ++mismatches;
    }
    // Config mismatches must refuse to merge.
    bool rejected = false;
    try {
        const TreeModel model = gms::test::chain_model(2, 3);
        merge(GmSketch(SketchConfig{model, 8, 2, 1}), GmSketch(SketchConfig{model, 8, 2, 2}));
    } catch (const std::invalid_argument&) {
        rejected = true;
    }
    Outcome out;
    out.pass = mismatches == 0 && rejected;
    std::ostringstream detail;
    detail << "100 random stream splits x 4 sketch types, " << mismatches
           << " counter mismatches (tolerance 0); seed mismatch rejected: "
           << (rejected ? "yes" : "NO");
    out.detail = detail.str();
    return out;
}

struct Check {
    int number;
    const char* name;
    Outcome (*fn)();
};

const Check kChecks[] = {
    {1, "easy synthetic problem: 0.05-crossing budgets (gmfactor ~2^10, cm ~2^15)",
     check_easy_crossings},
    {2, "hard synthetic problem: cm >= 0.95 everywhere, gmfactor reaches 0.05, low-error ordering",
     check_hard_problem},
    {3, "count-min estimates never undershoot exact frequencies", check_one_sidedness},
    {4, "collision-free hashing collapses all estimators to the exact oracle",
     check_oracle_equivalence},
    {5, "multiplicative envelopes cover with the advertised probability",
     check_envelope_coverage},
    {6, "ratio perturbation implies a numerator or denominator excursion",
     check_ratio_decomposition},
    {7, "excess-collision frequency obeys the 1/(m*eps) tail bound", check_collision_tail_bound},
    {8, "merging split streams reproduces the single-pass sketch", check_merge_homomorphism},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const Check& check : kChecks) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), check.number) == selected.end())
            continue;
        std::printf("-- %d: %s\n", check.number, check.name);
        std::fflush(stdout);
        const Outcome outcome = check.fn();
        std::printf("[%s] %d: %s\n", outcome.pass ? "PASS" : "FAIL", check.number,
                    outcome.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
