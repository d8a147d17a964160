#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gms/synth.hpp"

namespace gms {

enum class Estimator { CountMin, GmHash, GmSketch, GmFactor };

std::string_view estimator_name(Estimator est);
Estimator estimator_from_name(std::string_view name);

// Seed-derivation roles. Run r of an experiment with master seed s draws its
// stream with derive_seed(s, kStreamSeedRole, r), its queries with
// derive_seed(s, kQuerySeedRole, r), and seeds each estimator's sketch with
// derive_seed(s, kSketchSeedRole + estimator, r). Seeds depend on cell
// coordinates only, never on scheduling or estimator list order.
inline constexpr uint64_t kStreamSeedRole = 1;
inline constexpr uint64_t kQuerySeedRole = 2;
inline constexpr uint64_t kSketchSeedRole = 100;

enum class TruthSource {
    Analytic,  // the generator's closed-form point probability
    Oracle     // a dense exact estimator built on the training stream
};

// Externally supplied data: a model file, a training stream and a file of
// query observations (scored against the oracle).
struct ExternalData {
    std::filesystem::path model;
    std::filesystem::path stream;
    std::filesystem::path queries;
};

// One sweep: every configured estimator at every space budget, repeated over
// independently seeded runs. Budgets are total counters available to one
// sketch; bins per table follow from the accounting rule in derived_bins().
struct ExperimentConfig {
    std::optional<NaiveBayesSpec> synth;
    std::optional<ExternalData> external;
    uint64_t n_train = 1'000'000;
    uint64_t n_test = 500'000;          // synthetic heavy queries per run
    uint32_t depth = 5;                 // d for cm / gmsketch / gmfactor; gmhash always uses 1
    std::vector<uint64_t> budgets;      // strictly increasing
    std::vector<Estimator> estimators = {Estimator::CountMin, Estimator::GmHash,
                                         Estimator::GmSketch, Estimator::GmFactor};
    uint32_t runs = 20;
    uint64_t seed = 1;
    TruthSource truth = TruthSource::Analytic;
    std::string output;                 // optional default output path
};

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig experiment_config_from_file(const std::filesystem::path& path);

// Preset sweeps for the two synthetic benchmark problems, scaled to minutes
// of laptop time: 1e6 training observations, 1e4 heavy queries, 5 runs,
// d = 5. The easy problem (K=4 children, M=2^16, N=8) sweeps budgets
// 2^8..2^17; the hard problem (K=32, M=2^16, N=64) sweeps 2^13..2^24.
ExperimentConfig easy_synth_preset();
ExperimentConfig hard_synth_preset();

struct CellResult {
    Estimator estimator{};
    uint64_t budget = 0;
    uint64_t bins = 0;    // derived m; 0 marks a budget too small for one bin
    uint32_t depth = 0;   // hash replicas actually used
    uint32_t runs = 0;
    double mean = 0.0;    // imprecise fraction over runs; NaN when unsupported
    double stddev = 0.0;  // sample standard deviation; NaN when unsupported
    double seconds = 0.0; // mean per-run build+query wall clock

    bool supported() const noexcept { return bins >= 1; }
};

struct ExperimentResult {
    std::vector<CellResult> cells;

    const CellResult& cell(Estimator est, uint64_t budget) const;
};

// Rows actually used by an estimator: 1 for GmHash, the configured d otherwise.
uint32_t effective_depth(Estimator est, uint32_t depth);

// Bins per table under the equal-space rule: a budget of B counters gives the
// count-min sketch B / d bins per row and the graphical-model variants
// B / ((2K - 1) * d) bins per table (they keep 2K - 1 tables per replica).
uint64_t derived_bins(Estimator est, uint64_t budget, uint32_t depth, uint32_t variable_count);

// Runs the sweep. Deterministic for a fixed master seed: streams, queries and
// sketch seeds derive from (seed, run, role) and never from scheduling order;
// the wall-clock fields are the only nondeterministic outputs. Honors the
// GMS_THREADS environment variable for the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class OutputFormat { Csv, Json };

std::string to_csv(const ExperimentResult& result);
std::string to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const std::string& text);

void emit(const ExperimentResult& result, OutputFormat format,
          const std::filesystem::path& path);

}  // namespace gms
