#include "gms/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "gms/exact.hpp"
#include "gms/precision.hpp"
#include "gms/rng.hpp"
#include "gms/sketches.hpp"

namespace gms {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

uint32_t worker_count() {
    if (const char* env = std::getenv("GMS_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<uint32_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

struct RunData {
    const ObservationBatch* stream = nullptr;
    std::vector<Observation> queries;
    std::vector<double> truth;  // entries <= 0 cannot be scored and are skipped
};

template <class Sketch>
double imprecise_fraction(SketchConfig config, const RunData& data) {
    Sketch sketch(std::move(config));
    for (size_t t = 0; t < data.stream->size(); ++t) sketch.update(data.stream->row(t));
    uint64_t scored = 0, imprecise = 0;
    for (size_t q = 0; q < data.queries.size(); ++q) {
        if (!(data.truth[q] > 0.0)) continue;
        ++scored;
        if (!is_precise(sketch.query(data.queries[q]), data.truth[q])) ++imprecise;
    }
    if (scored == 0)
        throw std::runtime_error("experiment: no scorable queries (all truths were zero)");
    return static_cast<double>(imprecise) / static_cast<double>(scored);
}

double evaluate_cell(Estimator est, SketchConfig config, const RunData& data) {
    switch (est) {
        case Estimator::CountMin: return imprecise_fraction<CountMinSketch>(std::move(config), data);
        case Estimator::GmHash: return imprecise_fraction<GmHash>(std::move(config), data);
        case Estimator::GmSketch: return imprecise_fraction<GmSketch>(std::move(config), data);
        case Estimator::GmFactor: return imprecise_fraction<GmFactorSketch>(std::move(config), data);
    }
    throw std::logic_error("evaluate_cell: unknown estimator");
}

void validate(const ExperimentConfig& config) {
    if (config.synth.has_value() == config.external.has_value())
        throw std::invalid_argument(
            "experiment: exactly one of the synthetic spec and external data must be set");
    if (config.synth) {
        check_spec(*config.synth);
        if (config.n_train == 0 || config.n_test == 0)
            throw std::invalid_argument("experiment: n_train and n_test must be >= 1");
    }
    if (config.runs == 0) throw std::invalid_argument("experiment: runs must be >= 1");
    if (config.depth == 0) throw std::invalid_argument("experiment: depth must be >= 1");
    if (config.budgets.empty()) throw std::invalid_argument("experiment: no budgets");
    for (size_t i = 1; i < config.budgets.size(); ++i)
        if (config.budgets[i] <= config.budgets[i - 1])
            throw std::invalid_argument("experiment: budgets must be strictly increasing");
    if (config.estimators.empty()) throw std::invalid_argument("experiment: no estimators");
}

// Canonical estimator order: enum order, duplicates dropped. Seeds and output
// rows then never depend on how the list was written.
std::vector<Estimator> canonical_estimators(const std::vector<Estimator>& estimators) {
    std::vector<Estimator> out;
    for (Estimator est : {Estimator::CountMin, Estimator::GmHash, Estimator::GmSketch,
                          Estimator::GmFactor})
        for (Estimator have : estimators)
            if (have == est) {
                out.push_back(est);
                break;
            }
    return out;
}

}  // namespace

std::string_view estimator_name(Estimator est) {
    switch (est) {
        case Estimator::CountMin: return "cm";
        case Estimator::GmHash: return "gmhash";
        case Estimator::GmSketch: return "gmsketch";
        case Estimator::GmFactor: return "gmfactor";
    }
    throw std::logic_error("estimator_name: unknown estimator");
}

Estimator estimator_from_name(std::string_view name) {
    if (name == "cm") return Estimator::CountMin;
    if (name == "gmhash") return Estimator::GmHash;
    if (name == "gmsketch") return Estimator::GmSketch;
    if (name == "gmfactor") return Estimator::GmFactor;
    throw std::invalid_argument("unknown estimator '" + std::string(name) +
                                "' (expected cm, gmhash, gmsketch or gmfactor)");
}

uint32_t effective_depth(Estimator est, uint32_t depth) {
    return est == Estimator::GmHash ? 1 : depth;
}

uint64_t derived_bins(Estimator est, uint64_t budget, uint32_t depth, uint32_t variable_count) {
    const uint64_t d = effective_depth(est, depth);
    const uint64_t tables =
        est == Estimator::CountMin ? d : d * (2 * static_cast<uint64_t>(variable_count) - 1);
    return budget / tables;
}

const CellResult& ExperimentResult::cell(Estimator est, uint64_t budget) const {
    for (const CellResult& c : cells)
        if (c.estimator == est && c.budget == budget) return c;
    throw std::invalid_argument("ExperimentResult: no cell for " +
                                std::string(estimator_name(est)) + " at budget " +
                                std::to_string(budget));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    const std::vector<Estimator> estimators = canonical_estimators(config.estimators);

    TreeModel model = config.synth ? tree_of(*config.synth)
                                   : TreeModel::from_json_file(config.external->model);
    const uint32_t k_count = model.variable_count();

    // External data is fixed across runs; runs then differ only in hash seeds.
    std::optional<ObservationBatch> external_stream;
    std::optional<RunData> external_data;
    if (config.external) {
        external_stream = read_stream(config.external->stream, k_count);
        if (external_stream->size() == 0)
            throw std::invalid_argument("experiment: external stream is empty");
        ObservationBatch qbatch = read_stream(config.external->queries, k_count);
        if (qbatch.size() == 0)
            throw std::invalid_argument("experiment: external query file is empty");
        ExactEstimator oracle(model);
        for (size_t t = 0; t < external_stream->size(); ++t)
            oracle.update(external_stream->row(t));
        RunData data;
        data.stream = &*external_stream;
        for (size_t q = 0; q < qbatch.size(); ++q) {
            const auto row = qbatch.row(q);
            data.queries.emplace_back(row.begin(), row.end());
            data.truth.push_back(oracle.query(row));
        }
        external_data = std::move(data);
    }

    struct Cell {
        Estimator estimator;
        uint64_t budget;
        uint64_t bins;
        uint32_t depth;
    };
    std::vector<Cell> cells;
    for (Estimator est : estimators)
        for (uint64_t budget : config.budgets)
            cells.push_back({est, budget, derived_bins(est, budget, config.depth, k_count),
                             effective_depth(est, config.depth)});

    std::vector<std::vector<double>> fractions(cells.size());
    std::vector<std::vector<double>> seconds(cells.size());
    for (auto& v : fractions) v.assign(config.runs, kNaN);
    for (auto& v : seconds) v.assign(config.runs, 0.0);

    const uint32_t workers = worker_count();

    for (uint32_t run = 0; run < config.runs; ++run) {
        ObservationBatch synth_stream(1);
        RunData synth_data;
        const RunData* data = nullptr;
        if (config.synth) {
            synth_stream =
                sample_stream(*config.synth, config.n_train, derive_seed(config.seed, kStreamSeedRole, run));
            synth_data.stream = &synth_stream;
            auto queries = sample_heavy_queries(*config.synth, config.n_test,
                                                derive_seed(config.seed, kQuerySeedRole, run));
            std::optional<ExactEstimator> oracle;
            if (config.truth == TruthSource::Oracle) {
                oracle.emplace(model);
                for (size_t t = 0; t < synth_stream.size(); ++t)
                    oracle->update(synth_stream.row(t));
            }
            for (auto& q : queries) {
                synth_data.truth.push_back(oracle ? oracle->query(q.x) : q.true_p);
                synth_data.queries.push_back(std::move(q.x));
            }
            data = &synth_data;
        } else {
            data = &*external_data;
        }

        std::atomic<size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto work = [&]() {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= cells.size() || failed.load()) break;
                const Cell& cell = cells[i];
                if (cell.bins == 0) continue;  // unsupported at this budget
                try {
                    const auto start = std::chrono::steady_clock::now();
                    SketchConfig sketch_config{model, cell.bins, cell.depth,
                                               derive_seed(config.seed,
                                                           kSketchSeedRole +
                                                               static_cast<uint64_t>(cell.estimator),
                                                           run)};
                    fractions[i][run] = evaluate_cell(cell.estimator, std::move(sketch_config), *data);
                    seconds[i][run] =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (uint32_t w = 1; w < workers && w < cells.size(); ++w) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();
        if (failed.load()) std::rethrow_exception(error);
    }

    ExperimentResult result;
    for (size_t i = 0; i < cells.size(); ++i) {
        CellResult out;
        out.estimator = cells[i].estimator;
        out.budget = cells[i].budget;
        out.bins = cells[i].bins;
        out.depth = cells[i].depth;
        if (cells[i].bins == 0) {
            out.runs = 0;
            out.mean = out.stddev = kNaN;
        } else {
            out.runs = config.runs;
            double sum = 0.0, time_sum = 0.0;
            for (uint32_t r = 0; r < config.runs; ++r) {
                sum += fractions[i][r];
                time_sum += seconds[i][r];
            }
            out.mean = sum / config.runs;
            double sq = 0.0;
            for (uint32_t r = 0; r < config.runs; ++r) {
                const double dev = fractions[i][r] - out.mean;
                sq += dev * dev;
            }
            out.stddev = config.runs > 1 ? std::sqrt(sq / (config.runs - 1)) : 0.0;
            out.seconds = time_sum / config.runs;
        }
        result.cells.push_back(out);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Config and result serialization

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig config;
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        config.synth = NaiveBayesSpec{s.at("children").get<uint32_t>(),
                                      s.at("M").get<Value>(), s.at("N").get<Value>()};
    }
    if (j.contains("model") || j.contains("stream") || j.contains("queries")) {
        config.external = ExternalData{j.at("model").get<std::string>(),
                                       j.at("stream").get<std::string>(),
                                       j.at("queries").get<std::string>()};
    }
    config.n_train = j.value("n_train", config.n_train);
    config.n_test = j.value("n_test", config.n_test);
    config.depth = j.value("d", config.depth);
    config.runs = j.value("runs", config.runs);
    config.seed = j.value("seed", config.seed);
    if (j.contains("budgets")) config.budgets = j.at("budgets").get<std::vector<uint64_t>>();
    if (j.contains("estimators")) {
        config.estimators.clear();
        for (const auto& name : j.at("estimators"))
            config.estimators.push_back(estimator_from_name(name.get<std::string>()));
    }
    if (j.contains("truth")) {
        const auto t = j.at("truth").get<std::string>();
        if (t == "analytic")
            config.truth = TruthSource::Analytic;
        else if (t == "oracle")
            config.truth = TruthSource::Oracle;
        else
            throw std::invalid_argument("config: truth must be 'analytic' or 'oracle'");
    }
    config.output = j.value("output", std::string{});
    return config;
}

ExperimentConfig experiment_config_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return experiment_config_from_json(buf.str());
}

namespace {

ExperimentConfig synth_preset(NaiveBayesSpec spec, int budget_log2_lo, int budget_log2_hi) {
    ExperimentConfig config;
    config.synth = spec;
    config.n_train = 1'000'000;
    config.n_test = 10'000;
    config.depth = 5;
    config.runs = 5;
    config.seed = 1;
    for (int b = budget_log2_lo; b <= budget_log2_hi; ++b)
        config.budgets.push_back(uint64_t{1} << b);
    return config;
}

}  // namespace

ExperimentConfig easy_synth_preset() { return synth_preset({4, 65536, 8}, 8, 17); }

ExperimentConfig hard_synth_preset() { return synth_preset({32, 65536, 64}, 13, 24); }

std::string to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "estimator,budget_counters,m,d,run_count,imprecise_fraction_mean,"
           "imprecise_fraction_std,seconds\n";
    for (const CellResult& c : result.cells) {
        out << estimator_name(c.estimator) << ',' << c.budget << ',' << c.bins << ',' << c.depth
            << ',' << c.runs << ',' << c.mean << ',' << c.stddev << ',' << c.seconds << '\n';
    }
    return out.str();
}

std::string to_json(const ExperimentResult& result) {
    json rows = json::array();
    for (const CellResult& c : result.cells) {
        json row;
        row["estimator"] = estimator_name(c.estimator);
        row["budget_counters"] = c.budget;
        row["m"] = c.bins;
        row["d"] = c.depth;
        row["run_count"] = c.runs;
        row["imprecise_fraction_mean"] = c.mean;  // NaN serializes as null
        row["imprecise_fraction_std"] = c.stddev;
        row["seconds"] = c.seconds;
        rows.push_back(std::move(row));
    }
    return json{{"cells", std::move(rows)}}.dump(2);
}

ExperimentResult result_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentResult result;
    for (const json& row : j.at("cells")) {
        CellResult c;
        c.estimator = estimator_from_name(row.at("estimator").get<std::string>());
        c.budget = row.at("budget_counters").get<uint64_t>();
        c.bins = row.at("m").get<uint64_t>();
        c.depth = row.at("d").get<uint32_t>();
        c.runs = row.at("run_count").get<uint32_t>();
        c.mean = row.at("imprecise_fraction_mean").is_null()
                     ? kNaN
                     : row.at("imprecise_fraction_mean").get<double>();
        c.stddev = row.at("imprecise_fraction_std").is_null()
                       ? kNaN
                       : row.at("imprecise_fraction_std").get<double>();
        c.seconds = row.at("seconds").get<double>();
        result.cells.push_back(c);
    }
    return result;
}

void emit(const ExperimentResult& result, OutputFormat format,
          const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << (format == OutputFormat::Csv ? to_csv(result) : to_json(result));
    if (format == OutputFormat::Json) out << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace gms
