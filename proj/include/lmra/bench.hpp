#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmra/datagen.hpp"
#include "lmra/tensor.hpp"
#include "lmra/tucker.hpp"

namespace lmra::bench {

/// One benchmark measurement. The column order of the CSV is fixed:
/// algorithm,dims,ranks,K,q,alpha,T,regime,seed,re,fit,wall_time_ms,rerun,error
struct ResultRow {
    std::string algorithm;
    std::vector<std::size_t> dims;
    std::vector<std::size_t> ranks;
    std::size_t oversampling = 10;
    int power = 1;
    double alpha = 0.2;
    std::vector<std::size_t> t_samples;  // empty for non-sampled algorithms
    std::string regime;
    std::uint64_t seed = 0;
    double re = 0.0;
    double fit = 0.0;
    double wall_time_ms = 0.0;
    int rerun = 0;
    std::string error;  // empty on success; failed rows keep the sweep running
};

std::string csv_header();
std::string csv_line(const ResultRow& row);

/// Appends rows; the header is written only when the file is new or empty.
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(const std::string& path);

struct ExperimentConfig {
    std::optional<GeneratorSpec> generator;
    std::string input_path;  // used when no generator is given
    std::vector<std::string> algorithms;
    std::vector<std::vector<std::size_t>> ranks;
    AlgoConfig base;    // oversampling, power, alpha, regime, order, strategy, base seed
    int reps = 1;       // seed repetitions: seed, seed+1, ...
    int timing_reps = 1;  // reruns per row when timed; medians are computed downstream
    bool timed = false;
    std::string output_csv;
};

ExperimentConfig experiment_config_from_json(const std::string& text);

/// Runs the sweep serially (timed rows must not contend) and returns one row
/// per (algorithm, rank, seed rep, rerun).
std::vector<ResultRow> run_benchmark(const ExperimentConfig& cfg, const DenseTensor& input);
std::vector<ResultRow> run_benchmark(const ExperimentConfig& cfg);

struct DecomposeOptions {
    std::string algorithm = "sthosvd";
    AlgoConfig cfg;
    bool with_bounds = false;
    double bound_beta = 2.0;
    double bound_gamma = 2.0;
};

/// Decomposes and reports RE, FIT, wall time, per-factor orthonormality
/// residuals, and optionally the randomized-range-finder error bound, as a
/// JSON document.
std::string run_decompose_json(const DenseTensor& a, const DecomposeOptions& opts);

struct VerifyBoundsConfig {
    std::optional<GeneratorSpec> generator;
    std::string input_path;
    std::vector<std::size_t> dims{20, 20, 20};  // random tensor when no input given
    std::vector<std::size_t> rank{5, 5, 5};
    std::size_t oversampling = 10;
    int power = 1;
    double beta = 2.0;   // bound parameter, > 1
    double gamma = 2.0;  // bound parameter, > 1
    double delta = 0.1;  // failure probability for the sampling bounds
    int trials = 200;    // randomized-range-finder trials
    int amm_trials = 500;
    std::size_t amm_samples = 30;
    std::uint64_t seed = 0;
};

VerifyBoundsConfig verify_config_from_json(const std::string& text);

struct VerifyBoundsOutcome {
    std::string report_json;
    bool deterministic_ok = false;  // every split inequality and energy identity held
};

/// Checks the deterministic inequalities on every algorithm's output and the
/// probabilistic bounds as empirical frequencies against their floors.
VerifyBoundsOutcome verify_bounds(const VerifyBoundsConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace lmra::bench
