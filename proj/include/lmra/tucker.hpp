#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmra/linalg.hpp"
#include "lmra/sketching.hpp"
#include "lmra/tensor.hpp"

namespace lmra {

/// Target multilinear rank (mu_1..mu_N). Entries above the tensor dimension
/// are clamped rather than rejected so a sweep over degenerate requests can
/// keep running.
struct MultilinearRank {
    std::vector<std::size_t> mu;

    MultilinearRank() = default;
    explicit MultilinearRank(std::vector<std::size_t> m) : mu(std::move(m)) {}

    std::vector<std::size_t> clamped_for(const std::vector<std::size_t>& dims) const;
};

/// Core tensor plus one orthonormal factor per mode (factor n is I_n x mu_n).
struct TuckerDecomposition {
    DenseTensor core;
    std::vector<Eigen::MatrixXd> factors;
};

struct AlgoConfig {
    MultilinearRank rank;
    std::size_t oversampling = 10;            // extra sketch columns beyond mu_n
    int power = 1;                            // Gram power exponent q
    double alpha = 0.2;                       // sampling fraction for AMM variants
    ProbRegime regime = ProbRegime::Uniform;  // sampling distribution for AMM variants
    double regime_beta = 0.5;                 // mixture weight of the nearly-optimal regime
    std::vector<std::size_t> t_samples;       // per-mode sample counts; empty = ceil(alpha * columns)
    std::vector<std::size_t> order;           // processing order, 0-based; empty = 0..N-1
    std::uint64_t seed = 0;
    GramStrategy strategy = GramStrategy::A;
    int hooi_max_sweeps = 50;
    double hooi_tol = 1e-8;
};

enum class Algorithm {
    Thosvd,
    Sthosvd,
    Hooi,
    RandThosvdPower,      // id "alg1"
    RandSthosvdPower,     // id "alg2"
    RandThosvdAmm,        // id "alg4"
    RandSthosvdAmm,       // id "alg5"
    RandThosvdPowerQr,    // id "alg6"
    RandSthosvdPowerQr,   // id "alg7"
};

std::optional<Algorithm> parse_algorithm(const std::string& id);
std::string algorithm_id(Algorithm a);
std::vector<std::string> all_algorithm_ids();

DenseTensor reconstruct(const TuckerDecomposition& d);

/// ||a - approx||_F / ||a||_F; the FIT value is 1 - RE.
double relative_error(const DenseTensor& a, const DenseTensor& approx);

/// Truncated HOSVD: each factor from the top left singular vectors of the
/// corresponding unfolding, core computed at the end.
TuckerDecomposition t_hosvd(const DenseTensor& a, const AlgoConfig& cfg);

/// Sequentially truncated HOSVD: the tensor shrinks after each processed mode.
TuckerDecomposition st_hosvd(const DenseTensor& a, const AlgoConfig& cfg);

struct HooiStats {
    bool converged = false;
    int sweeps = 0;
};

/// Higher-order orthogonal iteration. Stops when the core norm stabilizes
/// (|delta| / ||a|| < hooi_tol) or after hooi_max_sweeps; a non-converged run
/// returns the last iterate with stats->converged == false.
TuckerDecomposition hooi(const DenseTensor& a, const AlgoConfig& cfg,
                         const TuckerDecomposition& init, HooiStats* stats = nullptr);
TuckerDecomposition hooi(const DenseTensor& a, const AlgoConfig& cfg,
                         HooiStats* stats = nullptr);  // init = st_hosvd

/// Randomized T-HOSVD with power scheme: per mode, sketch the unfolding with
/// (A A^T)^q G for Gaussian G and keep the top singular directions. Modes are
/// independent and may run concurrently (set LMRA_NUM_THREADS > 1).
TuckerDecomposition rand_thosvd_power(const DenseTensor& a, const AlgoConfig& cfg);

/// Sequential variant: the tensor is shrunk after each mode, so later sketches
/// work on smaller unfoldings and the final tensor is the core.
TuckerDecomposition rand_sthosvd_power(const DenseTensor& a, const AlgoConfig& cfg);

/// Randomized T-HOSVD where the Gram product is itself estimated by column
/// sampling: C' = A_(n) S for a sampled selector S with T_n columns.
TuckerDecomposition rand_thosvd_amm(const DenseTensor& a, const AlgoConfig& cfg);

/// Sequential sampled variant; T_n defaults to ceil(alpha * current columns).
TuckerDecomposition rand_sthosvd_amm(const DenseTensor& a, const AlgoConfig& cfg);

/// Same sketches as rand_thosvd_power / rand_sthosvd_power, but the factor is
/// extracted through a QR proxy of the sketch followed by an SVD of the
/// projected unfolding.
TuckerDecomposition rand_thosvd_power_qr(const DenseTensor& a, const AlgoConfig& cfg);
TuckerDecomposition rand_sthosvd_power_qr(const DenseTensor& a, const AlgoConfig& cfg);

TuckerDecomposition run_algorithm(Algorithm alg, const DenseTensor& a,
                                  const AlgoConfig& cfg);

/// Per-mode sample counts the AMM variants will use on a tensor of the given
/// shape: the override when set, otherwise ceil(alpha * columns) with the
/// sequential variant counting columns of the progressively shrunk tensor.
std::vector<std::size_t> amm_sample_counts(const std::vector<std::size_t>& dims,
                                           const AlgoConfig& cfg, bool sequential);

/// Thread cap honored by the mode-parallel algorithms; reads LMRA_NUM_THREADS
/// (default 1, i.e. serial).
int thread_cap();

}  // namespace lmra
