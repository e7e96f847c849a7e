#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmra/tensor.hpp"
#include "lmra/tucker.hpp"

namespace lmra {

/// Per-mode unfolding spectra plus the effective dimensions the bound
/// formulas are indexed by.
struct SpectralProfile {
    std::vector<std::size_t> dims;          // I_n
    std::vector<Eigen::VectorXd> sigma;     // singular values of each unfolding, descending
    std::vector<std::size_t> i_full;        // min(I_n, prod of the other dims)
    std::vector<std::size_t> i_sampled;     // min(I_n, T_n)
    std::vector<std::size_t> i_seq;         // min(I_n, shrunk column count at step n)
    std::vector<std::size_t> i_seq_sampled; // min(shrunk column count, T_n)
};

/// Full SVDs of every unfolding; affordable at desk scale only. t_samples may
/// be empty when no sampled variant is under study.
SpectralProfile spectral_profile(const DenseTensor& a,
                                 const std::vector<std::size_t>& mu,
                                 const std::vector<std::size_t>& t_samples = {});

/// One evaluated bound: the quantity it limits (filled by the caller after a
/// run), the bound value, the success-probability floor, and the parameters
/// that went into it.
struct BoundReport {
    double observed = std::numeric_limits<double>::quiet_NaN();
    double bound = 0.0;
    double probability_floor = 0.0;
    std::map<std::string, double> params;
};

/// sqrt(sum of squared singular values past mu). mu may equal the length
/// (tail empty, result 0).
double delta_tail(const Eigen::VectorXd& sigma, std::size_t mu);

/// sqrt(sum of sigma^(4q) past mu), the tail after q Gram powers.
double delta_tail_power(const Eigen::VectorXd& sigma, std::size_t mu, int q);

/// Floor on the probability that a Gaussian matrix with long dimension x has
/// largest singular value at most sqrt(2 x) * gamma. Clamped to [0, 1].
double gaussian_norm_floor(std::size_t x, double gamma);

/// Floor on the probability that the pseudoinverse of a mu x (mu+K) Gaussian
/// block is no larger than sqrt(mu+K) * beta. Depends only on K; clamped.
double gaussian_min_sv_floor(std::size_t oversampling);

/// Success floor for the single-mode projection bound of the randomized
/// range finder (both Gaussian events plus the pseudoinverse event).
double mode_bound_prob_floor(std::size_t dim_n, std::size_t i_full_n,
                             std::size_t mu, std::size_t oversampling, double gamma);

/// Success floor for the summed all-mode bound.
double total_bound_prob_floor(const std::vector<std::size_t>& dims,
                              const std::vector<std::size_t>& i_full,
                              const std::vector<std::size_t>& mu,
                              std::size_t oversampling, double gamma);

/// Sketch amplification coefficient of the single-mode bound:
/// (sqrt(max(I'_n - mu, mu+K)) + sqrt(I_n)) * sqrt(2(mu+K)) * gamma * beta
/// divided by sigma_mu^(2q-1). Throws when sigma_mu == 0 (the bound is
/// undefined at a rank-deficient truncation point).
double range_finder_lambda(const SpectralProfile& profile, std::size_t n,
                           std::size_t mu, std::size_t oversampling, int q,
                           double beta, double gamma);

/// Single-mode projection bound 2 * (lambda_n * tail_q + tail).
double mode_projection_bound(const SpectralProfile& profile, std::size_t n,
                             std::size_t mu, std::size_t oversampling, int q,
                             double beta, double gamma);

/// Whole-tensor bound for the randomized T-HOSVD with power scheme:
/// 2 * sum_n (lambda_n * tail_q_n + tail_n), with the all-mode probability
/// floor. `observed` is left unset for the caller.
BoundReport rand_thosvd_error_bound(const DenseTensor& a, const AlgoConfig& cfg,
                                    double beta, double gamma);

/// Monte-Carlo product error bound under nearly-optimal sampling weights:
/// (eta / sqrt(beta K)) * ||A||_F * ||B||_F with eta = 1 + sqrt((8/delta) ln(1/delta)).
double amm_bound_nearly_optimal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                std::size_t K, double beta, double delta);

/// Monte-Carlo product error bound under uniform weights, evaluated exactly
/// as displayed: sqrt(I2/K) * sqrt(sum_i ||A(:,i)||^2 ||B(i,:)||^2) + gamma,
/// gamma = 1 + (I2/sqrt(K)) * sqrt(8 ln(1/delta)) * max_i ||A(:,i)|| ||B(i,:)||.
double amm_bound_uniform(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         std::size_t K, double delta);

/// Gram-estimation counterparts bounding ||A A^T - C' C'^T||_F for a sampled
/// C' with T columns; both variants are recorded when bounds are reported.
double amm_gram_bound_nearly_optimal(const Eigen::MatrixXd& a, std::size_t T,
                                     double beta, double delta);
double amm_gram_bound_uniform(const Eigen::MatrixXd& a, std::size_t T, double delta);

struct ErrorDecomposition {
    double total = 0.0;
    std::vector<double> terms;
};

/// Splits ||a - a projected on all factors||^2 against the per-mode terms
/// ||a - a x_n Q_n Q_n^T||^2 and checks total <= sum of terms.
ErrorDecomposition mode_error_decomposition(const DenseTensor& a,
                                            const std::vector<Eigen::MatrixXd>& factors);

/// Sequential split: term j is the residual of projecting mode order[j] after
/// the previous modes have been contracted; checks total <= sum of terms.
ErrorDecomposition sequential_error_decomposition(const DenseTensor& a,
                                                  const std::vector<Eigen::MatrixXd>& factors,
                                                  const std::vector<std::size_t>& order);

/// Tail sums past mu of the mode-n unfolding for the partially contracted
/// tensor (prefix factors applied as Q^T on modes 0..prefix-1) versus the
/// original tensor; checks lhs <= rhs.
std::pair<double, double> tail_monotonicity_check(
    const DenseTensor& a, const std::vector<Eigen::MatrixXd>& prefix_factors,
    std::size_t n, std::size_t mu);

}  // namespace lmra
