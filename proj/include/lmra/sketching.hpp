#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmra/rng.hpp"

namespace lmra {

/// Sampling weights over matrix columns/rows. Construction enforces the
/// invariants: every weight nonnegative, total within 1e-12 of one.
class ProbabilityDistribution {
public:
    explicit ProbabilityDistribution(std::vector<double> weights);

    /// Scales nonnegative raw weights to sum to one. Throws if the sum is zero.
    static ProbabilityDistribution normalized(std::vector<double> raw);
    static ProbabilityDistribution uniform(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> weights_;
};

enum class ProbRegime { Optimal, NearlyOptimal, Uniform };

/// Sampling distribution for estimating the product a * b (a.cols() == b.rows()).
/// Optimal weights are proportional to ||a(:,i)|| * ||b(i,:)||, with a uniform
/// fallback when every product vanishes (then a*b == 0 and any distribution is
/// exact). NearlyOptimal mixes beta * optimal + (1 - beta) * uniform, which
/// keeps every weight at least beta times the optimal one. Uniform is 1/I.
ProbabilityDistribution make_probabilities(const Eigen::MatrixXd& a,
                                           const Eigen::MatrixXd& b,
                                           ProbRegime regime, double beta = 0.5);

/// Column-selector matrix produced by sampling: column j has a single nonzero
/// 1/sqrt(L * p_xi_j) in row xi_j. Stored sparsely; apply it with
/// sample_columns / sample_rows instead of materializing.
struct SamplingMatrix {
    std::size_t source_dim = 0;
    std::size_t num_samples = 0;
    std::vector<std::size_t> indices;  // xi_j, 0-based
    std::vector<double> scales;        // 1/sqrt(L * p_{xi_j})

    Eigen::MatrixXd dense() const;
};

/// Draws L indices i.i.d. from p (inverse-CDF with binary search; indices of
/// zero weight are never drawn) and builds the scaled selector.
SamplingMatrix randsample(std::size_t L, const ProbabilityDistribution& p, RngStream rng);

Eigen::MatrixXd sample_columns(const Eigen::MatrixXd& a, const SamplingMatrix& s);  // A * S
Eigen::MatrixXd sample_rows(const Eigen::MatrixXd& b, const SamplingMatrix& s);     // S^T * B

/// Monte-Carlo matrix product estimate: C = A*S and R = S^T*B for a sampled
/// selector S with K columns, so that E[C * R] = A * B.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> basic_matrix_multiplication(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t K,
    const ProbabilityDistribution& p, RngStream rng);

/// I.i.d. standard normal entries, filled in storage order; deterministic
/// under (seed, stream).
Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, RngStream rng);

}  // namespace lmra
