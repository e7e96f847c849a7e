#include "lmra/sketching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmra {

namespace {

// Neumaier-compensated sum; the sum-to-one check must not drown in naive
// accumulation error for long weight vectors.
double stable_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace

ProbabilityDistribution::ProbabilityDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty())
        throw std::invalid_argument("probability distribution must be nonempty");
    for (double w : weights_)
        if (!(w >= 0.0))
            throw std::invalid_argument("probability weights must be nonnegative");
    double s = stable_sum(weights_);
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("probability weights must sum to one");
}

ProbabilityDistribution ProbabilityDistribution::normalized(std::vector<double> raw) {
    for (double w : raw)
        if (!(w >= 0.0))
            throw std::invalid_argument("probability weights must be nonnegative");
    double s = stable_sum(raw);
    if (s <= 0.0) throw std::invalid_argument("cannot normalize an all-zero distribution");
    for (double& w : raw) w /= s;
    return ProbabilityDistribution(std::move(raw));
}

ProbabilityDistribution ProbabilityDistribution::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("probability distribution must be nonempty");
    return ProbabilityDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityDistribution make_probabilities(const Eigen::MatrixXd& a,
                                           const Eigen::MatrixXd& b,
                                           ProbRegime regime, double beta) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("make_probabilities: a.cols() must equal b.rows()");
    const std::size_t n = static_cast<std::size_t>(a.cols());
    if (regime == ProbRegime::Uniform) return ProbabilityDistribution::uniform(n);

    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = a.col(static_cast<Eigen::Index>(i)).norm() *
               b.row(static_cast<Eigen::Index>(i)).norm();
        total += w[i];
    }
    std::vector<double> opt(n);
    if (total > 0.0) {
        for (std::size_t i = 0; i < n; ++i) opt[i] = w[i] / total;
    } else {
        // a*b == 0; any distribution estimates it exactly.
        std::fill(opt.begin(), opt.end(), 1.0 / static_cast<double>(n));
    }
    if (regime == ProbRegime::Optimal)
        return ProbabilityDistribution::normalized(std::move(opt));

    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("make_probabilities: beta must be in (0, 1]");
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i)
        mix[i] = beta * opt[i] + (1.0 - beta) / static_cast<double>(n);
    return ProbabilityDistribution::normalized(std::move(mix));
}

Eigen::MatrixXd SamplingMatrix::dense() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(source_dim),
                                              static_cast<Eigen::Index>(num_samples));
    for (std::size_t j = 0; j < num_samples; ++j)
        s(static_cast<Eigen::Index>(indices[j]), static_cast<Eigen::Index>(j)) = scales[j];
    return s;
}

SamplingMatrix randsample(std::size_t L, const ProbabilityDistribution& p, RngStream rng) {
    if (L < 1) throw std::invalid_argument("randsample: L must be positive");

    std::vector<double> cum(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cum[i] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("randsample: all-zero distribution");

    // Last index with positive weight; draws landing past cum.back() due to
    // rounding are clamped onto it.
    std::size_t last = p.size();
    while (last > 0 && p[last - 1] == 0.0) --last;
    --last;

    SamplingMatrix s;
    s.source_dim = p.size();
    s.num_samples = L;
    s.indices.resize(L);
    s.scales.resize(L);

    RandomStream gen(rng);
    const double scale_base = 1.0 / std::sqrt(static_cast<double>(L));
    for (std::size_t j = 0; j < L; ++j) {
        double u = gen.next_double() * acc;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t idx = (it == cum.end()) ? last
                                            : static_cast<std::size_t>(it - cum.begin());
        if (p[idx] == 0.0) idx = last;  // unreachable for exact arithmetic
        s.indices[j] = idx;
        s.scales[j] = scale_base / std::sqrt(p[idx]);
    }
    return s;
}

Eigen::MatrixXd sample_columns(const Eigen::MatrixXd& a, const SamplingMatrix& s) {
    if (static_cast<std::size_t>(a.cols()) != s.source_dim)
        throw std::invalid_argument("sample_columns: dimension mismatch");
    Eigen::MatrixXd c(a.rows(), static_cast<Eigen::Index>(s.num_samples));
    for (std::size_t j = 0; j < s.num_samples; ++j)
        c.col(static_cast<Eigen::Index>(j)) =
            a.col(static_cast<Eigen::Index>(s.indices[j])) * s.scales[j];
    return c;
}

Eigen::MatrixXd sample_rows(const Eigen::MatrixXd& b, const SamplingMatrix& s) {
    if (static_cast<std::size_t>(b.rows()) != s.source_dim)
        throw std::invalid_argument("sample_rows: dimension mismatch");
    Eigen::MatrixXd r(static_cast<Eigen::Index>(s.num_samples), b.cols());
    for (std::size_t j = 0; j < s.num_samples; ++j)
        r.row(static_cast<Eigen::Index>(j)) =
            b.row(static_cast<Eigen::Index>(s.indices[j])) * s.scales[j];
    return r;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> basic_matrix_multiplication(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t K,
    const ProbabilityDistribution& p, RngStream rng) {
    if (a.cols() != b.rows() || static_cast<std::size_t>(a.cols()) != p.size())
        throw std::invalid_argument("basic_matrix_multiplication: dimension mismatch");
    if (K < 1 || K > static_cast<std::size_t>(a.cols()))
        throw std::invalid_argument("basic_matrix_multiplication: K out of range");
    SamplingMatrix s = randsample(K, p, rng);
    return {sample_columns(a, s), sample_rows(b, s)};
}

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, RngStream rng) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("gaussian_matrix: shape must be positive");
    Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    RandomStream gen(rng);
    double* d = g.data();
    const std::size_t n = rows * cols;
    for (std::size_t i = 0; i < n; ++i) d[i] = gen.next_normal();
    return g;
}

}  // namespace lmra
