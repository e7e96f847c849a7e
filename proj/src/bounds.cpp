#include "lmra/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lmra/linalg.hpp"

namespace lmra {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// (2 gamma^2 e^{-(gamma^2-1)})^2 / (4 (gamma^2-1) sqrt(pi x gamma^2))
double gaussian_norm_tail_term(std::size_t x, double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    double g2 = gamma * gamma;
    double num = 2.0 * g2 * std::exp(-(g2 - 1.0));
    num *= num;
    double den = 4.0 * (g2 - 1.0) * std::sqrt(M_PI * static_cast<double>(x) * g2);
    return num / den;
}

// (e / (K+1))^{K+1} / sqrt(2 pi (K+1))
double min_sv_tail_term(std::size_t oversampling) {
    double k1 = static_cast<double>(oversampling) + 1.0;
    return std::exp(k1 * (1.0 - std::log(k1))) / std::sqrt(2.0 * M_PI * k1);
}

void check_orthonormal(const Eigen::MatrixXd& q) {
    double dev = (q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols()))
                     .cwiseAbs()
                     .maxCoeff();
    if (dev > 1e-8)
        throw std::invalid_argument("factor matrix is not orthonormal");
}

DenseTensor project_all(const DenseTensor& a, const std::vector<Eigen::MatrixXd>& factors) {
    DenseTensor t = a;
    for (std::size_t n = 0; n < factors.size(); ++n) {
        t = mode_n_product(t, factors[n].transpose(), n);
        t = mode_n_product(t, factors[n], n);
    }
    return t;
}

double squared_diff_norm(const DenseTensor& a, const DenseTensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

SpectralProfile spectral_profile(const DenseTensor& a,
                                 const std::vector<std::size_t>& mu,
                                 const std::vector<std::size_t>& t_samples) {
    const std::size_t n_modes = a.order();
    if (mu.size() != n_modes)
        throw std::invalid_argument("spectral_profile: rank vector length mismatch");
    if (!t_samples.empty() && t_samples.size() != n_modes)
        throw std::invalid_argument("spectral_profile: sample count length mismatch");

    SpectralProfile p;
    p.dims = a.dims();
    p.sigma.resize(n_modes);
    p.i_full.resize(n_modes);
    p.i_sampled.resize(n_modes);
    p.i_seq.resize(n_modes);
    p.i_seq_sampled.resize(n_modes);

    for (std::size_t n = 0; n < n_modes; ++n) {
        std::size_t others = 1;
        for (std::size_t k = 0; k < n_modes; ++k)
            if (k != n) others *= a.dim(k);
        std::size_t seq_cols = 1;  // columns once earlier modes are shrunk to mu
        for (std::size_t k = 0; k < n_modes; ++k) {
            if (k == n) continue;
            seq_cols *= (k < n) ? mu[k] : a.dim(k);
        }
        p.i_full[n] = std::min(a.dim(n), others);
        p.i_seq[n] = std::min(a.dim(n), seq_cols);
        if (!t_samples.empty()) {
            p.i_sampled[n] = std::min(a.dim(n), t_samples[n]);
            p.i_seq_sampled[n] = std::min(seq_cols, t_samples[n]);
        } else {
            p.i_sampled[n] = p.i_full[n];
            p.i_seq_sampled[n] = p.i_seq[n];
        }
        p.sigma[n] = singular_values(unfold(a, n));
    }
    return p;
}

double delta_tail(const Eigen::VectorXd& sigma, std::size_t mu) {
    if (mu > static_cast<std::size_t>(sigma.size()))
        throw std::out_of_range("delta_tail: mu out of range");
    double s = 0.0;
    for (Eigen::Index k = static_cast<Eigen::Index>(mu); k < sigma.size(); ++k)
        s += sigma[k] * sigma[k];
    return std::sqrt(s);
}

double delta_tail_power(const Eigen::VectorXd& sigma, std::size_t mu, int q) {
    if (mu > static_cast<std::size_t>(sigma.size()))
        throw std::out_of_range("delta_tail_power: mu out of range");
    if (q < 1) throw std::invalid_argument("delta_tail_power: q must be >= 1");
    double s = 0.0;
    for (Eigen::Index k = static_cast<Eigen::Index>(mu); k < sigma.size(); ++k)
        s += std::pow(sigma[k], 4.0 * q);
    return std::sqrt(s);
}

double gaussian_norm_floor(std::size_t x, double gamma) {
    return clamp01(1.0 - gaussian_norm_tail_term(x, gamma));
}

double gaussian_min_sv_floor(std::size_t oversampling) {
    return clamp01(1.0 - min_sv_tail_term(oversampling));
}

double mode_bound_prob_floor(std::size_t dim_n, std::size_t i_full_n,
                             std::size_t mu, std::size_t oversampling, double gamma) {
    std::size_t wide = std::max(i_full_n > mu ? i_full_n - mu : std::size_t{0},
                                mu + oversampling);
    double floor = 1.0 - gaussian_norm_tail_term(wide, gamma) -
                   min_sv_tail_term(oversampling) -
                   gaussian_norm_tail_term(dim_n, gamma);
    return clamp01(floor);
}

double total_bound_prob_floor(const std::vector<std::size_t>& dims,
                              const std::vector<std::size_t>& i_full,
                              const std::vector<std::size_t>& mu,
                              std::size_t oversampling, double gamma) {
    double floor = 1.0;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        std::size_t wide = std::max(i_full[n] > mu[n] ? i_full[n] - mu[n] : std::size_t{0},
                                    mu[n] + oversampling);
        floor -= gaussian_norm_tail_term(wide, gamma) + min_sv_tail_term(oversampling) +
                 gaussian_norm_tail_term(dims[n], gamma);
    }
    return clamp01(floor);
}

double range_finder_lambda(const SpectralProfile& profile, std::size_t n,
                           std::size_t mu, std::size_t oversampling, int q,
                           double beta, double gamma) {
    if (n >= profile.dims.size())
        throw std::out_of_range("range_finder_lambda: mode out of range");
    if (!(beta > 1.0) || !(gamma > 1.0))
        throw std::invalid_argument("range_finder_lambda: beta and gamma must exceed 1");
    if (mu < 1 || mu > static_cast<std::size_t>(profile.sigma[n].size()))
        throw std::out_of_range("range_finder_lambda: mu out of range");
    double sigma_mu = profile.sigma[n][static_cast<Eigen::Index>(mu - 1)];
    if (sigma_mu <= 0.0)
        throw std::invalid_argument(
            "range_finder_lambda: unfolding is rank deficient at the truncation index");

    std::size_t i_full = profile.i_full[n];
    double wide = static_cast<double>(
        std::max(i_full > mu ? i_full - mu : std::size_t{0}, mu + oversampling));
    double lam = (std::sqrt(wide) + std::sqrt(static_cast<double>(profile.dims[n]))) *
                 std::sqrt(2.0 * static_cast<double>(mu + oversampling)) * gamma * beta;
    return lam / std::pow(sigma_mu, 2.0 * q - 1.0);
}

double mode_projection_bound(const SpectralProfile& profile, std::size_t n,
                             std::size_t mu, std::size_t oversampling, int q,
                             double beta, double gamma) {
    double lam = range_finder_lambda(profile, n, mu, oversampling, q, beta, gamma);
    return 2.0 * (lam * delta_tail_power(profile.sigma[n], mu, q) +
                  delta_tail(profile.sigma[n], mu));
}

BoundReport rand_thosvd_error_bound(const DenseTensor& a, const AlgoConfig& cfg,
                                    double beta, double gamma) {
    std::vector<std::size_t> mu = cfg.rank.clamped_for(a.dims());
    SpectralProfile profile = spectral_profile(a, mu);

    BoundReport report;
    report.params["beta"] = beta;
    report.params["gamma"] = gamma;
    report.params["oversampling"] = static_cast<double>(cfg.oversampling);
    report.params["power"] = static_cast<double>(cfg.power);

    double bound = 0.0;
    for (std::size_t n = 0; n < a.order(); ++n) {
        double lam = range_finder_lambda(profile, n, mu[n], cfg.oversampling,
                                         cfg.power, beta, gamma);
        double dq = delta_tail_power(profile.sigma[n], mu[n], cfg.power);
        double d = delta_tail(profile.sigma[n], mu[n]);
        bound += lam * dq + d;
        std::string suffix = std::to_string(n + 1);
        report.params["lambda_" + suffix] = lam;
        report.params["delta_q_" + suffix] = dq;
        report.params["delta_" + suffix] = d;
    }
    report.bound = 2.0 * bound;
    report.probability_floor =
        total_bound_prob_floor(profile.dims, profile.i_full, mu, cfg.oversampling, gamma);
    if (!std::isfinite(report.bound) || report.bound < 0.0)
        throw std::runtime_error("rand_thosvd_error_bound: bound is not finite");
    return report;
}

double amm_bound_nearly_optimal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                std::size_t K, double beta, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("amm_bound_nearly_optimal: delta must lie in (0, 1)");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("amm_bound_nearly_optimal: beta must lie in (0, 1]");
    double eta = 1.0 + std::sqrt((8.0 / delta) * std::log(1.0 / delta));
    return eta / std::sqrt(beta * static_cast<double>(K)) * a.norm() * b.norm();
}

double amm_bound_uniform(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         std::size_t K, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("amm_bound_uniform: delta must lie in (0, 1)");
    if (a.cols() != b.rows())
        throw std::invalid_argument("amm_bound_uniform: dimension mismatch");
    const double i2 = static_cast<double>(a.cols());
    double sum = 0.0, maxprod = 0.0;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        double prod = a.col(i).norm() * b.row(i).norm();
        sum += prod * prod;
        maxprod = std::max(maxprod, prod);
    }
    double gamma = 1.0 + i2 / std::sqrt(static_cast<double>(K)) *
                             std::sqrt(8.0 * std::log(1.0 / delta)) * maxprod;
    return std::sqrt(i2 / static_cast<double>(K)) * std::sqrt(sum) + gamma;
}

double amm_gram_bound_nearly_optimal(const Eigen::MatrixXd& a, std::size_t T,
                                     double beta, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("amm_gram_bound_nearly_optimal: delta must lie in (0, 1)");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("amm_gram_bound_nearly_optimal: beta must lie in (0, 1]");
    double eta = 1.0 + std::sqrt((8.0 / delta) * std::log(1.0 / delta));
    return eta / std::sqrt(beta * static_cast<double>(T)) * a.squaredNorm();
}

double amm_gram_bound_uniform(const Eigen::MatrixXd& a, std::size_t T, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("amm_gram_bound_uniform: delta must lie in (0, 1)");
    double i_full = static_cast<double>(std::min(a.rows(), a.cols()));
    double t = static_cast<double>(T);
    return (1.0 + std::sqrt(i_full / t) +
            i_full / std::sqrt(t) * std::sqrt(8.0 * std::log(1.0 / delta))) *
           a.squaredNorm();
}

ErrorDecomposition mode_error_decomposition(const DenseTensor& a,
                                            const std::vector<Eigen::MatrixXd>& factors) {
    if (factors.size() != a.order())
        throw std::invalid_argument("mode_error_decomposition: factor count mismatch");
    for (const auto& q : factors) check_orthonormal(q);

    ErrorDecomposition out;
    out.total = squared_diff_norm(a, project_all(a, factors));
    out.terms.resize(factors.size());
    for (std::size_t n = 0; n < factors.size(); ++n) {
        DenseTensor proj = mode_n_product(
            mode_n_product(a, factors[n].transpose(), n), factors[n], n);
        out.terms[n] = squared_diff_norm(a, proj);
    }
    double sum = std::accumulate(out.terms.begin(), out.terms.end(), 0.0);
    double na2 = frobenius_norm(a);
    na2 *= na2;
    if (out.total > sum + 1e-9 * std::max(1.0, na2))
        throw std::runtime_error("mode_error_decomposition: split inequality violated");
    return out;
}

ErrorDecomposition sequential_error_decomposition(const DenseTensor& a,
                                                  const std::vector<Eigen::MatrixXd>& factors,
                                                  const std::vector<std::size_t>& order) {
    if (factors.size() != a.order() || order.size() != a.order())
        throw std::invalid_argument("sequential_error_decomposition: size mismatch");
    for (const auto& q : factors) check_orthonormal(q);

    ErrorDecomposition out;
    out.total = squared_diff_norm(a, project_all(a, factors));
    out.terms.resize(order.size());
    DenseTensor work = a;
    for (std::size_t j = 0; j < order.size(); ++j) {
        std::size_t n = order[j];
        DenseTensor proj = mode_n_product(
            mode_n_product(work, factors[n].transpose(), n), factors[n], n);
        out.terms[j] = squared_diff_norm(work, proj);
        work = mode_n_product(work, factors[n].transpose(), n);
    }
    double sum = std::accumulate(out.terms.begin(), out.terms.end(), 0.0);
    double na2 = frobenius_norm(a);
    na2 *= na2;
    if (out.total > sum + 1e-9 * std::max(1.0, na2))
        throw std::runtime_error("sequential_error_decomposition: split inequality violated");
    return out;
}

std::pair<double, double> tail_monotonicity_check(
    const DenseTensor& a, const std::vector<Eigen::MatrixXd>& prefix_factors,
    std::size_t n, std::size_t mu) {
    if (n >= a.order())
        throw std::out_of_range("tail_monotonicity_check: mode out of range");
    for (const auto& q : prefix_factors) check_orthonormal(q);

    DenseTensor b = a;
    for (std::size_t m = 0; m < prefix_factors.size(); ++m)
        b = mode_n_product(b, prefix_factors[m].transpose(), m);

    Eigen::VectorXd sig_b = singular_values(unfold(b, n));
    Eigen::VectorXd sig_a = singular_values(unfold(a, n));
    double lhs_tail = delta_tail(sig_b, std::min<std::size_t>(mu, sig_b.size()));
    double rhs_tail = delta_tail(sig_a, std::min<std::size_t>(mu, sig_a.size()));
    double lhs = lhs_tail * lhs_tail;
    double rhs = rhs_tail * rhs_tail;
    if (lhs > rhs + 1e-9 * std::max(1.0, rhs))
        throw std::runtime_error("tail_monotonicity_check: tail ordering violated");
    return {lhs, rhs};
}

}  // namespace lmra
