#include "lmra/tucker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace lmra {

namespace {

struct Resolved {
    std::vector<std::size_t> mu;      // clamped target rank
    std::vector<std::size_t> sketch;  // sketch widths min(mu_n + K, I_n)
    std::vector<std::size_t> order;   // processing order, 0-based
};

Resolved resolve(const DenseTensor& a, const AlgoConfig& cfg) {
    const std::size_t n_modes = a.order();
    if (n_modes == 0) throw std::invalid_argument("cannot decompose an order-0 tensor");
    if (cfg.rank.mu.size() != n_modes)
        throw std::invalid_argument("rank vector length must equal tensor order");
    if (cfg.power < 1) throw std::invalid_argument("power exponent must be >= 1");

    Resolved r;
    r.mu = cfg.rank.clamped_for(a.dims());
    r.sketch.resize(n_modes);
    for (std::size_t n = 0; n < n_modes; ++n)
        r.sketch[n] = std::min(r.mu[n] + cfg.oversampling, a.dim(n));

    if (cfg.order.empty()) {
        r.order.resize(n_modes);
        std::iota(r.order.begin(), r.order.end(), std::size_t{0});
    } else {
        if (cfg.order.size() != n_modes)
            throw std::invalid_argument("processing order length must equal tensor order");
        std::vector<bool> seen(n_modes, false);
        for (std::size_t m : cfg.order) {
            if (m >= n_modes || seen[m])
                throw std::invalid_argument("processing order must be a permutation of the modes");
            seen[m] = true;
        }
        r.order = cfg.order;
    }
    return r;
}

RngStream gaussian_stream(const AlgoConfig& cfg, std::size_t n_modes, std::size_t mode) {
    (void)n_modes;
    return {cfg.seed, mode + 1};
}

RngStream sampling_stream(const AlgoConfig& cfg, std::size_t n_modes, std::size_t mode) {
    return {cfg.seed, n_modes + mode + 1};
}

// Degenerate sweep configurations shrink the factor instead of aborting the
// run; extraction is capped at the numerical rank limit of the matrix.
std::size_t rank_cap(std::size_t mu, std::size_t cap) {
    if (mu > cap) {
        std::cerr << "lmra: requested rank " << mu << " exceeds matrix rank limit "
                  << cap << ", clamping\n";
        mu = cap;
    }
    return mu;
}

Eigen::MatrixXd top_left_vectors_clamped(const Eigen::MatrixXd& m, std::size_t mu) {
    return leading_left_singular_vectors(
        m, rank_cap(mu, static_cast<std::size_t>(std::min(m.rows(), m.cols()))));
}

// Core from fixed factors, contracting modes in ascending factor-width order
// to keep intermediates small.
DenseTensor core_from_factors(const DenseTensor& a,
                              const std::vector<Eigen::MatrixXd>& factors) {
    std::vector<std::size_t> idx(factors.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return factors[i].cols() < factors[j].cols();
    });
    DenseTensor t = a;
    for (std::size_t n : idx)
        t = mode_n_product(t, factors[n].transpose(), n);
    return t;
}

std::size_t other_dims_product(const std::vector<std::size_t>& dims, std::size_t mode) {
    std::size_t p = 1;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (k != mode) p *= dims[k];
    return p;
}

std::size_t samples_from_alpha(double alpha, std::size_t cols) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("sampling fraction alpha must lie in (0, 1)");
    auto t = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(cols)));
    return std::max<std::size_t>(t, 1);
}

// Sampling weights for estimating A A^T from sampled columns of A; the
// optimal weights are the squared column norms.
ProbabilityDistribution gram_sampling_probabilities(const Eigen::MatrixXd& a,
                                                    ProbRegime regime, double beta) {
    const std::size_t n = static_cast<std::size_t>(a.cols());
    if (regime == ProbRegime::Uniform) return ProbabilityDistribution::uniform(n);

    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = a.col(static_cast<Eigen::Index>(i)).squaredNorm();
        total += w[i];
    }
    if (total <= 0.0) return ProbabilityDistribution::uniform(n);
    for (auto& x : w) x /= total;
    if (regime == ProbRegime::Optimal)
        return ProbabilityDistribution::normalized(std::move(w));

    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("nearly-optimal mixture weight must lie in (0, 1]");
    for (auto& x : w) x = beta * x + (1.0 - beta) / static_cast<double>(n);
    return ProbabilityDistribution::normalized(std::move(w));
}

// Runs one body per mode, threaded when the cap allows. Results are
// independent of scheduling because every mode owns its RNG streams.
void run_modes(std::size_t n_modes, const std::function<void(std::size_t)>& body) {
    int cap = thread_cap();
    if (cap <= 1 || n_modes <= 1) {
        for (std::size_t n = 0; n < n_modes; ++n) body(n);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_modes);
    auto worker = [&] {
        for (;;) {
            std::size_t n = next.fetch_add(1);
            if (n >= n_modes) return;
            try {
                body(n);
            } catch (...) {
                errors[n] = std::current_exception();
            }
        }
    };
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cap), n_modes);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

int thread_cap() {
    static const int cap = [] {
        const char* env = std::getenv("LMRA_NUM_THREADS");
        if (!env) return 1;
        int v = std::atoi(env);
        return std::clamp(v, 1, 64);
    }();
    return cap;
}

std::vector<std::size_t> MultilinearRank::clamped_for(
    const std::vector<std::size_t>& dims) const {
    if (mu.size() != dims.size())
        throw std::invalid_argument("rank vector length must equal tensor order");
    std::vector<std::size_t> out(mu.size());
    bool clamped = false;
    for (std::size_t n = 0; n < mu.size(); ++n) {
        if (mu[n] < 1) throw std::invalid_argument("rank entries must be positive");
        out[n] = std::min(mu[n], dims[n]);
        clamped |= out[n] != mu[n];
    }
    if (clamped)
        std::cerr << "lmra: target rank exceeds tensor dimensions, clamping\n";
    return out;
}

std::optional<Algorithm> parse_algorithm(const std::string& id) {
    if (id == "thosvd") return Algorithm::Thosvd;
    if (id == "sthosvd") return Algorithm::Sthosvd;
    if (id == "hooi") return Algorithm::Hooi;
    if (id == "alg1") return Algorithm::RandThosvdPower;
    if (id == "alg2") return Algorithm::RandSthosvdPower;
    if (id == "alg4") return Algorithm::RandThosvdAmm;
    if (id == "alg5") return Algorithm::RandSthosvdAmm;
    if (id == "alg6") return Algorithm::RandThosvdPowerQr;
    if (id == "alg7") return Algorithm::RandSthosvdPowerQr;
    return std::nullopt;
}

std::string algorithm_id(Algorithm a) {
    switch (a) {
        case Algorithm::Thosvd: return "thosvd";
        case Algorithm::Sthosvd: return "sthosvd";
        case Algorithm::Hooi: return "hooi";
        case Algorithm::RandThosvdPower: return "alg1";
        case Algorithm::RandSthosvdPower: return "alg2";
        case Algorithm::RandThosvdAmm: return "alg4";
        case Algorithm::RandSthosvdAmm: return "alg5";
        case Algorithm::RandThosvdPowerQr: return "alg6";
        case Algorithm::RandSthosvdPowerQr: return "alg7";
    }
    return "?";
}

std::vector<std::string> all_algorithm_ids() {
    return {"thosvd", "sthosvd", "hooi", "alg1", "alg2", "alg4", "alg5", "alg6", "alg7"};
}

DenseTensor reconstruct(const TuckerDecomposition& d) {
    DenseTensor t = d.core;
    for (std::size_t n = 0; n < d.factors.size(); ++n)
        t = mode_n_product(t, d.factors[n], n);
    return t;
}

double relative_error(const DenseTensor& a, const DenseTensor& approx) {
    if (a.dims() != approx.dims())
        throw std::invalid_argument("relative_error: shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - approx[i];
        num += d * d;
        den += a[i] * a[i];
    }
    if (den == 0.0) throw std::invalid_argument("relative_error: zero reference tensor");
    return std::sqrt(num / den);
}

TuckerDecomposition t_hosvd(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    std::vector<Eigen::MatrixXd> factors(a.order());
    for (std::size_t n = 0; n < a.order(); ++n)
        factors[n] = top_left_vectors_clamped(unfold(a, n), r.mu[n]);
    return {core_from_factors(a, factors), std::move(factors)};
}

TuckerDecomposition st_hosvd(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    std::vector<Eigen::MatrixXd> factors(a.order());
    DenseTensor work = a;
    for (std::size_t n : r.order) {
        factors[n] = top_left_vectors_clamped(unfold(work, n), r.mu[n]);
        work = mode_n_product(work, factors[n].transpose(), n);
    }
    return {std::move(work), std::move(factors)};
}

TuckerDecomposition hooi(const DenseTensor& a, const AlgoConfig& cfg,
                         const TuckerDecomposition& init, HooiStats* stats) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    if (init.factors.size() != n_modes)
        throw std::invalid_argument("hooi: init factor count must equal tensor order");
    for (std::size_t n = 0; n < n_modes; ++n) {
        const auto& q = init.factors[n];
        if (static_cast<std::size_t>(q.rows()) != a.dim(n))
            throw std::invalid_argument("hooi: init factor shape mismatch");
        double dev = (q.transpose() * q -
                      Eigen::MatrixXd::Identity(q.cols(), q.cols()))
                         .cwiseAbs()
                         .maxCoeff();
        if (dev > 1e-8)
            throw std::invalid_argument("hooi: init factors must be orthonormal");
    }

    std::vector<Eigen::MatrixXd> factors = init.factors;
    DenseTensor core = core_from_factors(a, factors);
    double norm_a = frobenius_norm(a);
    if (norm_a == 0.0) return {std::move(core), std::move(factors)};
    double prev = frobenius_norm(core);

    bool converged = false;
    int sweep = 0;
    const std::size_t last = r.order.back();
    while (sweep < cfg.hooi_max_sweeps) {
        ++sweep;
        for (std::size_t n : r.order) {
            DenseTensor y = a;
            for (std::size_t m = 0; m < n_modes; ++m)
                if (m != n) y = mode_n_product(y, factors[m].transpose(), m);
            factors[n] = top_left_vectors_clamped(unfold(y, n), r.mu[n]);
            if (n == last) core = mode_n_product(y, factors[n].transpose(), n);
        }
        double cur = frobenius_norm(core);
        if (std::abs(cur - prev) / norm_a < cfg.hooi_tol) {
            converged = true;
            break;
        }
        prev = cur;
    }
    if (stats) {
        stats->converged = converged;
        stats->sweeps = sweep;
    }
    if (!converged)
        std::cerr << "lmra: hooi stopped after " << sweep
                  << " sweeps without meeting the tolerance\n";
    return {std::move(core), std::move(factors)};
}

TuckerDecomposition hooi(const DenseTensor& a, const AlgoConfig& cfg, HooiStats* stats) {
    return hooi(a, cfg, st_hosvd(a, cfg), stats);
}

TuckerDecomposition rand_thosvd_power(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    std::vector<Eigen::MatrixXd> factors(n_modes);
    run_modes(n_modes, [&](std::size_t n) {
        Eigen::MatrixXd a_n = unfold(a, n);
        Eigen::MatrixXd g =
            gaussian_matrix(a.dim(n), r.sketch[n], gaussian_stream(cfg, n_modes, n));
        Eigen::MatrixXd c = gram_power_apply(a_n, g, cfg.power, cfg.strategy);
        factors[n] = top_left_vectors_clamped(c, r.mu[n]);
    });
    return {core_from_factors(a, factors), std::move(factors)};
}

TuckerDecomposition rand_sthosvd_power(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    std::vector<Eigen::MatrixXd> factors(n_modes);
    DenseTensor work = a;
    for (std::size_t n : r.order) {
        Eigen::MatrixXd a_n = unfold(work, n);
        Eigen::MatrixXd g =
            gaussian_matrix(work.dim(n), r.sketch[n], gaussian_stream(cfg, n_modes, n));
        Eigen::MatrixXd c = gram_power_apply(a_n, g, cfg.power, cfg.strategy);
        factors[n] = top_left_vectors_clamped(c, r.mu[n]);
        work = mode_n_product(work, factors[n].transpose(), n);
    }
    return {std::move(work), std::move(factors)};
}

std::vector<std::size_t> amm_sample_counts(const std::vector<std::size_t>& dims,
                                           const AlgoConfig& cfg, bool sequential) {
    const std::size_t n_modes = dims.size();
    if (!cfg.t_samples.empty()) {
        if (cfg.t_samples.size() != n_modes)
            throw std::invalid_argument("sample count override length must equal tensor order");
        for (std::size_t t : cfg.t_samples)
            if (t < 1) throw std::invalid_argument("sample counts must be positive");
        return cfg.t_samples;
    }
    std::vector<std::size_t> counts(n_modes);
    if (!sequential) {
        for (std::size_t n = 0; n < n_modes; ++n)
            counts[n] = samples_from_alpha(cfg.alpha, other_dims_product(dims, n));
        return counts;
    }
    std::vector<std::size_t> cur = dims;
    std::vector<std::size_t> mu = cfg.rank.clamped_for(dims);
    std::vector<std::size_t> order = cfg.order;
    if (order.empty()) {
        order.resize(n_modes);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    for (std::size_t n : order) {
        counts[n] = samples_from_alpha(cfg.alpha, other_dims_product(cur, n));
        cur[n] = mu[n];
    }
    return counts;
}

TuckerDecomposition rand_thosvd_amm(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    std::vector<std::size_t> t_n = amm_sample_counts(a.dims(), cfg, /*sequential=*/false);
    std::vector<Eigen::MatrixXd> factors(n_modes);
    run_modes(n_modes, [&](std::size_t n) {
        Eigen::MatrixXd a_n = unfold(a, n);
        ProbabilityDistribution p =
            gram_sampling_probabilities(a_n, cfg.regime, cfg.regime_beta);
        SamplingMatrix s = randsample(t_n[n], p, sampling_stream(cfg, n_modes, n));
        Eigen::MatrixXd sampled = sample_columns(a_n, s);
        Eigen::MatrixXd g =
            gaussian_matrix(a.dim(n), r.sketch[n], gaussian_stream(cfg, n_modes, n));
        Eigen::MatrixXd c = gram_power_apply(sampled, g, cfg.power, cfg.strategy);
        factors[n] = top_left_vectors_clamped(c, r.mu[n]);
    });
    return {core_from_factors(a, factors), std::move(factors)};
}

TuckerDecomposition rand_sthosvd_amm(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    std::vector<Eigen::MatrixXd> factors(n_modes);
    DenseTensor work = a;
    for (std::size_t n : r.order) {
        Eigen::MatrixXd a_n = unfold(work, n);
        std::size_t t_n = cfg.t_samples.empty()
                              ? samples_from_alpha(cfg.alpha,
                                                   static_cast<std::size_t>(a_n.cols()))
                              : cfg.t_samples[n];
        if (t_n < 1) throw std::invalid_argument("sample counts must be positive");
        ProbabilityDistribution p =
            gram_sampling_probabilities(a_n, cfg.regime, cfg.regime_beta);
        SamplingMatrix s = randsample(t_n, p, sampling_stream(cfg, n_modes, n));
        Eigen::MatrixXd sampled = sample_columns(a_n, s);
        Eigen::MatrixXd g =
            gaussian_matrix(work.dim(n), r.sketch[n], gaussian_stream(cfg, n_modes, n));
        Eigen::MatrixXd c = gram_power_apply(sampled, g, cfg.power, cfg.strategy);
        factors[n] = top_left_vectors_clamped(c, r.mu[n]);
        work = mode_n_product(work, factors[n].transpose(), n);
    }
    return {std::move(work), std::move(factors)};
}

TuckerDecomposition rand_thosvd_power_qr(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    std::vector<Eigen::MatrixXd> factors(n_modes);
    run_modes(n_modes, [&](std::size_t n) {
        Eigen::MatrixXd a_n = unfold(a, n);
        Eigen::MatrixXd g =
            gaussian_matrix(a.dim(n), r.sketch[n], gaussian_stream(cfg, n_modes, n));
        Eigen::MatrixXd c = gram_power_apply(a_n, g, cfg.power, cfg.strategy);
        std::size_t mu = rank_cap(r.mu[n], std::min(r.sketch[n],
                                  static_cast<std::size_t>(a_n.cols())));
        factors[n] = qr_project_extract(c, a_n, mu);
    });
    return {core_from_factors(a, factors), std::move(factors)};
}

TuckerDecomposition rand_sthosvd_power_qr(const DenseTensor& a, const AlgoConfig& cfg) {
    Resolved r = resolve(a, cfg);
    const std::size_t n_modes = a.order();
    std::vector<Eigen::MatrixXd> factors(n_modes);
    DenseTensor work = a;
    for (std::size_t n : r.order) {
        Eigen::MatrixXd a_n = unfold(work, n);
        Eigen::MatrixXd g =
            gaussian_matrix(work.dim(n), r.sketch[n], gaussian_stream(cfg, n_modes, n));
        Eigen::MatrixXd c = gram_power_apply(a_n, g, cfg.power, cfg.strategy);
        std::size_t mu = rank_cap(r.mu[n], std::min(r.sketch[n],
                                  static_cast<std::size_t>(a_n.cols())));
        factors[n] = qr_project_extract(c, a_n, mu);
        work = mode_n_product(work, factors[n].transpose(), n);
    }
    return {std::move(work), std::move(factors)};
}

TuckerDecomposition run_algorithm(Algorithm alg, const DenseTensor& a,
                                  const AlgoConfig& cfg) {
    switch (alg) {
        case Algorithm::Thosvd: return t_hosvd(a, cfg);
        case Algorithm::Sthosvd: return st_hosvd(a, cfg);
        case Algorithm::Hooi: return hooi(a, cfg);
        case Algorithm::RandThosvdPower: return rand_thosvd_power(a, cfg);
        case Algorithm::RandSthosvdPower: return rand_sthosvd_power(a, cfg);
        case Algorithm::RandThosvdAmm: return rand_thosvd_amm(a, cfg);
        case Algorithm::RandSthosvdAmm: return rand_sthosvd_amm(a, cfg);
        case Algorithm::RandThosvdPowerQr: return rand_thosvd_power_qr(a, cfg);
        case Algorithm::RandSthosvdPowerQr: return rand_sthosvd_power_qr(a, cfg);
    }
    throw std::invalid_argument("unknown algorithm");
}

}  // namespace lmra
