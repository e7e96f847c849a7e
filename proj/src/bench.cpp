#include "lmra/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmra/bounds.hpp"
#include "lmra/sketching.hpp"
#include "lmra/tensor_io.hpp"

namespace lmra::bench {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_sizes(const std::vector<std::size_t>& v, char sep = 'x') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, char sep) {
    std::vector<std::size_t> out;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, sep))
        if (!tok.empty()) out.push_back(static_cast<std::size_t>(std::stoull(tok)));
    return out;
}

std::string sanitize(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double, std::milli>(dt).count();
}

std::string regime_id(ProbRegime r) {
    switch (r) {
        case ProbRegime::Optimal: return "optimal";
        case ProbRegime::NearlyOptimal: return "nearly-optimal";
        case ProbRegime::Uniform: return "uniform";
    }
    return "?";
}

ProbRegime parse_regime(const std::string& id) {
    if (id == "optimal") return ProbRegime::Optimal;
    if (id == "nearly-optimal") return ProbRegime::NearlyOptimal;
    if (id == "uniform") return ProbRegime::Uniform;
    throw std::invalid_argument("unknown probability regime: " + id);
}

// Config files carry 1-based mode orders.
std::vector<std::size_t> order_from_one_based(const std::vector<std::size_t>& order) {
    std::vector<std::size_t> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] < 1) throw std::invalid_argument("mode order entries are 1-based");
        out[i] = order[i] - 1;
    }
    return out;
}

void algo_config_from_json(const json& j, AlgoConfig& cfg) {
    if (j.contains("oversampling")) cfg.oversampling = j["oversampling"].get<std::size_t>();
    if (j.contains("power")) cfg.power = j["power"].get<int>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("regime")) cfg.regime = parse_regime(j["regime"].get<std::string>());
    if (j.contains("regime_beta")) cfg.regime_beta = j["regime_beta"].get<double>();
    if (j.contains("t_samples"))
        cfg.t_samples = j["t_samples"].get<std::vector<std::size_t>>();
    if (j.contains("order"))
        cfg.order = order_from_one_based(j["order"].get<std::vector<std::size_t>>());
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("strategy"))
        cfg.strategy = j["strategy"].get<std::string>() == "B" ? GramStrategy::B
                                                               : GramStrategy::A;
    if (j.contains("hooi_max_sweeps")) cfg.hooi_max_sweeps = j["hooi_max_sweeps"].get<int>();
    if (j.contains("hooi_tol")) cfg.hooi_tol = j["hooi_tol"].get<double>();
}

bool is_sequential(Algorithm a) {
    return a == Algorithm::Sthosvd || a == Algorithm::RandSthosvdPower ||
           a == Algorithm::RandSthosvdAmm || a == Algorithm::RandSthosvdPowerQr;
}

bool is_sampled(Algorithm a) {
    return a == Algorithm::RandThosvdAmm || a == Algorithm::RandSthosvdAmm;
}

}  // namespace

std::string csv_header() {
    return "algorithm,dims,ranks,K,q,alpha,T,regime,seed,re,fit,wall_time_ms,rerun,error";
}

std::string csv_line(const ResultRow& row) {
    std::string out;
    out += sanitize(row.algorithm);
    out += ',';
    out += join_sizes(row.dims);
    out += ',';
    out += join_sizes(row.ranks);
    out += ',';
    out += std::to_string(row.oversampling);
    out += ',';
    out += std::to_string(row.power);
    out += ',';
    out += fmt_double(row.alpha);
    out += ',';
    out += join_sizes(row.t_samples);
    out += ',';
    out += row.regime;
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    out += fmt_double(row.re);
    out += ',';
    out += fmt_double(row.fit);
    out += ',';
    out += fmt_double(row.wall_time_ms);
    out += ',';
    out += std::to_string(row.rerun);
    out += ',';
    out += sanitize(row.error);
    return out;
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    bool need_header = true;
    {
        std::ifstream probe(path, std::ios::binary);
        if (probe && probe.peek() != std::ifstream::traits_type::eof()) need_header = false;
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open CSV for writing: " + path);
    if (need_header) out << csv_header() << '\n';
    for (const auto& row : rows) out << csv_line(row) << '\n';
}

std::vector<ResultRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    std::vector<ResultRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        while (f.size() < 14) f.emplace_back();
        ResultRow r;
        r.algorithm = f[0];
        r.dims = parse_sizes(f[1], 'x');
        r.ranks = parse_sizes(f[2], 'x');
        r.oversampling = static_cast<std::size_t>(std::stoull(f[3]));
        r.power = std::stoi(f[4]);
        r.alpha = std::stod(f[5]);
        r.t_samples = parse_sizes(f[6], 'x');
        r.regime = f[7];
        r.seed = std::stoull(f[8]);
        r.re = std::stod(f[9]);
        r.fit = std::stod(f[10]);
        r.wall_time_ms = std::stod(f[11]);
        r.rerun = std::stoi(f[12]);
        r.error = f[13];
        rows.push_back(std::move(r));
    }
    return rows;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("generator") && !j["generator"].is_null())
        cfg.generator = generator_spec_from_json(j["generator"].dump());
    if (j.contains("input")) cfg.input_path = j["input"].get<std::string>();
    cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    for (const auto& r : j.at("ranks"))
        cfg.ranks.push_back(r.get<std::vector<std::size_t>>());
    algo_config_from_json(j, cfg.base);
    if (j.contains("reps")) cfg.reps = j["reps"].get<int>();
    if (j.contains("timing_reps")) cfg.timing_reps = j["timing_reps"].get<int>();
    if (j.contains("timed")) cfg.timed = j["timed"].get<bool>();
    if (j.contains("output")) cfg.output_csv = j["output"].get<std::string>();
    if (cfg.algorithms.empty()) throw std::invalid_argument("config lists no algorithms");
    if (cfg.ranks.empty()) throw std::invalid_argument("config lists no ranks");
    if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
    return cfg;
}

std::vector<ResultRow> run_benchmark(const ExperimentConfig& cfg, const DenseTensor& input) {
    std::vector<ResultRow> rows;
    const int reruns = cfg.timed ? std::max(cfg.timing_reps, 1) : 1;
    for (const auto& alg_id : cfg.algorithms) {
        auto alg = parse_algorithm(alg_id);
        for (const auto& rank : cfg.ranks) {
            for (int rep = 0; rep < cfg.reps; ++rep) {
                for (int rerun = 0; rerun < reruns; ++rerun) {
                    ResultRow row;
                    row.algorithm = alg_id;
                    row.dims = input.dims();
                    row.ranks = rank;
                    row.oversampling = cfg.base.oversampling;
                    row.power = cfg.base.power;
                    row.alpha = cfg.base.alpha;
                    row.regime = regime_id(cfg.base.regime);
                    row.seed = cfg.base.seed + static_cast<std::uint64_t>(rep);
                    row.rerun = rerun;
                    try {
                        if (!alg) throw std::invalid_argument("unknown algorithm: " + alg_id);
                        AlgoConfig run_cfg = cfg.base;
                        run_cfg.rank = MultilinearRank(rank);
                        run_cfg.seed = row.seed;
                        if (is_sampled(*alg))
                            row.t_samples = amm_sample_counts(input.dims(), run_cfg,
                                                              is_sequential(*alg));
                        auto t0 = std::chrono::steady_clock::now();
                        TuckerDecomposition d = run_algorithm(*alg, input, run_cfg);
                        row.wall_time_ms = elapsed_ms(t0);
                        row.re = relative_error(input, reconstruct(d));
                        row.fit = 1.0 - row.re;
                    } catch (const std::exception& e) {
                        row.re = std::numeric_limits<double>::quiet_NaN();
                        row.fit = std::numeric_limits<double>::quiet_NaN();
                        row.error = e.what();
                    }
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::vector<ResultRow> run_benchmark(const ExperimentConfig& cfg) {
    DenseTensor input;
    if (cfg.generator)
        input = generate(*cfg.generator);
    else if (!cfg.input_path.empty())
        input = load_tensor(cfg.input_path);
    else
        throw std::invalid_argument("benchmark needs a generator or an input path");
    return run_benchmark(cfg, input);
}

std::string run_decompose_json(const DenseTensor& a, const DecomposeOptions& opts) {
    auto alg = parse_algorithm(opts.algorithm);
    if (!alg) throw std::invalid_argument("unknown algorithm: " + opts.algorithm);

    auto t0 = std::chrono::steady_clock::now();
    TuckerDecomposition d = run_algorithm(*alg, a, opts.cfg);
    double wall = elapsed_ms(t0);

    DenseTensor approx = reconstruct(d);
    double re = relative_error(a, approx);

    json j;
    j["algorithm"] = opts.algorithm;
    j["dims"] = a.dims();
    j["ranks"] = opts.cfg.rank.mu;
    j["seed"] = opts.cfg.seed;
    j["oversampling"] = opts.cfg.oversampling;
    j["power"] = opts.cfg.power;
    j["alpha"] = opts.cfg.alpha;
    j["regime"] = regime_id(opts.cfg.regime);
    j["re"] = re;
    j["fit"] = 1.0 - re;
    j["wall_time_ms"] = wall;
    if (is_sampled(*alg))
        j["t_samples"] = amm_sample_counts(a.dims(), opts.cfg, is_sequential(*alg));

    std::vector<double> orth;
    for (const auto& q : d.factors)
        orth.push_back((q.transpose() * q -
                        Eigen::MatrixXd::Identity(q.cols(), q.cols()))
                           .cwiseAbs()
                           .maxCoeff());
    j["factor_orthonormality"] = orth;

    if (opts.with_bounds) {
        BoundReport report =
            rand_thosvd_error_bound(a, opts.cfg, opts.bound_beta, opts.bound_gamma);
        double num = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double diff = a[i] - approx[i];
            num += diff * diff;
        }
        report.observed = std::sqrt(num);
        json jb;
        jb["observed"] = report.observed;
        jb["bound"] = report.bound;
        jb["probability_floor"] = report.probability_floor;
        jb["params"] = report.params;
        j["bound_report"] = jb;
    }
    return j.dump(2);
}

VerifyBoundsConfig verify_config_from_json(const std::string& text) {
    json j = json::parse(text);
    VerifyBoundsConfig cfg;
    if (j.contains("generator") && !j["generator"].is_null())
        cfg.generator = generator_spec_from_json(j["generator"].dump());
    if (j.contains("input")) cfg.input_path = j["input"].get<std::string>();
    if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<std::size_t>>();
    if (j.contains("ranks")) cfg.rank = j["ranks"].get<std::vector<std::size_t>>();
    if (j.contains("oversampling")) cfg.oversampling = j["oversampling"].get<std::size_t>();
    if (j.contains("power")) cfg.power = j["power"].get<int>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("amm_trials")) cfg.amm_trials = j["amm_trials"].get<int>();
    if (j.contains("amm_samples")) cfg.amm_samples = j["amm_samples"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

VerifyBoundsOutcome verify_bounds(const VerifyBoundsConfig& cfg) {
    DenseTensor a;
    if (cfg.generator)
        a = generate(*cfg.generator);
    else if (!cfg.input_path.empty())
        a = load_tensor(cfg.input_path);
    else {
        a = DenseTensor(cfg.dims);
        RandomStream gen(RngStream{cfg.seed, 50});
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = gen.next_normal();
    }
    const std::size_t n_modes = a.order();
    const double norm_a = frobenius_norm(a);

    AlgoConfig base;
    base.rank = MultilinearRank(cfg.rank);
    base.oversampling = cfg.oversampling;
    base.power = cfg.power;
    base.seed = cfg.seed;

    json report;
    bool det_ok = true;

    // Deterministic split inequalities and the energy identity, one run of
    // every algorithm.
    json det = json::array();
    std::vector<std::size_t> natural_order(n_modes);
    for (std::size_t n = 0; n < n_modes; ++n) natural_order[n] = n;
    for (const auto& id : all_algorithm_ids()) {
        json entry;
        entry["algorithm"] = id;
        try {
            TuckerDecomposition d = run_algorithm(*parse_algorithm(id), a, base);
            DenseTensor approx = reconstruct(d);
            double err_sq = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                double diff = a[i] - approx[i];
                err_sq += diff * diff;
            }
            ErrorDecomposition mode_split = mode_error_decomposition(a, d.factors);
            double mode_sum = 0.0;
            for (double t : mode_split.terms) mode_sum += t;
            entry["mode_split_total"] = mode_split.total;
            entry["mode_split_sum"] = mode_sum;

            ErrorDecomposition seq_split =
                sequential_error_decomposition(a, d.factors, natural_order);
            double seq_sum = 0.0;
            for (double t : seq_split.terms) seq_sum += t;
            entry["sequential_split_total"] = seq_split.total;
            entry["sequential_split_sum"] = seq_sum;

            double core_sq = inner_product(d.core, d.core);
            double energy_gap = std::abs(err_sq - (norm_a * norm_a - core_sq));
            bool energy_ok = energy_gap <= 1e-8 * std::max(1.0, norm_a * norm_a);
            entry["energy_identity_gap"] = energy_gap;
            entry["energy_identity_ok"] = energy_ok;
            entry["re"] = std::sqrt(err_sq) / norm_a;
            if (!energy_ok) det_ok = false;
        } catch (const std::exception& e) {
            entry["error"] = e.what();
            det_ok = false;
        }
        det.push_back(entry);
    }
    report["deterministic"] = det;

    // Single-mode projection bound of the randomized range finder, as an
    // empirical frequency against the probability floor.
    try {
        std::vector<std::size_t> mu = base.rank.clamped_for(a.dims());
        SpectralProfile profile = spectral_profile(a, mu);
        std::vector<Eigen::MatrixXd> unfoldings(n_modes);
        std::vector<double> bounds(n_modes), floors(n_modes);
        for (std::size_t n = 0; n < n_modes; ++n) {
            unfoldings[n] = unfold(a, n);
            bounds[n] = mode_projection_bound(profile, n, mu[n], cfg.oversampling,
                                              cfg.power, cfg.beta, cfg.gamma);
            floors[n] = mode_bound_prob_floor(a.dim(n), profile.i_full[n], mu[n],
                                              cfg.oversampling, cfg.gamma);
        }
        std::vector<int> hits(n_modes, 0);
        // Guard for exact-rank inputs where both sides are rounding-level zeros.
        const double eps_floor = 1e-12 * norm_a;
        for (int t = 0; t < cfg.trials; ++t) {
            AlgoConfig trial = base;
            trial.seed = cfg.seed + static_cast<std::uint64_t>(t);
            TuckerDecomposition d = rand_thosvd_power(a, trial);
            for (std::size_t n = 0; n < n_modes; ++n) {
                const auto& q = d.factors[n];
                double obs = (unfoldings[n] - q * (q.transpose() * unfoldings[n])).norm();
                if (obs <= bounds[n] + eps_floor) ++hits[n];
            }
        }
        json jm = json::array();
        for (std::size_t n = 0; n < n_modes; ++n) {
            json e;
            e["mode"] = n + 1;
            e["bound"] = bounds[n];
            e["probability_floor"] = floors[n];
            e["frequency"] = double(hits[n]) / double(cfg.trials);
            jm.push_back(e);
        }
        report["mode_projection_bound"] = jm;
    } catch (const std::exception& e) {
        report["mode_projection_bound"] = json{{"error", e.what()}};
    }

    // Monte-Carlo product bounds at failure probability delta.
    {
        Eigen::MatrixXd ma = gaussian_matrix(20, 60, {cfg.seed, 900});
        Eigen::MatrixXd mb = gaussian_matrix(60, 10, {cfg.seed, 901});
        Eigen::MatrixXd exact = ma * mb;
        std::size_t k = std::min<std::size_t>(cfg.amm_samples, 60);

        auto run_trials = [&](const ProbabilityDistribution& p, double bound,
                              std::uint64_t stream_base) {
            int viol = 0;
            for (int t = 0; t < cfg.amm_trials; ++t) {
                auto [c, r] = basic_matrix_multiplication(
                    ma, mb, k, p, {cfg.seed, stream_base + std::uint64_t(t)});
                if ((exact - c * r).norm() > bound) ++viol;
            }
            return double(viol) / double(cfg.amm_trials);
        };

        json jn;
        double bound_opt = amm_bound_nearly_optimal(ma, mb, k, 1.0, cfg.delta);
        jn["bound"] = bound_opt;
        jn["violation_rate"] =
            run_trials(make_probabilities(ma, mb, ProbRegime::Optimal), bound_opt, 10000);
        jn["delta"] = cfg.delta;
        report["amm_nearly_optimal"] = jn;

        json ju;
        double bound_uni = amm_bound_uniform(ma, mb, k, cfg.delta);
        ju["bound"] = bound_uni;
        ju["violation_rate"] = run_trials(ProbabilityDistribution::uniform(60), bound_uni, 20000);
        ju["delta"] = cfg.delta;
        report["amm_uniform"] = ju;
    }

    // Gram estimation bounds on the first unfolding; both displayed variants
    // are recorded.
    try {
        Eigen::MatrixXd a1 = unfold(a, 0);
        std::size_t t_cols = static_cast<std::size_t>(
            std::ceil(0.2 * static_cast<double>(a1.cols())));
        t_cols = std::max<std::size_t>(t_cols, 1);
        Eigen::MatrixXd gram = a1 * a1.transpose();
        double b_near = amm_gram_bound_nearly_optimal(a1, t_cols, 1.0, cfg.delta);
        double b_uni = amm_gram_bound_uniform(a1, t_cols, cfg.delta);

        ProbabilityDistribution p_opt =
            make_probabilities(a1, a1.transpose(), ProbRegime::Optimal);
        ProbabilityDistribution p_uni =
            ProbabilityDistribution::uniform(static_cast<std::size_t>(a1.cols()));
        int trials = std::min(cfg.amm_trials, 100);
        int viol_near = 0, viol_uni = 0;
        for (int t = 0; t < trials; ++t) {
            SamplingMatrix s_opt =
                randsample(t_cols, p_opt, {cfg.seed, 30000 + std::uint64_t(t)});
            Eigen::MatrixXd c_opt = sample_columns(a1, s_opt);
            if ((gram - c_opt * c_opt.transpose()).norm() > b_near) ++viol_near;
            SamplingMatrix s_uni =
                randsample(t_cols, p_uni, {cfg.seed, 40000 + std::uint64_t(t)});
            Eigen::MatrixXd c_uni = sample_columns(a1, s_uni);
            if ((gram - c_uni * c_uni.transpose()).norm() > b_uni) ++viol_uni;
        }
        json jg;
        jg["samples"] = t_cols;
        jg["nearly_optimal_bound"] = b_near;
        jg["nearly_optimal_violation_rate"] = double(viol_near) / double(trials);
        jg["uniform_bound"] = b_uni;
        jg["uniform_violation_rate"] = double(viol_uni) / double(trials);
        jg["delta"] = cfg.delta;
        report["gram_estimation_bound"] = jg;
    } catch (const std::exception& e) {
        report["gram_estimation_bound"] = json{{"error", e.what()}};
    }

    report["deterministic_ok"] = det_ok;

    VerifyBoundsOutcome out;
    out.report_json = report.dump(2);
    out.deterministic_ok = det_ok;
    return out;
}

namespace {

struct CliDecomposeArgs {
    std::string input, output, algorithm = "sthosvd";
    std::string ranks, order, regime = "uniform", strategy = "A";
    std::size_t oversampling = 10;
    int power = 1;
    double alpha = 0.2;
    double regime_beta = 0.5;
    std::string t_samples;
    std::uint64_t seed = 0;
    bool with_bounds = false;
    double bound_beta = 2.0, bound_gamma = 2.0;
};

AlgoConfig algo_config_from_cli(const CliDecomposeArgs& a) {
    AlgoConfig cfg;
    cfg.rank = MultilinearRank(parse_sizes(a.ranks, ','));
    cfg.oversampling = a.oversampling;
    cfg.power = a.power;
    cfg.alpha = a.alpha;
    cfg.regime = parse_regime(a.regime);
    cfg.regime_beta = a.regime_beta;
    if (!a.t_samples.empty()) cfg.t_samples = parse_sizes(a.t_samples, ',');
    if (!a.order.empty())
        cfg.order = order_from_one_based(parse_sizes(a.order, ','));
    cfg.seed = a.seed;
    cfg.strategy = a.strategy == "B" ? GramStrategy::B : GramStrategy::A;
    return cfg;
}

void emit(const std::string& output, const std::string& text) {
    if (output.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot open output file: " + output);
    out << text << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Low multilinear-rank Tucker approximation benchmark"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic tensor file");
    std::string gen_config, gen_kind = "tucker-noise", gen_output;
    std::string gen_dims, gen_core, gen_denom = "scaled";
    double gen_gamma = -1.0, gen_snr = std::numeric_limits<double>::quiet_NaN();
    double gen_sparsity = 0.05;
    std::size_t gen_split = 0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--config", gen_config, "Generator spec as a JSON file");
    gen->add_option("--kind", gen_kind,
                    "tucker-noise|sparse-cp|lowrank-noise|diag-decay|order4-noise|order4-sparse");
    gen->add_option("--dims", gen_dims, "Comma list, e.g. 60,60,60");
    gen->add_option("--core-dims", gen_core, "Comma list, e.g. 10,10,10");
    gen->add_option("--gamma", gen_gamma, "Noise coefficient / leading CP weight");
    gen->add_option("--snr", gen_snr, "Target SNR in dB (lowrank/order4 noise)");
    gen->add_option("--sparsity", gen_sparsity, "CP vector density");
    gen->add_option("--split", gen_split, "Leading group size / plateau length");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--noise-denom", gen_denom, "scaled|literal");
    gen->add_option("--output", gen_output, "Output TNSR path")->required();
    gen->callback([&] {
        GeneratorSpec spec;
        if (!gen_config.empty()) {
            std::ifstream in(gen_config);
            if (!in) throw std::runtime_error("cannot open config: " + gen_config);
            std::stringstream ss;
            ss << in.rdbuf();
            spec = generator_spec_from_json(ss.str());
        } else {
            auto kind = parse_generator_kind(gen_kind);
            if (!kind) throw std::invalid_argument("unknown generator kind: " + gen_kind);
            spec.kind = *kind;
            if (!gen_dims.empty()) spec.dims = parse_sizes(gen_dims, ',');
            if (!gen_core.empty()) spec.core_dims = parse_sizes(gen_core, ',');
            if (gen_gamma >= 0.0) spec.gamma = gen_gamma;
            if (!std::isnan(gen_snr)) spec.snr_db = gen_snr;
            spec.sparsity = gen_sparsity;
            spec.split = gen_split;
            spec.seed = gen_seed;
            spec.noise_denom =
                gen_denom == "literal" ? NoiseDenom::Literal400 : NoiseDenom::Scaled;
        }
        DenseTensor t = generate(spec);
        save_tensor(gen_output, t);
        std::cout << "dims: " << join_sizes(t.dims()) << '\n'
                  << "frobenius_norm: " << fmt_double(frobenius_norm(t)) << '\n'
                  << "wrote: " << gen_output << '\n';
    });

    // decompose
    auto* dec = app.add_subcommand("decompose", "Decompose a tensor file");
    CliDecomposeArgs da;
    dec->add_option("--input", da.input, "Input TNSR path")->required();
    dec->add_option("--output", da.output, "Output JSON path (default stdout)");
    dec->add_option("--algorithm", da.algorithm,
                    "thosvd|sthosvd|hooi|alg1|alg2|alg4|alg5|alg6|alg7");
    dec->add_option("--ranks", da.ranks, "Comma list, e.g. 10,10,10")->required();
    dec->add_option("--oversampling", da.oversampling, "Sketch oversampling K");
    dec->add_option("--power", da.power, "Gram power exponent q");
    dec->add_option("--alpha", da.alpha, "Sampling fraction");
    dec->add_option("--regime", da.regime, "uniform|optimal|nearly-optimal");
    dec->add_option("--beta", da.regime_beta, "Nearly-optimal mixture weight");
    dec->add_option("--t-samples", da.t_samples, "Per-mode sample count override");
    dec->add_option("--order", da.order, "Processing order, 1-based comma permutation");
    dec->add_option("--seed", da.seed, "RNG seed");
    dec->add_option("--strategy", da.strategy, "Gram product strategy: A|B");
    dec->add_flag("--bounds", da.with_bounds, "Include the error-bound report");
    dec->add_option("--bound-beta", da.bound_beta, "Bound parameter beta (> 1)");
    dec->add_option("--bound-gamma", da.bound_gamma, "Bound parameter gamma (> 1)");
    dec->callback([&] {
        DenseTensor a = load_tensor(da.input);
        DecomposeOptions opts;
        opts.algorithm = da.algorithm;
        opts.cfg = algo_config_from_cli(da);
        opts.with_bounds = da.with_bounds;
        opts.bound_beta = da.bound_beta;
        opts.bound_gamma = da.bound_gamma;
        emit(da.output, run_decompose_json(a, opts));
    });

    // benchmark
    auto* ben = app.add_subcommand("benchmark", "Run an experiment sweep to CSV");
    std::string ben_config, ben_input, ben_output, ben_algorithms, ben_ranks;
    std::uint64_t ben_seed = 0;
    int ben_reps = -1, ben_timing_reps = -1;
    bool ben_timed = false;
    ben->add_option("--config", ben_config, "Experiment config JSON file");
    ben->add_option("--input", ben_input, "Input TNSR path (overrides config)");
    ben->add_option("--output", ben_output, "Output CSV path");
    ben->add_option("--algorithm", ben_algorithms, "Comma list of algorithm ids");
    ben->add_option("--ranks", ben_ranks, "Comma list, one rank vector");
    ben->add_option("--seed", ben_seed, "Base seed");
    ben->add_option("--reps", ben_reps, "Seed repetitions");
    ben->add_option("--timing-reps", ben_timing_reps, "Reruns per row when timed");
    ben->add_flag("--timed", ben_timed, "Record timed reruns");
    ben->callback([&] {
        ExperimentConfig cfg;
        if (!ben_config.empty()) {
            std::ifstream in(ben_config);
            if (!in) throw std::runtime_error("cannot open config: " + ben_config);
            std::stringstream ss;
            ss << in.rdbuf();
            cfg = experiment_config_from_json(ss.str());
        } else {
            if (ben_input.empty() || ben_algorithms.empty() || ben_ranks.empty())
                throw std::invalid_argument(
                    "benchmark needs --config, or --input with --algorithm and --ranks");
            std::istringstream as(ben_algorithms);
            std::string tok;
            while (std::getline(as, tok, ','))
                if (!tok.empty()) cfg.algorithms.push_back(tok);
            cfg.ranks.push_back(parse_sizes(ben_ranks, ','));
            cfg.reps = 1;
        }
        if (!ben_input.empty()) {
            cfg.input_path = ben_input;
            cfg.generator.reset();
        }
        if (!ben_output.empty()) cfg.output_csv = ben_output;
        if (ben_seed != 0) cfg.base.seed = ben_seed;
        if (ben_reps > 0) cfg.reps = ben_reps;
        if (ben_timing_reps > 0) cfg.timing_reps = ben_timing_reps;
        if (ben_timed) cfg.timed = true;
        auto rows = run_benchmark(cfg);
        if (cfg.output_csv.empty()) {
            std::cout << csv_header() << '\n';
            for (const auto& row : rows) std::cout << csv_line(row) << '\n';
        } else {
            write_csv(cfg.output_csv, rows);
            std::cout << "wrote " << rows.size() << " rows to " << cfg.output_csv << '\n';
        }
    });

    // verify-bounds
    auto* ver = app.add_subcommand("verify-bounds", "Check bound inequalities and frequencies");
    std::string ver_config, ver_input, ver_output, ver_dims, ver_ranks;
    VerifyBoundsConfig vb;
    ver->add_option("--config", ver_config, "Verify config JSON file");
    ver->add_option("--input", ver_input, "Input TNSR path");
    ver->add_option("--output", ver_output, "Output JSON path (default stdout)");
    ver->add_option("--dims", ver_dims, "Random tensor dims when no input given");
    ver->add_option("--ranks", ver_ranks, "Target rank comma list");
    ver->add_option("--oversampling", vb.oversampling, "Sketch oversampling K");
    ver->add_option("--power", vb.power, "Gram power exponent q");
    ver->add_option("--trials", vb.trials, "Randomized trials for the mode bound");
    ver->add_option("--amm-trials", vb.amm_trials, "Trials for the product bounds");
    ver->add_option("--delta", vb.delta, "Failure probability for sampling bounds");
    ver->add_option("--beta", vb.beta, "Bound parameter beta (> 1)");
    ver->add_option("--gamma", vb.gamma, "Bound parameter gamma (> 1)");
    ver->add_option("--seed", vb.seed, "Base seed");
    int verify_rc = 0;
    ver->callback([&] {
        if (!ver_config.empty()) {
            std::ifstream in(ver_config);
            if (!in) throw std::runtime_error("cannot open config: " + ver_config);
            std::stringstream ss;
            ss << in.rdbuf();
            vb = verify_config_from_json(ss.str());
        }
        if (!ver_input.empty()) vb.input_path = ver_input;
        if (!ver_dims.empty()) vb.dims = parse_sizes(ver_dims, ',');
        if (!ver_ranks.empty()) vb.rank = parse_sizes(ver_ranks, ',');
        VerifyBoundsOutcome outcome = verify_bounds(vb);
        emit(ver_output, outcome.report_json);
        verify_rc = outcome.deterministic_ok ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return verify_rc;
}

}  // namespace lmra::bench
