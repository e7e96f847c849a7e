#include "lmra/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "lmra/linalg.hpp"
#include "lmra/rng.hpp"
#include "lmra/sketching.hpp"

namespace lmra {

namespace {

// Stream ids inside a generator; fixed so components are independent draws.
constexpr std::uint64_t kCoreStream = 100;
constexpr std::uint64_t kFactorStreamBase = 101;
constexpr std::uint64_t kNoiseStream = 200;
constexpr std::uint64_t kSparseStreamBase = 300;

DenseTensor gaussian_tensor(const std::vector<std::size_t>& dims, RngStream rng) {
    DenseTensor t(dims);
    RandomStream gen(rng);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gen.next_normal();
    return t;
}

DenseTensor uniform_tensor(const std::vector<std::size_t>& dims, RngStream rng) {
    DenseTensor t(dims);
    RandomStream gen(rng);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gen.next_double();
    return t;
}

void check_core_fits(const GeneratorSpec& spec) {
    if (spec.core_dims.size() != spec.dims.size())
        throw std::invalid_argument("core order must match tensor order");
    for (std::size_t n = 0; n < spec.dims.size(); ++n)
        if (spec.core_dims[n] > spec.dims[n])
            throw std::invalid_argument("core dimensions must not exceed tensor dimensions");
}

// k distinct indices from [0, n) by partial Fisher-Yates.
std::vector<std::size_t> sample_support(std::size_t n, std::size_t k, RandomStream& gen) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t r = j + static_cast<std::size_t>(gen.next_double() * double(n - j));
        if (r >= n) r = n - 1;
        std::swap(pool[j], pool[r]);
    }
    pool.resize(k);
    return pool;
}

struct SparseVec {
    std::vector<std::size_t> idx;
    std::vector<double> val;
};

SparseVec sparse_vector(std::size_t n, double density, RandomStream& gen) {
    std::size_t k = static_cast<std::size_t>(std::llround(density * double(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    SparseVec v;
    v.idx = sample_support(n, k, gen);
    v.val.resize(k);
    for (auto& x : v.val) x = gen.next_double();
    return v;
}

// Adds weight * (x_1 outer ... outer x_N) over the sparse supports.
void add_rank_one(DenseTensor& t, double weight, const std::vector<SparseVec>& vecs) {
    const std::size_t n_modes = vecs.size();
    std::vector<std::size_t> strides(n_modes);
    std::size_t s = 1;
    for (std::size_t m = 0; m < n_modes; ++m) {
        strides[m] = s;
        s *= t.dim(m);
    }
    std::vector<std::size_t> pos(n_modes, 0);
    for (;;) {
        double prod = weight;
        std::size_t lin = 0;
        for (std::size_t m = 0; m < n_modes; ++m) {
            prod *= vecs[m].val[pos[m]];
            lin += vecs[m].idx[pos[m]] * strides[m];
        }
        t[lin] += prod;
        std::size_t m = 0;
        while (m < n_modes && ++pos[m] == vecs[m].idx.size()) {
            pos[m] = 0;
            ++m;
        }
        if (m == n_modes) break;
    }
}

}  // namespace

GeneratorSpec with_defaults(GeneratorSpec spec) {
    switch (spec.kind) {
        case GeneratorKind::TuckerNoise:
            if (spec.dims.empty()) spec.dims = {60, 60, 60};
            if (spec.core_dims.empty()) spec.core_dims = {10, 10, 10};
            if (!spec.gamma) spec.gamma = 0.001;
            break;
        case GeneratorKind::SparseCp:
            if (spec.dims.empty()) spec.dims = {120, 120, 120};
            if (spec.split == 0) spec.split = 20;
            if (!spec.gamma) spec.gamma = 1000.0;
            break;
        case GeneratorKind::LowrankNoise:
            if (spec.dims.empty()) spec.dims = {60, 60, 60};
            if (spec.core_dims.empty()) spec.core_dims = {10, 10, 10};
            break;
        case GeneratorKind::DiagDecay:
            if (spec.dims.empty()) spec.dims = {120, 120, 120};
            if (spec.split == 0) spec.split = 20;
            break;
        case GeneratorKind::Order4Noise:
            if (spec.dims.empty()) spec.dims = {40, 40, 40, 40};
            if (spec.core_dims.empty()) spec.core_dims = {8, 8, 8, 8};
            break;
        case GeneratorKind::Order4Sparse:
            if (spec.dims.empty()) spec.dims = {40, 40, 40, 40};
            if (spec.split == 0) spec.split = 10;
            if (!spec.gamma) spec.gamma = 1000.0;
            break;
    }
    return spec;
}

std::optional<GeneratorKind> parse_generator_kind(const std::string& id) {
    if (id == "tucker-noise") return GeneratorKind::TuckerNoise;
    if (id == "sparse-cp") return GeneratorKind::SparseCp;
    if (id == "lowrank-noise") return GeneratorKind::LowrankNoise;
    if (id == "diag-decay") return GeneratorKind::DiagDecay;
    if (id == "order4-noise") return GeneratorKind::Order4Noise;
    if (id == "order4-sparse") return GeneratorKind::Order4Sparse;
    return std::nullopt;
}

std::string generator_kind_id(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::TuckerNoise: return "tucker-noise";
        case GeneratorKind::SparseCp: return "sparse-cp";
        case GeneratorKind::LowrankNoise: return "lowrank-noise";
        case GeneratorKind::DiagDecay: return "diag-decay";
        case GeneratorKind::Order4Noise: return "order4-noise";
        case GeneratorKind::Order4Sparse: return "order4-sparse";
    }
    return "?";
}

std::string generator_spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["kind"] = generator_kind_id(spec.kind);
    j["dims"] = spec.dims;
    j["core_dims"] = spec.core_dims;
    if (spec.gamma) j["gamma"] = *spec.gamma;
    if (spec.snr_db) {
        if (std::isinf(*spec.snr_db))
            j["snr_db"] = "inf";
        else
            j["snr_db"] = *spec.snr_db;
    }
    j["sparsity"] = spec.sparsity;
    j["split"] = spec.split;
    j["seed"] = spec.seed;
    j["noise_denom"] = spec.noise_denom == NoiseDenom::Scaled ? "scaled" : "literal";
    return j.dump(2);
}

GeneratorSpec generator_spec_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GeneratorSpec spec;
    auto kind = parse_generator_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown generator kind");
    spec.kind = *kind;
    if (j.contains("dims")) spec.dims = j["dims"].get<std::vector<std::size_t>>();
    if (j.contains("core_dims"))
        spec.core_dims = j["core_dims"].get<std::vector<std::size_t>>();
    if (j.contains("gamma")) spec.gamma = j["gamma"].get<double>();
    if (j.contains("snr_db")) {
        if (j["snr_db"].is_string())
            spec.snr_db = std::numeric_limits<double>::infinity();
        else
            spec.snr_db = j["snr_db"].get<double>();
    }
    if (j.contains("sparsity")) spec.sparsity = j["sparsity"].get<double>();
    if (j.contains("split")) spec.split = j["split"].get<std::size_t>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("noise_denom"))
        spec.noise_denom = j["noise_denom"].get<std::string>() == "literal"
                               ? NoiseDenom::Literal400
                               : NoiseDenom::Scaled;
    return spec;
}

TuckerNoiseParts gen_tucker_noise_parts(const GeneratorSpec& raw) {
    GeneratorSpec spec = with_defaults(raw);
    check_core_fits(spec);
    const double gamma = *spec.gamma;
    if (gamma < 0.0) throw std::invalid_argument("noise coefficient must be nonnegative");

    DenseTensor core = uniform_tensor(spec.core_dims, {spec.seed, kCoreStream});
    DenseTensor clean = core;
    for (std::size_t n = 0; n < spec.dims.size(); ++n) {
        Eigen::MatrixXd b = gaussian_matrix(spec.dims[n], spec.core_dims[n],
                                            {spec.seed, kFactorStreamBase + n});
        clean = mode_n_product(clean, thin_qr(b).Q, n);
    }

    TuckerNoiseParts parts;
    parts.clean = clean;
    if (gamma == 0.0) {
        parts.tensor = clean;
        parts.scaled_noise = DenseTensor(spec.dims);
        parts.coefficient = 0.0;
        return parts;
    }

    double denom = 1.0;
    for (std::size_t d : spec.dims)
        denom *= spec.noise_denom == NoiseDenom::Scaled ? (2.0 / 3.0) * double(d) : 400.0;
    denom = std::sqrt(denom);
    parts.coefficient = gamma * frobenius_norm(clean) / denom;

    DenseTensor noise = gaussian_tensor(spec.dims, {spec.seed, kNoiseStream});
    parts.scaled_noise = DenseTensor(spec.dims);
    parts.tensor = DenseTensor(spec.dims);
    for (std::size_t i = 0; i < noise.size(); ++i) {
        parts.scaled_noise[i] = parts.coefficient * noise[i];
        parts.tensor[i] = clean[i] + parts.scaled_noise[i];
    }
    return parts;
}

DenseTensor gen_tucker_noise(const GeneratorSpec& spec) {
    return gen_tucker_noise_parts(spec).tensor;
}

DenseTensor gen_sparse_cp(const GeneratorSpec& raw) {
    GeneratorSpec spec = with_defaults(raw);
    if (!(spec.sparsity > 0.0 && spec.sparsity <= 1.0))
        throw std::invalid_argument("sparsity must lie in (0, 1]");
    const double gamma = *spec.gamma;
    const std::size_t n_modes = spec.dims.size();
    const std::size_t terms = *std::min_element(spec.dims.begin(), spec.dims.end());
    const std::size_t split = std::min(spec.split, terms);

    std::vector<RandomStream> gens;
    gens.reserve(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m)
        gens.emplace_back(RngStream{spec.seed, kSparseStreamBase + m});

    DenseTensor t(spec.dims);
    for (std::size_t i = 1; i <= terms; ++i) {
        std::vector<SparseVec> vecs(n_modes);
        for (std::size_t m = 0; m < n_modes; ++m)
            vecs[m] = sparse_vector(spec.dims[m], spec.sparsity, gens[m]);
        double w = (i <= split ? gamma : 1.0) / (double(i) * double(i));
        add_rank_one(t, w, vecs);
    }
    return t;
}

LowrankNoiseResult gen_lowrank_noise(const GeneratorSpec& raw) {
    GeneratorSpec spec = with_defaults(raw);
    check_core_fits(spec);
    if (!spec.snr_db) throw std::invalid_argument("lowrank-noise requires an SNR target");

    DenseTensor core = gaussian_tensor(spec.core_dims, {spec.seed, kCoreStream});
    DenseTensor clean = core;
    for (std::size_t n = 0; n < spec.dims.size(); ++n) {
        Eigen::MatrixXd b = gaussian_matrix(spec.dims[n], spec.core_dims[n],
                                            {spec.seed, kFactorStreamBase + n});
        clean = mode_n_product(clean, b, n);
    }
    double clean_sq = inner_product(clean, clean);
    if (clean_sq == 0.0) throw std::invalid_argument("generated clean tensor is zero");

    LowrankNoiseResult out;
    out.clean = clean;
    if (std::isinf(*spec.snr_db) && *spec.snr_db > 0) {
        out.tensor = clean;
        out.scaled_noise = DenseTensor(spec.dims);
        out.beta = 0.0;
        return out;
    }

    DenseTensor noise = gaussian_tensor(spec.dims, {spec.seed, kNoiseStream});
    double noise_sq = inner_product(noise, noise);
    double cross = inner_product(clean, noise);

    // ||clean + beta N||^2 = c * beta^2 ||N||^2 with c = 10^(target/10), i.e.
    // (1-c)||N||^2 beta^2 + 2<clean,N> beta + ||clean||^2 = 0.
    double c = std::pow(10.0, *spec.snr_db / 10.0);
    double qa = (1.0 - c) * noise_sq;
    double qb = 2.0 * cross;
    double qc = clean_sq;
    double beta;
    if (qa == 0.0) {
        if (qb == 0.0)
            throw std::invalid_argument("SNR target unattainable for this draw");
        beta = -qc / qb;
    } else {
        double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0)
            throw std::invalid_argument("SNR target unattainable for this draw");
        double qq = -0.5 * (qb + std::copysign(std::sqrt(disc), qb == 0.0 ? 1.0 : qb));
        double r1 = qq / qa;
        double r2 = qq != 0.0 ? qc / qq : r1;
        // Prefer a positive noise level; otherwise the root of least magnitude.
        if (r1 > 0.0 && r2 > 0.0)
            beta = std::min(r1, r2);
        else if (r1 > 0.0)
            beta = r1;
        else if (r2 > 0.0)
            beta = r2;
        else
            beta = std::abs(r1) < std::abs(r2) ? r1 : r2;
    }

    out.beta = beta;
    out.scaled_noise = DenseTensor(spec.dims);
    out.tensor = DenseTensor(spec.dims);
    for (std::size_t i = 0; i < noise.size(); ++i) {
        out.scaled_noise[i] = beta * noise[i];
        out.tensor[i] = clean[i] + out.scaled_noise[i];
    }
    return out;
}

DenseTensor gen_diag_decay(const GeneratorSpec& raw) {
    GeneratorSpec spec = with_defaults(raw);
    const std::size_t n_modes = spec.dims.size();
    const std::size_t len = *std::min_element(spec.dims.begin(), spec.dims.end());
    const std::size_t plateau = std::min(spec.split, len);

    DenseTensor t(spec.dims);
    std::size_t stride_sum = 0;
    {
        std::size_t s = 1;
        for (std::size_t m = 0; m < n_modes; ++m) {
            stride_sum += s;
            s *= spec.dims[m];
        }
    }
    for (std::size_t i = 0; i < len; ++i) {
        double v = (i + 1 <= plateau)
                       ? 1.0
                       : 1.0 / (double(i + 1 - plateau + 1) * double(i + 1 - plateau + 1));
        t[i * stride_sum] = v;
    }
    for (std::size_t n = 0; n < n_modes; ++n) {
        Eigen::MatrixXd b = gaussian_matrix(spec.dims[n], spec.dims[n],
                                            {spec.seed, kFactorStreamBase + n});
        t = mode_n_product(t, thin_qr(b).Q, n);
    }
    return t;
}

DenseTensor gen_order4(const GeneratorSpec& raw) {
    GeneratorSpec spec = with_defaults(raw);
    if (spec.dims.size() != 4)
        throw std::invalid_argument("order-4 generator requires 4 dimensions");
    if (spec.kind == GeneratorKind::Order4Sparse) return gen_sparse_cp(spec);
    return gen_lowrank_noise(spec).tensor;
}

DenseTensor generate(const GeneratorSpec& raw) {
    GeneratorSpec spec = with_defaults(raw);
    switch (spec.kind) {
        case GeneratorKind::TuckerNoise: return gen_tucker_noise(spec);
        case GeneratorKind::SparseCp: return gen_sparse_cp(spec);
        case GeneratorKind::LowrankNoise: return gen_lowrank_noise(spec).tensor;
        case GeneratorKind::DiagDecay: return gen_diag_decay(spec);
        case GeneratorKind::Order4Noise:
        case GeneratorKind::Order4Sparse: return gen_order4(spec);
    }
    throw std::invalid_argument("unknown generator kind");
}

double snr_db(const DenseTensor& a, const DenseTensor& noise) {
    double ns = inner_product(noise, noise);
    if (ns == 0.0) throw std::invalid_argument("snr_db: zero noise tensor");
    double as = inner_product(a, a);
    return 10.0 * std::log10(as / ns);
}

}  // namespace lmra
