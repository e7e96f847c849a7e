#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "lmra/datagen.hpp"
#include "lmra/linalg.hpp"
#include "lmra/tensor_io.hpp"
#include "lmra/tucker.hpp"

using lmra::DenseTensor;
using lmra::GeneratorKind;
using lmra::GeneratorSpec;

namespace {

GeneratorSpec tucker_spec(std::vector<std::size_t> dims, std::vector<std::size_t> core,
                          double gamma, std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = GeneratorKind::TuckerNoise;
    s.dims = std::move(dims);
    s.core_dims = std::move(core);
    s.gamma = gamma;
    s.seed = seed;
    return s;
}

double rank_gap(const DenseTensor& t, std::size_t mode, std::size_t r) {
    Eigen::VectorXd s = lmra::singular_values(lmra::unfold(t, mode));
    return s(Eigen::Index(r)) / s(0);
}

std::string temp_path(const char* name) {
    return std::string("lmra_test_") + name + ".bin";
}

}  // namespace

TEST_CASE("noise-free construction has exact multilinear rank") {
    DenseTensor t = lmra::gen_tucker_noise(tucker_spec({24, 20, 16}, {4, 3, 5}, 0.0, 3));
    CHECK(rank_gap(t, 0, 4) <= 1e-10);
    CHECK(rank_gap(t, 1, 3) <= 1e-10);
    CHECK(rank_gap(t, 2, 5) <= 1e-10);

    lmra::AlgoConfig cfg;
    cfg.rank = lmra::MultilinearRank({4, 3, 5});
    lmra::TuckerDecomposition d = lmra::st_hosvd(t, cfg);
    CHECK(lmra::relative_error(t, lmra::reconstruct(d)) <= 1e-10);
}

TEST_CASE("noisy construction sits near the retained noise floor") {
    GeneratorSpec spec = tucker_spec({30, 30, 30}, {5, 5, 5}, 0.001, 5);
    lmra::TuckerNoiseParts parts = lmra::gen_tucker_noise_parts(spec);
    double floor_est = lmra::frobenius_norm(parts.scaled_noise) /
                       lmra::frobenius_norm(parts.tensor);
    lmra::AlgoConfig cfg;
    cfg.rank = lmra::MultilinearRank({5, 5, 5});
    lmra::TuckerDecomposition d = lmra::st_hosvd(parts.tensor, cfg);
    double re = lmra::relative_error(parts.tensor, lmra::reconstruct(d));
    CHECK(re <= 10.0 * floor_est);
    CHECK(re > 0.0);
}

TEST_CASE("generators are deterministic under the seed") {
    GeneratorSpec spec = tucker_spec({12, 12, 12}, {3, 3, 3}, 0.01, 11);
    DenseTensor a = lmra::gen_tucker_noise(spec);
    DenseTensor b = lmra::gen_tucker_noise(spec);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);

    spec.seed = 12;
    DenseTensor c = lmra::gen_tucker_noise(spec);
    CHECK(std::memcmp(a.data(), c.data(), sizeof(double) * a.size()) != 0);
}

TEST_CASE("noise denominator scales with the shape or stays literal") {
    GeneratorSpec scaled = tucker_spec({12, 12, 12}, {3, 3, 3}, 0.5, 13);
    GeneratorSpec literal = scaled;
    literal.noise_denom = lmra::NoiseDenom::Literal400;
    lmra::TuckerNoiseParts ps = lmra::gen_tucker_noise_parts(scaled);
    lmra::TuckerNoiseParts pl = lmra::gen_tucker_noise_parts(literal);
    // Same clean tensor and draw, different denominators.
    double ratio = ps.coefficient / pl.coefficient;
    double want = std::sqrt(std::pow(400.0, 3.0) / std::pow(8.0, 3.0));
    CHECK(ratio == doctest::Approx(want).epsilon(1e-12));
    // At dims 600 both conventions coincide: (2/3) * 600 == 400.
    CHECK(std::abs((2.0 / 3.0) * 600.0 - 400.0) == 0.0);

    GeneratorSpec bad = tucker_spec({8, 8}, {9, 2}, 0.0, 1);
    CHECK_THROWS(lmra::gen_tucker_noise(bad));
}

TEST_CASE("sparse CP tensor matches an explicit accumulation") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::SparseCp;
    spec.dims = {30, 30, 30};
    spec.split = 6;
    spec.gamma = 50.0;
    spec.seed = 17;
    DenseTensor t = lmra::gen_sparse_cp(spec);
    CHECK(lmra::frobenius_norm(t) > 0.0);

    // Leading weight dominates: truncating at the split rank keeps most energy.
    lmra::AlgoConfig cfg;
    cfg.rank = lmra::MultilinearRank({6, 6, 6});
    lmra::TuckerDecomposition d = lmra::st_hosvd(t, cfg);
    CHECK(lmra::relative_error(t, lmra::reconstruct(d)) < 0.2);

    // gamma = 1 collapses the two groups into one smooth family.
    GeneratorSpec smooth = spec;
    smooth.gamma = 1.0;
    DenseTensor s = lmra::gen_sparse_cp(smooth);
    CHECK(lmra::frobenius_norm(s) > 0.0);
    CHECK(lmra::frobenius_norm(s) < lmra::frobenius_norm(t));

    DenseTensor again = lmra::gen_sparse_cp(spec);
    CHECK(std::memcmp(t.data(), again.data(), sizeof(double) * t.size()) == 0);
}

TEST_CASE("dense CP vectors reproduce a plain CP sum") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::SparseCp;
    spec.dims = {10, 10, 10};
    spec.split = 2;
    spec.gamma = 4.0;
    spec.sparsity = 1.0;
    spec.seed = 19;
    DenseTensor t = lmra::gen_sparse_cp(spec);
    // Density one: every slice gets a contribution from every term, so the
    // tensor has no zero entries.
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] != 0.0);
}

TEST_CASE("noise level solves the SNR target") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::LowrankNoise;
    spec.dims = {20, 20, 20};
    spec.core_dims = {4, 4, 4};
    spec.seed = 23;

    spec.snr_db = std::numeric_limits<double>::infinity();
    lmra::LowrankNoiseResult clean = lmra::gen_lowrank_noise(spec);
    CHECK(clean.beta == 0.0);
    CHECK(std::memcmp(clean.tensor.data(), clean.clean.data(),
                      sizeof(double) * clean.tensor.size()) == 0);
    CHECK(rank_gap(clean.tensor, 0, 4) <= 1e-10);

    for (double target : {20.0, 5.0, 0.5}) {
        spec.snr_db = target;
        lmra::LowrankNoiseResult r = lmra::gen_lowrank_noise(spec);
        CHECK(std::abs(lmra::snr_db(r.tensor, r.scaled_noise) - target) <= 0.01);
    }

    spec.snr_db = 0.0;
    lmra::LowrankNoiseResult zero = lmra::gen_lowrank_noise(spec);
    double a2 = lmra::inner_product(zero.tensor, zero.tensor);
    double n2 = lmra::inner_product(zero.scaled_noise, zero.scaled_noise);
    CHECK(std::abs(a2 - n2) <= 1e-6 * a2);

    // Deep negative targets are unattainable for generic draws.
    spec.snr_db = -30.0;
    CHECK_THROWS(lmra::gen_lowrank_noise(spec));
}

TEST_CASE("snr formula") {
    DenseTensor a({2, 2}, {1, 1, 1, 1});
    DenseTensor n({2, 2}, {1, 1, 1, 1});
    CHECK(lmra::snr_db(a, n) == doctest::Approx(0.0));
    DenseTensor big({2, 2}, {10, 10, 10, 10});
    CHECK(lmra::snr_db(big, n) == doctest::Approx(20.0));
    CHECK_THROWS(lmra::snr_db(a, DenseTensor({2, 2})));
}

TEST_CASE("plateau-decay spectrum survives the rotations") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::DiagDecay;
    spec.dims = {24, 24, 24};
    spec.split = 5;
    spec.seed = 29;
    DenseTensor t = lmra::gen_diag_decay(spec);

    Eigen::VectorXd want(24);
    for (int i = 0; i < 24; ++i)
        want(i) = (i + 1 <= 5) ? 1.0 : 1.0 / ((i + 1 - 4.0) * (i + 1 - 4.0));
    std::sort(want.data(), want.data() + 24, std::greater<double>());
    for (std::size_t n = 0; n < 3; ++n) {
        Eigen::VectorXd s = lmra::singular_values(lmra::unfold(t, n));
        for (int k = 0; k < 24; ++k)
            CHECK(s(k) == doctest::Approx(want(k)).epsilon(1e-9));
    }

    DenseTensor again = lmra::gen_diag_decay(spec);
    CHECK(std::memcmp(t.data(), again.data(), sizeof(double) * t.size()) == 0);
}

TEST_CASE("order-4 generators") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::Order4Noise;
    spec.dims = {10, 10, 10, 10};
    spec.core_dims = {2, 2, 2, 2};
    spec.snr_db = std::numeric_limits<double>::infinity();
    spec.seed = 31;
    DenseTensor t = lmra::gen_order4(spec);
    CHECK(t.order() == 4);
    for (std::size_t n = 0; n < 4; ++n) CHECK(rank_gap(t, n, 2) <= 1e-10);

    GeneratorSpec sparse;
    sparse.kind = GeneratorKind::Order4Sparse;
    sparse.dims = {12, 12, 12, 12};
    sparse.split = 3;
    sparse.seed = 33;
    DenseTensor s = lmra::gen_order4(sparse);
    CHECK(s.order() == 4);
    CHECK(lmra::frobenius_norm(s) > 0.0);
    DenseTensor s2 = lmra::gen_order4(sparse);
    CHECK(std::memcmp(s.data(), s2.data(), sizeof(double) * s.size()) == 0);
}

TEST_CASE("tensor files round trip bit-exactly") {
    DenseTensor t(std::vector<std::size_t>{3, 2, 4, 2});
    lmra::RandomStream gen(lmra::RngStream{35, 0});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gen.next_normal();

    std::string path = temp_path("roundtrip");
    lmra::save_tensor(path, t);
    DenseTensor back = lmra::load_tensor(path);
    CHECK(back.dims() == t.dims());
    CHECK(std::memcmp(back.data(), t.data(), sizeof(double) * t.size()) == 0);

    // Byte-level determinism of the writer.
    std::string path2 = temp_path("roundtrip2");
    lmra::save_tensor(path2, t);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
    f1.close();
    f2.close();
    std::remove(path2.c_str());

    // Truncation, bad magic, and bad version are reported distinctly.
    auto error_message = [&]() {
        try {
            lmra::load_tensor(path);
        } catch (const std::runtime_error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        in.close();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 9));
    }
    CHECK(error_message().find("truncated") != std::string::npos);

    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write("NOPE", 4);
        std::uint32_t v = 1, order = 0;
        out.write(reinterpret_cast<char*>(&v), 4);
        out.write(reinterpret_cast<char*>(&order), 4);
    }
    CHECK(error_message().find("magic") != std::string::npos);

    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write("TNSR", 4);
        std::uint32_t v = 9, order = 0;
        out.write(reinterpret_cast<char*>(&v), 4);
        out.write(reinterpret_cast<char*>(&order), 4);
    }
    CHECK(error_message().find("version") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("generator specs round trip through JSON") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::LowrankNoise;
    spec.dims = {20, 18, 16};
    spec.core_dims = {3, 3, 3};
    spec.snr_db = 12.5;
    spec.sparsity = 0.1;
    spec.split = 7;
    spec.seed = 99;
    spec.noise_denom = lmra::NoiseDenom::Literal400;

    GeneratorSpec back = lmra::generator_spec_from_json(lmra::generator_spec_to_json(spec));
    CHECK(back.kind == spec.kind);
    CHECK(back.dims == spec.dims);
    CHECK(back.core_dims == spec.core_dims);
    CHECK(back.snr_db == spec.snr_db);
    CHECK(back.sparsity == spec.sparsity);
    CHECK(back.split == spec.split);
    CHECK(back.seed == spec.seed);
    CHECK(back.noise_denom == spec.noise_denom);

    GeneratorSpec inf_spec;
    inf_spec.kind = GeneratorKind::Order4Noise;
    inf_spec.snr_db = std::numeric_limits<double>::infinity();
    GeneratorSpec inf_back =
        lmra::generator_spec_from_json(lmra::generator_spec_to_json(inf_spec));
    REQUIRE(inf_back.snr_db.has_value());
    CHECK(std::isinf(*inf_back.snr_db));
}
