#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmra/tensor.hpp"

namespace lmra {

enum class GeneratorKind {
    TuckerNoise,   // random core times orthonormal factors plus scaled white noise
    SparseCp,      // sum of sparse rank-1 terms with a heavy leading group
    LowrankNoise,  // Gaussian core and factors plus noise at a target SNR
    DiagDecay,     // superdiagonal plateau-then-decay spectrum under rotations
    Order4Noise,   // 4-way LowrankNoise
    Order4Sparse,  // 4-way SparseCp
};

/// Scaling of the TuckerNoise noise denominator sqrt(prod d_n): Scaled uses
/// d_n = (2/3) I_n so the noise-to-signal ratio is preserved across sizes;
/// Literal400 pins d_n = 400 regardless of shape.
enum class NoiseDenom { Scaled, Literal400 };

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::TuckerNoise;
    std::vector<std::size_t> dims;       // empty = kind default
    std::vector<std::size_t> core_dims;  // empty = kind default
    std::optional<double> gamma;         // noise coefficient / leading CP weight
    std::optional<double> snr_db;        // target SNR; +inf means no noise
    double sparsity = 0.05;
    std::size_t split = 0;               // leading-group size / plateau length; 0 = default
    std::uint64_t seed = 0;
    NoiseDenom noise_denom = NoiseDenom::Scaled;
};

/// Fills unset fields with the kind's defaults (desk-scale shapes).
GeneratorSpec with_defaults(GeneratorSpec spec);

std::optional<GeneratorKind> parse_generator_kind(const std::string& id);
std::string generator_kind_id(GeneratorKind k);

std::string generator_spec_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const std::string& text);

DenseTensor generate(const GeneratorSpec& spec);

struct TuckerNoiseParts {
    DenseTensor tensor;
    DenseTensor clean;
    DenseTensor scaled_noise;  // the additive term, zero when gamma == 0
    double coefficient = 0.0;
};
TuckerNoiseParts gen_tucker_noise_parts(const GeneratorSpec& spec);
DenseTensor gen_tucker_noise(const GeneratorSpec& spec);

DenseTensor gen_sparse_cp(const GeneratorSpec& spec);

struct LowrankNoiseResult {
    DenseTensor tensor;
    DenseTensor clean;
    DenseTensor scaled_noise;  // beta * N
    double beta = 0.0;
};
/// Solves the noise level beta in closed form so the generated tensor meets
/// the requested SNR; throws when the target is unattainable for the draw.
LowrankNoiseResult gen_lowrank_noise(const GeneratorSpec& spec);

DenseTensor gen_diag_decay(const GeneratorSpec& spec);
DenseTensor gen_order4(const GeneratorSpec& spec);

/// 10 log10(||a||^2 / ||noise||^2).
double snr_db(const DenseTensor& a, const DenseTensor& noise);

}  // namespace lmra
