#pragma once

#include <string>

#include "lmra/tensor.hpp"

namespace lmra {

/// Binary tensor file format "TNSR": magic bytes "TNSR", u32 version (= 1),
/// u32 order N, N u64 dimensions, then the values as IEEE-754 float64 in
/// storage order. All fields little-endian. Round trips are bit-exact.
void save_tensor(const std::string& path, const DenseTensor& t);
DenseTensor load_tensor(const std::string& path);

}  // namespace lmra
