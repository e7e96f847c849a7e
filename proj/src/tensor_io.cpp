#include "lmra/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lmra {

static_assert(std::endian::native == std::endian::little,
              "TNSR writer assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr std::uint32_t kVersion = 1;

void read_exact(std::istream& in, void* buf, std::size_t n, const char* what) {
    in.read(static_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw std::runtime_error(std::string("tensor file truncated while reading ") + what);
}

}  // namespace

void save_tensor(const std::string& path, const DenseTensor& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open tensor file for writing: " + path);

    out.write(kMagic, 4);
    std::uint32_t version = kVersion;
    std::uint32_t order = static_cast<std::uint32_t>(t.order());
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&order), sizeof(order));
    for (std::size_t d : t.dims()) {
        std::uint64_t v = d;
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(sizeof(double) * t.size()));
    if (!out) throw std::runtime_error("write failure on tensor file: " + path);
}

DenseTensor load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path);

    char magic[4];
    read_exact(in, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad magic in tensor file: " + path);

    std::uint32_t version = 0, order = 0;
    read_exact(in, &version, sizeof(version), "version");
    if (version != kVersion)
        throw std::runtime_error("unsupported tensor file version " + std::to_string(version));
    read_exact(in, &order, sizeof(order), "order");

    std::vector<std::size_t> dims(order);
    for (auto& d : dims) {
        std::uint64_t v = 0;
        read_exact(in, &v, sizeof(v), "dimensions");
        d = static_cast<std::size_t>(v);
    }
    DenseTensor t(dims);
    read_exact(in, t.data(), sizeof(double) * t.size(), "values");
    return t;
}

}  // namespace lmra
