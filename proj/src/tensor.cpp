#include "lmra/tensor.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace lmra {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("tensor dimension must be positive");
        if (p > (std::size_t{1} << 40) / d)
            throw std::invalid_argument("tensor too large");
        p *= d;
    }
    return p;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), values_(checked_product(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    if (values_.size() != checked_product(dims_))
        throw std::invalid_argument("value count does not match tensor shape");
}

DenseTensor DenseTensor::scalar(double value) {
    return DenseTensor({}, {value});
}

std::size_t DenseTensor::dim(std::size_t mode) const {
    if (mode >= dims_.size()) throw std::out_of_range("mode out of range");
    return dims_[mode];
}

std::size_t DenseTensor::linear_index(const std::vector<std::size_t>& index) const {
    if (index.size() != dims_.size())
        throw std::invalid_argument("index order does not match tensor order");
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (index[k] >= dims_[k]) throw std::out_of_range("index out of range");
        idx += index[k] * stride;
        stride *= dims_[k];
    }
    return idx;
}

double DenseTensor::at(const std::vector<std::size_t>& index) const {
    return values_[linear_index(index)];
}

Eigen::MatrixXd unfold(const DenseTensor& t, std::size_t mode) {
    const auto& dims = t.dims();
    if (mode >= dims.size()) throw std::out_of_range("unfold: mode out of range");

    const std::size_t rows = dims[mode];
    std::size_t inner = 1;
    for (std::size_t k = 0; k < mode; ++k) inner *= dims[k];
    std::size_t outer = 1;
    for (std::size_t k = mode + 1; k < dims.size(); ++k) outer *= dims[k];

    Eigen::MatrixXd m(rows, inner * outer);
    if (mode == 0) {
        // Storage-order identity: the mode-1 unfolding is a plain reshape.
        std::memcpy(m.data(), t.data(), sizeof(double) * t.size());
        return m;
    }
    const double* src = t.data();
    double* dst = m.data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t r = 0; r < rows; ++r) {
            const double* s = src + (o * rows + r) * inner;
            double* d = dst + r + o * inner * rows;
            for (std::size_t i = 0; i < inner; ++i) d[i * rows] = s[i];
        }
    }
    return m;
}

DenseTensor fold(const Eigen::MatrixXd& m, std::size_t mode,
                 const std::vector<std::size_t>& dims) {
    if (mode >= dims.size()) throw std::out_of_range("fold: mode out of range");
    const std::size_t rows = dims[mode];
    std::size_t inner = 1;
    for (std::size_t k = 0; k < mode; ++k) inner *= dims[k];
    std::size_t outer = 1;
    for (std::size_t k = mode + 1; k < dims.size(); ++k) outer *= dims[k];

    if (static_cast<std::size_t>(m.rows()) != rows ||
        static_cast<std::size_t>(m.cols()) != inner * outer)
        throw std::invalid_argument("fold: matrix shape does not match target dims");

    DenseTensor t(dims);
    if (mode == 0) {
        std::memcpy(t.data(), m.data(), sizeof(double) * t.size());
        return t;
    }
    const double* src = m.data();
    double* dst = t.data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t r = 0; r < rows; ++r) {
            const double* s = src + r + o * inner * rows;
            double* d = dst + (o * rows + r) * inner;
            for (std::size_t i = 0; i < inner; ++i) d[i] = s[i * rows];
        }
    }
    return t;
}

DenseTensor mode_n_product(const DenseTensor& t, const Eigen::MatrixXd& b,
                           std::size_t mode) {
    const auto& dims = t.dims();
    if (mode >= dims.size()) throw std::out_of_range("mode_n_product: mode out of range");
    if (static_cast<std::size_t>(b.cols()) != dims[mode])
        throw std::invalid_argument("mode_n_product: matrix columns must match tensor mode dimension");

    std::vector<std::size_t> out_dims = dims;
    out_dims[mode] = static_cast<std::size_t>(b.rows());

    if (mode == 0) {
        const std::size_t cols = t.size() / dims[0];
        Eigen::Map<const Eigen::MatrixXd> m(t.data(), dims[0], cols);
        DenseTensor out(out_dims);
        Eigen::Map<Eigen::MatrixXd> o(out.data(), b.rows(), cols);
        o.noalias() = b * m;
        return out;
    }
    Eigen::MatrixXd m = unfold(t, mode);
    Eigen::MatrixXd r = b * m;
    return fold(r, mode, out_dims);
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::size_t mode_a, std::size_t mode_b) {
    if (mode_a >= a.order() || mode_b >= b.order())
        throw std::out_of_range("contract: mode out of range");
    if (a.dim(mode_a) != b.dim(mode_b))
        throw std::invalid_argument("contract: common mode dimensions differ");

    Eigen::MatrixXd ma = unfold(a, mode_a);
    Eigen::MatrixXd mb = unfold(b, mode_b);

    std::vector<std::size_t> out_dims;
    for (std::size_t k = 0; k < a.order(); ++k)
        if (k != mode_a) out_dims.push_back(a.dim(k));
    for (std::size_t k = 0; k < b.order(); ++k)
        if (k != mode_b) out_dims.push_back(b.dim(k));

    DenseTensor out(out_dims);
    Eigen::Map<Eigen::MatrixXd> o(out.data(), ma.cols(), mb.cols());
    o.noalias() = ma.transpose() * mb;
    return out;
}

double frobenius_norm(const DenseTensor& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * t[i];
    return std::sqrt(s);
}

double inner_product(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims())
        throw std::invalid_argument("inner_product: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

}  // namespace lmra
