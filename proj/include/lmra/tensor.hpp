#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lmra {

/// Dense real tensor of arbitrary order with a fixed linearization: the
/// first index runs fastest, so the mode-1 unfolding coincides with the
/// storage layout. Library operations never mutate their inputs; sharing
/// const references across threads is safe.
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero tensor of the given shape. An empty dims vector denotes an
    /// order-0 tensor holding a single value (produced by full contractions).
    explicit DenseTensor(std::vector<std::size_t> dims);
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> values);

    static DenseTensor scalar(double value);

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t mode) const;
    std::size_t size() const { return values_.size(); }

    const std::vector<double>& values() const { return values_; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    /// Element access by multi-index (0-based, one entry per mode).
    double at(const std::vector<std::size_t>& index) const;
    std::size_t linear_index(const std::vector<std::size_t>& index) const;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> values_;
};

/// Mode-n unfolding: rows are the mode-`mode` fibers, columns enumerate the
/// remaining indices with the first one fastest. `mode` is 0-based.
Eigen::MatrixXd unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold: fold(unfold(t, n), n, t.dims()) == t bit-exactly.
DenseTensor fold(const Eigen::MatrixXd& m, std::size_t mode,
                 const std::vector<std::size_t>& dims);

/// Mode-n product t x_n b. Requires b.cols() == t.dim(mode); the result
/// replaces that dimension by b.rows().
DenseTensor mode_n_product(const DenseTensor& t, const Eigen::MatrixXd& b,
                           std::size_t mode);

/// Contraction of a's mode `mode_a` with b's mode `mode_b`. Result dims are
/// a's dims without mode_a followed by b's dims without mode_b; a full
/// contraction of two vectors yields an order-0 tensor.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::size_t mode_a, std::size_t mode_b);

double frobenius_norm(const DenseTensor& t);
double inner_product(const DenseTensor& a, const DenseTensor& b);

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace lmra
