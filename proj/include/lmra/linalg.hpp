#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace lmra {

/// Thin SVD, U * S.asDiagonal() * V^T == input. Singular values descend;
/// column signs are fixed so the largest-magnitude entry of each left
/// singular vector is nonnegative, making results reproducible bit-for-bit.
struct ThinSVD {
    Eigen::MatrixXd U;
    Eigen::VectorXd S;
    Eigen::MatrixXd V;
};

struct ThinQR {
    Eigen::MatrixXd Q;  // orthonormal columns
    Eigen::MatrixXd R;  // upper triangular
};

/// How (A A^T)^q G is evaluated. A alternates half-products A^T then A and
/// never forms the Gram matrix; B forms A A^T once and applies it q times,
/// which pays off only when A is very wide relative to its row count.
enum class GramStrategy { A, B };

ThinSVD thin_svd(const Eigen::MatrixXd& m);

/// Singular values only (descending); cheaper than thin_svd when the
/// caller needs spectra but no bases.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);

/// Requires rows >= cols. Rank-deficient input still yields orthonormal Q.
ThinQR thin_qr(const Eigen::MatrixXd& m);

Eigen::MatrixXd gram_power_apply(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                                 int q, GramStrategy strategy = GramStrategy::A);

/// Top-mu left singular vectors of c, orthonormal c.rows() x mu.
Eigen::MatrixXd leading_left_singular_vectors(const Eigen::MatrixXd& c, std::size_t mu);

/// Range extraction through a QR proxy: P from thin_qr(c), U1 the top-mu
/// left singular vectors of P^T * a_unfold, result P * U1.
Eigen::MatrixXd qr_project_extract(const Eigen::MatrixXd& c,
                                   const Eigen::MatrixXd& a_unfold, std::size_t mu);

}  // namespace lmra
