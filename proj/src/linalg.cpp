#include "lmra/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace lmra {

namespace {

// Largest-magnitude entry of each U column is made nonnegative; V follows.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = 0.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            double a = std::abs(u(i, k));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (u(imax, k) < 0.0) {
            u.col(k) = -u.col(k);
            if (k < v.cols()) v.col(k) = -v.col(k);
        }
    }
}

}  // namespace

ThinSVD thin_svd(const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("thin_svd: SVD iteration did not converge");
    ThinSVD out;
    out.U = svd.matrixU();
    out.S = svd.singularValues();
    out.V = svd.matrixV();
    fix_signs(out.U, out.V);
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("singular_values: SVD iteration did not converge");
    return svd.singularValues();
}

ThinQR thin_qr(const Eigen::MatrixXd& m) {
    if (m.rows() < m.cols())
        throw std::invalid_argument("thin_qr: requires rows >= cols");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    ThinQR out;
    out.Q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    out.R = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    return out;
}

Eigen::MatrixXd gram_power_apply(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                                 int q, GramStrategy strategy) {
    if (g.rows() != a.rows())
        throw std::invalid_argument("gram_power_apply: G must have as many rows as A");
    if (q < 1) throw std::invalid_argument("gram_power_apply: q must be >= 1");

    Eigen::MatrixXd c = g;
    if (strategy == GramStrategy::A) {
        Eigen::MatrixXd half;
        for (int k = 0; k < q; ++k) {
            half.noalias() = a.transpose() * c;
            c.noalias() = a * half;
        }
    } else {
        Eigen::MatrixXd gram = a * a.transpose();
        for (int k = 0; k < q; ++k) c = gram * c;
    }
    return c;
}

Eigen::MatrixXd leading_left_singular_vectors(const Eigen::MatrixXd& c, std::size_t mu) {
    const auto maxrank = static_cast<std::size_t>(std::min(c.rows(), c.cols()));
    if (mu < 1 || mu > maxrank)
        throw std::invalid_argument("leading_left_singular_vectors: mu out of range");
    return thin_svd(c).U.leftCols(static_cast<Eigen::Index>(mu));
}

Eigen::MatrixXd qr_project_extract(const Eigen::MatrixXd& c,
                                   const Eigen::MatrixXd& a_unfold, std::size_t mu) {
    if (c.rows() != a_unfold.rows())
        throw std::invalid_argument("qr_project_extract: row counts differ");
    if (mu < 1 || mu > static_cast<std::size_t>(c.cols()))
        throw std::invalid_argument("qr_project_extract: mu out of range");
    ThinQR qr = thin_qr(c);
    Eigen::MatrixXd projected = qr.Q.transpose() * a_unfold;
    Eigen::MatrixXd u1 = leading_left_singular_vectors(projected, mu);
    return qr.Q * u1;
}

}  // namespace lmra
