#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "lmra/rng.hpp"
#include "lmra/sketching.hpp"
#include "lmra/tensor.hpp"

using lmra::DenseTensor;

namespace {

DenseTensor random_tensor(std::vector<std::size_t> dims, std::uint64_t seed) {
    DenseTensor t(std::move(dims));
    lmra::RandomStream gen(lmra::RngStream{seed, 0});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gen.next_normal();
    return t;
}

// Independent oracle: place each entry through the explicit index map, with
// the column index advancing over the non-unfolded indices, first fastest.
Eigen::MatrixXd unfold_oracle(const DenseTensor& t, std::size_t mode) {
    const auto& dims = t.dims();
    std::size_t cols = t.size() / dims[mode];
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dims[mode], cols);
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t lin = 0; lin < t.size(); ++lin) {
        std::size_t j = 0, stride = 1;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (k == mode) continue;
            j += idx[k] * stride;
            stride *= dims[k];
        }
        m(idx[mode], j) = t[lin];
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (++idx[k] < dims[k]) break;
            idx[k] = 0;
        }
    }
    return m;
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST_CASE("unfold matches the index-map enumeration oracle") {
    for (auto dims : std::vector<std::vector<std::size_t>>{
             {2, 2, 2}, {3, 4, 5}, {4, 1, 3, 2}, {6}, {2, 5}}) {
        DenseTensor t = random_tensor(dims, 17 + dims.size());
        for (std::size_t n = 0; n < dims.size(); ++n) {
            Eigen::MatrixXd got = lmra::unfold(t, n);
            Eigen::MatrixXd want = unfold_oracle(t, n);
            CHECK(got.rows() == want.rows());
            CHECK(got.cols() == want.cols());
            CHECK((got - want).norm() == 0.0);
        }
    }
}

TEST_CASE("unfold of a 2x2x2 counting tensor") {
    // a(i1,i2,i3) = i1 + 2(i2-1) + 4(i3-1), 1-based: values 1..8 in order.
    DenseTensor t({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    Eigen::MatrixXd m1 = lmra::unfold(t, 0);
    Eigen::MatrixXd want1(2, 4);
    want1 << 1, 3, 5, 7, 2, 4, 6, 8;
    CHECK((m1 - want1).norm() == 0.0);

    Eigen::MatrixXd m3 = lmra::unfold(t, 2);
    Eigen::MatrixXd want3(2, 4);
    want3 << 1, 2, 3, 4, 5, 6, 7, 8;
    CHECK((m3 - want3).norm() == 0.0);
}

TEST_CASE("unfolding an order-2 tensor along mode 0 is the matrix itself") {
    DenseTensor t = random_tensor({4, 7}, 3);
    Eigen::MatrixXd m = lmra::unfold(t, 0);
    for (std::size_t j = 0; j < 7; ++j)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(m(i, j) == t.at({i, j}));
}

TEST_CASE("unfold rejects an out-of-range mode") {
    DenseTensor t = random_tensor({2, 3}, 1);
    CHECK_THROWS(lmra::unfold(t, 2));
}

TEST_CASE("fold inverts unfold bit-exactly on every mode") {
    DenseTensor t = random_tensor({3, 5, 2, 4}, 9);
    for (std::size_t n = 0; n < t.order(); ++n) {
        DenseTensor back = lmra::fold(lmra::unfold(t, n), n, t.dims());
        REQUIRE(back.size() == t.size());
        CHECK(std::memcmp(back.data(), t.data(), sizeof(double) * t.size()) == 0);
    }
}

TEST_CASE("fold of a 2x1 matrix with dims (2,1,1)") {
    Eigen::MatrixXd m(2, 1);
    m << 3.0, -4.0;
    DenseTensor t = lmra::fold(m, 0, {2, 1, 1});
    CHECK(t[0] == 3.0);
    CHECK(t[1] == -4.0);
    CHECK_THROWS(lmra::fold(m, 1, {2, 1, 1}));  // shape mismatch
}

TEST_CASE("mode product by the identity is the identity") {
    DenseTensor t = random_tensor({3, 4, 2}, 11);
    for (std::size_t n = 0; n < 3; ++n) {
        DenseTensor r =
            lmra::mode_n_product(t, Eigen::MatrixXd::Identity(t.dim(n), t.dim(n)), n);
        CHECK(std::memcmp(r.data(), t.data(), sizeof(double) * t.size()) == 0);
    }
}

TEST_CASE("mode product of all-ones tensor with a summing row") {
    DenseTensor ones({2, 2, 2}, std::vector<double>(8, 1.0));
    Eigen::MatrixXd row(1, 2);
    row << 1, 1;
    DenseTensor r = lmra::mode_n_product(ones, row, 0);
    CHECK(r.dims() == std::vector<std::size_t>{1, 2, 2});
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(2.0));
}

TEST_CASE("mode product agrees with the unfolding relation") {
    DenseTensor t = random_tensor({3, 4, 5}, 23);
    Eigen::MatrixXd b = lmra::gaussian_matrix(6, 4, {23, 1});
    DenseTensor r = lmra::mode_n_product(t, b, 1);
    CHECK(rel_diff(lmra::unfold(r, 1), b * lmra::unfold(t, 1)) < 1e-12);
}

TEST_CASE("mode products on distinct modes commute") {
    DenseTensor t = random_tensor({3, 4, 5}, 29);
    Eigen::MatrixXd f = lmra::gaussian_matrix(2, 3, {29, 1});
    Eigen::MatrixXd g = lmra::gaussian_matrix(6, 4, {29, 2});
    DenseTensor ab = lmra::mode_n_product(lmra::mode_n_product(t, f, 0), g, 1);
    DenseTensor ba = lmra::mode_n_product(lmra::mode_n_product(t, g, 1), f, 0);
    double scale = lmra::frobenius_norm(ab);
    double diff = 0.0;
    for (std::size_t i = 0; i < ab.size(); ++i) diff += (ab[i] - ba[i]) * (ab[i] - ba[i]);
    CHECK(std::sqrt(diff) <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("repeated mode products compose through the matrix product") {
    DenseTensor t = random_tensor({3, 4, 5}, 31);
    Eigen::MatrixXd f = lmra::gaussian_matrix(6, 4, {31, 1});
    Eigen::MatrixXd h = lmra::gaussian_matrix(2, 6, {31, 2});
    DenseTensor lhs = lmra::mode_n_product(lmra::mode_n_product(t, f, 1), h, 1);
    DenseTensor rhs = lmra::mode_n_product(t, (h * f).eval(), 1);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}

TEST_CASE("mode product with orthonormal columns never grows the norm") {
    DenseTensor t = random_tensor({5, 6, 4}, 37);
    Eigen::MatrixXd g = lmra::gaussian_matrix(6, 3, {37, 5});
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(6, 3);

    // Tall orthonormal Q embeds isometrically; the projector form contracts.
    DenseTensor up = lmra::mode_n_product(t, q.transpose().eval(), 1);  // 5x3x4
    CHECK(lmra::frobenius_norm(up) <= lmra::frobenius_norm(t) + 1e-12);
    DenseTensor emb = lmra::mode_n_product(up, q, 1);
    CHECK(lmra::frobenius_norm(emb) ==
          doctest::Approx(lmra::frobenius_norm(up)).epsilon(1e-12));
}

TEST_CASE("mode product rejects mismatched shapes") {
    DenseTensor t = random_tensor({3, 4}, 2);
    CHECK_THROWS(lmra::mode_n_product(t, Eigen::MatrixXd::Identity(3, 3), 1));
}

TEST_CASE("contracting two vectors gives an order-0 inner product") {
    DenseTensor x({3}, {1, 2, 3});
    DenseTensor y({3}, {4, 5, 6});
    DenseTensor r = lmra::contract(x, y, 0, 0);
    CHECK(r.order() == 0);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(32.0));
}

TEST_CASE("matrix-matrix contraction reproduces the dense product") {
    DenseTensor a = random_tensor({2, 3}, 41);
    DenseTensor b = random_tensor({3, 4}, 43);
    DenseTensor c = lmra::contract(a, b, 1, 0);
    REQUIRE(c.dims() == std::vector<std::size_t>{2, 4});
    Eigen::MatrixXd ma = lmra::unfold(a, 0), mb = lmra::unfold(b, 0);
    Eigen::MatrixXd want = ma * mb;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(c.at({i, j}) == doctest::Approx(want(i, j)).epsilon(1e-12));
}

TEST_CASE("self-contraction total matches the Gram matrix total") {
    DenseTensor t = random_tensor({3, 4, 2}, 47);
    DenseTensor c = lmra::contract(t, t, 0, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) total += c[i];
    Eigen::MatrixXd m = lmra::unfold(t, 0);
    CHECK(total == doctest::Approx((m.transpose() * m).sum()).epsilon(1e-12));
}

TEST_CASE("contract rejects mismatched common modes") {
    DenseTensor a = random_tensor({2, 3}, 5);
    DenseTensor b = random_tensor({4, 2}, 6);
    CHECK_THROWS(lmra::contract(a, b, 1, 0));
}

TEST_CASE("frobenius norm basics") {
    DenseTensor ones({2, 2, 2}, std::vector<double>(8, 1.0));
    CHECK(lmra::frobenius_norm(ones) == doctest::Approx(std::sqrt(8.0)));
    CHECK(lmra::frobenius_norm(DenseTensor({3, 3})) == 0.0);

    DenseTensor t = random_tensor({3, 3, 3}, 53);
    for (std::size_t n = 0; n < 3; ++n)
        CHECK(lmra::frobenius_norm(t) ==
              doctest::Approx(lmra::unfold(t, n).norm()).epsilon(1e-12));
}

TEST_CASE("inner product basics") {
    DenseTensor t = random_tensor({4, 3}, 59);
    double nrm = lmra::frobenius_norm(t);
    CHECK(lmra::inner_product(t, t) == doctest::Approx(nrm * nrm).epsilon(1e-12));
    CHECK(lmra::inner_product(t, DenseTensor({4, 3})) == 0.0);

    DenseTensor s = random_tensor({4, 3}, 61);
    CHECK(lmra::inner_product(t, s) == lmra::inner_product(s, t));
    CHECK_THROWS(lmra::inner_product(t, DenseTensor({3, 4})));
}

TEST_CASE("kronecker product basics") {
    Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK((lmra::kronecker(i2, i3) - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);

    Eigen::MatrixXd two(1, 1);
    two << 2.0;
    Eigen::MatrixXd b = lmra::gaussian_matrix(3, 2, {67, 0});
    CHECK((lmra::kronecker(two, b) - 2.0 * b).norm() == 0.0);

    Eigen::MatrixXd a = lmra::gaussian_matrix(3, 4, {67, 1});
    Eigen::VectorXd x = lmra::gaussian_matrix(4, 1, {67, 2});
    Eigen::VectorXd y = lmra::gaussian_matrix(2, 1, {67, 3});
    Eigen::MatrixXd b2 = lmra::gaussian_matrix(5, 2, {67, 4});
    Eigen::VectorXd lhs = lmra::kronecker(a, b2) * lmra::kronecker(x, y);
    Eigen::VectorXd rhs = lmra::kronecker((a * x).eval(), (b2 * y).eval());
    CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, rhs.norm()));
}

TEST_CASE("unfolded form of the multilinear product uses the reversed Kronecker chain") {
    std::vector<std::size_t> core_dims{2, 3, 2};
    std::vector<std::size_t> dims{4, 5, 3};
    DenseTensor g = random_tensor(core_dims, 71);
    std::vector<Eigen::MatrixXd> u;
    for (std::size_t n = 0; n < 3; ++n)
        u.push_back(lmra::gaussian_matrix(dims[n], core_dims[n], {71, n + 1}));

    DenseTensor full = g;
    for (std::size_t n = 0; n < 3; ++n) full = lmra::mode_n_product(full, u[n], n);

    for (std::size_t n = 0; n < 3; ++n) {
        Eigen::MatrixXd chain;  // u[N-1] kron ... kron u[n+1] kron u[n-1] ... kron u[0]
        bool started = false;
        for (std::size_t k = 3; k-- > 0;) {
            if (k == n) continue;
            chain = started ? lmra::kronecker(chain, u[k]) : u[k];
            started = true;
        }
        Eigen::MatrixXd lhs = lmra::unfold(full, n);
        Eigen::MatrixXd rhs = u[n] * lmra::unfold(g, n) * chain.transpose();
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("tensor constructor validates shapes") {
    CHECK_THROWS(DenseTensor({2, 0, 3}));
    CHECK_THROWS(DenseTensor({2, 2}, {1.0, 2.0, 3.0}));
    DenseTensor scalar = DenseTensor::scalar(5.0);
    CHECK(scalar.order() == 0);
    CHECK(scalar[0] == 5.0);
}
