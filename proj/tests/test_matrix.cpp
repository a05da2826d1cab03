#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deepnet/errors.hpp"
#include "deepnet/matrix.hpp"
#include "deepnet/rng.hpp"

using namespace deepnet;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = lo + (hi - lo) * rng.uniform();
    return m;
}

// independent oracle: textbook triple loop, plain ijk order
Matrix matmul_reference(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

void check_close(const Matrix& got, const Matrix& want, double tol) {
    REQUIRE(got.rows() == want.rows());
    REQUIRE(got.cols() == want.cols());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got.data()[i] - want.data()[i]) <=
              tol * (1.0 + std::abs(want.data()[i])));
    }
}

}  // namespace

TEST_CASE("identity times any 2x2 matrix") {
    Matrix I{{1, 0}, {0, 1}};
    Matrix A{{3.5, -2}, {7, 0.25}};
    CHECK(matmul(I, A, MatmulAlgo::naive) == A);
    CHECK(matmul(I, A, MatmulAlgo::strassen) == A);
}

TEST_CASE("3x5 times 5x2 equals hand summation") {
    Rng rng(11);
    Matrix a = random_matrix(3, 5, rng);
    Matrix b = random_matrix(5, 2, rng);
    Matrix want = matmul_reference(a, b);
    check_close(matmul(a, b, MatmulAlgo::naive), want, 1e-12);
    check_close(matmul(a, b, MatmulAlgo::strassen), want, 1e-12);
}

TEST_CASE("strassen matches naive on 64x64 random matrices") {
    Rng rng(7);
    Matrix a = random_matrix(64, 64, rng);
    Matrix b = random_matrix(64, 64, rng);
    check_close(matmul(a, b, MatmulAlgo::strassen), matmul(a, b, MatmulAlgo::naive), 1e-9);
}

TEST_CASE("strassen equals naive on every shape 1..33") {
    Rng rng(31);
    for (std::size_t n = 1; n <= 33; n += 4) {
        for (std::size_t k = 1; k <= 33; k += 7) {
            for (std::size_t m = 1; m <= 33; m += 6) {
                Matrix a = random_matrix(n, k, rng);
                Matrix b = random_matrix(k, m, rng);
                Matrix naive = matmul(a, b, MatmulAlgo::naive);
                Matrix fancy = matmul(a, b, MatmulAlgo::strassen);
                REQUIRE(fancy.rows() == naive.rows());  // padding must not leak
                REQUIRE(fancy.cols() == naive.cols());
                check_close(fancy, naive, 1e-9);
            }
        }
    }
}

TEST_CASE("matmul is associative within tolerance") {
    Rng rng(5);
    Matrix a = random_matrix(4, 6, rng);
    Matrix b = random_matrix(6, 3, rng);
    Matrix c = random_matrix(3, 5, rng);
    check_close(matmul(matmul(a, b), c), matmul(a, matmul(b, c)), 1e-9);
}

TEST_CASE("matmul rejects mismatched shapes") {
    Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(static_cast<void>(matmul(a, b)),
                         doctest::Contains("2x3"), ShapeError);
}

TEST_CASE("transpose") {
    Matrix a{{1, 2, 3}, {4, 5, 6}};
    Matrix want{{1, 4}, {2, 5}, {3, 6}};
    CHECK(transpose(a) == want);

    Matrix single{{42.0}};
    CHECK(transpose(single) == single);

    Rng rng(3);
    Matrix r = random_matrix(7, 3, rng);
    CHECK(transpose(transpose(r)) == r);  // involution, bit-exact
}

TEST_CASE("map and zip") {
    Matrix a{{1, 2}, {3, 4}};
    CHECK(map(a, [](double x) { return x; }) == a);

    Matrix zero = zip(a, a, [](double x, double y) { return x - y; });
    CHECK(zero == Matrix(2, 2));

    Matrix x{{1, 2}};
    Matrix y{{3, 4}};
    CHECK(zip(x, y, [](double p, double q) { return p * q; }) == Matrix{{3, 8}});

    Matrix wrong(3, 2);
    CHECK_THROWS_AS(static_cast<void>(zip(a, wrong, [](double p, double q) { return p + q; })),
                    ShapeError);
}

TEST_CASE("col_means") {
    CHECK(col_means(Matrix{{1}, {3}}) == Matrix{{2}});
    CHECK(col_means(Matrix{{0, 1}, {1, 1}}) == Matrix{{0.5, 1.0}});

    Matrix constant(4, 3);
    for (double& v : constant.data()) v = 2.5;
    CHECK(col_means(constant) == Matrix{{2.5, 2.5, 2.5}});

    CHECK_THROWS_AS(static_cast<void>(col_means(Matrix{})), ShapeError);
}

TEST_CASE("row helpers") {
    Matrix a{{1, 2}, {3, 4}, {5, 6}};
    std::vector<std::size_t> idx{2, 0};
    CHECK(take_rows(a, idx) == Matrix{{5, 6}, {1, 2}});
    CHECK(add_row_broadcast(a, Matrix{{10, 20}}) == Matrix{{11, 22}, {13, 24}, {15, 26}});
}
