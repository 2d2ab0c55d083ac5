#include <doctest.h>

#include "dice/errors.hpp"
#include "dice/matrix.hpp"
#include "support.hpp"

using namespace dice;
using namespace dice::testing;

TEST_CASE("DenseSymMatrix rejects asymmetric input") {
    CHECK_THROWS_AS(DenseSymMatrix(mat({{1, 2}, {2.0000001, 1}})), InvalidParameter);
    CHECK_THROWS_AS(DenseSymMatrix(Eigen::MatrixXd(2, 3)), InvalidParameter);
    CHECK_THROWS_AS(DenseSymMatrix(Eigen::MatrixXd(0, 0)), InvalidParameter);
    CHECK_NOTHROW(DenseSymMatrix(mat({{1, 2}, {2, 1}})));
}

TEST_CASE("cholesky") {
    SUBCASE("identity") {
        CHECK(cholesky(DenseSymMatrix::identity(2)) == Eigen::MatrixXd::Identity(2, 2));
    }
    SUBCASE("2x2 reproduces input") {
        const auto a = sym({{4, 2}, {2, 5}});
        const Eigen::MatrixXd l = cholesky(a);
        CHECK(l(0, 1) == 0.0);
        // hand factor: [[2,0],[1,2]]
        CHECK(l(0, 0) == doctest::Approx(2.0));
        CHECK(l(1, 0) == doctest::Approx(1.0));
        CHECK(l(1, 1) == doctest::Approx(2.0));
        CHECK(max_abs(naive_product(l, l.transpose()) - a.values()) <= 1e-12);
    }
    SUBCASE("indefinite") {
        CHECK_THROWS_AS(cholesky(sym({{1, 2}, {2, 1}})), NotPositiveDefinite);
    }
    SUBCASE("random SPD within relative tolerance") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto a = random_spd(15, seed);
            const Eigen::MatrixXd l = cholesky(a);
            CHECK(l.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0));
            CHECK(max_abs(naive_product(l, l.transpose()) - a.values()) <=
                  1e-10 * max_abs(a.values()));
        }
    }
}

TEST_CASE("invert_spd") {
    SUBCASE("diagonal") {
        const auto b = invert_spd(sym({{2, 0}, {0, 4}}));
        CHECK(b(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(b(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(b(0, 1) == 0.0);
    }
    SUBCASE("closed-form 2x2") {
        const auto a = sym({{1, 0.4}, {0.4, 1}});
        const auto b = invert_spd(a);
        const double det = 1.0 - 0.16;
        CHECK(b(0, 0) == doctest::Approx(1.0 / det).epsilon(1e-14));
        CHECK(b(0, 1) == doctest::Approx(-0.4 / det).epsilon(1e-14));
        CHECK(max_abs(naive_product(a.values(), b.values()) - Eigen::MatrixXd::Identity(2, 2)) <=
              1e-8);
    }
    SUBCASE("identity") {
        CHECK(max_abs(invert_spd(DenseSymMatrix::identity(5)).values() -
                      Eigen::MatrixXd::Identity(5, 5)) == 0.0);
    }
    SUBCASE("indefinite") {
        CHECK_THROWS_AS(invert_spd(sym({{1, 2}, {2, 1}})), NotPositiveDefinite);
    }
    SUBCASE("double inverse property, p <= 20") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Index p = 1 + seed;
            const auto a = random_spd(p, 100 + seed);
            const auto b = invert_spd(a);
            CHECK(max_abs(naive_product(a.values(), b.values()) -
                          Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                                    static_cast<Eigen::Index>(p))) <= 1e-8);
            CHECK(max_abs(invert_spd(b).values() - a.values()) <= 1e-6);
        }
    }
}

TEST_CASE("empirical_covariance") {
    SUBCASE("single row is zero") {
        const auto s = empirical_covariance(DataMatrix(mat({{1, 2}})));
        CHECK(s.values().isZero(0.0));
    }
    SUBCASE("1/n scaling with centring") {
        const auto s = empirical_covariance(DataMatrix(mat({{1, 0}, {-1, 0}})));
        CHECK(s(0, 0) == 1.0);
        CHECK(s(0, 1) == 0.0);
        CHECK(s(1, 1) == 0.0);
    }
    SUBCASE("matches a two-pass loop oracle") {
        Rng rng(7);
        const Eigen::MatrixXd x = random_gaussian(13, 4, rng);
        const auto s = empirical_covariance(DataMatrix(x));
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double mi = 0, mj = 0;
                for (int r = 0; r < 13; ++r) {
                    mi += x(r, i);
                    mj += x(r, j);
                }
                mi /= 13;
                mj /= 13;
                double acc = 0;
                for (int r = 0; r < 13; ++r) acc += (x(r, i) - mi) * (x(r, j) - mj);
                CHECK(s(i, j) == doctest::Approx(acc / 13).epsilon(1e-12));
            }
        }
    }
    SUBCASE("standard normal sample concentrates") {
        Rng rng(11);
        const auto s = empirical_covariance(DataMatrix(random_gaussian(100, 3, rng)));
        CHECK(max_abs(s.values() - Eigen::MatrixXd::Identity(3, 3)) <= 0.6);
    }
    SUBCASE("positive semidefinite even when n < p") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(seed);
            const auto s = empirical_covariance(DataMatrix(random_gaussian(5, 12, rng)));
            Eigen::MatrixXd shifted = s.values();
            shifted.diagonal().array() += 1e-10;
            CHECK(is_positive_definite(DenseSymMatrix::symmetrized(shifted)));
        }
    }
}

TEST_CASE("SparseSymMatrix invariants") {
    CHECK_THROWS_AS(SparseSymMatrix(3, {{1, 0, 1.0}}), InvariantViolation);
    CHECK_THROWS_AS(SparseSymMatrix(3, {{0, 3, 1.0}}), InvariantViolation);
    CHECK_THROWS_AS(SparseSymMatrix(3, {{0, 1, 0.0}}), InvariantViolation);
    CHECK_THROWS_AS(SparseSymMatrix(3, {{0, 2, 1.0}, {0, 1, 1.0}}), InvariantViolation);
    CHECK_THROWS_AS(SparseSymMatrix(3, {{0, 1, 1.0}, {0, 1, 2.0}}), InvariantViolation);
    const SparseSymMatrix s(3, {{0, 0, 1.0}, {0, 2, -0.5}, {1, 1, 2.0}});
    CHECK(s.at(2, 0) == -0.5);
    CHECK(s.at(0, 2) == -0.5);
    CHECK(s.at(1, 2) == 0.0);
    CHECK(s.off_diagonal_count() == 1);
}

TEST_CASE("sparse/dense conversion round-trips exactly") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        const Index p = 1 + seed % 9;
        const auto n = static_cast<Eigen::Index>(p);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j)
                if (rng.uniform() < 0.4) m(i, j) = m(j, i) = rng.normal();
        const DenseSymMatrix dense(m);
        const auto sparse = SparseSymMatrix::from_dense(dense);
        CHECK(sparse.to_dense() == dense);
        CHECK(SparseSymMatrix::from_dense(sparse.to_dense()) == sparse);
    }
}
