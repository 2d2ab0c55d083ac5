#include <doctest.h>

#include <cmath>

#include "dice/datagen.hpp"
#include "dice/errors.hpp"
#include "dice/glasso.hpp"
#include "support.hpp"

using namespace dice;
using namespace dice::testing;

namespace {

std::size_t off_support(const DenseSymMatrix& t) {
    std::size_t k = 0;
    for (Index i = 0; i < t.dim(); ++i)
        for (Index j = i + 1; j < t.dim(); ++j) k += t(i, j) != 0.0;
    return k;
}

DenseSymMatrix sample_cov(Index p, Index n, std::uint64_t seed) {
    Rng rng(seed);
    return empirical_covariance(DataMatrix(random_gaussian(static_cast<Eigen::Index>(n),
                                                           static_cast<Eigen::Index>(p), rng)));
}

} // namespace

TEST_CASE("kkt_residual") {
    SUBCASE("exact inverse with lambda 0") {
        const auto s = random_spd(6, 3);
        CHECK(kkt_residual(invert_spd(s), s, 0.0) <= 1e-10);
    }
    SUBCASE("identity against identity") {
        CHECK(kkt_residual(DenseSymMatrix::identity(2), DenseSymMatrix::identity(2), 0.5) == 0.0);
    }
    SUBCASE("off-diagonal zero outside the box") {
        const double r = kkt_residual(DenseSymMatrix::identity(2), sym({{1, 0.6}, {0.6, 1}}), 0.4);
        CHECK(r == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("nonzero entry uses the sign") {
        // theta_01 < 0, G_01 = S_01 - W_01 must equal +lambda
        const auto theta = sym({{2, -0.5}, {-0.5, 2}});
        const auto w = invert_spd(theta);
        const double lambda = 0.1;
        Eigen::MatrixXd s = w.values();
        s(0, 1) = s(1, 0) = w(0, 1) + lambda;
        CHECK(kkt_residual(theta, DenseSymMatrix(s), lambda) <= 1e-12);
        s(0, 1) = s(1, 0) = w(0, 1) - lambda;
        CHECK(kkt_residual(theta, DenseSymMatrix(s), lambda) == doctest::Approx(2 * lambda));
    }
    SUBCASE("not positive definite") {
        CHECK_THROWS_AS(kkt_residual(sym({{1, 2}, {2, 1}}), DenseSymMatrix::identity(2), 0.1),
                        NotPositiveDefinite);
    }
}

TEST_CASE("graphical_lasso small cases") {
    SUBCASE("diagonal covariance for any lambda") {
        for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
            const auto sol = graphical_lasso(sym({{2, 0}, {0, 4}}), lambda);
            CHECK(sol.certified);
            CHECK(sol.theta_hat(0, 0) == doctest::Approx(0.5));
            CHECK(sol.theta_hat(1, 1) == doctest::Approx(0.25));
            CHECK(sol.theta_hat(0, 1) == 0.0);
        }
    }
    SUBCASE("penalty above the correlation gives the identity") {
        const auto sol = graphical_lasso(sym({{1, 0.3}, {0.3, 1}}), 0.4);
        CHECK(sol.theta_hat == DenseSymMatrix::identity(2));
        CHECK(sol.kkt_residual == 0.0);
    }
    SUBCASE("lambda 0 is the inverse") {
        const auto s = random_spd(8, 21);
        const auto sol = graphical_lasso(s, 0.0);
        CHECK(max_abs(sol.theta_hat.values() - invert_spd(s).values()) <= 1e-6);
    }
    SUBCASE("p = 1") {
        const auto sol = graphical_lasso(sym({{4}}), 0.3);
        CHECK(sol.theta_hat(0, 0) == 0.25);
    }
}

TEST_CASE("graphical_lasso matches an independent conic solver") {
    // Reference solved twice offline: an interior-point conic solve of the
    // log-det program and a separate coordinate-descent package (agree to 1e-9).
    const auto s = sym({{1.0, 0.5, 0.2, 0.1},
                        {0.5, 1.5, 0.4, 0.0},
                        {0.2, 0.4, 1.2, 0.3},
                        {0.1, 0.0, 0.3, 0.8}});
    const Eigen::MatrixXd expected = mat({{1.088929219601, -0.254083484574, 0, 0},
                                          {-0.254083484574, 0.749933628415, -0.143884892086, 0},
                                          {0, -0.143884892086, 0.883309352518, -0.16},
                                          {0, 0, -0.16, 1.28}});
    const auto loose = graphical_lasso(s, 0.15);
    CHECK(max_abs(loose.theta_hat.values() - expected) <= 1e-4);
    const auto tight = graphical_lasso(s, 0.15, GlassoOptions{1e-11, 500});
    CHECK(max_abs(tight.theta_hat.values() - expected) <= 1e-8);
    CHECK(tight.theta_hat(0, 2) == 0.0);
    CHECK(tight.theta_hat(0, 3) == 0.0);
    CHECK(tight.theta_hat(1, 3) == 0.0);
}

TEST_CASE("graphical_lasso certifies what it returns") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto s = sample_cov(12, 8 + seed, seed);  // often singular
        for (double lambda : {0.05, 0.2, 0.5}) {
            const auto sol = graphical_lasso(s, lambda);
            CHECK(sol.certified);
            CHECK(sol.kkt_residual <= 1e-5);
            CHECK(kkt_residual(sol.theta_hat, s, lambda) == sol.kkt_residual);
            CHECK(is_positive_definite(sol.theta_hat));
            CHECK(sol.lambda == lambda);
        }
    }
}

TEST_CASE("graphical_lasso properties on random covariances") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Index p = 5 + 2 * seed;
        const auto s = sample_cov(p, 3 * p, 500 + seed);

        std::size_t previous = SIZE_MAX;
        for (double lambda : {0.01, 0.03, 0.06, 0.1, 0.15, 0.2, 0.3, 0.5}) {
            const auto sol = graphical_lasso(s, lambda);
            const auto k = off_support(sol.theta_hat);
            CHECK(k <= previous);
            previous = k;

            Eigen::VectorXd inv_diag = s.values().diagonal().cwiseInverse();
            const auto comparator =
                DenseSymMatrix::diagonal(std::span<const double>(inv_diag.data(), inv_diag.size()));
            CHECK(glasso_objective(sol.theta_hat, s, lambda) <=
                  glasso_objective(comparator, s, lambda) + 1e-12);
        }

        double max_off = 0.0;
        for (Index i = 0; i < p; ++i)
            for (Index j = i + 1; j < p; ++j) max_off = std::max(max_off, std::abs(s(i, j)));
        const auto diag_sol = graphical_lasso(s, max_off);
        CHECK(off_support(diag_sol.theta_hat) == 0);
        for (Index i = 0; i < p; ++i) CHECK(diag_sol.theta_hat(i, i) == 1.0 / s(i, i));
    }
}

TEST_CASE("graphical_lasso on a rank-one covariance with lambda > 0") {
    const auto v = mat({{1.0, -0.5, 2.0, 0.7, 1.3}});
    const DenseSymMatrix s(v.transpose() * v);
    const auto sol = graphical_lasso(s, 0.2);
    CHECK(sol.certified);
    CHECK(kkt_residual(sol.theta_hat, s, 0.2) <= 1e-5);
}

TEST_CASE("graphical_lasso errors") {
    CHECK_THROWS_AS(graphical_lasso(sym({{1, 0}, {0, 0}}), 0.1), InvalidParameter);
    CHECK_THROWS_AS(graphical_lasso(DenseSymMatrix::identity(2), -0.1), InvalidParameter);
    const auto singular = sample_cov(6, 3, 9);
    CHECK_THROWS_AS(graphical_lasso(singular, 0.0), NotPositiveDefinite);

    const auto s = sample_cov(20, 25, 4);
    try {
        graphical_lasso(s, 0.05, GlassoOptions{1e-14, 1});
        FAIL("expected MaxIterationsExceeded");
    } catch (const MaxIterationsExceeded& e) {
        CHECK_FALSE(e.best().certified);
        CHECK(e.best().iterations == 1);
        CHECK(e.best().kkt_residual > 1e-14);
    }
}
