#include <doctest.h>

#include <cmath>

#include "dice/datagen.hpp"
#include "dice/errors.hpp"
#include "dice/metrics.hpp"
#include "support.hpp"

using namespace dice;
using namespace dice::testing;

TEST_CASE("frobenius_sq_error") {
    const auto a = random_spd(5, 1);
    CHECK(frobenius_sq_error(a, a) == 0.0);

    Eigen::MatrixXd shifted = a.values();
    shifted(1, 3) += 0.1;
    shifted(3, 1) += 0.1;
    CHECK(frobenius_sq_error(DenseSymMatrix(shifted), a) == doctest::Approx(0.02).epsilon(1e-12));

    const auto b = random_spd(5, 2);
    double brute = 0.0;
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j) brute += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    CHECK(frobenius_sq_error(a, b) == doctest::Approx(brute).epsilon(1e-13));
    CHECK(frobenius_sq_error(a, b) == frobenius_sq_error(b, a));
    CHECK_THROWS_AS(frobenius_sq_error(a, random_spd(4, 1)), DimensionMismatch);
}

TEST_CASE("linf_error") {
    const auto a = random_spd(5, 3);
    CHECK(linf_error(a, a) == 0.0);
    Eigen::MatrixXd shifted = a.values();
    shifted(2, 2) -= 0.3;
    CHECK(linf_error(DenseSymMatrix(shifted), a) == doctest::Approx(0.3).epsilon(1e-12));

    const auto b = random_spd(5, 4);
    double brute = 0.0;
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j) brute = std::max(brute, std::abs(a(i, j) - b(i, j)));
    CHECK(linf_error(a, b) == brute);
    CHECK(linf_error(a, b) == linf_error(b, a));
    CHECK_THROWS_AS(linf_error(a, random_spd(6, 1)), DimensionMismatch);
}

TEST_CASE("support_metrics") {
    const auto chain = chain_precision(10, 0.4);
    const auto truth_support = SparseSymMatrix::from_dense(chain.theta);

    SUBCASE("perfect recovery") {
        const auto r = support_metrics(truth_support, chain);
        CHECK(r.fpr == 0.0);
        CHECK(r.fnr == 0.0);
    }
    SUBCASE("empty estimate misses every edge") {
        const auto r = support_metrics(SparseSymMatrix(10, {}), chain);
        CHECK(r.fpr == 0.0);
        CHECK(r.fnr == 1.0);
    }
    SUBCASE("one spurious edge among 36 non-edges") {
        auto entries = truth_support.entries();
        entries.push_back({0, 5, 0.01});
        std::sort(entries.begin(), entries.end(),
                  [](const SparseEntry& x, const SparseEntry& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
        const auto r = support_metrics(SparseSymMatrix(10, entries), chain);
        // 45 pairs, 9 of them chain edges
        CHECK(r.fpr == doctest::Approx(1.0 / 36.0).epsilon(1e-15));
        CHECK(r.fnr == 0.0);
    }
    SUBCASE("diagonal never counts") {
        std::vector<SparseEntry> diagonal_only;
        for (Index i = 0; i < 10; ++i) diagonal_only.push_back({i, i, 1.0});
        const auto r = support_metrics(SparseSymMatrix(10, diagonal_only), chain);
        CHECK(r.fpr == 0.0);
        CHECK(r.fnr == 1.0);
    }
    SUBCASE("identity truth has no edges, so fnr is 0") {
        const auto identity = make_model(DenseSymMatrix::identity(4));
        const auto r = support_metrics(SparseSymMatrix(4, {{0, 1, 1.0}}), identity);
        CHECK(r.fnr == 0.0);
        CHECK(r.fpr == doctest::Approx(1.0 / 6.0));
    }
    SUBCASE("magnitudes do not matter") {
        Rng rng(8);
        for (int k = 0; k < 20; ++k) {
            std::vector<SparseEntry> e, scaled;
            for (Index i = 0; i < 10; ++i)
                for (Index j = i; j < 10; ++j)
                    if (rng.uniform() < 0.3) {
                        const double v = rng.normal();
                        e.push_back({i, j, v});
                        scaled.push_back({i, j, v * (1.0 + 100.0 * rng.uniform())});
                    }
            const auto r1 = support_metrics(SparseSymMatrix(10, e), chain);
            const auto r2 = support_metrics(SparseSymMatrix(10, scaled), chain);
            CHECK(r1.fpr == r2.fpr);
            CHECK(r1.fnr == r2.fnr);
            CHECK(r1.fpr >= 0.0);
            CHECK(r1.fpr <= 1.0);
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(support_metrics(SparseSymMatrix(9, {}), chain), DimensionMismatch);
    }
}
