#pragma once

// Test-only helpers: random inputs and brute-force oracles that do not share
// code paths with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dice/debias.hpp"
#include "dice/matrix.hpp"
#include "dice/rng.hpp"

namespace dice::testing {

inline Eigen::MatrixXd random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.normal();
    return g;
}

/// G^T G / k + ridge I, well conditioned for moderate ridge.
inline DenseSymMatrix random_spd(Index p, std::uint64_t seed, double ridge = 0.5) {
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(p);
    const Eigen::MatrixXd g = random_gaussian(2 * n, n, rng);
    Eigen::MatrixXd a = g.transpose() * g / static_cast<double>(2 * n);
    a += ridge * Eigen::MatrixXd::Identity(n, n);
    return DenseSymMatrix::symmetrized(a);
}

/// Triple loop product, independent of Eigen's kernels.
inline Eigen::MatrixXd naive_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline DenseSymMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
    return DenseSymMatrix(mat(rows));
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Random valid update with p in [1, max_p] and up to max_entries entries.
inline SparseUpdate random_update(Rng& rng, Index max_p = 100, std::size_t max_entries = 500) {
    SparseUpdate u;
    u.p = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(max_p));
    u.n = static_cast<Index>(rng.uniform() * 10000.0);
    u.machine_id = static_cast<std::uint32_t>(rng.uniform() * 4294967295.0);
    u.rho = rng.uniform() < 0.2 ? 0.0 : rng.uniform() * 5.0;
    const double cells = static_cast<double>(u.p * (u.p + 1) / 2);
    const double keep = std::min(1.0, static_cast<double>(max_entries) / cells) * rng.uniform();
    std::vector<SparseEntry> entries;
    for (Index i = 0; i < u.p && entries.size() < max_entries; ++i)
        for (Index j = i; j < u.p && entries.size() < max_entries; ++j)
            if (rng.uniform() < keep) entries.push_back({i, j, rng.normal()});
    u.entries = SparseSymMatrix(u.p, std::move(entries));
    u.bandwidth_used = bandwidth_of(u.entries);
    return u;
}

} // namespace dice::testing
