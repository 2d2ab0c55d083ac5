#include "dice/debias.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dice/errors.hpp"

namespace dice {

std::uint64_t bandwidth_of(const SparseSymMatrix& entries) {
    std::uint64_t cells = 0;
    for (const auto& e : entries.entries()) {
        cells += (e.i == e.j) ? 1 : 2;
    }
    return cells;
}

DenseSymMatrix debias(const DenseSymMatrix& theta_hat, const DenseSymMatrix& sigma_hat) {
    if (theta_hat.dim() != sigma_hat.dim()) {
        throw DimensionMismatch("debias: theta and covariance differ in dimension");
    }
    const Eigen::MatrixXd& t = theta_hat.values();
    const Eigen::MatrixXd ts = t * sigma_hat.values();
    const Eigen::MatrixXd out = 2.0 * t - ts * t;
    return DenseSymMatrix::symmetrized(out);
}

DenseSymMatrix variance_estimates(const DenseSymMatrix& theta_hat) {
    const Eigen::MatrixXd& t = theta_hat.values();
    const Eigen::Index p = t.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(t(i, i) > 0.0)) {
            throw InvalidParameter("variance_estimates: diagonal entry " + std::to_string(i) +
                                   " is not positive");
        }
    }
    Eigen::MatrixXd v(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            v(i, j) = t(i, i) * t(j, j) + t(i, j) * t(i, j);
        }
    }
    return DenseSymMatrix(std::move(v));
}

SparseUpdate bandwidth_threshold(const DenseSymMatrix& theta_d, const DenseSymMatrix& sigma_sq,
                                 std::uint64_t budget) {
    const Index p = theta_d.dim();
    if (sigma_sq.dim() != p) {
        throw DimensionMismatch("bandwidth_threshold: variance matrix has wrong dimension");
    }
    if (budget < p) {
        throw InvalidParameter("bandwidth_threshold: budget " + std::to_string(budget) +
                               " cannot hold the " + std::to_string(p) + " diagonal entries");
    }
    const std::uint64_t capacity = (budget - p) / 2;

    std::vector<double> scores;
    scores.reserve(p * (p - 1) / 2);
    for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
            scores.push_back(std::abs(theta_d(i, j)) / std::sqrt(sigma_sq(i, j)));
        }
    }
    const auto nonzero = static_cast<std::uint64_t>(
        std::count_if(scores.begin(), scores.end(), [](double r) { return r > 0.0; }));

    double rho = 0.0;
    if (nonzero >= capacity + 1) {
        auto nth = scores.begin() + static_cast<std::ptrdiff_t>(capacity);
        std::nth_element(scores.begin(), nth, scores.end(), std::greater<>());
        rho = *nth;
    }

    std::vector<SparseEntry> kept;
    for (Index i = 0; i < p; ++i) {
        if (theta_d(i, i) != 0.0) {
            kept.push_back({i, i, theta_d(i, i)});
        }
        for (Index j = i + 1; j < p; ++j) {
            const double v = theta_d(i, j);
            if (v != 0.0 && std::abs(v) / std::sqrt(sigma_sq(i, j)) > rho) {
                kept.push_back({i, j, v});
            }
        }
    }
    SparseUpdate update;
    update.p = p;
    update.entries = SparseSymMatrix(p, std::move(kept));
    update.rho = rho;
    update.bandwidth_used = bandwidth_of(update.entries);
    if (update.bandwidth_used > budget) {
        throw InvariantViolation("bandwidth_threshold: update exceeds budget");
    }
    return update;
}

MachineFit fit_machine(const DataMatrix& x, double lambda, std::uint64_t budget,
                       std::uint32_t machine_id, const GlassoOptions& options) {
    const DenseSymMatrix sigma_hat = empirical_covariance(x);
    GlassoSolution fit = graphical_lasso(sigma_hat, lambda, options);
    const DenseSymMatrix theta_d = debias(fit.theta_hat, sigma_hat);
    const DenseSymMatrix sigma_sq = variance_estimates(fit.theta_hat);
    SparseUpdate update = bandwidth_threshold(theta_d, sigma_sq, budget);
    update.machine_id = machine_id;
    update.n = x.n();
    return MachineFit{std::move(fit), std::move(update)};
}

SparseUpdate machine_estimate(const DataMatrix& x, double lambda, std::uint64_t budget,
                              std::uint32_t machine_id, const GlassoOptions& options) {
    return fit_machine(x, lambda, budget, machine_id, options).update;
}

} // namespace dice
