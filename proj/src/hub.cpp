#include "dice/hub.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dice/errors.hpp"

namespace dice {

DenseSymMatrix aggregate(std::span<const SparseUpdate> updates) {
    if (updates.empty()) {
        throw InvalidParameter("aggregate: no updates");
    }
    const Index p = updates.front().p;
    std::vector<const SparseUpdate*> ordered;
    ordered.reserve(updates.size());
    for (const auto& u : updates) {
        if (u.p != p || u.entries.dim() != p) {
            throw DimensionMismatch("aggregate: update from machine " +
                                    std::to_string(u.machine_id) + " has p = " +
                                    std::to_string(u.p) + ", expected " + std::to_string(p));
        }
        ordered.push_back(&u);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->machine_id < b->machine_id; });
    for (std::size_t k = 1; k < ordered.size(); ++k) {
        if (ordered[k]->machine_id == ordered[k - 1]->machine_id) {
            throw DuplicateMachine(ordered[k]->machine_id,
                                   "aggregate: machine " + std::to_string(ordered[k]->machine_id) +
                                       " sent more than one update");
        }
    }

    const auto n = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (const auto* u : ordered) {
        for (const auto& e : u->entries.entries()) {
            const auto i = static_cast<Eigen::Index>(e.i);
            const auto j = static_cast<Eigen::Index>(e.j);
            sum(i, j) += e.v;
            if (i != j) {
                sum(j, i) += e.v;
            }
        }
    }
    sum /= static_cast<double>(ordered.size());
    return DenseSymMatrix(std::move(sum));
}

DenseSymMatrix hub_variance(const DenseSymMatrix& theta_bar) {
    return variance_estimates(theta_bar);
}

HubEstimate final_threshold(const DenseSymMatrix& theta_bar, const DenseSymMatrix& sigma_sq,
                            double tau) {
    if (!(tau >= 0.0)) {
        throw InvalidParameter("final_threshold: tau must be non-negative");
    }
    const Index p = theta_bar.dim();
    if (sigma_sq.dim() != p) {
        throw DimensionMismatch("final_threshold: variance matrix has wrong dimension");
    }
    std::vector<SparseEntry> kept;
    for (Index i = 0; i < p; ++i) {
        if (theta_bar(i, i) != 0.0) {
            kept.push_back({i, i, theta_bar(i, i)});
        }
        for (Index j = i + 1; j < p; ++j) {
            const double v = theta_bar(i, j);
            if (v != 0.0 && std::abs(v) > tau * std::sqrt(sigma_sq(i, j))) {
                kept.push_back({i, j, v});
            }
        }
    }
    return HubEstimate{theta_bar, SparseSymMatrix(p, std::move(kept)), tau, 0};
}

HubEstimate combine_updates(std::span<const SparseUpdate> updates, double tau) {
    DenseSymMatrix theta_bar = aggregate(updates);
    HubEstimate out = final_threshold(theta_bar, hub_variance(theta_bar), tau);
    out.machines = updates.size();
    return out;
}

DenseSymMatrix naive_estimator(std::span<const DenseSymMatrix> theta_hats) {
    if (theta_hats.empty()) {
        throw InvalidParameter("naive_estimator: no estimates");
    }
    const Index p = theta_hats.front().dim();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(theta_hats.front().values().rows(),
                                                theta_hats.front().values().cols());
    for (const auto& t : theta_hats) {
        if (t.dim() != p) {
            throw DimensionMismatch("naive_estimator: estimates differ in dimension");
        }
        sum += t.values();
    }
    sum /= static_cast<double>(theta_hats.size());
    return DenseSymMatrix(std::move(sum));
}

FullEstimates full_estimators(const DataMatrix& pooled, double lambda_full, double tau_full,
                              const GlassoOptions& options) {
    const DenseSymMatrix sigma_hat = empirical_covariance(pooled);
    GlassoSolution fit = graphical_lasso(sigma_hat, lambda_full, options);
    DenseSymMatrix theta_d = debias(fit.theta_hat, sigma_hat);
    HubEstimate thresholded = final_threshold(theta_d, hub_variance(theta_d), tau_full);
    return FullEstimates{std::move(fit), std::move(thresholded.theta_final), std::move(theta_d)};
}

HubEstimate distributed_estimate(std::span<const DataMatrix> machine_data, double lambda,
                                 std::uint64_t budget, double tau, const GlassoOptions& options) {
    std::vector<SparseUpdate> updates;
    updates.reserve(machine_data.size());
    for (std::size_t m = 0; m < machine_data.size(); ++m) {
        updates.push_back(
            machine_estimate(machine_data[m], lambda, budget, static_cast<std::uint32_t>(m), options));
    }
    return combine_updates(updates, tau);
}

} // namespace dice
