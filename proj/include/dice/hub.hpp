#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dice/debias.hpp"
#include "dice/glasso.hpp"
#include "dice/matrix.hpp"

namespace dice {

struct HubEstimate {
    /// Mean of the updates, absent entries counted as zero.
    DenseSymMatrix theta_bar;
    /// theta_bar with insignificant off-diagonal entries removed; diagonal kept as is.
    SparseSymMatrix theta_final;
    double tau = 0.0;
    std::size_t machines = 0;
};

/// Entrywise mean over updates sorted by machine_id.
/// Throws DimensionMismatch, DuplicateMachine, or InvalidParameter when empty.
DenseSymMatrix aggregate(std::span<const SparseUpdate> updates);

/// Same formula as variance_estimates, applied to the averaged matrix.
DenseSymMatrix hub_variance(const DenseSymMatrix& theta_bar);

/// Keeps off-diagonal (i, j) iff |theta_bar_ij| > tau * sqrt(sigma_sq_ij).
HubEstimate final_threshold(const DenseSymMatrix& theta_bar, const DenseSymMatrix& sigma_sq,
                            double tau);

/// aggregate -> hub_variance -> final_threshold.
HubEstimate combine_updates(std::span<const SparseUpdate> updates, double tau);

/// Plain mean of the per-machine graphical lasso estimates.
DenseSymMatrix naive_estimator(std::span<const DenseSymMatrix> theta_hats);

struct FullEstimates {
    GlassoSolution glasso;
    /// Debiased, variance-scaled and thresholded at tau_full.
    SparseSymMatrix debiased;
    DenseSymMatrix debiased_dense;
};

/// Non-distributed baselines on the pooled sample.
FullEstimates full_estimators(const DataMatrix& pooled, double lambda_full, double tau_full,
                              const GlassoOptions& options = {});

/// Runs every machine in process and combines the updates; the reference the
/// networked hub must reproduce bit for bit. Machine m gets id m.
HubEstimate distributed_estimate(std::span<const DataMatrix> machine_data, double lambda,
                                 std::uint64_t budget, double tau,
                                 const GlassoOptions& options = {});

} // namespace dice
