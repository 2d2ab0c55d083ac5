#pragma once

#include <cstdint>

#include "dice/glasso.hpp"
#include "dice/matrix.hpp"

namespace dice {

/// One machine's thresholded debiased estimate: the only thing it ever sends.
struct SparseUpdate {
    std::uint32_t machine_id = 0;
    Index p = 0;
    Index n = 0;
    SparseSymMatrix entries;
    /// Threshold actually applied to |value| / sigma.
    double rho = 0.0;
    /// Logical matrix cells carried: one per diagonal entry, two per off-diagonal entry.
    std::uint64_t bandwidth_used = 0;

    friend bool operator==(const SparseUpdate&, const SparseUpdate&) = default;
};

std::uint64_t bandwidth_of(const SparseSymMatrix& entries);

/// 2 theta - theta S theta, i.e. theta + theta (theta^{-1} - S) theta without forming the inverse.
DenseSymMatrix debias(const DenseSymMatrix& theta_hat, const DenseSymMatrix& sigma_hat);

/// theta_ii theta_jj + theta_ij^2 for every (i, j). Throws InvalidParameter on a non-positive diagonal.
DenseSymMatrix variance_estimates(const DenseSymMatrix& theta_hat);

/**
 * Keeps the whole (nonzero) diagonal plus the k = floor((B - p) / 2)
 * off-diagonal pairs with the largest score |theta_d_ij| / sigma_ij.
 * rho is the (k+1)-th largest score, or 0 when fewer than k+1 scores are
 * nonzero; a pair survives only if its score is strictly above rho, so ties
 * at the cut are all dropped. Throws InvalidParameter if B < p.
 * machine_id and n of the result are left at zero.
 */
SparseUpdate bandwidth_threshold(const DenseSymMatrix& theta_d, const DenseSymMatrix& sigma_sq,
                                 std::uint64_t budget);

struct MachineFit {
    GlassoSolution glasso;
    SparseUpdate update;
};

/// covariance -> graphical lasso -> debias -> variances -> bandwidth threshold.
MachineFit fit_machine(const DataMatrix& x, double lambda, std::uint64_t budget,
                       std::uint32_t machine_id, const GlassoOptions& options = {});

SparseUpdate machine_estimate(const DataMatrix& x, double lambda, std::uint64_t budget,
                              std::uint32_t machine_id, const GlassoOptions& options = {});

} // namespace dice
