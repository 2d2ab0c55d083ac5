#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dice/matrix.hpp"

namespace dice {

struct GroundTruthModel {
    DenseSymMatrix theta;
    DenseSymMatrix sigma;
    /// Off-diagonal nonzeros of theta as (i, j) with i < j, sorted.
    std::vector<std::pair<Index, Index>> support;
    /// Off-diagonal nonzero count over both triangles.
    std::size_t s = 0;
    /// Maximum nonzeros in a row, diagonal included.
    std::size_t d = 0;

    Index dim() const noexcept { return theta.dim(); }
};

/// Builds the model for an arbitrary SPD precision matrix. Throws NotPositiveDefinite.
GroundTruthModel make_model(DenseSymMatrix theta);

/// Tridiagonal precision with unit diagonal and `a` on the first off-diagonals.
/// Requires p >= 2 and |a| < 0.5.
GroundTruthModel chain_precision(Index p, double a);

/// n i.i.d. rows x = L z with L the Cholesky factor of sigma and z standard normal.
DataMatrix sample_gaussian(const GroundTruthModel& model, Index n, std::uint64_t seed);

/// Draws M blocks of n rows, block m from seed + m, stacked in machine order.
/// split_samples(result, M) recovers exactly the per-machine blocks.
DataMatrix sample_pooled(const GroundTruthModel& model, Index n_per_machine, Index machines,
                         std::uint64_t seed);

/// Contiguous, order-preserving equal blocks. Throws InvalidParameter if M does not divide n.
std::vector<DataMatrix> split_samples(const DataMatrix& x, Index machines);

} // namespace dice
