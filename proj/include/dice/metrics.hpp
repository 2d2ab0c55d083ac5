#pragma once

#include <string>

#include "dice/datagen.hpp"
#include "dice/matrix.hpp"

namespace dice {

struct MetricsRecord {
    std::string estimator;
    /// Squared Frobenius error over all p^2 cells.
    double mse = 0.0;
    double linf = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
    std::size_t trial = 0;
    std::size_t machines = 0;
    double beta = 1.0;
    double wall_ms = 0.0;
};

double frobenius_sq_error(const DenseSymMatrix& est, const DenseSymMatrix& truth);
double linf_error(const DenseSymMatrix& est, const DenseSymMatrix& truth);

struct SupportRates {
    double fpr = 0.0;
    double fnr = 0.0;
};

/// Rates over off-diagonal upper-triangle pairs; the diagonal is never an edge.
SupportRates support_metrics(const SparseSymMatrix& est, const GroundTruthModel& truth);

} // namespace dice
