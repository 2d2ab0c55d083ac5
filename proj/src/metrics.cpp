#include "dice/metrics.hpp"

#include "dice/errors.hpp"

namespace dice {

double frobenius_sq_error(const DenseSymMatrix& est, const DenseSymMatrix& truth) {
    if (est.dim() != truth.dim()) {
        throw DimensionMismatch("frobenius_sq_error: dimension mismatch");
    }
    return (est.values() - truth.values()).squaredNorm();
}

double linf_error(const DenseSymMatrix& est, const DenseSymMatrix& truth) {
    if (est.dim() != truth.dim()) {
        throw DimensionMismatch("linf_error: dimension mismatch");
    }
    return (est.values() - truth.values()).cwiseAbs().maxCoeff();
}

SupportRates support_metrics(const SparseSymMatrix& est, const GroundTruthModel& truth) {
    const Index p = truth.dim();
    if (est.dim() != p) {
        throw DimensionMismatch("support_metrics: dimension mismatch");
    }
    std::size_t false_pos = 0;
    std::size_t negatives = 0;
    std::size_t false_neg = 0;
    std::size_t positives = 0;
    for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
            const bool edge = truth.theta(i, j) != 0.0;
            const bool found = est.at(i, j) != 0.0;
            if (edge) {
                ++positives;
                false_neg += found ? 0 : 1;
            } else {
                ++negatives;
                false_pos += found ? 1 : 0;
            }
        }
    }
    SupportRates r;
    r.fpr = negatives == 0 ? 0.0 : static_cast<double>(false_pos) / static_cast<double>(negatives);
    r.fnr = positives == 0 ? 0.0 : static_cast<double>(false_neg) / static_cast<double>(positives);
    return r;
}

} // namespace dice
