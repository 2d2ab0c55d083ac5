#include "dice/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dice/errors.hpp"
#include "dice/rng.hpp"

namespace dice {

GroundTruthModel make_model(DenseSymMatrix theta) {
    GroundTruthModel model{theta, invert_spd(theta), {}, 0, 0};
    const auto p = theta.dim();
    for (Index i = 0; i < p; ++i) {
        std::size_t row_nnz = 0;
        for (Index j = 0; j < p; ++j) {
            if (theta(i, j) == 0.0) {
                continue;
            }
            ++row_nnz;
            if (i != j) {
                ++model.s;
                if (i < j) {
                    model.support.emplace_back(i, j);
                }
            }
        }
        model.d = std::max(model.d, row_nnz);
    }
    return model;
}

GroundTruthModel chain_precision(Index p, double a) {
    if (p < 2) {
        throw InvalidParameter("chain_precision: p must be at least 2");
    }
    if (!(std::abs(a) < 0.5)) {
        throw InvalidParameter("chain_precision: |a| must be below 0.5, got " + std::to_string(a));
    }
    const auto n = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        theta(i, i + 1) = a;
        theta(i + 1, i) = a;
    }
    return make_model(DenseSymMatrix(std::move(theta)));
}

DataMatrix sample_gaussian(const GroundTruthModel& model, Index n, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidParameter("sample_gaussian: n must be at least 1");
    }
    const Eigen::MatrixXd lower = cholesky(model.sigma);
    const auto p = lower.rows();
    Rng rng(seed);
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), p);
    // row-major fill so the stream order does not depend on storage layout
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index c = 0; c < p; ++c) {
            z(r, c) = rng.normal();
        }
    }
    // rows are z_r^T L^T
    Eigen::MatrixXd x = z * lower.transpose();
    return DataMatrix(std::move(x));
}

DataMatrix sample_pooled(const GroundTruthModel& model, Index n_per_machine, Index machines,
                         std::uint64_t seed) {
    if (machines < 1) {
        throw InvalidParameter("sample_pooled: need at least one machine");
    }
    std::vector<DataMatrix> blocks;
    blocks.reserve(machines);
    for (Index m = 0; m < machines; ++m) {
        blocks.push_back(sample_gaussian(model, n_per_machine, machine_seed(seed, m)));
    }
    return concatenate(blocks);
}

std::vector<DataMatrix> split_samples(const DataMatrix& x, Index machines) {
    if (machines < 1 || x.n() % machines != 0) {
        throw InvalidParameter("split_samples: " + std::to_string(x.n()) +
                               " rows cannot be split equally over " + std::to_string(machines) +
                               " machines");
    }
    const auto block = static_cast<Eigen::Index>(x.n() / machines);
    std::vector<DataMatrix> out;
    out.reserve(machines);
    for (Index m = 0; m < machines; ++m) {
        out.emplace_back(x.rows().middleRows(static_cast<Eigen::Index>(m) * block, block));
    }
    return out;
}

} // namespace dice
