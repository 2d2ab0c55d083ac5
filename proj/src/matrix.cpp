#include "dice/matrix.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

#include "dice/errors.hpp"

namespace dice {

DenseSymMatrix::DenseSymMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.rows() != values_.cols()) {
        throw InvalidParameter("DenseSymMatrix: expected a non-empty square matrix, got " +
                               std::to_string(values_.rows()) + "x" +
                               std::to_string(values_.cols()));
    }
    const auto p = values_.rows();
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j + 1; i < p; ++i) {
            if (values_(i, j) != values_(j, i)) {
                throw InvalidParameter("DenseSymMatrix: entries (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") and their transpose differ");
            }
        }
    }
}

DenseSymMatrix DenseSymMatrix::symmetrized(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("symmetrized: matrix is not square");
    }
    Eigen::MatrixXd s = (m + m.transpose()) * 0.5;
    return DenseSymMatrix(std::move(s));
}

DenseSymMatrix DenseSymMatrix::identity(Index p) {
    const auto n = static_cast<Eigen::Index>(p);
    return DenseSymMatrix(Eigen::MatrixXd::Identity(n, n));
}

DenseSymMatrix DenseSymMatrix::diagonal(std::span<const double> d) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    }
    return DenseSymMatrix(std::move(m));
}

SparseSymMatrix::SparseSymMatrix(Index p, std::vector<SparseEntry> entries)
    : p_(p), entries_(std::move(entries)) {
    if (p_ < 1) {
        throw InvariantViolation("SparseSymMatrix: dimension must be positive");
    }
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        if (e.i > e.j || e.j >= p_) {
            throw InvariantViolation("SparseSymMatrix: entry (" + std::to_string(e.i) + "," +
                                     std::to_string(e.j) + ") is outside the upper triangle");
        }
        if (e.v == 0.0) {
            throw InvariantViolation("SparseSymMatrix: stored entry is exactly zero");
        }
        if (k > 0) {
            const auto& prev = entries_[k - 1];
            if (std::pair(prev.i, prev.j) >= std::pair(e.i, e.j)) {
                throw InvariantViolation("SparseSymMatrix: entries unsorted or duplicated");
            }
        }
    }
}

SparseSymMatrix SparseSymMatrix::from_dense(const DenseSymMatrix& dense) {
    std::vector<SparseEntry> entries;
    const auto p = dense.dim();
    for (Index i = 0; i < p; ++i) {
        for (Index j = i; j < p; ++j) {
            const double v = dense(i, j);
            if (v != 0.0) {
                entries.push_back({i, j, v});
            }
        }
    }
    return SparseSymMatrix(p, std::move(entries));
}

std::size_t SparseSymMatrix::off_diagonal_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.i != e.j; }));
}

double SparseSymMatrix::at(Index i, Index j) const {
    if (i > j) {
        std::swap(i, j);
    }
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair(i, j),
                               [](const SparseEntry& e, const std::pair<Index, Index>& key) {
                                   return std::pair(e.i, e.j) < key;
                               });
    if (it != entries_.end() && it->i == i && it->j == j) {
        return it->v;
    }
    return 0.0;
}

DenseSymMatrix SparseSymMatrix::to_dense() const {
    const auto n = static_cast<Eigen::Index>(p_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : entries_) {
        const auto i = static_cast<Eigen::Index>(e.i);
        const auto j = static_cast<Eigen::Index>(e.j);
        m(i, j) = e.v;
        m(j, i) = e.v;
    }
    return DenseSymMatrix(std::move(m));
}

DataMatrix::DataMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1 || rows_.cols() < 1) {
        throw InvalidParameter("DataMatrix: need at least one row and one column");
    }
}

Eigen::MatrixXd cholesky(const DenseSymMatrix& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a.values());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("cholesky: non-positive pivot encountered");
    }
    return llt.matrixL();
}

bool is_positive_definite(const DenseSymMatrix& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a.values());
    return llt.info() == Eigen::Success;
}

DenseSymMatrix invert_spd(const DenseSymMatrix& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a.values());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("invert_spd: matrix is not positive definite");
    }
    const auto p = a.values().rows();
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
    return DenseSymMatrix::symmetrized(inv);
}

DenseSymMatrix empirical_covariance(const DataMatrix& x) {
    const auto& rows = x.rows();
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    const Eigen::MatrixXd centred = rows.rowwise() - mean;
    Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(x.n());
    for (Eigen::Index j = 0; j < cov.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < cov.rows(); ++i) {
            cov(j, i) = cov(i, j);
        }
    }
    return DenseSymMatrix(std::move(cov));
}

DataMatrix concatenate(std::span<const DataMatrix> blocks) {
    if (blocks.empty()) {
        throw InvalidParameter("concatenate: no blocks");
    }
    const auto p = blocks.front().rows().cols();
    Eigen::Index total = 0;
    for (const auto& b : blocks) {
        if (b.rows().cols() != p) {
            throw DimensionMismatch("concatenate: blocks disagree on p");
        }
        total += b.rows().rows();
    }
    Eigen::MatrixXd out(total, p);
    Eigen::Index offset = 0;
    for (const auto& b : blocks) {
        out.middleRows(offset, b.rows().rows()) = b.rows();
        offset += b.rows().rows();
    }
    return DataMatrix(std::move(out));
}

} // namespace dice
