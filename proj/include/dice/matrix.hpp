#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dice {

using Index = std::size_t;

/**
 * Dense p x p symmetric matrix. Symmetry is exact: the constructor rejects
 * any matrix whose (i,j) and (j,i) entries differ in a single bit.
 */
class DenseSymMatrix {
public:
    DenseSymMatrix() = default;
    explicit DenseSymMatrix(Eigen::MatrixXd values);

    /// Averages `m` with its transpose. fl(a+b) == fl(b+a), so the result is exactly symmetric.
    static DenseSymMatrix symmetrized(const Eigen::MatrixXd& m);
    static DenseSymMatrix identity(Index p);
    static DenseSymMatrix diagonal(std::span<const double> d);

    Index dim() const noexcept { return static_cast<Index>(values_.rows()); }
    double operator()(Index i, Index j) const { return values_(i, j); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    friend bool operator==(const DenseSymMatrix& a, const DenseSymMatrix& b) {
        return a.values_.rows() == b.values_.rows() && a.values_ == b.values_;
    }

private:
    Eigen::MatrixXd values_;
};

struct SparseEntry {
    Index i;
    Index j;
    double v;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/**
 * Upper-triangle coordinate form of a symmetric matrix. Entries are sorted by
 * (i, j), unique, satisfy i <= j < p and are never exactly zero; an entry with
 * i < j stands for both (i, j) and (j, i).
 */
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;
    /// Validates the invariants above and throws InvariantViolation otherwise.
    SparseSymMatrix(Index p, std::vector<SparseEntry> entries);

    /// Keeps the nonzero upper triangle of `dense`.
    static SparseSymMatrix from_dense(const DenseSymMatrix& dense);

    Index dim() const noexcept { return p_; }
    const std::vector<SparseEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t off_diagonal_count() const noexcept;

    /// Stored value at (i, j) in either triangle, 0 when absent.
    double at(Index i, Index j) const;
    DenseSymMatrix to_dense() const;

    friend bool operator==(const SparseSymMatrix&, const SparseSymMatrix&) = default;

private:
    Index p_ = 0;
    std::vector<SparseEntry> entries_;
};

/// n observations (rows) of a p-dimensional vector.
class DataMatrix {
public:
    DataMatrix() = default;
    explicit DataMatrix(Eigen::MatrixXd rows);

    Index n() const noexcept { return static_cast<Index>(rows_.rows()); }
    Index p() const noexcept { return static_cast<Index>(rows_.cols()); }
    const Eigen::MatrixXd& rows() const noexcept { return rows_; }

    friend bool operator==(const DataMatrix& a, const DataMatrix& b) {
        return a.rows_.rows() == b.rows_.rows() && a.rows_.cols() == b.rows_.cols() &&
               a.rows_ == b.rows_;
    }

private:
    Eigen::MatrixXd rows_;
};

/// Lower-triangular L with A = L L^T. Throws NotPositiveDefinite on a non-positive pivot.
Eigen::MatrixXd cholesky(const DenseSymMatrix& a);

bool is_positive_definite(const DenseSymMatrix& a);

DenseSymMatrix invert_spd(const DenseSymMatrix& a);

/// Mean-centred covariance with 1/n scaling.
DenseSymMatrix empirical_covariance(const DataMatrix& x);

/// Stacks the blocks row-wise; all blocks must share p.
DataMatrix concatenate(std::span<const DataMatrix> blocks);

} // namespace dice
