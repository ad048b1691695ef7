#pragma once

#include "dispectral/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace dispectral {

using index_t = std::int64_t;

template <typename Scalar>
struct Triplet {
    index_t row;
    index_t col;
    Scalar value;
};

// Compressed sparse row matrix. Immutable after construction; column
// indices are strictly increasing within each row and explicit zeros are
// never stored. Duplicate coordinates are rejected (no multigraph
// semantics).
template <typename Scalar>
class CsrMatrix {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    CsrMatrix() : n_rows_(0), n_cols_(0), row_ptr_(1, 0) {}

    static CsrMatrix from_triplets(index_t n_rows, index_t n_cols,
                                   std::vector<Triplet<Scalar>> entries) {
        if (n_rows < 0 || n_cols < 0)
            throw validation_error("CsrMatrix: negative dimension");
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        CsrMatrix m;
        m.n_rows_ = n_rows;
        m.n_cols_ = n_cols;
        m.row_ptr_.assign(static_cast<std::size_t>(n_rows) + 1, 0);
        m.cols_.reserve(entries.size());
        m.values_.reserve(entries.size());
        index_t prev_row = -1, prev_col = -1;
        for (const auto& t : entries) {
            if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
                throw validation_error("CsrMatrix: entry index out of range");
            if (t.row == prev_row && t.col == prev_col)
                throw validation_error("CsrMatrix: duplicate entry");
            prev_row = t.row;
            prev_col = t.col;
            if (t.value == Scalar(0)) continue;
            m.cols_.push_back(t.col);
            m.values_.push_back(t.value);
            ++m.row_ptr_[static_cast<std::size_t>(t.row) + 1];
        }
        for (std::size_t r = 0; r < static_cast<std::size_t>(n_rows); ++r)
            m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    index_t n_rows() const { return n_rows_; }
    index_t n_cols() const { return n_cols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    const std::vector<index_t>& row_ptr() const { return row_ptr_; }
    const std::vector<index_t>& col_indices() const { return cols_; }
    const std::vector<Scalar>& values() const { return values_; }

    Scalar entry(index_t r, index_t c) const {
        auto lo = cols_.begin() + row_ptr_[r], hi = cols_.begin() + row_ptr_[r + 1];
        auto it = std::lower_bound(lo, hi, c);
        if (it == hi || *it != c) return Scalar(0);
        return values_[static_cast<std::size_t>(it - cols_.begin())];
    }

    // y = A x
    void multiply(const Vector& x, Vector& y) const {
        y.setZero(n_rows_);
        for (index_t r = 0; r < n_rows_; ++r) {
            Scalar acc(0);
            for (index_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                acc += values_[p] * x[cols_[p]];
            y[r] = acc;
        }
    }

    // y = A^T x (plain transpose, no conjugation)
    void multiply_transpose(const Vector& x, Vector& y) const {
        y.setZero(n_cols_);
        for (index_t r = 0; r < n_rows_; ++r)
            for (index_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                y[cols_[p]] += values_[p] * x[r];
    }

    CsrMatrix transposed() const {
        std::vector<Triplet<Scalar>> t;
        t.reserve(values_.size());
        for (index_t r = 0; r < n_rows_; ++r)
            for (index_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                t.push_back({cols_[p], r, values_[p]});
        return from_triplets(n_cols_, n_rows_, std::move(t));
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_rows_, n_cols_);
        for (index_t r = 0; r < n_rows_; ++r)
            for (index_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                d(r, cols_[p]) = values_[p];
        return d;
    }

    bool entrywise_equal(const CsrMatrix& other) const {
        return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ &&
               row_ptr_ == other.row_ptr_ && cols_ == other.cols_ && values_ == other.values_;
    }

private:
    index_t n_rows_, n_cols_;
    std::vector<index_t> row_ptr_;
    std::vector<index_t> cols_;
    std::vector<Scalar> values_;
};

using SparseReal = CsrMatrix<double>;
using SparseComplex = CsrMatrix<std::complex<double>>;

// Read-only transpose view; matvecs dispatch to the transposed kernels of
// the underlying matrix. transpose(transpose(M)) round-trips entrywise.
template <typename Scalar>
class TransposeView {
public:
    explicit TransposeView(const CsrMatrix<Scalar>& m) : m_(&m) {}
    index_t n_rows() const { return m_->n_cols(); }
    index_t n_cols() const { return m_->n_rows(); }
    const CsrMatrix<Scalar>& base() const { return *m_; }
    void multiply(const typename CsrMatrix<Scalar>::Vector& x,
                  typename CsrMatrix<Scalar>::Vector& y) const {
        m_->multiply_transpose(x, y);
    }

private:
    const CsrMatrix<Scalar>* m_;
};

// Edge-list file format:
//   # dispectral-edgelist v1 n=<n>
//   src<TAB>dst<TAB>weight        (0-based, weight with 17 significant digits)
void write_edgelist(const std::string& path, const SparseReal& a);
SparseReal read_edgelist(const std::string& path);

// Membership file: one integer label per line, n lines.
void write_memberships(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_memberships(const std::string& path);

} // namespace dispectral
