#pragma once

#include "hirschlab/rat.hpp"

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace hirschlab {

/// Sparse matrix of exact rationals. Entries are kept row-major sorted with no
/// explicit zeros, so operator== is structural equality of the represented matrix.
/// Values are immutable in spirit: operations return new matrices.
class SparseRatMatrix {
public:
    using Entry = std::pair<int, Rat>;  // (col, value) within a row

    SparseRatMatrix() = default;
    SparseRatMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_data_(rows) {}

    static SparseRatMatrix zero(int rows, int cols) { return SparseRatMatrix(rows, cols); }
    static SparseRatMatrix identity(int n);
    static SparseRatMatrix from_entries(int rows, int cols,
                                        const std::vector<std::tuple<int, int, Rat>>& entries);
    static SparseRatMatrix from_dense(const std::vector<std::vector<Rat>>& dense);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long nnz() const;
    bool is_zero() const { return nnz() == 0; }

    const std::vector<Entry>& row(int i) const { return row_data_[i]; }
    Rat at(int i, int j) const;

    /// Insert/overwrite one entry (builder use; keeps row sorted, drops zeros).
    void set(int i, int j, const Rat& v);

    SparseRatMatrix transpose() const;
    SparseRatMatrix operator*(const SparseRatMatrix& o) const;
    SparseRatMatrix operator+(const SparseRatMatrix& o) const;
    SparseRatMatrix operator-(const SparseRatMatrix& o) const;
    SparseRatMatrix scaled(const Rat& c) const;
    bool operator==(const SparseRatMatrix& o) const;
    bool operator!=(const SparseRatMatrix& o) const { return !(*this == o); }

    /// Columns [j0, j1) as a new matrix.
    SparseRatMatrix col_slice(int j0, int j1) const;
    SparseRatMatrix select_columns(const std::vector<int>& cols) const;
    SparseRatMatrix select_rows(const std::vector<int>& rows) const;
    std::vector<Rat> column_dense(int j) const;

    std::vector<std::tuple<int, int, Rat>> entries() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::vector<Entry>> row_data_;
};

SparseRatMatrix hstack(const SparseRatMatrix& a, const SparseRatMatrix& b);
SparseRatMatrix vstack(const SparseRatMatrix& a, const SparseRatMatrix& b);

/// Block assembly; null pointers mean zero blocks. Row/col partition sizes are
/// taken from the first non-null block in each band and must be consistent.
SparseRatMatrix from_blocks(const std::vector<std::vector<const SparseRatMatrix*>>& blocks,
                            const std::vector<int>& row_sizes, const std::vector<int>& col_sizes);

struct RrefResult {
    SparseRatMatrix R;        // reduced row echelon form
    int rank = 0;
    std::vector<int> pivots;  // pivot column per pivot row, increasing
};

/// Reduced row echelon form by fraction-free elimination (rows kept integral,
/// renormalized by content after each update); dense path for small matrices.
RrefResult rref(const SparseRatMatrix& A);

int rank(const SparseRatMatrix& A);

/// Columns form a basis of ker(A); exactly cols(A) - rank(A) of them.
SparseRatMatrix kernel_basis(const SparseRatMatrix& A);

/// Independent columns of A spanning its column space (the pivot columns).
SparseRatMatrix image_basis(const SparseRatMatrix& A);

struct QuotientResult {
    int dim = 0;
    SparseRatMatrix complement;  // columns of V completing span(W) to span(V)
};

/// dim(span V / span W) with explicit complement representatives drawn from V's
/// columns. Throws ContainmentViolation unless span(W) is contained in span(V).
QuotientResult quotient_dims(const SparseRatMatrix& W, const SparseRatMatrix& V);

bool in_span(const SparseRatMatrix& V, const SparseRatMatrix& vectors);

/// One-time factorization of A for solving A x = b against many right-hand sides.
class LinearSolver {
public:
    explicit LinearSolver(const SparseRatMatrix& A);

    int rank() const { return rank_; }
    /// Solve A X = B columnwise; nullopt if any column is inconsistent.
    std::optional<SparseRatMatrix> solve(const SparseRatMatrix& B) const;

private:
    int arows_, acols_;
    int rank_;
    std::vector<int> pivots_;
    SparseRatMatrix reduced_;    // rref of A, rank rows
    SparseRatMatrix transform_;  // T with T*A = rref(A)
};

}  // namespace hirschlab
