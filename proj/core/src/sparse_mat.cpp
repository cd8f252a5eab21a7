#include "hirschlab/sparse_mat.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace hirschlab {

Rat Rat::parse(const std::string& s) {
    if (s.empty())
        throw Error("ParseError", "empty rational literal");
    const auto slash = s.find('/');
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    auto check_int = [&](const std::string& t) {
        if (t.empty() || (t.size() == 1 && (t[0] == '-' || t[0] == '+')))
            throw Error("ParseError", "bad rational literal '" + s + "'");
        for (size_t i = 0; i < t.size(); ++i) {
            const char c = t[i];
            if (!((c >= '0' && c <= '9') || (i == 0 && (c == '-' || c == '+'))))
                throw Error("ParseError", "bad rational literal '" + s + "'");
        }
    };
    check_int(num);
    check_int(den);
    mpz_class n(num), d(den);
    if (d == 0)
        throw Error("ParseError", "zero denominator in '" + s + "'");
    mpq_class q(n);
    q /= mpq_class(d);
    return Rat(q);
}

std::string Rat::str() const {
    if (v_.get_den() == 1)
        return v_.get_num().get_str();
    return v_.get_str();
}

mpz_class binomial(unsigned long n, unsigned long k) {
    if (k > n)
        return 0;
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

/* ---------------- SparseRatMatrix basics ---------------- */

SparseRatMatrix SparseRatMatrix::identity(int n) {
    SparseRatMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m.row_data_[i].emplace_back(i, Rat(1));
    return m;
}

SparseRatMatrix SparseRatMatrix::from_entries(int rows, int cols,
                                              const std::vector<std::tuple<int, int, Rat>>& entries) {
    SparseRatMatrix m(rows, cols);
    for (const auto& [i, j, v] : entries) {
        if (i < 0 || i >= rows || j < 0 || j >= cols)
            throw Error("IndexOutOfRange", "matrix entry at (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") outside " + std::to_string(rows) +
                                               "x" + std::to_string(cols));
        if (!v.is_zero())
            m.row_data_[i].emplace_back(j, v);
    }
    for (auto& row : m.row_data_) {
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        for (size_t k = 1; k < row.size(); ++k)
            if (row[k].first == row[k - 1].first)
                throw Error("DuplicateEntry", "duplicate matrix position");
    }
    return m;
}

SparseRatMatrix SparseRatMatrix::from_dense(const std::vector<std::vector<Rat>>& dense) {
    const int r = static_cast<int>(dense.size());
    const int c = r == 0 ? 0 : static_cast<int>(dense[0].size());
    SparseRatMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            if (!dense[i][j].is_zero())
                m.row_data_[i].emplace_back(j, dense[i][j]);
    return m;
}

long SparseRatMatrix::nnz() const {
    long n = 0;
    for (const auto& row : row_data_)
        n += static_cast<long>(row.size());
    return n;
}

Rat SparseRatMatrix::at(int i, int j) const {
    const auto& row = row_data_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Entry& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == j)
        return it->second;
    return Rat(0);
}

void SparseRatMatrix::set(int i, int j, const Rat& v) {
    auto& row = row_data_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Entry& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == j) {
        if (v.is_zero())
            row.erase(it);
        else
            it->second = v;
    } else if (!v.is_zero()) {
        row.insert(it, {j, v});
    }
}

SparseRatMatrix SparseRatMatrix::transpose() const {
    SparseRatMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (const auto& [j, v] : row_data_[i])
            t.row_data_[j].emplace_back(i, v);
    return t;  // rows come out sorted because i increases
}

SparseRatMatrix SparseRatMatrix::operator*(const SparseRatMatrix& o) const {
    if (cols_ != o.rows_)
        throw Error("ShapeMismatch", "matrix product " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                                         " * " + std::to_string(o.rows_) + "x" + std::to_string(o.cols_));
    SparseRatMatrix out(rows_, o.cols_);
    std::map<int, Rat> acc;
    for (int i = 0; i < rows_; ++i) {
        acc.clear();
        for (const auto& [k, a] : row_data_[i])
            for (const auto& [j, b] : o.row_data_[k]) {
                auto [it, inserted] = acc.try_emplace(j, Rat(0));
                it->second += a * b;
            }
        auto& row = out.row_data_[i];
        for (const auto& [j, v] : acc)
            if (!v.is_zero())
                row.emplace_back(j, v);
    }
    return out;
}

static std::vector<SparseRatMatrix::Entry> merge_rows(const std::vector<SparseRatMatrix::Entry>& a,
                                                      const std::vector<SparseRatMatrix::Entry>& b,
                                                      int bsign) {
    std::vector<SparseRatMatrix::Entry> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.emplace_back(b[j].first, bsign > 0 ? b[j].second : -b[j].second);
            ++j;
        } else {
            Rat v = bsign > 0 ? a[i].second + b[j].second : a[i].second - b[j].second;
            if (!v.is_zero())
                out.emplace_back(a[i].first, v);
            ++i;
            ++j;
        }
    }
    return out;
}

SparseRatMatrix SparseRatMatrix::operator+(const SparseRatMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw Error("ShapeMismatch", "matrix sum shape mismatch");
    SparseRatMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        out.row_data_[i] = merge_rows(row_data_[i], o.row_data_[i], +1);
    return out;
}

SparseRatMatrix SparseRatMatrix::operator-(const SparseRatMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw Error("ShapeMismatch", "matrix difference shape mismatch");
    SparseRatMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        out.row_data_[i] = merge_rows(row_data_[i], o.row_data_[i], -1);
    return out;
}

SparseRatMatrix SparseRatMatrix::scaled(const Rat& c) const {
    SparseRatMatrix out(rows_, cols_);
    if (c.is_zero())
        return out;
    for (int i = 0; i < rows_; ++i) {
        out.row_data_[i].reserve(row_data_[i].size());
        for (const auto& [j, v] : row_data_[i])
            out.row_data_[i].emplace_back(j, v * c);
    }
    return out;
}

bool SparseRatMatrix::operator==(const SparseRatMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && row_data_ == o.row_data_;
}

SparseRatMatrix SparseRatMatrix::col_slice(int j0, int j1) const {
    SparseRatMatrix out(rows_, j1 - j0);
    for (int i = 0; i < rows_; ++i)
        for (const auto& [j, v] : row_data_[i])
            if (j >= j0 && j < j1)
                out.row_data_[i].emplace_back(j - j0, v);
    return out;
}

SparseRatMatrix SparseRatMatrix::select_columns(const std::vector<int>& cols) const {
    std::vector<int> pos(cols_, -1);
    for (size_t k = 0; k < cols.size(); ++k)
        pos[cols[k]] = static_cast<int>(k);
    SparseRatMatrix out(rows_, static_cast<int>(cols.size()));
    for (int i = 0; i < rows_; ++i) {
        std::vector<Entry> row;
        for (const auto& [j, v] : row_data_[i])
            if (pos[j] >= 0)
                row.emplace_back(pos[j], v);
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        out.row_data_[i] = std::move(row);
    }
    return out;
}

SparseRatMatrix SparseRatMatrix::select_rows(const std::vector<int>& rows) const {
    SparseRatMatrix out(static_cast<int>(rows.size()), cols_);
    for (size_t k = 0; k < rows.size(); ++k)
        out.row_data_[k] = row_data_[rows[k]];
    return out;
}

std::vector<Rat> SparseRatMatrix::column_dense(int j) const {
    std::vector<Rat> out(rows_, Rat(0));
    for (int i = 0; i < rows_; ++i) {
        Rat v = at(i, j);
        if (!v.is_zero())
            out[i] = v;
    }
    return out;
}

std::vector<std::tuple<int, int, Rat>> SparseRatMatrix::entries() const {
    std::vector<std::tuple<int, int, Rat>> out;
    for (int i = 0; i < rows_; ++i)
        for (const auto& [j, v] : row_data_[i])
            out.emplace_back(i, j, v);
    return out;
}

SparseRatMatrix hstack(const SparseRatMatrix& a, const SparseRatMatrix& b) {
    if (a.rows() != b.rows())
        throw Error("ShapeMismatch", "hstack row mismatch");
    SparseRatMatrix out(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (const auto& [j, v] : a.row(i))
            out.set(i, j, v);
        for (const auto& [j, v] : b.row(i))
            out.set(i, a.cols() + j, v);
    }
    return out;
}

SparseRatMatrix vstack(const SparseRatMatrix& a, const SparseRatMatrix& b) {
    if (a.cols() != b.cols())
        throw Error("ShapeMismatch", "vstack col mismatch");
    SparseRatMatrix out(a.rows() + b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (const auto& [j, v] : a.row(i))
            out.set(i, j, v);
    for (int i = 0; i < b.rows(); ++i)
        for (const auto& [j, v] : b.row(i))
            out.set(a.rows() + i, j, v);
    return out;
}

SparseRatMatrix from_blocks(const std::vector<std::vector<const SparseRatMatrix*>>& blocks,
                            const std::vector<int>& row_sizes, const std::vector<int>& col_sizes) {
    int total_rows = 0, total_cols = 0;
    for (int r : row_sizes)
        total_rows += r;
    for (int c : col_sizes)
        total_cols += c;
    SparseRatMatrix out(total_rows, total_cols);
    int roff = 0;
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
        int coff = 0;
        for (size_t bj = 0; bj < blocks[bi].size(); ++bj) {
            const SparseRatMatrix* blk = blocks[bi][bj];
            if (blk) {
                if (blk->rows() != row_sizes[bi] || blk->cols() != col_sizes[bj])
                    throw Error("ShapeMismatch", "block shape mismatch at band (" + std::to_string(bi) +
                                                     "," + std::to_string(bj) + ")");
                for (int i = 0; i < blk->rows(); ++i)
                    for (const auto& [j, v] : blk->row(i))
                        out.set(roff + i, coff + j, v);
            }
            coff += col_sizes[bj];
        }
        roff += row_sizes[bi];
    }
    return out;
}

/* ---------------- elimination ---------------- */

namespace {

using Row = std::vector<SparseRatMatrix::Entry>;

// Scale a row to integer entries with content 1 (fraction-free normal form).
void normalize_row(Row& row) {
    if (row.empty())
        return;
    mpz_class den_lcm = 1, num_gcd = 0;
    for (const auto& [j, v] : row)
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), v.den().get_mpz_t());
    for (const auto& [j, v] : row) {
        mpz_class scaled = v.num() * (den_lcm / v.den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
    }
    const Rat factor{mpq_class(den_lcm) / mpq_class(num_gcd)};
    for (auto& [j, v] : row)
        v = v * factor;
}

// row := a*row - b*pivot  where a = pivot leading value, b = row value at the pivot column.
void eliminate_into(Row& row, const Row& pivot, const Rat& a, const Rat& b) {
    Row out;
    out.reserve(row.size() + pivot.size());
    size_t i = 0, j = 0;
    while (i < row.size() || j < pivot.size()) {
        if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
            out.emplace_back(row[i].first, row[i].second * a);
            ++i;
        } else if (i == row.size() || pivot[j].first < row[i].first) {
            out.emplace_back(pivot[j].first, -(pivot[j].second * b));
            ++j;
        } else {
            Rat v = row[i].second * a - pivot[j].second * b;
            if (!v.is_zero())
                out.emplace_back(row[i].first, v);
            ++i;
            ++j;
        }
    }
    row = std::move(out);
    normalize_row(row);
}

constexpr int kDenseLimit = 64;

RrefResult rref_dense(const SparseRatMatrix& A) {
    const int m = A.rows(), n = A.cols();
    std::vector<std::vector<Rat>> M(m, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < m; ++i)
        for (const auto& [j, v] : A.row(i))
            M[i][j] = v;
    std::vector<int> pivots;
    int r = 0;
    for (int j = 0; j < n && r < m; ++j) {
        int p = -1;
        for (int i = r; i < m; ++i)
            if (!M[i][j].is_zero()) {
                p = i;
                break;
            }
        if (p < 0)
            continue;
        std::swap(M[p], M[r]);
        const Rat inv = Rat(1) / M[r][j];
        for (int k = j; k < n; ++k)
            M[r][k] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r || M[i][j].is_zero())
                continue;
            const Rat f = M[i][j];
            for (int k = j; k < n; ++k)
                M[i][k] -= f * M[r][k];
        }
        pivots.push_back(j);
        ++r;
    }
    RrefResult out;
    out.R = SparseRatMatrix::from_dense(M);
    out.rank = r;
    out.pivots = std::move(pivots);
    return out;
}

}  // namespace

RrefResult rref(const SparseRatMatrix& A) {
    if (A.rows() <= kDenseLimit && A.cols() <= kDenseLimit)
        return rref_dense(A);

    std::vector<Row> active;
    active.reserve(A.rows());
    for (int i = 0; i < A.rows(); ++i) {
        Row row = A.row(i);
        if (!row.empty()) {
            normalize_row(row);
            active.push_back(std::move(row));
        }
    }

    std::vector<Row> pivot_rows;
    std::vector<int> pivots;
    // Bucket active rows by leading column.
    std::map<int, std::vector<Row>> buckets;
    for (auto& row : active)
        buckets[row.front().first].push_back(std::move(row));

    while (!buckets.empty()) {
        auto it = buckets.begin();
        const int col = it->first;
        std::vector<Row> rows = std::move(it->second);
        buckets.erase(it);
        // Choose the sparsest candidate as the pivot row (deterministic tiebreak by order).
        size_t best = 0;
        for (size_t k = 1; k < rows.size(); ++k)
            if (rows[k].size() < rows[best].size())
                best = k;
        Row pivot = std::move(rows[best]);
        rows.erase(rows.begin() + static_cast<long>(best));
        const Rat a = pivot.front().second;
        for (auto& row : rows) {
            eliminate_into(row, pivot, a, row.front().second);
            if (!row.empty())
                buckets[row.front().first].push_back(std::move(row));
        }
        pivots.push_back(col);
        pivot_rows.push_back(std::move(pivot));
    }

    // Back-substitution: clear pivot columns above, scale pivots to 1.
    const int r = static_cast<int>(pivot_rows.size());
    for (int k = r - 1; k >= 0; --k) {
        const Rat inv = Rat(1) / pivot_rows[k].front().second;
        for (auto& [j, v] : pivot_rows[k])
            v *= inv;
        for (int i = 0; i < k; ++i) {
            Rat b = Rat(0);
            for (const auto& [j, v] : pivot_rows[i])
                if (j == pivots[k]) {
                    b = v;
                    break;
                }
            if (!b.is_zero())
                eliminate_into(pivot_rows[i], pivot_rows[k], Rat(1), b);
        }
    }
    // Rows were normalized during back-substitution; rescale pivots to 1 once more.
    for (int k = 0; k < r; ++k) {
        Rat lead = Rat(0);
        for (const auto& [j, v] : pivot_rows[k])
            if (j == pivots[k]) {
                lead = v;
                break;
            }
        const Rat inv = Rat(1) / lead;
        for (auto& [j, v] : pivot_rows[k])
            v *= inv;
    }

    RrefResult out;
    out.R = SparseRatMatrix(A.rows(), A.cols());
    for (int k = 0; k < r; ++k)
        for (const auto& [j, v] : pivot_rows[k])
            out.R.set(k, j, v);
    out.rank = r;
    out.pivots = std::move(pivots);
    return out;
}

int rank(const SparseRatMatrix& A) { return rref(A).rank; }

SparseRatMatrix kernel_basis(const SparseRatMatrix& A) {
    const RrefResult e = rref(A);
    std::vector<bool> is_pivot(A.cols(), false);
    std::vector<int> pivot_row(A.cols(), -1);
    for (int k = 0; k < e.rank; ++k) {
        is_pivot[e.pivots[k]] = true;
        pivot_row[e.pivots[k]] = k;
    }
    std::vector<int> free_cols;
    for (int j = 0; j < A.cols(); ++j)
        if (!is_pivot[j])
            free_cols.push_back(j);
    SparseRatMatrix K(A.cols(), static_cast<int>(free_cols.size()));
    for (size_t c = 0; c < free_cols.size(); ++c) {
        const int f = free_cols[c];
        K.set(f, static_cast<int>(c), Rat(1));
        for (int k = 0; k < e.rank; ++k) {
            const Rat v = e.R.at(k, f);
            if (!v.is_zero())
                K.set(e.pivots[k], static_cast<int>(c), -v);
        }
    }
    return K;
}

SparseRatMatrix image_basis(const SparseRatMatrix& A) {
    const RrefResult e = rref(A);
    return A.select_columns(e.pivots);
}

QuotientResult quotient_dims(const SparseRatMatrix& W, const SparseRatMatrix& V) {
    if (W.rows() != V.rows())
        throw Error("ShapeMismatch", "quotient_dims ambient dimension mismatch");
    // Containment: appending W's columns to V must not raise the rank.
    const RrefResult vw = rref(hstack(V, W));
    int v_pivots = 0;
    for (int p : vw.pivots)
        if (p < V.cols())
            ++v_pivots;
    if (v_pivots != vw.rank)
        throw Error("ContainmentViolation", "a column of W lies outside span(V)");
    // Complement representatives: pivot columns of [W | V] falling in the V block.
    const RrefResult wv = rref(hstack(W, V));
    std::vector<int> reps;
    for (int p : wv.pivots)
        if (p >= W.cols())
            reps.push_back(p - W.cols());
    QuotientResult out;
    out.dim = static_cast<int>(reps.size());
    out.complement = V.select_columns(reps);
    return out;
}

bool in_span(const SparseRatMatrix& V, const SparseRatMatrix& vectors) {
    const RrefResult vw = rref(hstack(V, vectors));
    for (int p : vw.pivots)
        if (p >= V.cols())
            return false;
    return true;
}

LinearSolver::LinearSolver(const SparseRatMatrix& A) : arows_(A.rows()), acols_(A.cols()) {
    const RrefResult e = rref(hstack(A, SparseRatMatrix::identity(A.rows())));
    rank_ = 0;
    for (int p : e.pivots)
        if (p < acols_)
            ++rank_;
    pivots_.assign(e.pivots.begin(), e.pivots.begin() + rank_);
    reduced_ = e.R.col_slice(0, acols_);
    transform_ = e.R.col_slice(acols_, acols_ + arows_);
}

std::optional<SparseRatMatrix> LinearSolver::solve(const SparseRatMatrix& B) const {
    if (B.rows() != arows_)
        throw Error("ShapeMismatch", "solve rhs dimension mismatch");
    const SparseRatMatrix TB = transform_ * B;
    // Rows past the rank certify inconsistency when nonzero.
    for (int i = rank_; i < TB.rows(); ++i)
        if (!TB.row(i).empty())
            return std::nullopt;
    SparseRatMatrix X(acols_, B.cols());
    for (int k = 0; k < rank_; ++k)
        for (const auto& [j, v] : TB.row(k))
            X.set(pivots_[k], j, v);
    return X;
}

}  // namespace hirschlab
