#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hirschlab/sparse_mat.hpp"

#include <random>

using namespace hirschlab;

namespace {

SparseRatMatrix mat(int rows, int cols, std::vector<std::vector<long>> dense) {
    std::vector<std::vector<Rat>> d(rows, std::vector<Rat>(cols, Rat(0)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            d[i][j] = Rat(dense[i][j]);
    return SparseRatMatrix::from_dense(d);
}

SparseRatMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
    SparseRatMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const long v = static_cast<long>(rng() % 11) - 5;
            if (v != 0 && rng() % 2 == 0)
                m.set(i, j, Rat(v));
        }
    return m;
}

// Plain division-based dense elimination: the independent route used to
// cross-check the fraction-free path.
struct DenseRref {
    std::vector<std::vector<Rat>> R;
    int rank = 0;
    std::vector<int> pivots;
};

DenseRref dense_oracle(const SparseRatMatrix& A) {
    DenseRref out;
    const int m = A.rows(), n = A.cols();
    out.R.assign(m, std::vector<Rat>(n, Rat(0)));
    for (const auto& [i, j, v] : A.entries())
        out.R[i][j] = v;
    int r = 0;
    for (int j = 0; j < n && r < m; ++j) {
        int p = -1;
        for (int i = r; i < m; ++i)
            if (!out.R[i][j].is_zero()) {
                p = i;
                break;
            }
        if (p < 0)
            continue;
        std::swap(out.R[p], out.R[r]);
        const Rat inv = Rat(1) / out.R[r][j];
        for (int k = 0; k < n; ++k)
            out.R[r][k] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r)
                continue;
            const Rat f = out.R[i][j];
            if (f.is_zero())
                continue;
            for (int k = 0; k < n; ++k)
                out.R[i][k] -= f * out.R[r][k];
        }
        out.pivots.push_back(j);
        ++r;
    }
    out.rank = r;
    return out;
}

}  // namespace

TEST_CASE("rationals parse, print and stay canonical") {
    CHECK(Rat::parse("2/4").str() == "1/2");
    CHECK(Rat::parse("-6/4").str() == "-3/2");
    CHECK(Rat::parse("7").str() == "7");
    CHECK(Rat::parse("0/5").str() == "0");
    CHECK((Rat(1, 3) + Rat(1, 6)) == Rat(1, 2));
    CHECK_THROWS_AS(Rat::parse("1/0"), Error);
    CHECK_THROWS_AS(Rat::parse("a"), Error);
    CHECK_THROWS_AS(Rat::parse(""), Error);
    CHECK_THROWS_AS(Rat(1, 1) / Rat(0), Error);
}

TEST_CASE("rref: identity, zero and the rank-1 example") {
    const auto id3 = rref(SparseRatMatrix::identity(3));
    CHECK(id3.rank == 3);
    CHECK(id3.pivots == std::vector<int>{0, 1, 2});
    CHECK(id3.R == SparseRatMatrix::identity(3));

    const auto z = rref(SparseRatMatrix::zero(2, 4));
    CHECK(z.rank == 0);
    CHECK(z.pivots.empty());
    CHECK(z.R == SparseRatMatrix::zero(2, 4));

    // [[1,2],[2,4]] -> [[1,2],[0,0]] by hand elimination
    const auto e = rref(mat(2, 2, {{1, 2}, {2, 4}}));
    CHECK(e.rank == 1);
    CHECK(e.R == mat(2, 2, {{1, 2}, {0, 0}}));
}

TEST_CASE("kernel bases: identity, zero, single relation") {
    CHECK(kernel_basis(SparseRatMatrix::identity(4)).cols() == 0);
    CHECK(kernel_basis(SparseRatMatrix::zero(3, 5)) == SparseRatMatrix::identity(5));
    // [[1,2]]: kernel spanned by (-2, 1)
    const SparseRatMatrix K = kernel_basis(mat(1, 2, {{1, 2}}));
    CHECK(K.cols() == 1);
    CHECK(K.at(0, 0) == Rat(-2));
    CHECK(K.at(1, 0) == Rat(1));
}

TEST_CASE("image bases") {
    CHECK(image_basis(SparseRatMatrix::identity(3)) == SparseRatMatrix::identity(3));
    CHECK(image_basis(SparseRatMatrix::zero(3, 2)).cols() == 0);
    // duplicated column (1,2): one representative
    const SparseRatMatrix B = image_basis(mat(2, 2, {{1, 1}, {2, 2}}));
    CHECK(B.cols() == 1);
    CHECK(B.at(0, 0) == Rat(1));
    CHECK(B.at(1, 0) == Rat(2));
}

TEST_CASE("quotient dimensions and complements") {
    const SparseRatMatrix V = SparseRatMatrix::identity(3);
    CHECK(quotient_dims(V, V).dim == 0);
    CHECK(quotient_dims(SparseRatMatrix::zero(3, 0), V).dim == 3);
    // V = span{(1,0),(0,1)}, W = span{(1,1)} -> 1
    const SparseRatMatrix W = mat(2, 1, {{1}, {1}});
    const auto quo = quotient_dims(W, SparseRatMatrix::identity(2));
    CHECK(quo.dim == 1);
    // complement vector really completes the span
    CHECK(rank(hstack(W, quo.complement)) == 2);
    // containment violation: W outside the plane z = 0
    const SparseRatMatrix plane = mat(3, 2, {{1, 0}, {0, 1}, {0, 0}});
    const SparseRatMatrix outside = mat(3, 1, {{0}, {0}, {1}});
    CHECK_THROWS_AS(quotient_dims(outside, plane), Error);
}

TEST_CASE("rank-nullity and idempotence on random matrices") {
    std::mt19937_64 rng(7);
    for (int inst = 0; inst < 30; ++inst) {
        const int rows = 1 + static_cast<int>(rng() % 12);
        const int cols = 1 + static_cast<int>(rng() % 12);
        const SparseRatMatrix A = random_matrix(rng, rows, cols);
        const auto e = rref(A);
        CHECK(e.rank + kernel_basis(A).cols() == cols);
        CHECK(rref(e.R).R == e.R);
        // kernel columns really solve A x = 0
        CHECK((A * kernel_basis(A)).is_zero());
        // fraction-free sparse path agrees with plain division elimination
        const DenseRref oracle = dense_oracle(A);
        CHECK(e.rank == oracle.rank);
        CHECK(e.pivots == oracle.pivots);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                CHECK(e.R.at(i, j) == oracle.R[i][j]);
    }
}

TEST_CASE("solver finds exact solutions and certifies inconsistency") {
    std::mt19937_64 rng(11);
    for (int inst = 0; inst < 20; ++inst) {
        const int rows = 1 + static_cast<int>(rng() % 8);
        const int cols = 1 + static_cast<int>(rng() % 8);
        const SparseRatMatrix A = random_matrix(rng, rows, cols);
        const SparseRatMatrix X = random_matrix(rng, cols, 2);
        const SparseRatMatrix B = A * X;
        const LinearSolver solver(A);
        const auto sol = solver.solve(B);
        REQUIRE(sol.has_value());
        CHECK(A * *sol == B);
    }
    // x + y = 1 and x + y = 2 cannot both hold
    const SparseRatMatrix A = mat(2, 2, {{1, 1}, {1, 1}});
    const SparseRatMatrix b = mat(2, 1, {{1}, {2}});
    CHECK_FALSE(LinearSolver(A).solve(b).has_value());
}

TEST_CASE("large sparse matrices take the sparse path") {
    // above the dense cutoff; band matrix with known rank
    const int n = 80;
    SparseRatMatrix A(n, n + 1);
    for (int i = 0; i < n; ++i) {
        A.set(i, i, Rat(1));
        A.set(i, i + 1, Rat(-1));
    }
    CHECK(rank(A) == n);
    const SparseRatMatrix K = kernel_basis(A);
    CHECK(K.cols() == 1);
    CHECK((A * K).is_zero());
}

TEST_CASE("structural equality and serialization order") {
    SparseRatMatrix a(2, 2), b(2, 2);
    a.set(0, 1, Rat(1, 2));
    a.set(1, 0, Rat(3));
    b.set(1, 0, Rat(3));
    b.set(0, 1, Rat(1, 2));
    CHECK(a == b);
    const auto entries = a.entries();
    REQUIRE(entries.size() == 2);
    CHECK(std::get<0>(entries[0]) == 0);  // row-major
}
