#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hirschlab/models.hpp"
#include "hirschlab/suites.hpp"

#include <random>

using namespace hirschlab;

namespace {

Complex two_term(long entry) {
    Complex C = Complex::make(0, {1, 1}, {{"a"}, {"b"}});
    SparseRatMatrix d(1, 1);
    if (entry != 0)
        d.set(0, 0, Rat(entry));
    C.set_diff(0, d);
    return C;
}

}  // namespace

TEST_CASE("trivial and stupid filtrations validate; gr reproduces the pieces") {
    std::mt19937_64 rng(21);
    const Complex C = random_complex(rng, 2, 3);
    const FilteredComplex triv = trivial_filtration(C);
    validate(triv);
    const Complex g0 = gr(triv, 0);
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        CHECK(g0.dim(q) == C.dim(q));
        CHECK(cohomology(g0, q).dim == cohomology(C, q).dim);
    }

    const FilteredComplex st = stupid_filtration(C);
    validate(st);
    for (int i = C.min_deg; i <= C.max_deg; ++i) {
        const Complex gi = gr(st, i);
        for (int q = C.min_deg; q <= C.max_deg; ++q) {
            CHECK(gi.dim(q) == (q == i ? C.dim(i) : 0));
        }
        CHECK(gi.diff(i).is_zero());  // one column survives, so d vanishes on gr
    }
}

TEST_CASE("filtration validation catches broken containment and instability") {
    const Complex C = two_term(1);
    FilteredComplex FC;
    FC.C = C;
    FC.levels = {0, 1};
    // F^0 = everything, F^1 = degree-0 line whose image under d leaves F^1
    FC.F.resize(2);
    FC.F[0] = {SparseRatMatrix::identity(1), SparseRatMatrix::identity(1)};
    SparseRatMatrix line(1, 1);
    line.set(0, 0, Rat(1));
    FC.F[1] = {line, SparseRatMatrix::zero(1, 0)};
    CHECK_THROWS_AS(validate(FC), Error);  // d F^1 not inside F^1
}

TEST_CASE("induced gr maps and the corrupted-filtration counterexample") {
    const Complex C = two_term(0);
    const FilteredComplex st = stupid_filtration(C);
    // identity is a filtered quasi-isomorphism at every level
    FilteredChainMap idmap{st, st, ChainMap::identity(C)};
    validate(idmap);
    CHECK(is_filtered_quasi_iso(idmap, {0, 1}).overall);

    // enlarging F^1 by a degree-0 vector is still a valid filtration, but the
    // identity comparison fails at level 0
    FilteredComplex corrupted;
    corrupted.C = C;
    corrupted.levels = {0, 1};
    corrupted.F.resize(2);
    corrupted.F[0] = {SparseRatMatrix::identity(1), SparseRatMatrix::identity(1)};
    SparseRatMatrix line(1, 1);
    line.set(0, 0, Rat(1));
    corrupted.F[1] = {line, SparseRatMatrix::identity(1)};
    validate(corrupted);
    FilteredChainMap cmp{st, corrupted, ChainMap::identity(C)};
    validate(cmp);
    const auto rep = is_filtered_quasi_iso(cmp, {0, 1});
    CHECK_FALSE(rep.overall);
    CHECK_FALSE(rep.by_level[0].second);  // fails exactly at level 0

    // a map sending F^1 into F^2 induces zero on gr^1
    ChainMap deeper = ChainMap::make(C, C);
    deeper.set_map(0, SparseRatMatrix::identity(1));  // degree-1 part mapped to 0
    validate(deeper);
    FilteredChainMap drop{st, st, deeper};
    validate(drop);
    const ChainMap g1 = induced_gr_map(drop, 1);
    CHECK(g1.map(1).is_zero());
    const ChainMap g0 = induced_gr_map(drop, 0);
    CHECK(g0.map(0) == SparseRatMatrix::identity(1));
}

TEST_CASE("level mismatch is reported") {
    const Complex C = two_term(0);
    FilteredChainMap idmap{stupid_filtration(C), stupid_filtration(C), ChainMap::identity(C)};
    CHECK_THROWS_AS(induced_gr_map(idmap, 7), Error);
    // padding the levels makes the request legal and the gr zero
    FilteredChainMap padded{extend_levels_to(stupid_filtration(C), 7),
                            extend_levels_to(stupid_filtration(C), 7), ChainMap::identity(C)};
    const ChainMap g = induced_gr_map(padded, 7);
    CHECK(g.source.total_dim() == 0);
}

TEST_CASE("spectral pages of the trivial filtration collapse to cohomology") {
    std::mt19937_64 rng(33);
    const Complex C = random_complex(rng, 3, 3);
    const FilteredComplex triv = trivial_filtration(C);
    const SpectralPage E1 = spectral_page(triv, 1);
    for (int n = C.min_deg; n <= C.max_deg; ++n)
        CHECK(E1.entry(0, n) == cohomology(C, n).dim);
    for (const auto& [pq, dim] : E1.entries)
        CHECK(pq.first == 0);
}

TEST_CASE("pages are consistent and converge on assorted filtrations") {
    std::mt19937_64 rng(55);
    for (int inst = 0; inst < 5; ++inst) {
        const Complex C = random_complex(rng, 3, 3);
        const FilteredComplex st = stupid_filtration(C);
        validate(st);
        CHECK(pages_consistent(st, 0));
        CHECK(pages_consistent(st, 1));
        CHECK(converges_to_cohomology(st));
    }
    // the column filtration of a small truncated extension
    const ModelDGA lp = build_log_dga(canned("log_point"));
    const TruncatedHirschExtension HE = truncated_extension(lp.datum, 3);
    const FilteredComplex G = weight_filtration_G(HE);
    validate(G);
    CHECK(pages_consistent(G, 0));
    CHECK(pages_consistent(G, 1));
    CHECK(pages_consistent(G, 2));
    CHECK(converges_to_cohomology(G));
    const FilteredComplex F = hodge_filtration(HE);
    validate(F);
    CHECK(pages_consistent(F, 1));
    CHECK(converges_to_cohomology(F));
}

TEST_CASE("degeneration checker") {
    // zero differential: every filtration degenerates at page 1
    Complex C = Complex::make(0, {2, 2});
    const FilteredComplex st = stupid_filtration(C);
    CHECK(check_degeneration(st, 1).degenerates);
    // the column filtration of the basic extension has d_1 != 0
    const ModelDGA lp = build_log_dga(canned("log_point"));
    const FilteredComplex G = weight_filtration_G(truncated_extension(lp.datum, 3));
    const DegenerationReport dr = check_degeneration(G, 1);
    CHECK_FALSE(dr.degenerates);
    CHECK(dr.first_nonzero_r == 1);
}

TEST_CASE("filtered map validation rejects level violations") {
    const Complex C = two_term(0);
    // source filtration finer than the target allows: map the degree-0 line of
    // F^1 to a vector outside the target's F^1
    FilteredComplex src;
    src.C = C;
    src.levels = {0, 1};
    src.F.resize(2);
    src.F[0] = {SparseRatMatrix::identity(1), SparseRatMatrix::identity(1)};
    SparseRatMatrix line(1, 1);
    line.set(0, 0, Rat(1));
    src.F[1] = {line, SparseRatMatrix::identity(1)};
    validate(src);
    FilteredChainMap bad{src, stupid_filtration(C), ChainMap::identity(C)};
    CHECK_THROWS_AS(validate(bad), Error);
}
