#pragma once

#include "hirschlab/complex.hpp"

#include <map>
#include <vector>

namespace hirschlab {

/// Decreasing filtration on a complex, stored as explicit span matrices per
/// (level, degree). Below the smallest stored level the filtration is the whole
/// space, above the largest it is zero.
struct FilteredComplex {
    Complex C;
    std::vector<int> levels;                     // strictly increasing
    std::vector<std::vector<SparseRatMatrix>> F; // F[k][q - C.min_deg] spans F^{levels[k]} C^q

    bool has_level(int i) const;
    /// Span matrix of F^i C^q for arbitrary i (full below, zero above, next stored level in gaps).
    SparseRatMatrix span_at(int i, int q) const;
};

/// Build a filtration aligned with the basis: F^i = span of basis vectors whose
/// assigned level is >= i. flevels[q - C.min_deg][j] is the level of basis vector j.
FilteredComplex filtration_from_levels(Complex C, const std::vector<std::vector<int>>& flevels);

/// The trivial filtration F^min = C (one stored level).
FilteredComplex trivial_filtration(Complex C, int level = 0);

/// Stupid filtration F^i = (degrees >= i).
FilteredComplex stupid_filtration(Complex C);

/// Store zero spans for the levels max_stored+1 .. hi (the filtration is
/// unchanged as a filtration; gr at the new levels is zero).
FilteredComplex extend_levels_to(FilteredComplex FC, int hi);

/// Validates: levels increasing, spans shaped, F^{i+1} contained in F^i, d-stable,
/// and the smallest stored level exhausts the complex.
void validate(const FilteredComplex& FC);

struct FilteredChainMap {
    FilteredComplex source;
    FilteredComplex target;
    ChainMap map;  // underlying chain map (same complexes)
};

/// Validates the underlying chain map and F^i -> F^i for all stored levels.
void validate(const FilteredChainMap& ff);

struct GrData {
    Complex gr;                        // graded piece with the induced differential
    std::vector<SparseRatMatrix> reps; // per degree: C.dim(q) x gr.dim(q), representatives in F^i
};

GrData gr_data(const FilteredComplex& FC, int i);
Complex gr(const FilteredComplex& FC, int i);

/// Map of subquotients induced on gr^i by a filtered chain map. Throws
/// LevelMismatch if i is not stored on both sides.
ChainMap induced_gr_map(const FilteredChainMap& ff, int i);

struct FilteredQuasiIsoReport {
    bool overall = true;
    std::vector<std::pair<int, bool>> by_level;
};

FilteredQuasiIsoReport is_filtered_quasi_iso(const FilteredChainMap& ff, const std::vector<int>& levels);

/// One page of the spectral sequence of a finite decreasing filtration,
/// computed by the direct subquotient formula
///   E_r^{pq} = Z_r^{pq} / (Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2}),
///   Z_r^{pq} = { x in F^p C^{p+q} : dx in F^{p+r} C^{p+q+1} }.
struct SpectralPage {
    int r = 0;
    std::map<std::pair<int, int>, int> entries;              // (p,q) -> dimension, zero spots omitted
    std::map<std::pair<int, int>, SparseRatMatrix> d;        // d_r: (p,q) -> (p+r, q-r+1)

    int entry(int p, int q) const;
    SparseRatMatrix d_at(int p, int q) const;  // zero-shaped when absent
};

SpectralPage spectral_page(const FilteredComplex& FC, int r);

/// Page index from which every later page of a finite filtration is E_infinity.
int stable_page_index(const FilteredComplex& FC);

/// Internal recomputation check: entries of page r+1 equal the cohomology of page
/// r at each spot (and d_r o d_r = 0).
bool pages_consistent(const FilteredComplex& FC, int r);

/// Finite-filtration convergence: sum_p dim E_inf^{p,n-p} = dim H^n(C) for all n.
bool converges_to_cohomology(const FilteredComplex& FC);

struct DegenerationReport {
    bool degenerates = true;
    int first_nonzero_r = -1;
    int witness_p = 0, witness_q = 0;
};

/// True iff d_r = 0 for all r0 <= r <= stable page index.
DegenerationReport check_degeneration(const FilteredComplex& FC, int r0);

}  // namespace hirschlab
