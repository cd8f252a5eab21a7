#pragma once

#include "hirschlab/hirsch.hpp"

namespace hirschlab {

/// All ascending q-element index tuples out of {0..m-1}, lexicographic.
std::vector<std::vector<int>> wedge_subsets(int m, int q);

/// Sign of inserting index s into the ascending tuple T (zero if s already there).
int insertion_sign(const std::vector<int>& T, int s);

struct KoszulInput {
    int E1_dim = 0;
    int E2_dim = 0;
    SparseRatMatrix psi;  // E2_dim x E1_dim
    int coeff_dim = 1;    // plain tensor factor
};

/// Weight-n divided-power Koszul complex: degree-q space is
/// Gamma_{n-q}(E1) (x) Lambda^q(E2) (x) coeff, with
///   e^[a] (x) f -> sum_j e^[a - delta_j] (x) psi(e_j) ^ f.
/// Basis ordered (divided monomial, wedge tuple, coefficient), outer to inner.
Complex koszul_complex(const KoszulInput& inp, int n);

struct KoszulProfileRow {
    int q = 0;
    int computed = 0;     // dim H^q of the built complex
    int closed_form = 0;  // dim Gamma_{n-q}(ker psi) (x) Lambda^q(coker psi) (x) coeff
};

struct KoszulProfile {
    bool match = true;
    std::vector<KoszulProfileRow> rows;
};

/// Cohomology of Kos(psi,n) computed two ways and compared.
KoszulProfile koszul_profile(const KoszulInput& inp, int n);

struct GrIdentifyResult {
    ChainMap iso;       // gr_F^i(trunc_N HE) -> coeff (x) Kos(psi, i)
    bool verified = true;
};

/// Exhibits gr_F^i of the truncated extension of an exterior-type datum as the
/// coefficient-tensored Koszul complex Kos(psi, i), with a bit-exact basis
/// bijection. Requires datum.exterior (NotExteriorType) and N >= i
/// (TruncationTooSmall).
GrIdentifyResult gr_identify(const HirschDatum& H, int i, int N);

}  // namespace hirschlab
