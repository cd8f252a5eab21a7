#pragma once

#include "hirschlab/filtration.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hirschlab {

/// Exponent vector of a divided-power monomial u^[e] = u_1^[e_1]...u_r^[e_r].
using Exponents = std::vector<int>;

int weight(const Exponents& e);

/// All monomials of weight exactly k in r variables, ordered lexicographically
/// (largest first exponent first). One enumeration shared by every module.
std::vector<Exponents> pd_monomials_of_weight(int r, int k);

/// All monomials of weight <= N, graded-lex: weight ascending, lex within weight.
std::vector<Exponents> pd_monomials_upto(int r, int N);

std::string monomial_label(const Exponents& e, const std::vector<std::string>& var_names);

/// Divided-power product u^[a] * u^[b] = prod_i C(a_i+b_i, a_i) u^[a+b].
Rat pd_product_coeff(const Exponents& a, const Exponents& b);

/// Marker that C^q is the q-th exterior power of a fixed degree-1 generator space
/// tensored with a degree-0 coefficient space, with basis ordered
/// (wedge subset, coefficient) and L_j = (psi column j) wedge -.
struct ExteriorStructure {
    int gens = 0;       // number of exterior generators
    int coeff_dim = 1;  // dimension of the coefficient factor
    SparseRatMatrix psi;  // gens x r: 1-form images of the u_j in the generator basis
};

/// A complex together with r pairwise-anticommuting, square-zero, d-anticommuting
/// degree-(+1) operators ("left wedge by closed 1-forms").
struct HirschDatum {
    Complex C;
    int r = 0;
    // L[j][k]: operator u_j in degree C.min_deg + k, shaped dim(q+1) x dim(q).
    std::vector<std::vector<SparseRatMatrix>> L;
    std::vector<std::string> u_names;
    std::optional<ExteriorStructure> exterior;

    SparseRatMatrix op(int j, int q) const;

    static HirschDatum make(Complex C, int r, std::vector<std::string> u_names = {});
    void set_op(int j, int q, SparseRatMatrix m);
};

/// Checks L_j^2 = 0, L_j L_k + L_k L_j = 0 (j != k), d L_j + L_j d = 0.
/// Throws with the identity name, degree and witness.
void validate_hirsch_datum(const HirschDatum& H);

/// Finite-dimensional truncation of the divided-power Hirsch extension:
/// degree-q space is the sum over |e| <= N of u^[e] (x) C^q, with
///   d_H(u^[e] (x) c) = sum_j u^[e - delta_j] (x) L_j c + u^[e] (x) d c.
struct TruncatedHirschExtension {
    Complex total;
    int N = 0;
    HirschDatum datum;
    std::vector<Exponents> monomials;  // graded-lex, |e| <= N

    int monomial_count() const { return static_cast<int>(monomials.size()); }
    /// Index of u^[e] (x) (basis vector c of C^q) inside total^q.
    int index(int mono_idx, int q, int c_idx) const;
    /// Hodge filtration levels q + |e| per basis vector (condition q >= i - |e|).
    std::vector<std::vector<int>> hodge_levels() const;
    /// Column filtration levels -|e| per basis vector (u-degree at most -level).
    std::vector<std::vector<int>> weight_levels() const;
};

TruncatedHirschExtension truncated_extension(const HirschDatum& H, int N);

/// Decreasing Hodge filtration F^i = span{ u^[e] (x) c : deg c >= i - |e| }.
FilteredComplex hodge_filtration(const TruncatedHirschExtension& HE);

/// Column filtration by u-degree, stored at non-positive levels:
/// G^p = span{ u^[e] (x) c : |e| <= -p }, so gr at level p has pure u-degree -p.
FilteredComplex weight_filtration_G(const TruncatedHirschExtension& HE);

struct QuotientComplexResult {
    Complex Q;
    ChainMap projection;   // C -> Q
    HirschDatum induced;   // remaining operators on Q
    std::vector<int> remaining;  // original indices of the operators kept
    std::vector<SparseRatMatrix> reps;  // per degree: section of the projection
};

/// Degreewise quotient of C by sum_{j in J} im(L_j), with the remaining
/// operators descended (validated).
QuotientComplexResult quotient_complex(const HirschDatum& H, const std::vector<int>& J);

/// Exactness of 0 -> C_i[-1] --L_i--> C_{i-1} -> C_i -> 0, where C_k denotes the
/// quotient of C by the images of the first k operators.
ExactnessReport residue_sequence(const HirschDatum& H, int i);

struct LongSequenceReport {
    bool exact = true;
    // per degree: (q, dim H^{q-1}(C_i), dim H^q(C_{i-1}), dim H^q(C_i), ok)
    std::vector<std::tuple<int, int, int, int, bool>> rows;
    int failure_degree = 0;  // meaningful when !exact
};

/// Verifies short exactness of 0 -> H^{q-1}(C_i) -> H^q(C_{i-1}) -> H^q(C_i) -> 0
/// for every degree, reporting the first failing degree otherwise.
LongSequenceReport long_cohomology_sequence(const HirschDatum& H, int i);

/// u^[e] (x) c -> 0 for |e| > 0, c -> c mod sum im(L_j): the natural chain map
/// from the truncated extension onto the full quotient.
ChainMap augmentation(const TruncatedHirschExtension& HE, const QuotientComplexResult& quo);

struct StabilizationCertificate {
    int q = 0;
    // rows (N, w, rank of H^q(trunc_N) -> H^q(trunc_{N+w}))
    std::vector<std::tuple<int, int, int>> ranks;
};

struct StabilizationOptions {
    int N0 = -1;     // default: max_deg(C) + 2
    int window = 2;
    int N_max = -1;  // default: N0 + 8
};

struct StabilizedCohomology {
    int dim = 0;
    StabilizationCertificate certificate;
};

/// Dimension of the cohomology of the untruncated extension, certified by
/// agreement of the four transition ranks (N0, N0+1) x (w, w+1). Throws
/// NotStabilized carrying the rank table if no agreement occurs by N_max.
StabilizedCohomology stabilized_cohomology(const HirschDatum& H, int q,
                                           StabilizationOptions opts = {});

class NotStabilizedError : public Error {
public:
    explicit NotStabilizedError(StabilizationCertificate cert)
        : Error("NotStabilized", "transition ranks did not agree"), certificate(std::move(cert)) {}
    StabilizationCertificate certificate;
};

/// Inclusion trunc_N -> trunc_M (M >= N) as a chain map.
ChainMap truncation_inclusion(const TruncatedHirschExtension& small,
                              const TruncatedHirschExtension& big);

/// Extend f: C -> C' to u^[e] (x) c -> u^[e] (x) f(c) between truncations.
/// Requires f L_j = L'_j f for every j (CompatibilityViolation otherwise).
ChainMap extend_map(const ChainMap& f, const HirschDatum& H_source, const HirschDatum& H_target, int N);

/// Same, against truncations the caller already built (shared N).
ChainMap extend_map(const ChainMap& f, const TruncatedHirschExtension& hs,
                    const TruncatedHirschExtension& ht);

/// The mapping-cone datum on MC(f) with operators (-L, L').
HirschDatum cone_datum(const ChainMap& f, const HirschDatum& H_source, const HirschDatum& H_target,
                       bool flip_sign = false);

struct ConeCommutationResult {
    bool equal = true;
    int degree = 0;
    std::string detail;
};

/// Bit-exact comparison of the differential of MC(extend_map(f)) with the
/// truncated extension of the cone datum (operators (-L, L'), or (+L, L') when
/// flip_sign is set, which is expected to break).
ConeCommutationResult cone_commutation_check(const ChainMap& f, const HirschDatum& H_source,
                                             const HirschDatum& H_target, int N, bool flip_sign = false);

/// Multiplicative substitution u'_j -> sum_i A(i,j) u_i composed with g on
/// coefficients; A has natural-number entries, g L'_j must equal
/// (sum_i A(i,j) L_i) g.
ChainMap substitute_variables(const ChainMap& g, const HirschDatum& H_prime, const HirschDatum& H,
                              const SparseRatMatrix& A, int N);

}  // namespace hirschlab
