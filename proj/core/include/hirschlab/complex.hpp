#pragma once

#include "hirschlab/sparse_mat.hpp"

#include <string>
#include <vector>

namespace hirschlab {

/// Bounded cochain complex of based finite-dimensional rational vector spaces.
/// Degrees run over [min_deg, max_deg]; everything outside is zero. d[k] is the
/// differential from degree min_deg+k, shaped dim(q+1) x dim(q).
struct Complex {
    int min_deg = 0;
    int max_deg = -1;
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    std::vector<SparseRatMatrix> d;

    bool in_range(int q) const { return q >= min_deg && q <= max_deg; }
    int dim(int q) const { return in_range(q) ? dims[q - min_deg] : 0; }
    int total_dim() const;
    const std::vector<std::string>& labels_at(int q) const;
    /// Differential leaving degree q (zero matrix of the right shape outside range).
    SparseRatMatrix diff(int q) const;

    static Complex zero();
    /// Builder: dims/labels per degree starting at min_deg; differentials filled with set_diff.
    static Complex make(int min_deg, std::vector<int> dims,
                        std::vector<std::vector<std::string>> labels = {});
    void set_diff(int q, SparseRatMatrix m);
};

/// Throws DSquareNonzero naming the degree and a witness basis vector if d^2 != 0,
/// or ShapeMismatch for malformed differentials.
void validate(const Complex& C);

/// Degreewise map of complexes commuting with the differentials.
struct ChainMap {
    Complex source;
    Complex target;
    int min_deg = 0;
    std::vector<SparseRatMatrix> maps;  // maps[k]: degree min_deg+k

    SparseRatMatrix map(int q) const;
    void set_map(int q, SparseRatMatrix m);

    static ChainMap make(Complex source, Complex target);
    static ChainMap identity(const Complex& C);
};

/// Throws NotChainMap naming the first degree where commutation with d fails.
void validate(const ChainMap& f);

ChainMap compose(const ChainMap& g, const ChainMap& f);

struct CohomologyData {
    int dim = 0;
    SparseRatMatrix reps;    // dim(q) x dim; columns project to a basis of H^q
    SparseRatMatrix kernel;  // basis of ker d_q
    SparseRatMatrix image;   // basis of im d_{q-1}
};

CohomologyData cohomology(const Complex& C, int q);
int euler_characteristic(const Complex& C);

/// (C[k])^q = C^{q+k} with d_{C[k]} = (-1)^k d_C.
Complex shift(const Complex& C, int k);

struct ConeResult {
    Complex cone;          // MC(f)^q = source^{q+1} (+) target^q, d(x,y) = (-dx, f x + dy)
    ChainMap inclusion;    // target -> MC(f)
    ChainMap projection;   // MC(f) -> source[1]
};

ConeResult mapping_cone(const ChainMap& f);

Complex direct_sum(const std::vector<Complex>& parts);

bool is_acyclic(const Complex& C);

/// Matrix of H^q(f) with respect to the representative bases of cohomology().
SparseRatMatrix induced_cohomology_map(const ChainMap& f, int q, const CohomologyData& hsource,
                                       const CohomologyData& htarget);

struct QuasiIsoReport {
    bool overall = true;
    std::vector<std::pair<int, bool>> by_degree;  // (q, induced map iso?)
};

/// True iff H^q(source) -> H^q(target) is an isomorphism in every degree;
/// cross-checked against acyclicity of the mapping cone.
QuasiIsoReport is_quasi_iso(const ChainMap& f);

struct ExactnessReport {
    bool exact = true;
    // (node index, degree, homology dimension at that spot); only nonzero spots
    // are recorded when exact fails, all spots have dimension 0 otherwise.
    std::vector<std::tuple<int, int, int>> defects;
};

/// Exactness of A_0 -> A_1 -> ... -> A_k at interior nodes (all nodes when
/// augmented, i.e. with zero complexes glued on both ends). Throws
/// CompositionNonzero if consecutive maps do not compose to zero.
ExactnessReport check_exact_sequence(const std::vector<ChainMap>& maps, bool augmented);

/// Render a coordinate column as a readable combination of basis labels.
std::string render_combination(const std::vector<std::string>& labels, const SparseRatMatrix& column);

}  // namespace hirschlab
