#pragma once

#include "hirschlab/cech.hpp"

namespace hirschlab {

/// Monomial normal-crossing configuration over a log point: ambient coordinates
/// x_1..x_n, log parameters t_j = prod of the x_i in t_map[j], components cut out
/// by coordinate subsets, polynomial truncation at total degree D, and a
/// strictly-upper-triangular residue matrix per parameter defining the connection
/// nabla = d + sum_j N_j (x) dlog t_j on a trivial coefficient bundle.
struct MonomialModel {
    std::string name;
    int n = 1;
    int r = 1;
    std::vector<std::vector<int>> t_map;       // 0-based, disjoint, nonempty
    std::vector<std::vector<int>> components;  // 0-based defining sets; empty list = base point
    int D = 3;
    std::vector<SparseRatMatrix> connection;   // r matrices, m x m, strictly upper triangular

    int coeff_dim() const { return connection.empty() ? 1 : connection[0].rows(); }
};

/// Throws ModelInvalid on malformed data (overlapping t_map, components missing a
/// log parameter, non-nilpotent residue matrices, ...).
void validate_model(const MonomialModel& model);

/// The fixed desk-scale models: log_point, nilpotent_rank2, xy_snc, xyz_snc,
/// two_log_vars. Throws UnknownModel otherwise.
MonomialModel canned(const std::string& name);
const std::vector<std::string>& canned_names();

struct ModelRing {
    std::vector<Exponents> monomials;  // by total degree, then lex
    std::map<Exponents, int> index;

    int dim() const { return static_cast<int>(monomials.size()); }
};

/// Functions on the whole configuration: monomials of degree <= D vanishing on no
/// component is the wrong condition -- kept are those supported OFF at least one
/// component's defining set. An empty component list keeps only the constant.
ModelRing global_ring(const MonomialModel& model);

/// Functions on the intersection cut out by the coordinates in `killed`.
ModelRing subspace_ring(const MonomialModel& model, const std::vector<int>& killed);

/// The log de Rham datum of a model: C^q = Lambda^q(dlog x) (x) ring (x) coeff
/// with basis ordered (wedge, ring monomial, coefficient), differential
///   d(x^a w v) = sum_i a_i x^a dlog x_i ^ w v + sum_j x^a dlog t_j ^ w N_j v,
/// and operators L_j = dlog t_j ^ -. Carries the exterior structure used by the
/// graded Koszul comparison.
struct ModelDGA {
    MonomialModel model;
    ModelRing ring;
    HirschDatum datum;
};

ModelDGA build_log_dga(const MonomialModel& model);

/// Same construction over an arbitrary quotient ring (component payloads).
ModelDGA build_log_dga_over(const MonomialModel& model, ModelRing ring);

/// Diagram with the global datum at the empty key, one payload per component
/// subset, and the monomial restriction maps. m_max is the true depth.
ComponentDiagram build_component_diagram(const MonomialModel& model);

/// Degree-0 structure-sheaf diagram (payloads are the rings, r = 0).
ComponentDiagram build_structure_sheaf_diagram(const MonomialModel& model);

/// The relative log de Rham complex built directly on the complement basis:
/// one dlog generator per t_map block is dropped and re-expressed through the
/// relation dlog t_j = 0. Independent of quotient_complex.
struct RelativeComplexResult {
    Complex rel;
    std::vector<int> dropped;               // dropped generator per block
    std::vector<SparseRatMatrix> projection;  // per degree: C^q -> rel^q substitution
};

RelativeComplexResult build_relative_quotient(const MonomialModel& model);
RelativeComplexResult build_relative_quotient_over(const MonomialModel& model, const ModelRing& ring);

/// Compares the direct relative complex against quotient_complex(datum, all):
/// builds the explicit degreewise isomorphism and checks it is a bit-exact chain
/// isomorphism. Returns false (never throws) on mismatch.
bool relative_matches_quotient(const ModelDGA& dga);

struct WeightBlock {
    Exponents multidegree;
    HirschDatum datum;
};

/// Direct-sum decomposition of a model datum by ring multidegree. Throws
/// NotBlockDiagonal if any operator mixes multidegrees.
std::vector<WeightBlock> weight_decompose(const ModelDGA& dga);

}  // namespace hirschlab
