#pragma once

#include "hirschlab/hirsch.hpp"

#include <array>
#include <map>

namespace hirschlab {

/// Diagram over a totally ordered component set: one payload per nonempty subset
/// up to depth m_max (subsets of size m_max + 1), restriction maps for covering
/// pairs, and optionally a global payload at the empty key with augmentation
/// restrictions to the singletons. Plain spaces and complexes are data with r = 0.
struct ComponentDiagram {
    std::vector<std::string> labels;  // the fixed total order is the vector order
    int m_max = 0;
    int r = 0;
    std::map<std::vector<int>, HirschDatum> payloads;
    std::map<std::pair<std::vector<int>, std::vector<int>>, ChainMap> restrictions;  // (from, to)

    bool has_global() const { return payloads.count({}) > 0; }
    const HirschDatum& payload(const std::vector<int>& key) const;
    const ChainMap& restriction(const std::vector<int>& from, const std::vector<int>& to) const;
};

/// Size-(m+1) subsets of the label indices in lexicographic order.
std::vector<std::vector<int>> level_subsets(const ComponentDiagram& diagram, int m);

/// Checks payload presence, restriction chain maps commuting with the operators,
/// and square compatibility of the two composite restrictions for every
/// codimension-2 covering pair.
void validate(const ComponentDiagram& diagram);

/// Direct sum of the level-m payloads (lex order of subsets).
Complex level_complex(const ComponentDiagram& diagram, int m);

/// Signed Cech block map between consecutive levels:
/// the block from a face mu = lambda minus its j-th element carries (-1)^j.
ChainMap cech_rho(const ComponentDiagram& diagram, int m);

struct DoubleComplex {
    std::vector<Complex> columns;  // column m = level-m sum
    std::vector<ChainMap> rho;     // rho[m]: columns[m] -> columns[m+1]
};

DoubleComplex cech_double_complex(const ComponentDiagram& diagram);

/// rho o rho = 0, every rho a chain map, every column a complex.
void validate(const DoubleComplex& DC);

struct Totalization {
    Complex total;  // degree n = sum over m of column_m^{n-m}; d = rho + (-1)^m d_col
    // origin[n - total.min_deg][b] = (column m, inner degree q, index inside column_m^q)
    std::vector<std::vector<std::array<int, 3>>> origin;
};

Totalization totalize(const DoubleComplex& DC);

/// Exactness of 0 -> global -> level_0 -> ... -> level_{m_max} -> 0 using the
/// diagram's augmentation restrictions from the empty key.
ExactnessReport resolution_check(const ComponentDiagram& diagram);

/// Everything the section-4 comparisons need, built from one diagram of data:
/// the totalized truncated extensions with the Hodge filtration, the global
/// truncated extension, the columnwise relative quotients, and the four arrows
/// of the comparison square
///     global HE  ---->  H (Cech total of HEs)
///        |                     |
///        v                     v
///     global rel ---->  relative Cech total.
struct HComplexResult {
    int N = 0;
    TruncatedHirschExtension global_HE;
    FilteredComplex global_HE_filtered;     // Hodge filtration

    FilteredComplex H;                      // totalization, Hodge filtration
    ChainMap from_global;                   // global HE -> H.C  (top arrow)

    QuotientComplexResult global_quotient;  // global relative complex
    FilteredComplex global_quotient_filtered;  // form (stupid) filtration
    ChainMap global_augmentation;           // global HE -> global rel (left arrow)

    FilteredComplex relative_total;         // Cech total of relative quotients, form filtration
    ChainMap to_relative;                   // H.C -> relative total (right arrow)
    ChainMap relative_from_global;          // global rel -> relative total (bottom arrow)
};

HComplexResult build_H_complex(const ComponentDiagram& diagram, int N);

/// Bit-exact commutation of the comparison square.
bool square_commutes(const HComplexResult& built);

/// Inclusion of the totalization truncated at small.N into the one truncated at
/// big.N, both built from the same diagram (monomials at the smaller bound are a
/// graded-lex prefix of the larger).
ChainMap h_total_inclusion(const ComponentDiagram& diagram, const HComplexResult& small,
                           const HComplexResult& big);

}  // namespace hirschlab
