#pragma once

#include "hirschlab/models.hpp"

#include <json.hpp>

namespace hirschlab {

using Json = nlohmann::json;

Json matrix_to_json(const SparseRatMatrix& m);
SparseRatMatrix matrix_from_json(const Json& j);

Json complex_to_json(const Complex& C);
Complex complex_from_json(const Json& j);  // validates d^2 = 0

Json chain_map_to_json(const ChainMap& f);
ChainMap chain_map_from_json(const Json& j);

Json datum_to_json(const HirschDatum& H);
HirschDatum datum_from_json(const Json& j);

Json filtered_to_json(const FilteredComplex& FC);
FilteredComplex filtered_from_json(const Json& j);

/// Model coordinates are 1-based on the wire.
Json model_to_json(const MonomialModel& model);
MonomialModel model_from_json(const Json& j);

Json diagram_to_json(const ComponentDiagram& D);
ComponentDiagram diagram_from_json(const Json& j);

Json page_to_json(const SpectralPage& page);

/// Parse with line/column diagnostics in the thrown ParseError.
Json parse_json_text(const std::string& text);
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

struct RoundtripResult {
    bool ok = false;
    std::string kind;
    std::string message;
};

/// Detect the artifact kind, load (validating), save, reload, compare.
RoundtripResult roundtrip_file(const std::string& path);

}  // namespace hirschlab
