#include "hirschlab/io.hpp"

#include <fstream>
#include <sstream>

namespace hirschlab {

namespace {

Error json_error(const std::string& what) { return Error("ParseError", what); }

int to_int(const Json& j, const char* what) {
    if (!j.is_number_integer())
        throw json_error(std::string(what) + " must be an integer");
    return j.get<int>();
}

std::vector<int> int_list(const Json& j, const char* what) {
    if (!j.is_array())
        throw json_error(std::string(what) + " must be a list");
    std::vector<int> out;
    for (const auto& x : j)
        out.push_back(to_int(x, what));
    return out;
}

}  // namespace

Json matrix_to_json(const SparseRatMatrix& m) {
    Json entries = Json::array();
    for (const auto& [i, j, v] : m.entries())
        entries.push_back(Json::array({i, j, v.str()}));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

SparseRatMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols"))
        throw json_error("matrix needs rows/cols");
    const int rows = to_int(j.at("rows"), "rows");
    const int cols = to_int(j.at("cols"), "cols");
    std::vector<std::tuple<int, int, Rat>> entries;
    if (j.contains("entries")) {
        for (const auto& e : j.at("entries")) {
            if (!e.is_array() || e.size() != 3)
                throw json_error("matrix entry must be [row, col, value]");
            const Rat v = e[2].is_string() ? Rat::parse(e[2].get<std::string>())
                                           : Rat(static_cast<long>(to_int(e[2], "entry")));
            entries.emplace_back(to_int(e[0], "row"), to_int(e[1], "col"), v);
        }
    }
    return SparseRatMatrix::from_entries(rows, cols, entries);
}

Json complex_to_json(const Complex& C) {
    Json spaces = Json::object();
    Json d = Json::object();
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        spaces[std::to_string(q)] = C.labels_at(q);
        d[std::to_string(q)] = matrix_to_json(C.diff(q));
    }
    return Json{{"min_deg", C.min_deg}, {"max_deg", C.max_deg}, {"spaces", spaces}, {"d", d}};
}

Complex complex_from_json(const Json& j) {
    const int lo = to_int(j.at("min_deg"), "min_deg");
    const int hi = to_int(j.at("max_deg"), "max_deg");
    if (hi < lo)
        return Complex::zero();
    std::vector<int> dims(hi - lo + 1, 0);
    std::vector<std::vector<std::string>> labels(hi - lo + 1);
    if (j.contains("spaces"))
        for (const auto& [key, val] : j.at("spaces").items()) {
            const int q = std::stoi(key);
            if (q < lo || q > hi)
                throw json_error("space degree " + key + " outside [min_deg, max_deg]");
            labels[q - lo] = val.get<std::vector<std::string>>();
            dims[q - lo] = static_cast<int>(labels[q - lo].size());
        }
    Complex C = Complex::make(lo, std::move(dims), std::move(labels));
    if (j.contains("d"))
        for (const auto& [key, val] : j.at("d").items()) {
            const int q = std::stoi(key);
            C.set_diff(q, matrix_from_json(val));
        }
    validate(C);
    return C;
}

Json chain_map_to_json(const ChainMap& f) {
    Json maps = Json::object();
    const int lo = std::min(f.source.min_deg, f.target.min_deg);
    const int hi = std::max(f.source.max_deg, f.target.max_deg);
    for (int q = lo; q <= hi; ++q)
        maps[std::to_string(q)] = matrix_to_json(f.map(q));
    return Json{{"source", complex_to_json(f.source)}, {"target", complex_to_json(f.target)}, {"maps", maps}};
}

ChainMap chain_map_from_json(const Json& j) {
    ChainMap f = ChainMap::make(complex_from_json(j.at("source")), complex_from_json(j.at("target")));
    for (const auto& [key, val] : j.at("maps").items()) {
        const int q = std::stoi(key);
        const SparseRatMatrix m = matrix_from_json(val);
        if (m.rows() != f.target.dim(q) || m.cols() != f.source.dim(q))
            throw json_error("chain map block at degree " + key + " has the wrong shape");
        f.set_map(q, m);
    }
    validate(f);
    return f;
}

Json datum_to_json(const HirschDatum& H) {
    Json out = complex_to_json(H.C);
    Json L = Json::array();
    for (int op = 0; op < H.r; ++op) {
        Json per = Json::object();
        for (int q = H.C.min_deg; q <= H.C.max_deg; ++q)
            per[std::to_string(q)] = matrix_to_json(H.op(op, q));
        L.push_back(per);
    }
    out["L"] = L;
    out["u_names"] = H.u_names;
    if (H.exterior)
        out["exterior"] = Json{{"gens", H.exterior->gens},
                               {"coeff_dim", H.exterior->coeff_dim},
                               {"psi", matrix_to_json(H.exterior->psi)}};
    return out;
}

HirschDatum datum_from_json(const Json& j) {
    Complex C = complex_from_json(j);
    const Json& L = j.at("L");
    HirschDatum H = HirschDatum::make(std::move(C), static_cast<int>(L.size()));
    if (j.contains("u_names"))
        H.u_names = j.at("u_names").get<std::vector<std::string>>();
    for (int op = 0; op < H.r; ++op)
        for (const auto& [key, val] : L[op].items())
            H.set_op(op, std::stoi(key), matrix_from_json(val));
    if (j.contains("exterior")) {
        ExteriorStructure ext;
        ext.gens = to_int(j.at("exterior").at("gens"), "gens");
        ext.coeff_dim = to_int(j.at("exterior").at("coeff_dim"), "coeff_dim");
        ext.psi = matrix_from_json(j.at("exterior").at("psi"));
        H.exterior = std::move(ext);
    }
    validate_hirsch_datum(H);
    return H;
}

Json filtered_to_json(const FilteredComplex& FC) {
    Json out = complex_to_json(FC.C);
    out["levels"] = FC.levels;
    Json F = Json::object();
    for (size_t k = 0; k < FC.levels.size(); ++k) {
        Json per = Json::object();
        for (int q = FC.C.min_deg; q <= FC.C.max_deg; ++q)
            per[std::to_string(q)] = matrix_to_json(FC.F[k][q - FC.C.min_deg]);
        F[std::to_string(FC.levels[k])] = per;
    }
    out["F"] = F;
    return out;
}

FilteredComplex filtered_from_json(const Json& j) {
    FilteredComplex FC;
    FC.C = complex_from_json(j);
    FC.levels = int_list(j.at("levels"), "levels");
    FC.F.resize(FC.levels.size());
    for (size_t k = 0; k < FC.levels.size(); ++k) {
        FC.F[k].assign(std::max(0, FC.C.max_deg - FC.C.min_deg + 1), SparseRatMatrix());
        const Json& per = j.at("F").at(std::to_string(FC.levels[k]));
        for (int q = FC.C.min_deg; q <= FC.C.max_deg; ++q) {
            const auto key = std::to_string(q);
            FC.F[k][q - FC.C.min_deg] =
                per.contains(key) ? matrix_from_json(per.at(key)) : SparseRatMatrix::zero(FC.C.dim(q), 0);
        }
    }
    validate(FC);
    return FC;
}

Json model_to_json(const MonomialModel& model) {
    auto one_based = [](const std::vector<std::vector<int>>& v) {
        Json out = Json::array();
        for (const auto& s : v) {
            Json t = Json::array();
            for (int i : s)
                t.push_back(i + 1);
            out.push_back(t);
        }
        return out;
    };
    Json conn = Json::array();
    for (const auto& N : model.connection)
        conn.push_back(matrix_to_json(N));
    Json out{{"n", model.n},         {"r", model.r},          {"t_map", one_based(model.t_map)},
             {"components", one_based(model.components)},     {"D", model.D},
             {"connection", conn}};
    if (!model.name.empty())
        out["name"] = model.name;
    return out;
}

MonomialModel model_from_json(const Json& j) {
    MonomialModel model;
    model.n = to_int(j.at("n"), "n");
    model.r = to_int(j.at("r"), "r");
    model.D = to_int(j.at("D"), "D");
    if (j.contains("name"))
        model.name = j.at("name").get<std::string>();
    auto zero_based = [](const Json& v, const char* what) {
        std::vector<std::vector<int>> out;
        for (const auto& s : v) {
            std::vector<int> t;
            for (const auto& i : s)
                t.push_back(to_int(i, what) - 1);
            out.push_back(t);
        }
        return out;
    };
    model.t_map = zero_based(j.at("t_map"), "t_map");
    model.components = zero_based(j.at("components"), "components");
    for (const auto& N : j.at("connection"))
        model.connection.push_back(matrix_from_json(N));
    validate_model(model);
    return model;
}

namespace {

std::string key_of_subset(const ComponentDiagram& D, const std::vector<int>& key) {
    std::string s;
    for (int k : key) {
        if (!s.empty())
            s += ",";
        s += D.labels[k];
    }
    return s;
}

std::vector<int> subset_of_key(const ComponentDiagram& D, const std::string& key) {
    std::vector<int> out;
    if (key.empty())
        return out;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto it = std::find(D.labels.begin(), D.labels.end(), item);
        if (it == D.labels.end())
            throw json_error("unknown component label '" + item + "'");
        out.push_back(static_cast<int>(it - D.labels.begin()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Json diagram_to_json(const ComponentDiagram& D) {
    Json payloads = Json::object();
    for (const auto& [key, H] : D.payloads)
        payloads[key_of_subset(D, key)] = datum_to_json(H);
    Json restrictions = Json::object();
    for (const auto& [fromto, f] : D.restrictions) {
        Json maps = Json::object();
        const Complex& src = D.payloads.at(fromto.first).C;
        for (int q = src.min_deg; q <= src.max_deg; ++q)
            maps[std::to_string(q)] = matrix_to_json(f.map(q));
        restrictions[key_of_subset(D, fromto.second) + "<-" + key_of_subset(D, fromto.first)] = maps;
    }
    return Json{{"labels", D.labels}, {"m_max", D.m_max}, {"r", D.r},
                {"payloads", payloads}, {"restrictions", restrictions}};
}

ComponentDiagram diagram_from_json(const Json& j) {
    ComponentDiagram D;
    D.labels = j.at("labels").get<std::vector<std::string>>();
    D.m_max = to_int(j.at("m_max"), "m_max");
    D.r = to_int(j.at("r"), "r");
    for (const auto& [key, val] : j.at("payloads").items())
        D.payloads.emplace(subset_of_key(D, key), datum_from_json(val));
    for (const auto& [key, val] : j.at("restrictions").items()) {
        const auto arrow = key.find("<-");
        if (arrow == std::string::npos)
            throw json_error("restriction key must look like 'to<-from'");
        const std::vector<int> to = subset_of_key(D, key.substr(0, arrow));
        const std::vector<int> from = subset_of_key(D, key.substr(arrow + 2));
        ChainMap f = ChainMap::make(D.payload(from).C, D.payload(to).C);
        for (const auto& [qkey, mat] : val.items())
            f.set_map(std::stoi(qkey), matrix_from_json(mat));
        validate(f);
        D.restrictions.emplace(std::make_pair(from, to), std::move(f));
    }
    validate(D);
    return D;
}

Json page_to_json(const SpectralPage& page) {
    Json entries = Json::array();
    for (const auto& [pq, dim] : page.entries)
        entries.push_back(Json::array({pq.first, pq.second, dim}));
    return Json{{"r", page.r}, {"entries", entries}};
}

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // Recover a line/column position from the byte offset.
        size_t line = 1, col = 1;
        for (size_t k = 0; k < text.size() && k + 1 < e.byte; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw json_error("invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what());
    }
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("IOError", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str());
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out)
        throw Error("IOError", "cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

RoundtripResult roundtrip_file(const std::string& path) {
    RoundtripResult res;
    const Json j = load_json_file(path);
    Json first, second;
    if (j.contains("schema")) {
        res.kind = "report";
        first = j;
        second = parse_json_text(first.dump());
    } else if (j.contains("t_map")) {
        res.kind = "model";
        first = model_to_json(model_from_json(j));
        second = model_to_json(model_from_json(first));
    } else if (j.contains("payloads")) {
        res.kind = "diagram";
        first = diagram_to_json(diagram_from_json(j));
        second = diagram_to_json(diagram_from_json(first));
    } else if (j.contains("levels")) {
        res.kind = "filtered_complex";
        first = filtered_to_json(filtered_from_json(j));
        second = filtered_to_json(filtered_from_json(first));
    } else if (j.contains("L")) {
        res.kind = "hirsch_datum";
        first = datum_to_json(datum_from_json(j));
        second = datum_to_json(datum_from_json(first));
    } else if (j.contains("maps")) {
        res.kind = "chain_map";
        first = chain_map_to_json(chain_map_from_json(j));
        second = chain_map_to_json(chain_map_from_json(first));
    } else if (j.contains("spaces")) {
        res.kind = "complex";
        first = complex_to_json(complex_from_json(j));
        second = complex_to_json(complex_from_json(first));
    } else if (j.contains("rows")) {
        res.kind = "matrix";
        first = matrix_to_json(matrix_from_json(j));
        second = matrix_to_json(matrix_from_json(first));
    } else {
        throw json_error("unrecognized artifact shape");
    }
    res.ok = first == second;
    res.message = res.ok ? "roundtrip stable" : "roundtrip changed the artifact";
    return res;
}

}  // namespace hirschlab
