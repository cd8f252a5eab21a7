#include "hirschlab/suites.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

namespace hirschlab {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

Json SuiteConfig::to_json() const {
    return Json{{"suite", suite},   {"model", model_name}, {"model_file", model_file},
                {"N", N},           {"N0", N0},            {"window", window},
                {"D", D},           {"i_max", i_max},      {"q_max", q_max},
                {"jobs", jobs},     {"seed", seed},        {"inject_fault", inject_fault}};
}

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (c.status != CheckStatus::Pass)
            return false;
    return true;
}

bool Report::any_fail() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail)
            return true;
    return false;
}

bool Report::any_inconclusive() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::Inconclusive)
            return true;
    return false;
}

int Report::exit_code() const {
    if (any_fail())
        return 1;
    if (any_inconclusive())
        return 3;
    return 0;
}

Json Report::to_json(bool with_times) const {
    Json out;
    out["schema"] = kReportSchema;
    out["version"] = kVersion;
    out["config"] = config.to_json();
    Json list = Json::array();
    int pass = 0, fail = 0, inconclusive = 0;
    for (const auto& c : checks) {
        Json rec{{"id", c.id}, {"anchor", c.anchor}, {"status", to_string(c.status)}, {"evidence", c.evidence}};
        if (with_times)
            rec["millis"] = c.millis;
        list.push_back(rec);
        if (c.status == CheckStatus::Pass)
            ++pass;
        else if (c.status == CheckStatus::Fail)
            ++fail;
        else
            ++inconclusive;
    }
    out["checks"] = list;
    out["summary"] = Json{{"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}};
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "cone-sign",   "acyclic-extension", "residue",     "stabilization", "koszul-gr",
        "spectral",    "cech-resolution",   "comparison",  "substitution",  "tooling",
        "all"};
    return names;
}

const std::vector<std::string>& fault_names() {
    static const std::vector<std::string> names = {"flip_cone_sign", "window_overrun",
                                                   "corrupt_restriction"};
    return names;
}

/* ---------------- deterministic generators ---------------- */

namespace {

int rnd(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

std::pair<SparseRatMatrix, SparseRatMatrix> random_invertible(std::mt19937_64& rng, int n) {
    SparseRatMatrix P = SparseRatMatrix::identity(n);
    SparseRatMatrix Pinv = SparseRatMatrix::identity(n);
    const int ops = n + 2;
    for (int k = 0; k < ops && n > 1; ++k) {
        const int i = rnd(rng, 0, n - 1);
        int j = rnd(rng, 0, n - 1);
        if (i == j)
            j = (j + 1) % n;
        const Rat c(rnd(rng, -2, 2) == 0 ? 1 : rnd(rng, -2, 2));
        // row_j += c * row_i on P; column-wise inverse on Pinv
        SparseRatMatrix E = SparseRatMatrix::identity(n);
        E.set(j, i, c);
        SparseRatMatrix Einv = SparseRatMatrix::identity(n);
        Einv.set(j, i, -c);
        P = E * P;
        Pinv = Pinv * Einv;
    }
    return {P, Pinv};
}

}  // namespace

Complex random_complex(std::mt19937_64& rng, int max_len, int max_dim) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        const int len = rnd(rng, 0, max_len);  // degrees 0..len
        std::vector<int> pairs(len + 1, 0), singles(len + 1, 0);
        for (int q = 0; q < len; ++q)
            pairs[q] = rnd(rng, 0, 1);
        for (int q = 0; q <= len; ++q)
            singles[q] = rnd(rng, 0, 1);
        std::vector<int> dims(len + 1, 0);
        for (int q = 0; q <= len; ++q) {
            dims[q] = (q > 0 ? pairs[q - 1] : 0) + (q < len ? pairs[q] : 0) + singles[q];
            dims[q] = std::min(dims[q], max_dim);
        }
        int total = 0;
        for (int v : dims)
            total += v;
        if (total == 0)
            continue;
        // Rebuild consistent pair counts after clamping.
        Complex C = Complex::make(0, dims);
        for (int q = 0; q < len; ++q) {
            // map the "outgoing" slot of degree q onto the "incoming" slot of q+1 when both exist
            const int out_slot = (q > 0 ? pairs[q - 1] : 0);
            if (pairs[q] == 1 && out_slot < C.dim(q) && 0 < C.dim(q + 1)) {
                SparseRatMatrix d(C.dim(q + 1), C.dim(q));
                d.set(0, out_slot, Rat(1));
                C.set_diff(q, std::move(d));
            }
        }
        // d^2 = 0 needs the incoming slot of q+1 to not be remapped; the incoming
        // slot is index 0, and the outgoing slot of q+1 is pairs[q] >= 1 when both
        // exist, so the ranges stay disjoint unless clamping merged them.
        bool ok = true;
        try {
            validate(C);
        } catch (const Error&) {
            ok = false;
        }
        if (!ok)
            continue;
        // Conjugate by random basis changes to hide the elementary structure.
        std::vector<std::pair<SparseRatMatrix, SparseRatMatrix>> bases;
        for (int q = 0; q <= len; ++q)
            bases.push_back(random_invertible(rng, C.dim(q)));
        Complex out = Complex::make(0, C.dims, C.labels);
        for (int q = 0; q < len; ++q)
            out.set_diff(q, bases[q + 1].first * (C.diff(q) * bases[q].second));
        validate(out);
        return out;
    }
    // Fallback: one generator in degree 0.
    return Complex::make(0, {1});
}

ChainMap random_null_homotopic(std::mt19937_64& rng, const Complex& A, const Complex& B) {
    // f = d_B h + h d_A for random h of degree -1.
    std::vector<SparseRatMatrix> h;  // h[q]: A^q -> B^{q-1}
    const int lo = std::min(A.min_deg, B.min_deg);
    const int hi = std::max(A.max_deg, B.max_deg);
    std::vector<SparseRatMatrix> hq(hi - lo + 2);
    auto h_at = [&](int q) -> SparseRatMatrix {
        if (q < lo || q > hi + 1)
            return SparseRatMatrix::zero(B.dim(q - 1), A.dim(q));
        return hq[q - lo];
    };
    for (int q = lo; q <= hi + 1; ++q) {
        SparseRatMatrix m(B.dim(q - 1), A.dim(q));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                if (rnd(rng, 0, 2) == 0)
                    m.set(i, j, Rat(rnd(rng, -2, 2)));
        hq[q - lo] = std::move(m);
    }
    ChainMap f = ChainMap::make(A, B);
    for (int q = lo; q <= hi; ++q)
        f.set_map(q, B.diff(q - 1) * h_at(q) + h_at(q + 1) * A.diff(q));
    validate(f);
    return f;
}

HirschDatum exterior_tensor_datum(const Complex& base, int r) {
    std::vector<std::vector<std::vector<int>>> blocks;  // per k: subsets
    for (int k = 0; k <= r; ++k)
        blocks.push_back(wedge_subsets(r, k));

    const int lo = base.min_deg, hi = base.max_deg + r;
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    // Basis at degree q: for k ascending, for T lex, for base basis of degree q-k.
    for (int q = lo; q <= hi; ++q) {
        int dq = 0;
        std::vector<std::string> lab;
        for (int k = 0; k <= r; ++k)
            for (const auto& T : blocks[k]) {
                for (const auto& s : base.labels_at(q - k)) {
                    std::string t;
                    for (int x : T)
                        t += (t.empty() ? "" : "^") + ("th" + std::to_string(x + 1));
                    lab.push_back(t.empty() ? s : s + "*" + t);
                }
                dq += base.dim(q - k);
            }
        dims.push_back(dq);
        labels.push_back(std::move(lab));
    }
    Complex C = Complex::make(lo, std::move(dims), std::move(labels));

    // Offsets of the (k, T) block inside degree q.
    auto offset = [&](int q, int k, int t_idx) {
        int off = 0;
        for (int kk = 0; kk <= r; ++kk)
            for (size_t tt = 0; tt < blocks[kk].size(); ++tt) {
                if (kk == k && static_cast<int>(tt) == t_idx)
                    return off;
                off += base.dim(q - kk);
            }
        return off;
    };
    std::vector<std::map<std::vector<int>, int>> t_index(r + 1);
    for (int k = 0; k <= r; ++k)
        for (size_t tt = 0; tt < blocks[k].size(); ++tt)
            t_index[k][blocks[k][tt]] = static_cast<int>(tt);

    HirschDatum H = HirschDatum::make(C, r);
    for (int q = lo; q <= hi; ++q) {
        SparseRatMatrix d(C.dim(q + 1), C.dim(q));
        std::vector<SparseRatMatrix> lops(r, SparseRatMatrix(C.dim(q + 1), C.dim(q)));
        for (int k = 0; k <= r; ++k)
            for (size_t tt = 0; tt < blocks[k].size(); ++tt) {
                const auto& T = blocks[k][tt];
                const int coff = offset(q, k, static_cast<int>(tt));
                // differential acts on the base factor only
                const SparseRatMatrix db = base.diff(q - k);
                const int roff_d = offset(q + 1, k, static_cast<int>(tt));
                for (const auto& [i, j, v] : db.entries())
                    d.set(roff_d + i, coff + j, v);
                // wedge operators: theta_j ^ (a * theta_T) = (-1)^{deg a} a * (theta_j ^ theta_T)
                for (int j = 0; j < r; ++j) {
                    const int sgn = insertion_sign(T, j);
                    if (sgn == 0)
                        continue;
                    std::vector<int> T2 = T;
                    T2.insert(std::lower_bound(T2.begin(), T2.end(), j), j);
                    const int roff = offset(q + 1, k + 1, t_index[k + 1].at(T2));
                    const int deg_a = q - k;
                    const Rat val(((deg_a % 2 == 0 ? 1 : -1) * sgn));
                    for (int b = 0; b < base.dim(q - k); ++b)
                        lops[j].set(roff + b, coff + b, val);
                }
            }
        C.set_diff(q, std::move(d));
        for (int j = 0; j < r; ++j)
            H.L[j][q - lo] = std::move(lops[j]);
    }
    H.C = std::move(C);
    validate_hirsch_datum(H);
    return H;
}

ChainMap exterior_tensor_map(const ChainMap& g, int r) {
    const HirschDatum DA = exterior_tensor_datum(g.source, r);
    const HirschDatum DB = exterior_tensor_datum(g.target, r);
    std::vector<std::vector<std::vector<int>>> blocks;
    for (int k = 0; k <= r; ++k)
        blocks.push_back(wedge_subsets(r, k));
    auto offset = [&](const Complex& base, int q, int k_target, int t_target) {
        int off = 0;
        for (int kk = 0; kk <= r; ++kk)
            for (size_t tt = 0; tt < blocks[kk].size(); ++tt) {
                if (kk == k_target && static_cast<int>(tt) == t_target)
                    return off;
                off += base.dim(q - kk);
            }
        return off;
    };
    ChainMap f = ChainMap::make(DA.C, DB.C);
    for (int q = f.min_deg; q <= std::max(DA.C.max_deg, DB.C.max_deg); ++q) {
        SparseRatMatrix m(DB.C.dim(q), DA.C.dim(q));
        for (int k = 0; k <= r; ++k)
            for (size_t tt = 0; tt < blocks[k].size(); ++tt) {
                const int coff = offset(g.source, q, k, static_cast<int>(tt));
                const int roff = offset(g.target, q, k, static_cast<int>(tt));
                for (const auto& [i, j, v] : g.map(q - k).entries())
                    m.set(roff + i, coff + j, v);
            }
        f.set_map(q, std::move(m));
    }
    validate(f);
    return f;
}

/* ---------------- suite machinery ---------------- */

namespace {

using Task = std::function<CheckRecord()>;

CheckRecord run_one(const Task& t) {
    const auto start = std::chrono::steady_clock::now();
    CheckRecord rec;
    try {
        rec = t();
    } catch (const NotStabilizedError& e) {
        rec.status = CheckStatus::Inconclusive;
        Json table = Json::array();
        for (const auto& [N, w, rk] : e.certificate.ranks)
            table.push_back(Json::array({N, w, rk}));
        rec.evidence["rank_table"] = table;
        rec.evidence["error"] = e.what();
    } catch (const Error& e) {
        rec.status = CheckStatus::Fail;
        rec.evidence["error"] = e.what();
    } catch (const std::exception& e) {
        rec.status = CheckStatus::Fail;
        rec.evidence["error"] = e.what();
    }
    rec.millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

struct NamedTask {
    std::string id;
    std::string anchor;
    Task body;
};

CheckRecord finish(const NamedTask& nt) {
    CheckRecord rec = run_one(nt.body);
    rec.id = nt.id;
    rec.anchor = nt.anchor;
    return rec;
}

MonomialModel resolve_model(const SuiteConfig& cfg, const std::string& fallback) {
    MonomialModel model;
    if (!cfg.model_file.empty())
        model = model_from_json(load_json_file(cfg.model_file));
    else if (!cfg.model_name.empty())
        model = canned(cfg.model_name);
    else
        model = canned(fallback);
    if (cfg.D >= 0)
        model.D = cfg.D;
    return model;
}

std::vector<MonomialModel> model_set(const SuiteConfig& cfg, const std::vector<std::string>& fallback) {
    if (!cfg.model_file.empty() || !cfg.model_name.empty())
        return {resolve_model(cfg, "")};
    std::vector<MonomialModel> out;
    for (const auto& name : fallback)
        out.push_back(canned(name));
    return out;
}

bool trivial_connection(const MonomialModel& model) {
    for (const auto& N : model.connection)
        if (!N.is_zero())
            return false;
    return true;
}

MonomialModel with_nilpotent_coefficients(MonomialModel model) {
    SparseRatMatrix N2(2, 2);
    N2.set(0, 1, Rat(1));
    model.connection.assign(model.r, SparseRatMatrix::zero(2, 2));
    model.connection[0] = N2;
    model.name += "+nilpotent";
    return model;
}

// The rank-one connection with a unit eigenvalue: not locally nilpotent, and the
// tower short sequences are expected to break on it.
HirschDatum unit_eigenvalue_datum() {
    Complex C = Complex::make(0, {1, 1}, {{"e"}, {"e*dlogt"}});
    SparseRatMatrix one(1, 1);
    one.set(0, 0, Rat(1));
    C.set_diff(0, one);
    HirschDatum H = HirschDatum::make(std::move(C), 1);
    H.set_op(0, 0, one);
    return H;
}

/* ---------- per-suite task builders ---------- */

void build_cone_sign(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    const bool flipped = cfg.inject_fault == "flip_cone_sign";
    tasks.push_back(
        {"cone-sign.minus", "mapping cone of the extended map carries the (-L, L') extension differential",
         [cfg, flipped]() {
             CheckRecord rec;
             int equal_count = 0;
             Json insts = Json::array();
             for (int inst = 0; inst < 20; ++inst) {
                 std::mt19937_64 rng(cfg.seed + 101 + inst);
                 const int r = 1 + inst % 2;
                 const int N = 1 + inst % 4;
                 const Complex A = random_complex(rng, 2, r == 1 ? 3 : 1);
                 const Complex B = random_complex(rng, 2, r == 1 ? 3 : 1);
                 const HirschDatum DA = exterior_tensor_datum(A, r);
                 const HirschDatum DB = exterior_tensor_datum(B, r);
                 const ChainMap f = exterior_tensor_map(random_null_homotopic(rng, A, B), r);
                 const ConeCommutationResult res = cone_commutation_check(f, DA, DB, N, flipped);
                 if (res.equal)
                     ++equal_count;
                 insts.push_back(Json{{"r", r}, {"N", N}, {"equal", res.equal}});
             }
             rec.status = equal_count == 20 ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence = Json{{"instances", insts}, {"equal", equal_count}};
             return rec;
         }});
    tasks.push_back({"cone-sign.plus-breaks", "the (+L, L') sign variant is detected as wrong",
                     [cfg]() {
                         CheckRecord rec;
                         int mismatches = 0;
                         for (int inst = 0; inst < 20; ++inst) {
                             std::mt19937_64 rng(cfg.seed + 101 + inst);
                             const int r = 1 + inst % 2;
                             const int N = 1 + inst % 4;
                             const Complex A = random_complex(rng, 2, r == 1 ? 3 : 1);
                             const Complex B = random_complex(rng, 2, r == 1 ? 3 : 1);
                             const HirschDatum DA = exterior_tensor_datum(A, r);
                             const HirschDatum DB = exterior_tensor_datum(B, r);
                             const ChainMap f = exterior_tensor_map(random_null_homotopic(rng, A, B), r);
                             if (!cone_commutation_check(f, DA, DB, N, true).equal)
                                 ++mismatches;
                         }
                         rec.status = mismatches >= 1 ? CheckStatus::Pass : CheckStatus::Fail;
                         rec.evidence = Json{{"mismatches", mismatches}, {"out_of", 20}};
                         return rec;
                     }});
}

void build_acyclic_extension(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    tasks.push_back(
        {"acyclic.extension-acyclic", "extensions of acyclic complexes are acyclic (stabilized, degrees 0..3)",
         [cfg]() {
             CheckRecord rec;
             Json insts = Json::array();
             bool ok = true;
             for (int inst = 0; inst < 10; ++inst) {
                 std::mt19937_64 rng(cfg.seed + 202 + inst);
                 const int r = inst < 7 ? 1 : 2;
                 const Complex E = random_complex(rng, 1, r == 1 ? 2 : 1);
                 const Complex A = mapping_cone(ChainMap::identity(E)).cone;
                 const HirschDatum H = exterior_tensor_datum(A, r);
                 Json dims = Json::array();
                 for (int q = 0; q <= 3; ++q) {
                     const StabilizedCohomology sc = stabilized_cohomology(H, q);
                     dims.push_back(sc.dim);
                     ok = ok && sc.dim == 0;
                 }
                 insts.push_back(Json{{"r", r}, {"dims", dims}});
             }
             rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence["instances"] = insts;
             return rec;
         }});
    tasks.push_back(
        {"acyclic.quasi-iso-extends", "extensions of quasi-isomorphisms are quasi-isomorphisms at each truncation",
         [cfg]() {
             CheckRecord rec;
             bool ok = true;
             Json insts = Json::array();
             for (int inst = 0; inst < 10; ++inst) {
                 std::mt19937_64 rng(cfg.seed + 303 + inst);
                 const int r = inst < 7 ? 1 : 2;
                 const Complex A = random_complex(rng, 2, r == 1 ? 2 : 1);
                 const Complex E = random_complex(rng, 1, r == 1 ? 2 : 1);
                 const Complex B = direct_sum({A, mapping_cone(ChainMap::identity(E)).cone});
                 ChainMap g = ChainMap::make(A, B);
                 for (int q = A.min_deg; q <= A.max_deg; ++q) {
                     SparseRatMatrix m(B.dim(q), A.dim(q));
                     for (int i = 0; i < A.dim(q); ++i)
                         m.set(i, i, Rat(1));
                     g.set_map(q, std::move(m));
                 }
                 validate(g);
                 const HirschDatum DA = exterior_tensor_datum(A, r);
                 const HirschDatum DB = exterior_tensor_datum(B, r);
                 const ChainMap f = exterior_tensor_map(g, r);
                 Json verdicts = Json::array();
                 for (int N = 1; N <= 3; ++N) {
                     const bool qi = is_quasi_iso(extend_map(f, DA, DB, N)).overall;
                     verdicts.push_back(qi);
                     ok = ok && qi;
                 }
                 insts.push_back(Json{{"r", r}, {"truncations", verdicts}});
             }
             rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence["instances"] = insts;
             return rec;
         }});
}

void build_residue(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    const std::vector<std::string> names = {"log_point", "xy_snc", "xyz_snc", "two_log_vars"};
    for (const MonomialModel& base : model_set(cfg, names)) {
        MonomialModel model = base;
        model.D = std::min(model.D, 3);
        if (cfg.D >= 0)
            model.D = cfg.D;
        tasks.push_back(
            {"residue.sequence." + model.name,
             "the wedge/projection short sequence of complexes is exact in every weight block",
             [model]() {
                 CheckRecord rec;
                 const ModelDGA dga = build_log_dga(model);
                 const auto blocks = weight_decompose(dga);
                 bool ok = true;
                 int checked = 0;
                 for (const WeightBlock& blk : blocks)
                     for (int i = 1; i <= model.r; ++i) {
                         const ExactnessReport er = residue_sequence(blk.datum, i);
                         ok = ok && er.exact;
                         ++checked;
                     }
                 rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
                 rec.evidence = Json{{"blocks", blocks.size()}, {"sequences", checked}};
                 return rec;
             }});
        if (trivial_connection(model)) {
            const int q_max = cfg.q_max;
            tasks.push_back(
                {"residue.long-sequence." + model.name,
                 "short exactness of the induced cohomology sequences on pole-free blocks",
                 [model, q_max]() {
                     CheckRecord rec;
                     const ModelDGA dga = build_log_dga(model);
                     const auto blocks = weight_decompose(dga);
                     bool ok = true;
                     int checked = 0;
                     for (const WeightBlock& blk : blocks)
                         for (int i = 1; i <= model.r; ++i) {
                             const LongSequenceReport lr = long_cohomology_sequence(blk.datum, i);
                             for (const auto& [q, a, b, c, rowok] : lr.rows)
                                 if (q <= q_max) {
                                     ok = ok && rowok;
                                     ++checked;
                                 }
                         }
                     rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
                     rec.evidence = Json{{"blocks", blocks.size()}, {"rows_checked", checked}};
                     return rec;
                 }});
        }
    }
    tasks.push_back({"residue.unit-eigenvalue-fails",
                     "a unit-eigenvalue connection breaks the cohomology short sequence, as predicted",
                     []() {
                         CheckRecord rec;
                         const LongSequenceReport lr = long_cohomology_sequence(unit_eigenvalue_datum(), 1);
                         rec.status = lr.exact ? CheckStatus::Fail : CheckStatus::Pass;
                         rec.evidence = Json{{"failure_degree", lr.failure_degree}};
                         return rec;
                     }});
}

void build_stabilization(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    struct Item {
        MonomialModel model;
        std::vector<int> pinned;  // expected dims per degree, empty = oracle only
    };
    std::vector<Item> items;
    if (!cfg.model_file.empty() || !cfg.model_name.empty()) {
        items.push_back({resolve_model(cfg, ""), {}});
    } else {
        items.push_back({canned("log_point"), {1, 0}});
        items.push_back({canned("nilpotent_rank2"), {2, 0}});
        items.push_back({canned("xy_snc"), {}});
        items.push_back({with_nilpotent_coefficients(canned("xy_snc")), {}});
        items.push_back({canned("two_log_vars"), {}});
    }
    for (const Item& item : items) {
        const MonomialModel model = item.model;
        const std::vector<int> pinned = item.pinned;
        const SuiteConfig c = cfg;
        tasks.push_back(
            {"stabilization." + model.name,
             "stabilized cohomology of the truncated extension equals cohomology of the relative complex",
             [model, pinned, c]() {
                 CheckRecord rec;
                 const ModelDGA dga = build_log_dga(model);
                 const RelativeComplexResult rel = build_relative_quotient(model);
                 const auto blocks = weight_decompose(dga);
                 bool ok = true;
                 Json rows = Json::array();
                 Json certs = Json::array();
                 for (int q = 0; q <= c.q_max; ++q) {
                     const int expected = cohomology(rel.rel, q).dim;
                     int got = 0;
                     for (const WeightBlock& blk : blocks) {
                         StabilizationOptions opts;
                         opts.N0 = c.N0;
                         opts.window = c.window;
                         if (c.inject_fault == "window_overrun") {
                             opts.N0 = c.N0 < 0 ? blk.datum.C.max_deg + 2 : c.N0;
                             opts.N_max = opts.N0;  // leaves no room for the four ranks
                         }
                         const StabilizedCohomology sc = stabilized_cohomology(blk.datum, q, opts);
                         got += sc.dim;
                         if (q == 0) {
                             Json table = Json::array();
                             for (const auto& [N, w, rk] : sc.certificate.ranks)
                                 table.push_back(Json::array({N, w, rk}));
                             certs.push_back(table);
                         }
                     }
                     bool row_ok = got == expected;
                     if (q < static_cast<int>(pinned.size()))
                         row_ok = row_ok && got == pinned[q];
                     ok = ok && row_ok;
                     rows.push_back(Json{{"q", q}, {"stabilized", got}, {"relative", expected}});
                 }
                 rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
                 rec.evidence = Json{{"dims", rows}, {"certificates_q0", certs}};
                 return rec;
             }});
    }
}

void build_koszul(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    for (const MonomialModel& model : model_set(cfg, canned_names())) {
        const int i_max = cfg.i_max;
        tasks.push_back(
            {"koszul.gr-identify." + model.name,
             "graded pieces of the filtered truncated extension are the divided-power Koszul complexes",
             [model, i_max]() {
                 CheckRecord rec;
                 const ModelDGA dga = build_log_dga(model);
                 bool ok = true;
                 Json rows = Json::array();
                 for (int i = 0; i <= i_max; ++i) {
                     const GrIdentifyResult res = gr_identify(dga.datum, i, i_max);
                     ok = ok && res.verified;
                     rows.push_back(Json{{"i", i}, {"verified", res.verified}});
                 }
                 rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
                 rec.evidence["levels"] = rows;
                 return rec;
             }});
    }
    tasks.push_back(
        {"koszul.profile-random", "Koszul cohomology matches the kernel/cokernel closed form on random maps",
         [cfg]() {
             CheckRecord rec;
             bool ok = true;
             Json rows = Json::array();
             for (int inst = 0; inst < 20; ++inst) {
                 std::mt19937_64 rng(cfg.seed + 404 + inst);
                 KoszulInput inp;
                 inp.E1_dim = rnd(rng, 0, 3);
                 inp.E2_dim = rnd(rng, 0, 3);
                 inp.psi = SparseRatMatrix(inp.E2_dim, inp.E1_dim);
                 for (int i = 0; i < inp.E2_dim; ++i)
                     for (int j = 0; j < inp.E1_dim; ++j)
                         if (rnd(rng, 0, 1) == 0)
                             inp.psi.set(i, j, Rat(rnd(rng, -2, 2)));
                 const int n = rnd(rng, 0, 3);
                 const KoszulProfile prof = koszul_profile(inp, n);
                 ok = ok && prof.match;
                 rows.push_back(Json{{"E1", inp.E1_dim}, {"E2", inp.E2_dim}, {"n", n}, {"match", prof.match}});
             }
             rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence["instances"] = rows;
             return rec;
         }});
}

void build_spectral(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    const std::vector<std::string> names = {"log_point", "xy_snc", "xyz_snc", "two_log_vars"};
    for (const MonomialModel& model : model_set(cfg, names)) {
        if (!trivial_connection(model))
            continue;  // the column-filtration page claims are for pole-free data
        const int N = cfg.N;
        tasks.push_back(
            {"spectral.columns." + model.name,
             "second page of the column filtration lives in u-degree 0 (interior columns vanish) and "
             "equals relative cohomology there; the finite filtration converges to total cohomology",
             [model, N]() {
                 CheckRecord rec;
                 const ModelDGA dga = build_log_dga(model);
                 const RelativeComplexResult rel = build_relative_quotient(model);
                 const auto blocks = weight_decompose(dga);
                 bool interior_zero = true, converges = true;
                 std::map<int, int> column0;  // q -> accumulated E_2 dimension at u-degree 0
                 for (const WeightBlock& blk : blocks) {
                     const TruncatedHirschExtension HE = truncated_extension(blk.datum, N);
                     const FilteredComplex G = weight_filtration_G(HE);
                     const SpectralPage E2 = spectral_page(G, 2);
                     for (const auto& [pq, dim] : E2.entries) {
                         const int u_degree = -pq.first;
                         if (u_degree != 0 && u_degree != N && dim != 0)
                             interior_zero = false;
                         if (u_degree == 0)
                             column0[pq.second] += dim;
                     }
                     const SpectralPage Einf = spectral_page(G, stable_page_index(G));
                     for (int n = G.C.min_deg; n <= G.C.max_deg; ++n) {
                         int total = 0;
                         for (int p : G.levels)
                             total += Einf.entry(p, n - p);
                         if (total != cohomology(G.C, n).dim)
                             converges = false;
                     }
                 }
                 bool zero_column_matches = true;
                 Json rows = Json::array();
                 for (int q = 0; q <= rel.rel.max_deg; ++q) {
                     const int expected = cohomology(rel.rel, q).dim;
                     const int got = column0.count(q) ? column0[q] : 0;
                     if (got != expected)
                         zero_column_matches = false;
                     rows.push_back(Json{{"q", q}, {"E2_u0", got}, {"relative", expected}});
                 }
                 rec.status = (interior_zero && zero_column_matches && converges) ? CheckStatus::Pass
                                                                                  : CheckStatus::Fail;
                 rec.evidence = Json{{"interior_zero", interior_zero},
                                     {"zero_column", rows},
                                     {"converges", converges},
                                     {"N", N}};
                 return rec;
             }});
    }
    tasks.push_back({"spectral.log-point-d1",
                     "the column filtration of the basic one-parameter extension does not degenerate at page 1",
                     []() {
                         CheckRecord rec;
                         const ModelDGA dga = build_log_dga(canned("log_point"));
                         const TruncatedHirschExtension HE = truncated_extension(dga.datum, 3);
                         const FilteredComplex G = weight_filtration_G(HE);
                         const DegenerationReport dr = check_degeneration(G, 1);
                         rec.status = !dr.degenerates ? CheckStatus::Pass : CheckStatus::Fail;
                         rec.evidence = Json{{"first_nonzero_r", dr.first_nonzero_r}};
                         return rec;
                     }});
    tasks.push_back({"spectral.form-filtration-report",
                     "degeneration behaviour of the form filtration on the relative complex (reported only)",
                     []() {
                         CheckRecord rec;
                         const RelativeComplexResult rel = build_relative_quotient(canned("xy_snc"));
                         const FilteredComplex F = stupid_filtration(rel.rel);
                         const DegenerationReport dr = check_degeneration(F, 1);
                         rec.status = CheckStatus::Pass;  // computed, not asserted
                         rec.evidence = Json{{"degenerates_at_1", dr.degenerates},
                                             {"first_nonzero_r", dr.first_nonzero_r}};
                         return rec;
                     }});
}

void build_cech_resolution(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    tasks.push_back({"cech.resolution.xy", "structure functions resolve through the component covers (two branches)",
                     [cfg]() {
                         CheckRecord rec;
                         MonomialModel model = canned("xy_snc");
                         model.D = 2;
                         const ComponentDiagram D = build_structure_sheaf_diagram(model);
                         const ExactnessReport er = resolution_check(D);
                         const int global = D.payload({}).C.dim(0);
                         const int level0 = level_complex(D, 0).dim(0);
                         const int level1 = level_complex(D, 1).dim(0);
                         const bool dims_ok = global == 5 && level0 == 6 && level1 == 1;
                         rec.status = (er.exact && dims_ok) ? CheckStatus::Pass : CheckStatus::Fail;
                         rec.evidence = Json{{"dims", Json::array({global, level0, level1})},
                                             {"exact", er.exact}};
                         return rec;
                     }});
    for (int D_bound = 2; D_bound <= 4; ++D_bound) {
        tasks.push_back({"cech.resolution.xyz.D" + std::to_string(D_bound),
                         "structure functions resolve through the component covers (three branches)",
                         [D_bound]() {
                             CheckRecord rec;
                             MonomialModel model = canned("xyz_snc");
                             model.D = D_bound;
                             const ExactnessReport er =
                                 resolution_check(build_structure_sheaf_diagram(model));
                             rec.status = er.exact ? CheckStatus::Pass : CheckStatus::Fail;
                             rec.evidence = Json{{"D", D_bound}, {"exact", er.exact}};
                             return rec;
                         }});
    }
    tasks.push_back({"cech.resolution.single-component", "one component: the augmentation is an isomorphism",
                     []() {
                         CheckRecord rec;
                         MonomialModel model;
                         model.name = "single";
                         model.n = 1;
                         model.r = 1;
                         model.t_map = {{0}};
                         model.components = {{0}};
                         model.D = 2;
                         model.connection = {SparseRatMatrix::zero(1, 1)};
                         const ExactnessReport er = resolution_check(build_structure_sheaf_diagram(model));
                         rec.status = er.exact ? CheckStatus::Pass : CheckStatus::Fail;
                         rec.evidence["exact"] = er.exact;
                         return rec;
                     }});
}

void build_comparison(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    std::vector<MonomialModel> models;
    if (!cfg.model_file.empty() || !cfg.model_name.empty()) {
        models.push_back(resolve_model(cfg, ""));
    } else {
        models.push_back(canned("xy_snc"));
        models.push_back(with_nilpotent_coefficients(canned("xy_snc")));
    }
    for (const MonomialModel& model : models) {
        const SuiteConfig c = cfg;
        tasks.push_back(
            {"comparison." + model.name,
             "cover comparisons: relative-to-total and extension-to-total are filtered quasi-isomorphisms, "
             "the two zigzag legs hold, and the comparison square commutes bit-exactly",
             [model, c]() {
                 CheckRecord rec;
                 ComponentDiagram D = build_component_diagram(model);
                 if (c.inject_fault == "corrupt_restriction") {
                     // Flip the sign of one covering restriction; squares must catch it.
                     for (auto& [key, f] : D.restrictions)
                         if (key.first.size() == 1 && key.second.size() == 2) {
                             for (int q = f.source.min_deg; q <= f.source.max_deg; ++q)
                                 f.set_map(q, f.map(q).scaled(Rat(-1)));
                             break;
                         }
                 }
                 const HComplexResult built = build_H_complex(D, c.N);

                 std::vector<int> levels;
                 for (int i = 0; i <= c.i_max; ++i)
                     levels.push_back(i);
                 // Relative complexes can stop below i_max; pad so the whole range is checked.
                 const FilteredComplex global_rel = extend_levels_to(built.global_quotient_filtered, c.i_max);
                 const FilteredComplex cech_rel = extend_levels_to(built.relative_total, c.i_max);
                 const FilteredComplex global_he = extend_levels_to(built.global_HE_filtered, c.i_max);
                 const FilteredComplex cech_he = extend_levels_to(built.H, c.i_max);

                 FilteredChainMap rel_map{global_rel, cech_rel, built.relative_from_global};
                 validate(rel_map);
                 const bool a = is_filtered_quasi_iso(rel_map, levels).overall;

                 FilteredChainMap he_map{global_he, cech_he, built.from_global};
                 validate(he_map);
                 const bool b = is_filtered_quasi_iso(he_map, levels).overall;

                 FilteredChainMap aug_map{global_he, global_rel, built.global_augmentation};
                 validate(aug_map);
                 const bool cc = is_filtered_quasi_iso(aug_map, levels).overall;

                 const bool square = square_commutes(built);

                 // Right vertical arrow: at a finite truncation it is a quasi-isomorphism
                 // only in the stabilized sense, so certify it with the four-rank
                 // criterion on the truncation tower of the totalization.
                 const int w = c.window;
                 std::map<int, HComplexResult> towers;
                 towers.emplace(c.N, built);
                 for (int dn : {1, w, w + 1, w + 2})
                     towers.emplace(c.N + dn, build_H_complex(D, c.N + dn));
                 std::map<std::pair<int, int>, CohomologyData> hcache;
                 auto tot_h = [&](int n, int q) -> const CohomologyData& {
                     auto it = hcache.find({n, q});
                     if (it == hcache.end())
                         it = hcache.emplace(std::make_pair(n, q), cohomology(towers.at(n).H.C, q)).first;
                     return it->second;
                 };
                 auto trank = [&](int n0, int n1, int q) {
                     const ChainMap inc = h_total_inclusion(D, towers.at(n0), towers.at(n1));
                     return rank(induced_cohomology_map(inc, q, tot_h(n0, q), tot_h(n1, q)));
                 };
                 bool right_qiso = true;
                 Json right_rows = Json::array();
                 for (int q = 0; q <= c.q_max; ++q) {
                     const int r00 = trank(c.N, c.N + w, q);
                     const int r01 = trank(c.N, c.N + w + 1, q);
                     const int r10 = trank(c.N + 1, c.N + 1 + w, q);
                     const int r11 = trank(c.N + 1, c.N + w + 2, q);
                     if (!(r00 == r01 && r00 == r10 && r00 == r11)) {
                         StabilizationCertificate cert;
                         cert.q = q;
                         cert.ranks = {{c.N, w, r00}, {c.N, w + 1, r01}, {c.N + 1, w, r10}, {c.N + 1, w + 1, r11}};
                         throw NotStabilizedError(std::move(cert));
                     }
                     const CohomologyData hrel = cohomology(built.relative_total.C, q);
                     const int aug_rank =
                         rank(induced_cohomology_map(built.to_relative, q, tot_h(c.N, q), hrel));
                     const bool row_ok = r00 == hrel.dim && aug_rank == r00;
                     right_qiso = right_qiso && row_ok;
                     right_rows.push_back(Json{{"q", q},
                                               {"stabilized", r00},
                                               {"relative", hrel.dim},
                                               {"augmentation_rank", aug_rank}});
                 }

                 rec.status = (a && b && cc && square && right_qiso) ? CheckStatus::Pass : CheckStatus::Fail;
                 rec.evidence = Json{{"relative_to_total_filtered_qiso", a},
                                     {"extension_to_total_filtered_qiso", b},
                                     {"augmentation_filtered_qiso", cc},
                                     {"zigzag", b && cc},
                                     {"square_commutes", square},
                                     {"right_vertical_stabilized_qiso", right_qiso},
                                     {"right_vertical", right_rows},
                                     {"N", c.N},
                                     {"i_max", c.i_max}};
                 return rec;
             }});
    }
}

void build_substitution(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    tasks.push_back(
        {"substitution.merge-parameters", "merging both log parameters into one is a chain map of truncations",
         [cfg]() {
             CheckRecord rec;
             const ModelDGA dga = build_log_dga(canned("two_log_vars"));
             const HirschDatum& H = dga.datum;
             HirschDatum H1 = HirschDatum::make(H.C, 1, {"u'"});
             for (int q = H.C.min_deg; q <= H.C.max_deg; ++q)
                 H1.set_op(0, q, H.op(0, q) + H.op(1, q));
             validate_hirsch_datum(H1);
             SparseRatMatrix A(2, 1);
             A.set(0, 0, Rat(1));
             A.set(1, 0, Rat(1));
             const ChainMap s = substitute_variables(ChainMap::identity(H.C), H1, H, A, 3);
             rec.status = CheckStatus::Pass;  // substitute_variables validates or throws
             rec.evidence = Json{{"source_dim_deg1", s.source.dim(1)}, {"target_dim_deg1", s.target.dim(1)}};
             return rec;
         }});
    tasks.push_back(
        {"substitution.composition", "substitution along a product matrix equals the composite substitution",
         [cfg]() {
             CheckRecord rec;
             const ModelDGA dga = build_log_dga(canned("two_log_vars"));
             const HirschDatum& H = dga.datum;

             HirschDatum Hp = HirschDatum::make(H.C, 2, {"u'1", "u'2"});
             for (int q = H.C.min_deg; q <= H.C.max_deg; ++q) {
                 Hp.set_op(0, q, H.op(0, q));
                 Hp.set_op(1, q, H.op(0, q) + H.op(1, q));
             }
             validate_hirsch_datum(Hp);
             HirschDatum Hpp = HirschDatum::make(H.C, 1, {"u''"});
             for (int q = H.C.min_deg; q <= H.C.max_deg; ++q)
                 Hpp.set_op(0, q, Hp.op(0, q) + Hp.op(1, q));
             validate_hirsch_datum(Hpp);

             SparseRatMatrix A(2, 2);  // u'1 -> u1, u'2 -> u1 + u2
             A.set(0, 0, Rat(1));
             A.set(0, 1, Rat(1));
             A.set(1, 1, Rat(1));
             SparseRatMatrix Ap(2, 1);  // u'' -> u'1 + u'2
             Ap.set(0, 0, Rat(1));
             Ap.set(1, 0, Rat(1));

             const int N = 3;
             const ChainMap s1 = substitute_variables(ChainMap::identity(H.C), Hpp, Hp, Ap, N);
             const ChainMap s2 = substitute_variables(ChainMap::identity(H.C), Hp, H, A, N);
             const ChainMap direct = substitute_variables(ChainMap::identity(H.C), Hpp, H, A * Ap, N);
             const ChainMap comp = compose(s2, s1);
             bool equal = true;
             for (int q = comp.min_deg; q <= comp.min_deg + static_cast<int>(comp.maps.size()) - 1; ++q)
                 if (comp.map(q) != direct.map(q))
                     equal = false;
             rec.status = equal ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence = Json{{"N", N}, {"stages", 3}};
             return rec;
         }});
}

void build_tooling(const SuiteConfig& cfg, std::vector<NamedTask>& tasks) {
    tasks.push_back(
        {"tooling.roundtrip", "save/load is the identity on every canned artifact kind",
         [cfg]() {
             CheckRecord rec;
             namespace fs = std::filesystem;
             const fs::path dir = fs::temp_directory_path() / "hirschlab_roundtrip";
             fs::create_directories(dir);
             bool ok = true;
             Json rows = Json::array();
             auto try_roundtrip = [&](const std::string& name, const Json& j) {
                 const std::string path = (dir / (name + ".json")).string();
                 save_json_file(path, j);
                 const RoundtripResult res = roundtrip_file(path);
                 ok = ok && res.ok;
                 rows.push_back(Json{{"artifact", name}, {"kind", res.kind}, {"ok", res.ok}});
                 fs::remove(path);
             };
             for (const auto& name : canned_names())
                 try_roundtrip("model_" + name, model_to_json(canned(name)));
             MonomialModel small = canned("xy_snc");
             small.D = 2;
             const ModelDGA dga = build_log_dga(small);
             try_roundtrip("complex_xy", complex_to_json(dga.datum.C));
             try_roundtrip("datum_xy", datum_to_json(dga.datum));
             const ModelDGA lp = build_log_dga(canned("log_point"));
             try_roundtrip("filtered_log_point",
                           filtered_to_json(hodge_filtration(truncated_extension(lp.datum, 2))));
             try_roundtrip("diagram_xy", diagram_to_json(build_component_diagram(small)));
             try_roundtrip("matrix", matrix_to_json(dga.datum.C.diff(0)));
             rec.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence["artifacts"] = rows;
             return rec;
         }});
    tasks.push_back(
        {"tooling.parse-errors", "malformed input is rejected with a position, and d^2 != 0 is named by degree",
         []() {
             CheckRecord rec;
             bool bad_rat = false, bad_d = false, bad_json = false;
             try {
                 Rat::parse("1/0");
             } catch (const Error& e) {
                 bad_rat = std::string(e.code()) == "ParseError";
             }
             try {
                 // two-term identity followed by identity: d^2 = 1 != 0
                 Json j = Json{{"min_deg", 0},
                               {"max_deg", 2},
                               {"spaces", Json{{"0", Json::array({"a"})}, {"1", Json::array({"b"})},
                                               {"2", Json::array({"c"})}}},
                               {"d", Json{{"0", Json{{"rows", 1}, {"cols", 1},
                                                      {"entries", Json::array({Json::array({0, 0, "1"})})}}},
                                          {"1", Json{{"rows", 1}, {"cols", 1},
                                                      {"entries", Json::array({Json::array({0, 0, "1"})})}}}}}};
                 complex_from_json(j);
             } catch (const Error& e) {
                 bad_d = std::string(e.code()) == "DSquareNonzero" &&
                         std::string(e.what()).find("degree 0") != std::string::npos;
             }
             try {
                 parse_json_text("{\"rows\": 1,");
             } catch (const Error& e) {
                 bad_json = std::string(e.what()).find("line") != std::string::npos;
             }
             rec.status = (bad_rat && bad_d && bad_json) ? CheckStatus::Pass : CheckStatus::Fail;
             rec.evidence = Json{{"zero_denominator_rejected", bad_rat},
                                 {"d_square_named", bad_d},
                                 {"parse_position_reported", bad_json}};
             return rec;
         }});
}

}  // namespace

Report run_suite(const SuiteConfig& cfg) {
    if (std::find(suite_names().begin(), suite_names().end(), cfg.suite) == suite_names().end())
        throw Error("UnknownSuite", "no suite named '" + cfg.suite + "'");
    if (!cfg.inject_fault.empty() &&
        std::find(fault_names().begin(), fault_names().end(), cfg.inject_fault) == fault_names().end())
        throw Error("UnknownFault", "no fault named '" + cfg.inject_fault + "'");
    if (!cfg.model_name.empty())
        canned(cfg.model_name);  // validate the name up front

    std::vector<NamedTask> tasks;
    auto want = [&](const char* name) { return cfg.suite == "all" || cfg.suite == name; };
    if (want("cone-sign"))
        build_cone_sign(cfg, tasks);
    if (want("acyclic-extension"))
        build_acyclic_extension(cfg, tasks);
    if (want("residue"))
        build_residue(cfg, tasks);
    if (want("stabilization"))
        build_stabilization(cfg, tasks);
    if (want("koszul-gr"))
        build_koszul(cfg, tasks);
    if (want("spectral"))
        build_spectral(cfg, tasks);
    if (want("cech-resolution"))
        build_cech_resolution(cfg, tasks);
    if (want("comparison"))
        build_comparison(cfg, tasks);
    if (want("substitution"))
        build_substitution(cfg, tasks);
    if (want("tooling"))
        build_tooling(cfg, tasks);

    int jobs = cfg.jobs;
    if (jobs <= 0) {
        if (const char* env = std::getenv("HIRSCHLAB_JOBS"))
            jobs = std::max(1, std::atoi(env));
        else
            jobs = 1;
    }

    Report report;
    report.config = cfg;
    report.checks.resize(tasks.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= tasks.size())
                break;
            report.checks[k] = finish(tasks[k]);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return report;
}

}  // namespace hirschlab
