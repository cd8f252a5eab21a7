#include "hirschlab/models.hpp"

#include "hirschlab/koszul.hpp"

#include <algorithm>

namespace hirschlab {

namespace {

bool strictly_upper(const SparseRatMatrix& m) {
    for (const auto& [i, j, v] : m.entries())
        if (j <= i)
            return false;
    return true;
}

bool disjoint_from(const Exponents& a, const std::vector<int>& killed) {
    for (int i : killed)
        if (a[i] > 0)
            return false;
    return true;
}

std::string power_label(const Exponents& a, const std::string& stem) {
    std::string s;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0)
            continue;
        if (!s.empty())
            s += "*";
        s += stem + std::to_string(i + 1);
        if (a[i] > 1)
            s += "^" + std::to_string(a[i]);
    }
    return s;
}

std::string dlog_label(const std::vector<int>& T) {
    std::string s;
    for (int t : T) {
        if (!s.empty())
            s += "^";
        s += "dlogx" + std::to_string(t + 1);
    }
    return s;
}

}  // namespace

void validate_model(const MonomialModel& model) {
    if (model.n < 1 || model.r < 1 || model.D < 0)
        throw Error("ModelInvalid", "need n >= 1, r >= 1, D >= 0");
    if (static_cast<int>(model.t_map.size()) != model.r)
        throw Error("ModelInvalid", "t_map must list one coordinate block per log parameter");
    std::vector<int> seen(model.n, -1);
    for (int j = 0; j < model.r; ++j) {
        if (model.t_map[j].empty())
            throw Error("ModelInvalid", "t_map block " + std::to_string(j + 1) + " is empty");
        for (int i : model.t_map[j]) {
            if (i < 0 || i >= model.n)
                throw Error("ModelInvalid", "t_map coordinate out of range");
            if (seen[i] >= 0)
                throw Error("ModelInvalid", "t_map blocks overlap at coordinate " + std::to_string(i + 1));
            seen[i] = j;
        }
    }
    std::vector<std::vector<int>> comps;
    for (const auto& c : model.components) {
        if (c.empty())
            throw Error("ModelInvalid", "empty component defining set");
        std::vector<int> s = c;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (s.size() != c.size())
            throw Error("ModelInvalid", "component defining set has repeats");
        for (int i : s)
            if (i < 0 || i >= model.n)
                throw Error("ModelInvalid", "component coordinate out of range");
        comps.push_back(std::move(s));
    }
    for (size_t a = 0; a < comps.size(); ++a)
        for (size_t b = a + 1; b < comps.size(); ++b)
            if (comps[a] == comps[b])
                throw Error("ModelInvalid", "duplicate components");
    // Every log parameter must vanish on every component.
    for (int j = 0; j < model.r; ++j)
        for (const auto& c : comps) {
            bool hits = false;
            for (int i : model.t_map[j])
                if (std::find(c.begin(), c.end(), i) != c.end())
                    hits = true;
            if (!hits)
                throw Error("ModelInvalid", "t_" + std::to_string(j + 1) + " does not vanish on a component");
        }
    if (static_cast<int>(model.connection.size()) != model.r)
        throw Error("ModelInvalid", "need one residue matrix per log parameter");
    const int m = model.coeff_dim();
    for (const SparseRatMatrix& N : model.connection) {
        if (N.rows() != m || N.cols() != m)
            throw Error("ModelInvalid", "residue matrices must share one square size");
        if (!strictly_upper(N))
            throw Error("ModelInvalid", "residue matrices must be strictly upper triangular");
    }
}

MonomialModel canned(const std::string& name) {
    MonomialModel M;
    M.name = name;
    auto zero1 = SparseRatMatrix::zero(1, 1);
    if (name == "log_point") {
        M.n = 1;
        M.r = 1;
        M.t_map = {{0}};
        M.components = {};
        M.D = 0;
        M.connection = {zero1};
    } else if (name == "nilpotent_rank2") {
        M.n = 1;
        M.r = 1;
        M.t_map = {{0}};
        M.components = {};
        M.D = 0;
        SparseRatMatrix N(2, 2);
        N.set(0, 1, Rat(1));
        M.connection = {N};
    } else if (name == "xy_snc") {
        M.n = 2;
        M.r = 1;
        M.t_map = {{0, 1}};
        M.components = {{0}, {1}};
        M.D = 3;
        M.connection = {zero1};
    } else if (name == "xyz_snc") {
        M.n = 3;
        M.r = 1;
        M.t_map = {{0, 1, 2}};
        M.components = {{0}, {1}, {2}};
        M.D = 3;
        M.connection = {zero1};
    } else if (name == "two_log_vars") {
        M.n = 4;
        M.r = 2;
        M.t_map = {{0, 1}, {2, 3}};
        M.components = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
        M.D = 2;
        M.connection = {zero1, zero1};
    } else {
        throw Error("UnknownModel", "no canned model named '" + name + "'");
    }
    validate_model(M);
    return M;
}

const std::vector<std::string>& canned_names() {
    static const std::vector<std::string> names = {"log_point", "nilpotent_rank2", "xy_snc", "xyz_snc",
                                                   "two_log_vars"};
    return names;
}

ModelRing global_ring(const MonomialModel& model) {
    ModelRing R;
    for (const Exponents& a : pd_monomials_upto(model.n, model.D)) {
        bool keep;
        if (model.components.empty()) {
            keep = weight(a) == 0;  // base point: only the constant survives
        } else {
            keep = false;
            for (const auto& c : model.components)
                if (disjoint_from(a, c)) {
                    keep = true;
                    break;
                }
        }
        if (keep) {
            R.index[a] = R.dim();
            R.monomials.push_back(a);
        }
    }
    return R;
}

ModelRing subspace_ring(const MonomialModel& model, const std::vector<int>& killed) {
    ModelRing R;
    for (const Exponents& a : pd_monomials_upto(model.n, model.D))
        if (disjoint_from(a, killed)) {
            R.index[a] = R.dim();
            R.monomials.push_back(a);
        }
    return R;
}

ModelDGA build_log_dga_over(const MonomialModel& model, ModelRing ring) {
    validate_model(model);
    const int n = model.n;
    const int m = model.coeff_dim();
    const int rd = ring.dim();

    ModelDGA out;
    out.model = model;

    std::vector<std::vector<std::vector<int>>> wedges;
    for (int q = 0; q <= n; ++q)
        wedges.push_back(wedge_subsets(n, q));

    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    for (int q = 0; q <= n; ++q) {
        dims.push_back(static_cast<int>(wedges[q].size()) * rd * m);
        std::vector<std::string> lab;
        for (const auto& T : wedges[q])
            for (int a = 0; a < rd; ++a)
                for (int v = 0; v < m; ++v) {
                    std::string s = power_label(ring.monomials[a], "x");
                    const std::string w = dlog_label(T);
                    if (!w.empty())
                        s = s.empty() ? w : s + "*" + w;
                    if (s.empty())
                        s = "1";
                    if (m > 1)
                        s += "(x)e" + std::to_string(v + 1);
                    lab.push_back(s);
                }
        labels.push_back(std::move(lab));
    }
    Complex C = Complex::make(0, std::move(dims), std::move(labels));

    auto idx = [&](int q, int t, int a, int v) {
        (void)q;
        return (t * rd + a) * m + v;
    };
    std::vector<std::map<std::vector<int>, int>> wpos(n + 2);
    for (int q = 0; q <= n; ++q)
        for (size_t k = 0; k < wedges[q].size(); ++k)
            wpos[q][wedges[q][k]] = static_cast<int>(k);

    // Differential and wedge operators share the insertion bookkeeping.
    std::vector<SparseRatMatrix> dmats;
    std::vector<std::vector<SparseRatMatrix>> lmats(model.r);
    for (int q = 0; q <= n; ++q) {
        SparseRatMatrix d(C.dim(q + 1), C.dim(q));
        std::vector<SparseRatMatrix> lq(model.r, SparseRatMatrix(C.dim(q + 1), C.dim(q)));
        for (size_t tw = 0; tw < wedges[q].size(); ++tw) {
            const std::vector<int>& T = wedges[q][tw];
            std::vector<std::pair<int, int>> inserts;  // (coordinate, target wedge index), sign via parity
            for (int i = 0; i < n; ++i) {
                const int sign = insertion_sign(T, i);
                if (sign == 0)
                    continue;
                std::vector<int> T2 = T;
                T2.insert(std::lower_bound(T2.begin(), T2.end(), i), i);
                const int tw2 = wpos[q + 1].count(T2) ? wpos[q + 1][T2] : -1;
                if (tw2 < 0)
                    continue;
                // ring part of d: a_i x^a dlog x_i
                for (int a = 0; a < rd; ++a) {
                    const Exponents& mono = ring.monomials[a];
                    if (mono[i] == 0)
                        continue;
                    for (int v = 0; v < m; ++v)
                        d.set(idx(q + 1, tw2, a, v), idx(q, static_cast<int>(tw), a, v),
                              Rat(sign * mono[i]));
                }
                // connection and wedge-operator parts: which block does i belong to?
                for (int j = 0; j < model.r; ++j) {
                    if (std::find(model.t_map[j].begin(), model.t_map[j].end(), i) == model.t_map[j].end())
                        continue;
                    for (int a = 0; a < rd; ++a) {
                        for (int v = 0; v < m; ++v)
                            lq[j].set(idx(q + 1, tw2, a, v), idx(q, static_cast<int>(tw), a, v), Rat(sign));
                        for (const auto& [vp, vc, nv] : model.connection[j].entries())
                            d.set(idx(q + 1, tw2, a, vp), idx(q, static_cast<int>(tw), a, vc),
                                  sign > 0 ? nv : -nv);
                    }
                }
            }
        }
        dmats.push_back(std::move(d));
        for (int j = 0; j < model.r; ++j)
            lmats[j].push_back(std::move(lq[j]));
    }
    for (int q = 0; q <= n; ++q)
        C.set_diff(q, dmats[q]);

    HirschDatum H = HirschDatum::make(std::move(C), model.r);
    for (int j = 0; j < model.r; ++j)
        for (int q = 0; q <= n; ++q)
            H.set_op(j, q, lmats[j][q]);

    ExteriorStructure ext;
    ext.gens = n;
    ext.coeff_dim = rd * m;
    ext.psi = SparseRatMatrix(n, model.r);
    for (int j = 0; j < model.r; ++j)
        for (int i : model.t_map[j])
            ext.psi.set(i, j, Rat(1));
    H.exterior = ext;

    validate_hirsch_datum(H);
    out.ring = std::move(ring);
    out.datum = std::move(H);
    return out;
}

ModelDGA build_log_dga(const MonomialModel& model) { return build_log_dga_over(model, global_ring(model)); }

namespace {

std::vector<int> union_of_defs(const MonomialModel& model, const std::vector<int>& comp_subset) {
    std::vector<int> killed;
    for (int c : comp_subset)
        for (int i : model.components[c])
            killed.push_back(i);
    std::sort(killed.begin(), killed.end());
    killed.erase(std::unique(killed.begin(), killed.end()), killed.end());
    return killed;
}

// Restriction between model data over nested rings: kill monomials, keep forms.
ChainMap ring_restriction(const ModelDGA& src, const ModelDGA& dst) {
    ChainMap f = ChainMap::make(src.datum.C, dst.datum.C);
    const int n = src.model.n;
    const int m = src.model.coeff_dim();
    for (int q = 0; q <= n; ++q) {
        const int wq = static_cast<int>(wedge_subsets(n, q).size());
        SparseRatMatrix mat(dst.datum.C.dim(q), src.datum.C.dim(q));
        for (int t = 0; t < wq; ++t)
            for (int a = 0; a < src.ring.dim(); ++a) {
                const auto it = dst.ring.index.find(src.ring.monomials[a]);
                if (it == dst.ring.index.end())
                    continue;
                for (int v = 0; v < m; ++v)
                    mat.set((t * dst.ring.dim() + it->second) * m + v, (t * src.ring.dim() + a) * m + v,
                            Rat(1));
            }
        f.set_map(q, std::move(mat));
    }
    validate(f);
    return f;
}

}  // namespace

ComponentDiagram build_component_diagram(const MonomialModel& model) {
    validate_model(model);
    if (model.components.empty())
        throw Error("ModelInvalid", "component diagram needs at least one component");
    const int k = static_cast<int>(model.components.size());

    ComponentDiagram D;
    D.r = model.r;
    D.m_max = k - 1;
    for (int c = 0; c < k; ++c) {
        std::string l = "X";
        for (size_t t = 0; t < model.components[c].size(); ++t)
            l += (t ? "_" : "") + std::to_string(model.components[c][t] + 1);
        D.labels.push_back(l);
    }

    std::map<std::vector<int>, ModelDGA> dgas;
    dgas.emplace(std::vector<int>{}, build_log_dga(model));
    for (int m = 0; m <= D.m_max; ++m)
        for (const auto& key : wedge_subsets(k, m + 1))
            dgas.emplace(key, build_log_dga_over(model, subspace_ring(model, union_of_defs(model, key))));

    for (auto& [key, dga] : dgas)
        D.payloads.emplace(key, dga.datum);

    // Covering restrictions plus the global augmentations.
    for (const auto& [key, dga] : dgas) {
        if (key.empty())
            continue;
        if (key.size() == 1)
            D.restrictions.emplace(std::make_pair(std::vector<int>{}, key),
                                   ring_restriction(dgas.at({}), dga));
        for (size_t j = 0; j < key.size(); ++j) {
            std::vector<int> face = key;
            face.erase(face.begin() + static_cast<long>(j));
            if (face.empty())
                continue;
            D.restrictions.emplace(std::make_pair(face, key), ring_restriction(dgas.at(face), dga));
        }
    }
    return D;
}

ComponentDiagram build_structure_sheaf_diagram(const MonomialModel& model) {
    ComponentDiagram full = build_component_diagram(model);
    ComponentDiagram D;
    D.labels = full.labels;
    D.m_max = full.m_max;
    D.r = 0;
    for (const auto& [key, H] : full.payloads) {
        Complex C = Complex::make(0, {H.C.dim(0)}, {H.C.labels_at(0)});
        D.payloads.emplace(key, HirschDatum::make(std::move(C), 0));
    }
    for (const auto& [fromto, f] : full.restrictions) {
        ChainMap g = ChainMap::make(D.payloads.at(fromto.first).C, D.payloads.at(fromto.second).C);
        g.set_map(0, f.map(0));
        D.restrictions.emplace(fromto, std::move(g));
    }
    return D;
}

RelativeComplexResult build_relative_quotient_over(const MonomialModel& model, const ModelRing& ring) {
    validate_model(model);
    const int n = model.n;
    const int m = model.coeff_dim();
    const int rd = ring.dim();

    RelativeComplexResult out;
    std::vector<int> dropped_of(n, -1);  // coordinate -> block whose generator it replaces
    for (int j = 0; j < model.r; ++j) {
        const int dropped = *std::min_element(model.t_map[j].begin(), model.t_map[j].end());
        out.dropped.push_back(dropped);
        dropped_of[dropped] = j;
    }
    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
        if (dropped_of[i] < 0)
            kept.push_back(i);
    std::vector<int> kept_pos(n, -1);
    for (size_t p = 0; p < kept.size(); ++p)
        kept_pos[kept[p]] = static_cast<int>(p);
    const int nk = static_cast<int>(kept.size());

    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    std::vector<std::vector<std::vector<int>>> wedges;
    for (int q = 0; q <= nk; ++q) {
        wedges.push_back(wedge_subsets(nk, q));
        dims.push_back(static_cast<int>(wedges[q].size()) * rd * m);
        std::vector<std::string> lab;
        for (const auto& T : wedges[q])
            for (int a = 0; a < rd; ++a)
                for (int v = 0; v < m; ++v) {
                    std::vector<int> coords;
                    for (int t : T)
                        coords.push_back(kept[t]);
                    std::string s = power_label(ring.monomials[a], "x");
                    const std::string w = dlog_label(coords);
                    if (!w.empty())
                        s = s.empty() ? w : s + "*" + w;
                    if (s.empty())
                        s = "1";
                    if (m > 1)
                        s += "(x)e" + std::to_string(v + 1);
                    lab.push_back(s);
                }
        labels.push_back(std::move(lab));
    }
    Complex rel = Complex::make(0, std::move(dims), std::move(labels));

    // Absolute model over the same ring, for the substitution projection.
    const ModelDGA abs_dga = build_log_dga_over(model, ring);
    const Complex& C = abs_dga.datum.C;

    // Expansion of one absolute dlog generator in the kept basis.
    auto factor = [&](int i) {
        std::vector<std::pair<int, int>> terms;  // (kept position, sign)
        if (dropped_of[i] < 0) {
            terms.emplace_back(kept_pos[i], 1);
        } else {
            for (int ip : model.t_map[dropped_of[i]])
                if (ip != i)
                    terms.emplace_back(kept_pos[ip], -1);
        }
        return terms;
    };

    std::vector<std::map<std::vector<int>, int>> wpos(nk + 2);
    for (int q = 0; q <= nk; ++q)
        for (size_t kk = 0; kk < wedges[q].size(); ++kk)
            wpos[q][wedges[q][kk]] = static_cast<int>(kk);

    std::vector<SparseRatMatrix> proj;
    for (int q = 0; q <= model.n; ++q) {
        SparseRatMatrix P(rel.dim(q), C.dim(q));
        const auto abs_wedges = wedge_subsets(n, q);
        for (size_t tw = 0; tw < abs_wedges.size(); ++tw) {
            const std::vector<int>& T = abs_wedges[tw];
            std::vector<std::pair<std::vector<int>, int>> expansion = {{{}, 1}};
            for (int i : T) {
                std::vector<std::pair<std::vector<int>, int>> next;
                for (const auto& [seq, sgn] : expansion)
                    for (const auto& [pos, s2] : factor(i)) {
                        std::vector<int> seq2 = seq;
                        seq2.push_back(pos);
                        next.emplace_back(std::move(seq2), sgn * s2);
                    }
                expansion = std::move(next);
            }
            for (const auto& [seq, sgn] : expansion) {
                // sort with parity; repeated indices wedge to zero
                std::vector<int> sorted = seq;
                int parity = 1;
                bool dup = false;
                for (size_t aa = 0; aa < sorted.size() && !dup; ++aa)
                    for (size_t bb = aa + 1; bb < sorted.size(); ++bb) {
                        if (sorted[aa] == sorted[bb]) {
                            dup = true;
                            break;
                        }
                        if (sorted[aa] > sorted[bb])
                            parity = -parity;
                    }
                if (dup)
                    continue;
                std::sort(sorted.begin(), sorted.end());
                const auto it = wpos[q].find(sorted);
                if (it == wpos[q].end())
                    continue;
                const int t2 = it->second;
                for (int a = 0; a < rd; ++a)
                    for (int v = 0; v < m; ++v) {
                        const int row = (t2 * rd + a) * m + v;
                        const int col = (static_cast<int>(tw) * rd + a) * m + v;
                        P.set(row, col, P.at(row, col) + Rat(sgn * parity));
                    }
            }
        }
        proj.push_back(std::move(P));
    }
    // Differential through the canonical section: d_rel = proj o d o include.
    for (int q = 0; q < nk; ++q) {
        SparseRatMatrix incl(C.dim(q), rel.dim(q));
        for (size_t tw = 0; tw < wedges[q].size(); ++tw) {
            std::vector<int> coords;
            for (int t : wedges[q][tw])
                coords.push_back(kept[t]);
            const auto abs_wedges = wedge_subsets(n, q);
            int abs_idx = -1;
            for (size_t kk = 0; kk < abs_wedges.size(); ++kk)
                if (abs_wedges[kk] == coords) {
                    abs_idx = static_cast<int>(kk);
                    break;
                }
            for (int a = 0; a < rd; ++a)
                for (int v = 0; v < m; ++v)
                    incl.set((abs_idx * rd + a) * m + v, (static_cast<int>(tw) * rd + a) * m + v, Rat(1));
        }
        rel.set_diff(q, proj[q + 1] * (C.diff(q) * incl));
    }
    validate(rel);
    out.rel = std::move(rel);
    out.projection = std::move(proj);
    return out;
}

RelativeComplexResult build_relative_quotient(const MonomialModel& model) {
    return build_relative_quotient_over(model, global_ring(model));
}

bool relative_matches_quotient(const ModelDGA& dga) {
    std::vector<int> all_ops(dga.model.r);
    for (int j = 0; j < dga.model.r; ++j)
        all_ops[j] = j;
    const QuotientComplexResult quo = quotient_complex(dga.datum, all_ops);
    const RelativeComplexResult direct = build_relative_quotient_over(dga.model, dga.ring);

    // The substitution projection restricted to the quotient representatives
    // must be a degreewise isomorphism commuting with the differentials.
    for (int q = 0; q <= dga.model.n; ++q) {
        if (quo.Q.dim(q) != direct.rel.dim(q))
            return false;
        if (quo.Q.dim(q) == 0)
            continue;
        const SparseRatMatrix iso = direct.projection[q] * quo.reps[q];
        if (rank(iso) != quo.Q.dim(q))
            return false;
    }
    for (int q = 0; q < dga.model.n; ++q) {
        const SparseRatMatrix iso_q = direct.projection[q] * quo.reps[q];
        const SparseRatMatrix iso_q1 = direct.projection[q + 1] * quo.reps[q + 1];
        if (direct.rel.diff(q) * iso_q != iso_q1 * quo.Q.diff(q))
            return false;
    }
    return true;
}

std::vector<WeightBlock> weight_decompose(const ModelDGA& dga) {
    const int n = dga.model.n;
    const int m = dga.model.coeff_dim();
    const int rd = dga.ring.dim();
    const Complex& C = dga.datum.C;

    auto mono_of = [&](int idx) { return (idx / m) % rd; };
    // No operator may mix multidegrees.
    for (int q = 0; q <= n; ++q) {
        for (const auto& [i, j, v] : C.diff(q).entries())
            if (mono_of(i) != mono_of(j))
                throw Error("NotBlockDiagonal", "differential mixes multidegrees at degree " + std::to_string(q));
        for (int op = 0; op < dga.model.r; ++op)
            for (const auto& [i, j, v] : dga.datum.op(op, q).entries())
                if (mono_of(i) != mono_of(j))
                    throw Error("NotBlockDiagonal", "operator mixes multidegrees at degree " + std::to_string(q));
    }

    std::vector<WeightBlock> out;
    for (int a = 0; a < rd; ++a) {
        std::vector<std::vector<int>> sel;  // per degree: global indices of this block
        std::vector<int> dims;
        std::vector<std::vector<std::string>> labels;
        for (int q = 0; q <= n; ++q) {
            const int wq = static_cast<int>(wedge_subsets(n, q).size());
            std::vector<int> ids;
            std::vector<std::string> lab;
            for (int t = 0; t < wq; ++t)
                for (int v = 0; v < m; ++v) {
                    ids.push_back((t * rd + a) * m + v);
                    lab.push_back(C.labels_at(q)[ids.back()]);
                }
            sel.push_back(std::move(ids));
            dims.push_back(wq * m);
            labels.push_back(std::move(lab));
        }
        Complex B = Complex::make(0, std::move(dims), std::move(labels));
        for (int q = 0; q < n; ++q)
            B.set_diff(q, C.diff(q).select_rows(sel[q + 1]).select_columns(sel[q]));
        HirschDatum H = HirschDatum::make(std::move(B), dga.model.r, dga.datum.u_names);
        for (int op = 0; op < dga.model.r; ++op)
            for (int q = 0; q < n; ++q)
                H.set_op(op, q, dga.datum.op(op, q).select_rows(sel[q + 1]).select_columns(sel[q]));
        ExteriorStructure ext;
        ext.gens = n;
        ext.coeff_dim = m;
        ext.psi = dga.datum.exterior->psi;
        H.exterior = ext;
        WeightBlock blk;
        blk.multidegree = dga.ring.monomials[a];
        blk.datum = std::move(H);
        out.push_back(std::move(blk));
    }
    return out;
}

}  // namespace hirschlab
