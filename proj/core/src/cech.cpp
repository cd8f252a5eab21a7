#include "hirschlab/cech.hpp"

#include <algorithm>

namespace hirschlab {

namespace {

std::string subset_name(const ComponentDiagram& diagram, const std::vector<int>& key) {
    std::string s;
    for (int k : key) {
        if (!s.empty())
            s += ",";
        s += diagram.labels[k];
    }
    return s;
}

std::vector<std::vector<int>> subsets_of_size(int n, int size) {
    std::vector<std::vector<int>> out;
    if (size < 0 || size > n)
        return out;
    std::vector<int> cur(size);
    for (int i = 0; i < size; ++i)
        cur[i] = i;
    if (size == 0)
        return {{}};
    while (true) {
        out.push_back(cur);
        int k = size - 1;
        while (k >= 0 && cur[k] == n - size + k)
            --k;
        if (k < 0)
            break;
        ++cur[k];
        for (int t = k + 1; t < size; ++t)
            cur[t] = cur[t - 1] + 1;
    }
    return out;
}

}  // namespace

const HirschDatum& ComponentDiagram::payload(const std::vector<int>& key) const {
    const auto it = payloads.find(key);
    if (it == payloads.end())
        throw Error("MissingPayload", "no payload for subset {" + subset_name(*this, key) + "}");
    return it->second;
}

const ChainMap& ComponentDiagram::restriction(const std::vector<int>& from, const std::vector<int>& to) const {
    const auto it = restrictions.find({from, to});
    if (it == restrictions.end())
        throw Error("MissingRestriction", "no restriction {" + subset_name(*this, from) + "} -> {" +
                                              subset_name(*this, to) + "}");
    return it->second;
}

std::vector<std::vector<int>> level_subsets(const ComponentDiagram& diagram, int m) {
    return subsets_of_size(static_cast<int>(diagram.labels.size()), m + 1);
}

void validate(const ComponentDiagram& diagram) {
    for (int m = 0; m <= diagram.m_max; ++m)
        for (const auto& key : level_subsets(diagram, m))
            diagram.payload(key);
    for (const auto& [key, H] : diagram.payloads) {
        if (H.r != diagram.r)
            throw Error("ShapeMismatch", "payload operator count differs at {" + subset_name(diagram, key) + "}");
        validate_hirsch_datum(H);
    }
    // Restrictions: chain maps commuting with every operator.
    for (const auto& [fromto, f] : diagram.restrictions) {
        const auto& [from, to] = fromto;
        validate(f);
        const HirschDatum& hs = diagram.payload(from);
        const HirschDatum& ht = diagram.payload(to);
        for (int j = 0; j < diagram.r; ++j)
            for (int q = hs.C.min_deg; q <= hs.C.max_deg; ++q)
                if (f.map(q + 1) * hs.op(j, q) != ht.op(j, q) * f.map(q))
                    throw Error("CompatibilityViolation",
                                "restriction does not commute with operator " + std::to_string(j + 1) +
                                    " on {" + subset_name(diagram, from) + "} -> {" + subset_name(diagram, to) + "}");
    }
    // Square compatibility: both ways around every 2-step extension agree.
    std::vector<std::vector<int>> froms;
    if (diagram.has_global())
        froms.push_back({});
    for (int m = 0; m + 1 <= diagram.m_max; ++m)
        for (const auto& key : level_subsets(diagram, m))
            froms.push_back(key);
    for (const auto& mu : froms) {
        const int n = static_cast<int>(diagram.labels.size());
        // all lambda with mu subset lambda, |lambda| = |mu| + 2
        std::vector<int> rest;
        for (int x = 0; x < n; ++x)
            if (!std::binary_search(mu.begin(), mu.end(), x))
                rest.push_back(x);
        for (size_t a = 0; a < rest.size(); ++a)
            for (size_t b = a + 1; b < rest.size(); ++b) {
                std::vector<int> lambda = mu;
                lambda.push_back(rest[a]);
                lambda.push_back(rest[b]);
                std::sort(lambda.begin(), lambda.end());
                if (static_cast<int>(lambda.size()) > diagram.m_max + 1)
                    continue;
                std::vector<int> via1 = mu, via2 = mu;
                via1.push_back(rest[a]);
                std::sort(via1.begin(), via1.end());
                via2.push_back(rest[b]);
                std::sort(via2.begin(), via2.end());
                const ChainMap p1 = compose(diagram.restriction(via1, lambda), diagram.restriction(mu, via1));
                const ChainMap p2 = compose(diagram.restriction(via2, lambda), diagram.restriction(mu, via2));
                for (int q = p1.min_deg; q <= p1.min_deg + static_cast<int>(p1.maps.size()) - 1; ++q)
                    if (p1.map(q) != p2.map(q))
                        throw Error("SquareIncompatible",
                                    "restriction squares disagree below {" + subset_name(diagram, lambda) + "}");
            }
    }
}

Complex level_complex(const ComponentDiagram& diagram, int m) {
    std::vector<Complex> parts;
    for (const auto& key : level_subsets(diagram, m))
        parts.push_back(diagram.payload(key).C);
    return direct_sum(parts);
}

namespace {

ChainMap assemble_level_map(const std::vector<Complex>& src_parts, const std::vector<Complex>& dst_parts,
                            const Complex& src_sum, const Complex& dst_sum,
                            const std::vector<std::vector<std::pair<int, const ChainMap*>>>& blocks) {
    // blocks[dst_part] = list of (src_part, signed map)
    ChainMap out = ChainMap::make(src_sum, dst_sum);
    const int lo = out.min_deg;
    const int hi = lo + static_cast<int>(out.maps.size()) - 1;
    for (int q = lo; q <= hi; ++q) {
        SparseRatMatrix m(dst_sum.dim(q), src_sum.dim(q));
        std::vector<int> dst_off(dst_parts.size() + 1, 0), src_off(src_parts.size() + 1, 0);
        for (size_t s = 0; s < dst_parts.size(); ++s)
            dst_off[s + 1] = dst_off[s] + dst_parts[s].dim(q);
        for (size_t s = 0; s < src_parts.size(); ++s)
            src_off[s + 1] = src_off[s] + src_parts[s].dim(q);
        for (size_t t = 0; t < blocks.size(); ++t)
            for (const auto& [s, f] : blocks[t]) {
                const bool neg = s < 0;
                const int sidx = neg ? -s - 1 : s;
                for (const auto& [i, j, v] : f->map(q).entries())
                    m.set(dst_off[t] + i, src_off[sidx] + j, neg ? -v : v);
            }
        out.set_map(q, std::move(m));
    }
    return out;
}

}  // namespace

ChainMap cech_rho(const ComponentDiagram& diagram, int m) {
    const auto src_keys = level_subsets(diagram, m);
    const auto dst_keys = level_subsets(diagram, m + 1);
    std::vector<Complex> src_parts, dst_parts;
    for (const auto& k : src_keys)
        src_parts.push_back(diagram.payload(k).C);
    for (const auto& k : dst_keys)
        dst_parts.push_back(diagram.payload(k).C);
    const Complex src = direct_sum(src_parts);
    const Complex dst = direct_sum(dst_parts);

    std::map<std::vector<int>, int> src_idx;
    for (size_t s = 0; s < src_keys.size(); ++s)
        src_idx[src_keys[s]] = static_cast<int>(s);

    std::vector<std::vector<std::pair<int, const ChainMap*>>> blocks(dst_keys.size());
    for (size_t t = 0; t < dst_keys.size(); ++t) {
        const auto& lambda = dst_keys[t];
        for (size_t j = 0; j < lambda.size(); ++j) {
            std::vector<int> mu = lambda;
            mu.erase(mu.begin() + static_cast<long>(j));
            const ChainMap& f = diagram.restriction(mu, lambda);
            const int s = src_idx.at(mu);
            blocks[t].emplace_back(j % 2 == 0 ? s : -s - 1, &f);
        }
    }
    ChainMap out = assemble_level_map(src_parts, dst_parts, src, dst, blocks);
    validate(out);
    return out;
}

DoubleComplex cech_double_complex(const ComponentDiagram& diagram) {
    DoubleComplex DC;
    for (int m = 0; m <= diagram.m_max; ++m)
        DC.columns.push_back(level_complex(diagram, m));
    for (int m = 0; m < diagram.m_max; ++m)
        DC.rho.push_back(cech_rho(diagram, m));
    return DC;
}

void validate(const DoubleComplex& DC) {
    for (const Complex& col : DC.columns)
        validate(col);
    for (const ChainMap& f : DC.rho)
        validate(f);
    for (size_t m = 0; m + 1 < DC.rho.size(); ++m) {
        const ChainMap comp = compose(DC.rho[m + 1], DC.rho[m]);
        for (int q = comp.min_deg; q <= comp.min_deg + static_cast<int>(comp.maps.size()) - 1; ++q)
            if (!comp.map(q).is_zero())
                throw Error("RhoSquareNonzero", "rho o rho != 0 at level " + std::to_string(m) +
                                                    " degree " + std::to_string(q));
    }
}

Totalization totalize(const DoubleComplex& DC) {
    const int cols = static_cast<int>(DC.columns.size());
    int lo = 0, hi = -1;
    bool any = false;
    for (int m = 0; m < cols; ++m) {
        const Complex& col = DC.columns[m];
        if (col.max_deg < col.min_deg)
            continue;
        const int l = col.min_deg + m, h = col.max_deg + m;
        if (!any) {
            lo = l;
            hi = h;
            any = true;
        } else {
            lo = std::min(lo, l);
            hi = std::max(hi, h);
        }
    }
    Totalization out;
    if (!any) {
        out.total = Complex::zero();
        return out;
    }

    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    out.origin.resize(hi - lo + 1);
    for (int n = lo; n <= hi; ++n) {
        int dn = 0;
        std::vector<std::string> lab;
        for (int m = 0; m < cols; ++m) {
            const int q = n - m;
            const int dq = DC.columns[m].dim(q);
            for (int i = 0; i < dq; ++i) {
                out.origin[n - lo].push_back({m, q, i});
                lab.push_back("m" + std::to_string(m) + ":" + DC.columns[m].labels_at(q)[i]);
            }
            dn += dq;
        }
        dims.push_back(dn);
        labels.push_back(std::move(lab));
    }
    Complex total = Complex::make(lo, std::move(dims), std::move(labels));

    for (int n = lo; n <= hi; ++n) {
        SparseRatMatrix d(total.dim(n + 1), total.dim(n));
        // Offsets of each column block within total degrees n and n+1.
        std::vector<int> off_n(cols + 1, 0), off_n1(cols + 1, 0);
        for (int m = 0; m < cols; ++m) {
            off_n[m + 1] = off_n[m] + DC.columns[m].dim(n - m);
            off_n1[m + 1] = off_n1[m] + DC.columns[m].dim(n + 1 - m);
        }
        for (int m = 0; m < cols; ++m) {
            const int q = n - m;
            // vertical: (-1)^m d_col into (m, q+1)
            const SparseRatMatrix dv = DC.columns[m].diff(q);
            const Rat sign(m % 2 == 0 ? 1 : -1);
            for (const auto& [i, j, v] : dv.entries())
                d.set(off_n1[m] + i, off_n[m] + j, v * sign);
            // horizontal: rho_m into (m+1, q)
            if (m + 1 < cols) {
                const SparseRatMatrix rh = DC.rho[m].map(q);
                for (const auto& [i, j, v] : rh.entries())
                    d.set(off_n1[m + 1] + i, off_n[m] + j, v);
            }
        }
        total.set_diff(n, std::move(d));
    }
    validate(total);
    out.total = std::move(total);
    return out;
}

ExactnessReport resolution_check(const ComponentDiagram& diagram) {
    if (!diagram.has_global())
        throw Error("MissingPayload", "resolution check needs the global payload");
    const DoubleComplex DC = cech_double_complex(diagram);
    // Augmentation global -> level 0: unsigned restrictions to the singletons.
    const auto singles = level_subsets(diagram, 0);
    std::vector<Complex> src_parts = {diagram.payload({}).C};
    std::vector<Complex> dst_parts;
    for (const auto& k : singles)
        dst_parts.push_back(diagram.payload(k).C);
    std::vector<std::vector<std::pair<int, const ChainMap*>>> blocks(singles.size());
    for (size_t t = 0; t < singles.size(); ++t)
        blocks[t].emplace_back(0, &diagram.restriction({}, singles[t]));
    const ChainMap aug =
        assemble_level_map(src_parts, dst_parts, src_parts[0], DC.columns[0], blocks);
    validate(aug);

    std::vector<ChainMap> maps = {aug};
    for (const ChainMap& f : DC.rho)
        maps.push_back(f);
    return check_exact_sequence(maps, true);
}

/* ---------------- the comparison package ---------------- */

HComplexResult build_H_complex(const ComponentDiagram& diagram, int N) {
    if (!diagram.has_global())
        throw Error("MissingPayload", "building the comparison package needs the global payload");
    validate(diagram);

    HComplexResult out;
    out.N = N;
    out.global_HE = truncated_extension(diagram.payload({}), N);
    out.global_HE_filtered = hodge_filtration(out.global_HE);

    // Truncated extensions and relative quotients per stored subset.
    std::map<std::vector<int>, TruncatedHirschExtension> HE;
    std::map<std::vector<int>, QuotientComplexResult> REL;
    std::vector<int> all_ops(diagram.r);
    for (int j = 0; j < diagram.r; ++j)
        all_ops[j] = j;
    for (int m = 0; m <= diagram.m_max; ++m)
        for (const auto& key : level_subsets(diagram, m)) {
            HE.emplace(key, truncated_extension(diagram.payload(key), N));
            REL.emplace(key, quotient_complex(diagram.payload(key), all_ops));
        }

    // Column double complex of the truncated extensions, with Hodge level tables.
    DoubleComplex DH, DR;
    std::vector<std::vector<std::vector<int>>> col_hlevels;  // [m][q - min][i]
    for (int m = 0; m <= diagram.m_max; ++m) {
        const auto keys = level_subsets(diagram, m);
        std::vector<Complex> parts, rel_parts;
        std::vector<std::vector<std::vector<int>>> tables;
        for (const auto& k : keys) {
            parts.push_back(HE.at(k).total);
            rel_parts.push_back(REL.at(k).Q);
            tables.push_back(HE.at(k).hodge_levels());
        }
        DH.columns.push_back(direct_sum(parts));
        DR.columns.push_back(direct_sum(rel_parts));
        // Concatenate the per-part level tables in the same order as direct_sum.
        std::vector<std::vector<int>> merged;
        const Complex& col = DH.columns.back();
        for (int q = col.min_deg; q <= col.max_deg; ++q) {
            std::vector<int> lv;
            for (size_t s = 0; s < keys.size(); ++s) {
                const Complex& pc = parts[s];
                if (q >= pc.min_deg && q <= pc.max_deg)
                    lv.insert(lv.end(), tables[s][q - pc.min_deg].begin(), tables[s][q - pc.min_deg].end());
            }
            merged.push_back(std::move(lv));
        }
        col_hlevels.push_back(std::move(merged));
    }
    for (int m = 0; m < diagram.m_max; ++m) {
        const auto src_keys = level_subsets(diagram, m);
        const auto dst_keys = level_subsets(diagram, m + 1);
        std::map<std::vector<int>, int> src_idx;
        for (size_t s = 0; s < src_keys.size(); ++s)
            src_idx[src_keys[s]] = static_cast<int>(s);

        std::vector<Complex> sp, dp, rsp, rdp;
        for (const auto& k : src_keys) {
            sp.push_back(HE.at(k).total);
            rsp.push_back(REL.at(k).Q);
        }
        for (const auto& k : dst_keys) {
            dp.push_back(HE.at(k).total);
            rdp.push_back(REL.at(k).Q);
        }
        std::vector<ChainMap> ext_blocks, rel_blocks;
        std::vector<std::vector<std::pair<int, const ChainMap*>>> eb(dst_keys.size()), rb(dst_keys.size());
        // Materialize extended/induced restriction maps first (stable addresses).
        std::vector<std::tuple<size_t, int, int>> placing;  // (target, signed source, index into blocks)
        for (size_t t = 0; t < dst_keys.size(); ++t) {
            const auto& lambda = dst_keys[t];
            for (size_t j = 0; j < lambda.size(); ++j) {
                std::vector<int> mu = lambda;
                mu.erase(mu.begin() + static_cast<long>(j));
                const ChainMap& f = diagram.restriction(mu, lambda);
                const int s = src_idx.at(mu);
                const int signed_s = j % 2 == 0 ? s : -s - 1;
                ext_blocks.push_back(extend_map(f, HE.at(mu), HE.at(lambda)));
                placing.emplace_back(t, signed_s, static_cast<int>(ext_blocks.size()) - 1);

                // Induced map on relative quotients: project o restrict o section.
                const QuotientComplexResult& qs = REL.at(mu);
                const QuotientComplexResult& qt = REL.at(lambda);
                ChainMap rf = ChainMap::make(qs.Q, qt.Q);
                for (int q = qs.Q.min_deg; q <= qs.Q.max_deg; ++q)
                    rf.set_map(q, qt.projection.map(q) * (f.map(q) * qs.reps[q - qs.Q.min_deg]));
                validate(rf);
                rel_blocks.push_back(std::move(rf));
            }
        }
        for (size_t k = 0; k < placing.size(); ++k) {
            const auto& [t, signed_s, idx] = placing[k];
            eb[t].emplace_back(signed_s, &ext_blocks[idx]);
            rb[t].emplace_back(signed_s, &rel_blocks[idx]);
        }
        DH.rho.push_back(assemble_level_map(sp, dp, DH.columns[m], DH.columns[m + 1], eb));
        DR.rho.push_back(assemble_level_map(rsp, rdp, DR.columns[m], DR.columns[m + 1], rb));
    }
    validate(DH);
    validate(DR);

    const Totalization TH = totalize(DH);
    const Totalization TR = totalize(DR);

    // Hodge filtration on the totalization via the per-column level tables;
    // form filtration on the relative totalization via the inner degree.
    std::vector<std::vector<int>> hlev, flev;
    for (int n = TH.total.min_deg; n <= TH.total.max_deg; ++n) {
        std::vector<int> lv;
        for (const auto& [m, q, i] : TH.origin[n - TH.total.min_deg])
            lv.push_back(col_hlevels[m][q - DH.columns[m].min_deg][i]);
        hlev.push_back(std::move(lv));
    }
    for (int n = TR.total.min_deg; n <= TR.total.max_deg; ++n) {
        std::vector<int> lv;
        for (const auto& [m, q, i] : TR.origin[n - TR.total.min_deg])
            lv.push_back(q);
        flev.push_back(std::move(lv));
    }
    out.H = filtration_from_levels(TH.total, hlev);
    out.relative_total = filtration_from_levels(TR.total, flev);

    // Top arrow: global HE into column 0 through the extended augmentation restrictions.
    const auto singles = level_subsets(diagram, 0);
    std::vector<ChainMap> aug_ext;
    for (const auto& k : singles)
        aug_ext.push_back(extend_map(diagram.restriction({}, k), out.global_HE, HE.at(k)));
    out.from_global = ChainMap::make(out.global_HE.total, out.H.C);
    for (int q = out.from_global.min_deg;
         q <= std::max(out.global_HE.total.max_deg, out.H.C.max_deg); ++q) {
        SparseRatMatrix m(out.H.C.dim(q), out.global_HE.total.dim(q));
        int roff = 0;  // column 0 occupies the leading block of each total degree
        for (size_t s = 0; s < singles.size(); ++s) {
            for (const auto& [i, j, v] : aug_ext[s].map(q).entries())
                m.set(roff + i, j, v);
            roff += HE.at(singles[s]).total.dim(q);
        }
        out.from_global.set_map(q, std::move(m));
    }
    validate(out.from_global);

    // Left arrow: the global augmentation onto the global relative quotient.
    out.global_quotient = quotient_complex(diagram.payload({}), all_ops);
    out.global_quotient_filtered = stupid_filtration(out.global_quotient.Q);
    out.global_augmentation = augmentation(out.global_HE, out.global_quotient);

    // Right arrow: columnwise augmentations assembled over the totalizations.
    out.to_relative = ChainMap::make(out.H.C, out.relative_total.C);
    {
        std::map<std::pair<int, std::vector<int>>, ChainMap> augs;
        for (int m = 0; m <= diagram.m_max; ++m)
            for (const auto& k : level_subsets(diagram, m))
                augs.emplace(std::make_pair(m, k), augmentation(HE.at(k), REL.at(k)));
        for (int n = out.to_relative.min_deg;
             n <= std::max(out.H.C.max_deg, out.relative_total.C.max_deg); ++n) {
            SparseRatMatrix mm(out.relative_total.C.dim(n), out.H.C.dim(n));
            int roff = 0, coff = 0;
            for (int m = 0; m <= diagram.m_max; ++m) {
                const auto keys = level_subsets(diagram, m);
                const int q = n - m;
                for (const auto& k : keys) {
                    const ChainMap& a = augs.at({m, k});
                    for (const auto& [i, j, v] : a.map(q).entries())
                        mm.set(roff + i, coff + j, v);
                    roff += REL.at(k).Q.dim(q);
                    coff += HE.at(k).total.dim(q);
                }
            }
            out.to_relative.set_map(n, std::move(mm));
        }
        validate(out.to_relative);
    }

    // Bottom arrow: global relative into relative column 0.
    out.relative_from_global = ChainMap::make(out.global_quotient.Q, out.relative_total.C);
    for (int q = out.relative_from_global.min_deg;
         q <= std::max(out.global_quotient.Q.max_deg, out.relative_total.C.max_deg); ++q) {
        SparseRatMatrix m(out.relative_total.C.dim(q), out.global_quotient.Q.dim(q));
        int roff = 0;
        for (const auto& k : singles) {
            const QuotientComplexResult& qt = REL.at(k);
            if (out.global_quotient.Q.dim(q) > 0) {
                const SparseRatMatrix blk =
                    qt.projection.map(q) * (diagram.restriction({}, k).map(q) *
                                            out.global_quotient.reps[q - out.global_quotient.Q.min_deg]);
                for (const auto& [i, j, v] : blk.entries())
                    m.set(roff + i, j, v);
            }
            roff += qt.Q.dim(q);
        }
        out.relative_from_global.set_map(q, std::move(m));
    }
    validate(out.relative_from_global);

    return out;
}

ChainMap h_total_inclusion(const ComponentDiagram& diagram, const HComplexResult& small,
                           const HComplexResult& big) {
    if (small.N > big.N)
        throw Error("IndexOutOfRange", "inclusion requires the smaller truncation first");
    const int m_small = static_cast<int>(pd_monomials_upto(diagram.r, small.N).size());
    ChainMap f = ChainMap::make(small.H.C, big.H.C);
    for (int n = f.min_deg; n <= std::max(small.H.C.max_deg, big.H.C.max_deg); ++n) {
        SparseRatMatrix mat(big.H.C.dim(n), small.H.C.dim(n));
        int roff = 0, coff = 0;
        for (int m = 0; m <= diagram.m_max; ++m) {
            const int q = n - m;
            for (const auto& key : level_subsets(diagram, m)) {
                const int cd = diagram.payload(key).C.dim(q);
                for (int k = 0; k < m_small; ++k)
                    for (int i = 0; i < cd; ++i)
                        mat.set(roff + k * cd + i, coff + k * cd + i, Rat(1));
                roff += static_cast<int>(pd_monomials_upto(diagram.r, big.N).size()) * cd;
                coff += m_small * cd;
            }
        }
        f.set_map(n, std::move(mat));
    }
    validate(f);
    return f;
}

bool square_commutes(const HComplexResult& built) {
    const ChainMap a = compose(built.to_relative, built.from_global);
    const ChainMap b = compose(built.relative_from_global, built.global_augmentation);
    const int lo = std::min(a.min_deg, b.min_deg);
    const int hi = std::max(a.min_deg + static_cast<int>(a.maps.size()),
                            b.min_deg + static_cast<int>(b.maps.size()));
    for (int q = lo; q <= hi; ++q)
        if (a.map(q) != b.map(q))
            return false;
    return true;
}

}  // namespace hirschlab
