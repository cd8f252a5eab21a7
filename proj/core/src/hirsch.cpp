#include "hirschlab/hirsch.hpp"

#include <algorithm>
#include <map>

namespace hirschlab {

int weight(const Exponents& e) {
    int w = 0;
    for (int v : e)
        w += v;
    return w;
}

static void enumerate_weight(int r, int k, Exponents& cur, std::vector<Exponents>& out) {
    const int pos = static_cast<int>(cur.size());
    if (pos == r - 1) {
        cur.push_back(k);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = k; v >= 0; --v) {  // lex: larger early exponent first
        cur.push_back(v);
        enumerate_weight(r, k - v, cur, out);
        cur.pop_back();
    }
}

std::vector<Exponents> pd_monomials_of_weight(int r, int k) {
    std::vector<Exponents> out;
    if (r == 0) {
        if (k == 0)
            out.push_back({});
        return out;
    }
    Exponents cur;
    enumerate_weight(r, k, cur, out);
    return out;
}

std::vector<Exponents> pd_monomials_upto(int r, int N) {
    std::vector<Exponents> out;
    for (int k = 0; k <= N; ++k) {
        auto w = pd_monomials_of_weight(r, k);
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

std::string monomial_label(const Exponents& e, const std::vector<std::string>& var_names) {
    std::string out;
    for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0)
            continue;
        if (!out.empty())
            out += "*";
        out += var_names[i];
        if (e[i] > 1)
            out += "^[" + std::to_string(e[i]) + "]";
    }
    return out;
}

Rat pd_product_coeff(const Exponents& a, const Exponents& b) {
    mpz_class c = 1;
    for (size_t i = 0; i < a.size(); ++i)
        c *= binomial(static_cast<unsigned long>(a[i] + b[i]), static_cast<unsigned long>(a[i]));
    return Rat(mpq_class(c));
}

/* ---------------- datum ---------------- */

SparseRatMatrix HirschDatum::op(int j, int q) const {
    const int k = q - C.min_deg;
    if (j < 0 || j >= r)
        throw Error("IndexOutOfRange", "operator index " + std::to_string(j));
    if (k >= 0 && k < static_cast<int>(L[j].size()))
        return L[j][k];
    return SparseRatMatrix::zero(C.dim(q + 1), C.dim(q));
}

HirschDatum HirschDatum::make(Complex C, int r, std::vector<std::string> u_names) {
    HirschDatum H;
    H.r = r;
    if (u_names.empty())
        for (int j = 0; j < r; ++j)
            u_names.push_back("u" + std::to_string(j + 1));
    H.u_names = std::move(u_names);
    H.L.resize(r);
    for (int j = 0; j < r; ++j) {
        H.L[j].resize(std::max(0, C.max_deg - C.min_deg + 1));
        for (int q = C.min_deg; q <= C.max_deg; ++q)
            H.L[j][q - C.min_deg] = SparseRatMatrix::zero(C.dim(q + 1), C.dim(q));
    }
    H.C = std::move(C);
    return H;
}

void HirschDatum::set_op(int j, int q, SparseRatMatrix m) {
    if (m.rows() != C.dim(q + 1) || m.cols() != C.dim(q))
        throw Error("ShapeMismatch", "operator block at degree " + std::to_string(q));
    L[j][q - C.min_deg] = std::move(m);
}

void validate_hirsch_datum(const HirschDatum& H) {
    validate(H.C);
    for (int j = 0; j < H.r; ++j)
        for (int q = H.C.min_deg; q <= H.C.max_deg; ++q) {
            if (!(H.op(j, q + 1) * H.op(j, q)).is_zero())
                throw Error("SquareNonzero", "L_" + std::to_string(j + 1) + " squares nonzero at degree " +
                                                 std::to_string(q));
            if (!(H.C.diff(q + 1) * H.op(j, q) + H.op(j, q + 1) * H.C.diff(q)).is_zero())
                throw Error("AntiCommute", "d and L_" + std::to_string(j + 1) +
                                               " do not anticommute at degree " + std::to_string(q));
            for (int k = j + 1; k < H.r; ++k)
                if (!(H.op(j, q + 1) * H.op(k, q) + H.op(k, q + 1) * H.op(j, q)).is_zero())
                    throw Error("AntiCommute", "L_" + std::to_string(j + 1) + " and L_" + std::to_string(k + 1) +
                                                   " do not anticommute at degree " + std::to_string(q));
        }
}

/* ---------------- truncated extension ---------------- */

int TruncatedHirschExtension::index(int mono_idx, int q, int c_idx) const {
    return mono_idx * datum.C.dim(q) + c_idx;
}

std::vector<std::vector<int>> TruncatedHirschExtension::hodge_levels() const {
    std::vector<std::vector<int>> out;
    for (int q = total.min_deg; q <= total.max_deg; ++q) {
        std::vector<int> lv;
        lv.reserve(total.dim(q));
        for (int m = 0; m < monomial_count(); ++m)
            for (int c = 0; c < datum.C.dim(q); ++c)
                lv.push_back(q + weight(monomials[m]));
        out.push_back(std::move(lv));
    }
    return out;
}

std::vector<std::vector<int>> TruncatedHirschExtension::weight_levels() const {
    std::vector<std::vector<int>> out;
    for (int q = total.min_deg; q <= total.max_deg; ++q) {
        std::vector<int> lv;
        lv.reserve(total.dim(q));
        for (int m = 0; m < monomial_count(); ++m)
            for (int c = 0; c < datum.C.dim(q); ++c)
                lv.push_back(-weight(monomials[m]));
        out.push_back(std::move(lv));
    }
    return out;
}

TruncatedHirschExtension truncated_extension(const HirschDatum& H, int N) {
    if (N < 0)
        throw Error("IndexOutOfRange", "truncation bound must be >= 0");
    TruncatedHirschExtension HE;
    HE.N = N;
    HE.datum = H;
    HE.monomials = pd_monomials_upto(H.r, N);
    const int M = HE.monomial_count();
    std::map<Exponents, int> mono_index;
    for (int m = 0; m < M; ++m)
        mono_index[HE.monomials[m]] = m;

    const Complex& C = H.C;
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        dims.push_back(M * C.dim(q));
        std::vector<std::string> lab;
        lab.reserve(dims.back());
        for (int m = 0; m < M; ++m) {
            const std::string mono = monomial_label(HE.monomials[m], H.u_names);
            for (const auto& s : C.labels_at(q))
                lab.push_back(mono.empty() ? s : mono + "*" + s);
        }
        labels.push_back(std::move(lab));
    }
    Complex total = Complex::make(C.min_deg, std::move(dims), std::move(labels));

    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        SparseRatMatrix dq(total.dim(q + 1), total.dim(q));
        const SparseRatMatrix dC = C.diff(q);
        std::vector<SparseRatMatrix> ops;
        for (int j = 0; j < H.r; ++j)
            ops.push_back(H.op(j, q));
        for (int m = 0; m < M; ++m) {
            const Exponents& e = HE.monomials[m];
            const int coff = m * C.dim(q);
            const int roff_same = m * C.dim(q + 1);
            for (const auto& [i, jj, v] : dC.entries())
                dq.set(roff_same + i, coff + jj, v);
            for (int j = 0; j < H.r; ++j) {
                if (e[j] == 0)
                    continue;
                Exponents low = e;
                low[j] -= 1;
                const int roff = mono_index.at(low) * C.dim(q + 1);
                for (const auto& [i, jj, v] : ops[j].entries())
                    dq.set(roff + i, coff + jj, v);
            }
        }
        total.set_diff(q, std::move(dq));
    }
    HE.total = std::move(total);
    return HE;
}

FilteredComplex hodge_filtration(const TruncatedHirschExtension& HE) {
    return filtration_from_levels(HE.total, HE.hodge_levels());
}

FilteredComplex weight_filtration_G(const TruncatedHirschExtension& HE) {
    return filtration_from_levels(HE.total, HE.weight_levels());
}

/* ---------------- quotients and residues ---------------- */

QuotientComplexResult quotient_complex(const HirschDatum& H, const std::vector<int>& J) {
    const Complex& C = H.C;
    std::vector<int> keep;
    for (int j = 0; j < H.r; ++j)
        if (std::find(J.begin(), J.end(), j) == J.end())
            keep.push_back(j);

    // U^q = sum of the images of the selected operators entering degree q.
    std::vector<SparseRatMatrix> U;
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        SparseRatMatrix stacked(C.dim(q), 0);
        for (int j : J)
            stacked = hstack(stacked, H.op(j, q - 1));
        U.push_back(image_basis(stacked));
    }
    auto U_at = [&](int q) {
        return C.in_range(q) ? U[q - C.min_deg] : SparseRatMatrix::zero(C.dim(q), 0);
    };

    // U must be a subcomplex and stable under the remaining operators.
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        if (!in_span(U_at(q + 1), C.diff(q) * U_at(q)))
            throw Error("NotSubcomplex", "d does not preserve the image span at degree " + std::to_string(q));
        for (int j : keep)
            if (!in_span(U_at(q + 1), H.op(j, q) * U_at(q)))
                throw Error("NotSubcomplex", "a remaining operator does not preserve the image span at degree " +
                                                 std::to_string(q));
    }

    QuotientComplexResult out;
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        const QuotientResult quo = quotient_dims(U_at(q), SparseRatMatrix::identity(C.dim(q)));
        out.reps.push_back(quo.complement);
        dims.push_back(quo.dim);
        std::vector<std::string> lab;
        for (int c = 0; c < quo.dim; ++c)
            lab.push_back("[" + render_combination(C.labels_at(q), quo.complement.select_columns({c})) + "]");
        labels.push_back(std::move(lab));
    }
    out.Q = Complex::make(C.min_deg, dims, std::move(labels));

    // Projection: coordinates of each basis vector in [reps | U].
    std::vector<SparseRatMatrix> proj;
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        const int gdim = out.Q.dim(q);
        const LinearSolver solver(hstack(out.reps[q - C.min_deg], U_at(q)));
        const auto sol = solver.solve(SparseRatMatrix::identity(C.dim(q)));
        if (!sol)
            throw Error("Internal", "projection solve failed");
        std::vector<int> rows(gdim);
        for (int k = 0; k < gdim; ++k)
            rows[k] = k;
        proj.push_back(sol->select_rows(rows));
    }
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        const SparseRatMatrix pd = C.in_range(q + 1)
                                       ? proj[q + 1 - C.min_deg] * (C.diff(q) * out.reps[q - C.min_deg])
                                       : SparseRatMatrix::zero(0, out.Q.dim(q));
        out.Q.set_diff(q, pd);
    }

    out.projection = ChainMap::make(C, out.Q);
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        out.projection.set_map(q, proj[q - C.min_deg]);
    validate(out.projection);

    out.induced = HirschDatum::make(out.Q, static_cast<int>(keep.size()));
    for (size_t jj = 0; jj < keep.size(); ++jj) {
        out.induced.u_names[jj] = H.u_names[keep[jj]];
        for (int q = C.min_deg; q <= C.max_deg; ++q) {
            const SparseRatMatrix m = C.in_range(q + 1)
                                          ? proj[q + 1 - C.min_deg] * (H.op(keep[jj], q) * out.reps[q - C.min_deg])
                                          : SparseRatMatrix::zero(0, out.Q.dim(q));
            out.induced.set_op(static_cast<int>(jj), q, m);
        }
    }
    out.remaining = keep;
    validate_hirsch_datum(out.induced);
    return out;
}

namespace {

std::vector<int> first_indices(int k) {
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i)
        v[i] = i;
    return v;
}

// The connecting wedge C_i[-1] -> C_{i-1} between consecutive tower quotients.
ChainMap tower_wedge(const HirschDatum& H, const QuotientComplexResult& deeper,
                     const QuotientComplexResult& shallower, int i) {
    const Complex shifted = shift(deeper.Q, -1);
    ChainMap w = ChainMap::make(shifted, shallower.Q);
    for (int q = shifted.min_deg; q <= shifted.max_deg; ++q) {
        // (C_i[-1])^q = C_i^{q-1}; apply L_i to representatives, project to C_{i-1}.
        const SparseRatMatrix img = H.op(i - 1, q - 1) * deeper.reps[q - 1 - H.C.min_deg];
        w.set_map(q, shallower.projection.map(q) * img);
    }
    validate(w);
    return w;
}

}  // namespace

ExactnessReport residue_sequence(const HirschDatum& H, int i) {
    if (i < 1 || i > H.r)
        throw Error("IndexOutOfRange", "residue index " + std::to_string(i));
    const QuotientComplexResult deeper = quotient_complex(H, first_indices(i));
    const QuotientComplexResult shallower = quotient_complex(H, first_indices(i - 1));
    const ChainMap w = tower_wedge(H, deeper, shallower, i);
    // C_{i-1} -> C_i: classes of the shallower quotient mapped through the deeper projection.
    ChainMap pr = ChainMap::make(shallower.Q, deeper.Q);
    for (int q = shallower.Q.min_deg; q <= shallower.Q.max_deg; ++q)
        pr.set_map(q, deeper.projection.map(q) * shallower.reps[q - H.C.min_deg]);
    validate(pr);
    return check_exact_sequence({w, pr}, true);
}

LongSequenceReport long_cohomology_sequence(const HirschDatum& H, int i) {
    if (i < 1 || i > H.r)
        throw Error("IndexOutOfRange", "tower index " + std::to_string(i));
    const QuotientComplexResult deeper = quotient_complex(H, first_indices(i));
    const QuotientComplexResult shallower = quotient_complex(H, first_indices(i - 1));
    const ChainMap w = tower_wedge(H, deeper, shallower, i);
    ChainMap pr = ChainMap::make(shallower.Q, deeper.Q);
    for (int q = shallower.Q.min_deg; q <= shallower.Q.max_deg; ++q)
        pr.set_map(q, deeper.projection.map(q) * shallower.reps[q - H.C.min_deg]);
    validate(pr);

    LongSequenceReport rep;
    const Complex& Ci = deeper.Q;
    const Complex& Cprev = shallower.Q;
    const Complex shifted = shift(Ci, -1);
    for (int q = Cprev.min_deg; q <= Cprev.max_deg + 1; ++q) {
        const CohomologyData ha = cohomology(shifted, q);  // = H^{q-1}(C_i)
        const CohomologyData hb = cohomology(Cprev, q);
        const CohomologyData hc = cohomology(Ci, q);
        if (ha.dim == 0 && hb.dim == 0 && hc.dim == 0)
            continue;
        const SparseRatMatrix m1 = induced_cohomology_map(w, q, ha, hb);
        const SparseRatMatrix m2 = induced_cohomology_map(pr, q, hb, hc);
        const bool inj = rank(m1) == ha.dim;
        const bool surj = rank(m2) == hc.dim;
        const bool middle = (m2 * m1).is_zero() && rank(m2) == hb.dim - rank(m1);
        const bool ok = inj && surj && middle;
        rep.rows.emplace_back(q, ha.dim, hb.dim, hc.dim, ok);
        if (!ok && rep.exact) {
            rep.exact = false;
            rep.failure_degree = q;
        }
    }
    return rep;
}

ChainMap augmentation(const TruncatedHirschExtension& HE, const QuotientComplexResult& quo) {
    const Complex& C = HE.datum.C;
    ChainMap f = ChainMap::make(HE.total, quo.Q);
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        SparseRatMatrix m(quo.Q.dim(q), HE.total.dim(q));
        // Only the u-degree-zero block survives; it lands via the quotient projection.
        const SparseRatMatrix pi = quo.projection.map(q);
        for (const auto& [i, j, v] : pi.entries())
            m.set(i, j, v);  // monomial 0 is the first block
        f.set_map(q, std::move(m));
    }
    validate(f);
    return f;
}

ChainMap truncation_inclusion(const TruncatedHirschExtension& small, const TruncatedHirschExtension& big) {
    if (small.N > big.N)
        throw Error("IndexOutOfRange", "inclusion requires N <= M");
    const Complex& C = small.datum.C;
    ChainMap f = ChainMap::make(small.total, big.total);
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        SparseRatMatrix m(big.total.dim(q), small.total.dim(q));
        // Graded-lex monomials of the smaller truncation are a prefix of the bigger one.
        for (int k = 0; k < small.total.dim(q); ++k)
            m.set(k, k, Rat(1));
        f.set_map(q, std::move(m));
    }
    validate(f);
    return f;
}

StabilizedCohomology stabilized_cohomology(const HirschDatum& H, int q, StabilizationOptions opts) {
    if (opts.N0 < 0)
        opts.N0 = std::max(0, H.C.max_deg) + 2;
    if (opts.N_max < 0)
        opts.N_max = opts.N0 + 8;
    const int w = opts.window;

    std::map<int, TruncatedHirschExtension> cache;
    auto trunc = [&](int N) -> const TruncatedHirschExtension& {
        auto it = cache.find(N);
        if (it == cache.end())
            it = cache.emplace(N, truncated_extension(H, N)).first;
        return it->second;
    };
    auto transition_rank = [&](int N, int win) {
        const TruncatedHirschExtension& a = trunc(N);
        const TruncatedHirschExtension& b = trunc(N + win);
        const ChainMap inc = truncation_inclusion(a, b);
        const CohomologyData ha = cohomology(a.total, q);
        const CohomologyData hb = cohomology(b.total, q);
        return rank(induced_cohomology_map(inc, q, ha, hb));
    };

    StabilizationCertificate cert;
    cert.q = q;
    for (int N = opts.N0; N + 1 + w + 1 <= opts.N_max; ++N) {
        const int r00 = transition_rank(N, w);
        const int r01 = transition_rank(N, w + 1);
        const int r10 = transition_rank(N + 1, w);
        const int r11 = transition_rank(N + 1, w + 1);
        cert.ranks.emplace_back(N, w, r00);
        cert.ranks.emplace_back(N, w + 1, r01);
        cert.ranks.emplace_back(N + 1, w, r10);
        cert.ranks.emplace_back(N + 1, w + 1, r11);
        if (r00 == r01 && r00 == r10 && r00 == r11)
            return StabilizedCohomology{r00, std::move(cert)};
    }
    throw NotStabilizedError(std::move(cert));
}

ChainMap extend_map(const ChainMap& f, const HirschDatum& H_source, const HirschDatum& H_target, int N) {
    return extend_map(f, truncated_extension(H_source, N), truncated_extension(H_target, N));
}

ChainMap extend_map(const ChainMap& f, const TruncatedHirschExtension& hs,
                    const TruncatedHirschExtension& ht) {
    const HirschDatum& H_source = hs.datum;
    const HirschDatum& H_target = ht.datum;
    if (H_source.r != H_target.r || hs.N != ht.N)
        throw Error("CompatibilityViolation", "operator counts or truncation bounds differ");
    for (int j = 0; j < H_source.r; ++j)
        for (int q = H_source.C.min_deg; q <= H_source.C.max_deg; ++q)
            if (f.map(q + 1) * H_source.op(j, q) != H_target.op(j, q) * f.map(q))
                throw Error("CompatibilityViolation", "f does not intertwine operator " + std::to_string(j + 1) +
                                                          " at degree " + std::to_string(q));
    ChainMap out = ChainMap::make(hs.total, ht.total);
    const int M = hs.monomial_count();
    for (int q = out.min_deg; q <= std::max(hs.total.max_deg, ht.total.max_deg); ++q) {
        SparseRatMatrix m(ht.total.dim(q), hs.total.dim(q));
        const SparseRatMatrix fq = f.map(q);
        for (int k = 0; k < M; ++k) {
            const int roff = k * H_target.C.dim(q);
            const int coff = k * H_source.C.dim(q);
            for (const auto& [i, j, v] : fq.entries())
                m.set(roff + i, coff + j, v);
        }
        out.set_map(q, std::move(m));
    }
    validate(out);
    return out;
}

HirschDatum cone_datum(const ChainMap& f, const HirschDatum& H_source, const HirschDatum& H_target,
                       bool flip_sign) {
    const ConeResult cone = mapping_cone(f);
    HirschDatum H = HirschDatum::make(cone.cone, H_source.r, H_source.u_names);
    const Complex& A = H_source.C;
    const Complex& B = H_target.C;
    const Rat s(flip_sign ? 1 : -1);
    for (int j = 0; j < H.r; ++j)
        for (int q = cone.cone.min_deg; q <= cone.cone.max_deg; ++q) {
            const SparseRatMatrix ls = H_source.op(j, q + 1).scaled(s);
            const SparseRatMatrix lt = H_target.op(j, q);
            H.set_op(j, q, from_blocks({{&ls, nullptr}, {nullptr, &lt}}, {A.dim(q + 2), B.dim(q + 1)},
                                       {A.dim(q + 1), B.dim(q)}));
        }
    return H;
}

ConeCommutationResult cone_commutation_check(const ChainMap& f, const HirschDatum& H_source,
                                             const HirschDatum& H_target, int N, bool flip_sign) {
    const ChainMap ext = extend_map(f, H_source, H_target, N);
    const ConeResult cone_of_ext = mapping_cone(ext);
    const HirschDatum cd = cone_datum(f, H_source, H_target, flip_sign);
    const TruncatedHirschExtension ext_of_cone = truncated_extension(cd, N);

    // Permutation matching u^[e] (x) (x, y) against (u^[e] (x) x, u^[e] (x) y).
    const Complex& A = H_source.C;
    const Complex& B = H_target.C;
    const int M = ext_of_cone.monomial_count();
    ConeCommutationResult out;
    for (int q = cone_of_ext.cone.min_deg; q <= cone_of_ext.cone.max_deg; ++q) {
        if (cone_of_ext.cone.dim(q) != ext_of_cone.total.dim(q)) {
            out.equal = false;
            out.degree = q;
            out.detail = "dimension mismatch";
            return out;
        }
    }
    auto perm_at = [&](int q) {
        // index in cone_of_ext^q of the basis vector matching ext_of_cone index.
        SparseRatMatrix P(cone_of_ext.cone.dim(q), ext_of_cone.total.dim(q));
        const int adim = A.dim(q + 1), bdim = B.dim(q);
        const int a_total = M * adim;
        for (int m = 0; m < M; ++m) {
            for (int i = 0; i < adim; ++i)
                P.set(m * adim + i, m * (adim + bdim) + i, Rat(1));
            for (int i = 0; i < bdim; ++i)
                P.set(a_total + m * bdim + i, m * (adim + bdim) + adim + i, Rat(1));
        }
        return P;
    };
    for (int q = cone_of_ext.cone.min_deg; q <= cone_of_ext.cone.max_deg; ++q) {
        const SparseRatMatrix lhs = cone_of_ext.cone.diff(q) * perm_at(q);
        const SparseRatMatrix rhs = perm_at(q + 1) * ext_of_cone.total.diff(q);
        if (lhs != rhs) {
            out.equal = false;
            out.degree = q;
            const SparseRatMatrix diffm = lhs - rhs;
            for (const auto& [i, j, v] : diffm.entries()) {
                out.detail = "first differing entry at (" + std::to_string(i) + "," + std::to_string(j) +
                             "), difference " + v.str();
                break;
            }
            return out;
        }
    }
    return out;
}

ChainMap substitute_variables(const ChainMap& g, const HirschDatum& H_prime, const HirschDatum& H,
                              const SparseRatMatrix& A, int N) {
    if (A.rows() != H.r || A.cols() != H_prime.r)
        throw Error("ShapeMismatch", "substitution matrix must be r x r'");
    for (const auto& [i, j, v] : A.entries())
        if (v.den() != 1 || v.sign() < 0)
            throw Error("CompatibilityViolation", "substitution matrix entries must be natural numbers");
    // g must intertwine L'_j with sum_i A(i,j) L_i.
    for (int j = 0; j < H_prime.r; ++j)
        for (int q = H_prime.C.min_deg; q <= H_prime.C.max_deg; ++q) {
            SparseRatMatrix rhs = SparseRatMatrix::zero(H.C.dim(q + 1), H_prime.C.dim(q));
            for (int i = 0; i < H.r; ++i) {
                const Rat a = A.at(i, j);
                if (!a.is_zero())
                    rhs = rhs + (H.op(i, q) * g.map(q)).scaled(a);
            }
            if (g.map(q + 1) * H_prime.op(j, q) != rhs)
                throw Error("CompatibilityViolation", "g does not intertwine operator " + std::to_string(j + 1) +
                                                          " at degree " + std::to_string(q));
        }

    const TruncatedHirschExtension hs = truncated_extension(H_prime, N);
    const TruncatedHirschExtension ht = truncated_extension(H, N);
    std::map<Exponents, int> target_index;
    for (int m = 0; m < ht.monomial_count(); ++m)
        target_index[ht.monomials[m]] = m;

    // Divided-power image of each source monomial: product over j of (sum_i a_ij u_i)^[e'_j].
    std::vector<std::map<Exponents, Rat>> images;
    for (const Exponents& e : hs.monomials) {
        std::map<Exponents, Rat> acc;
        acc[Exponents(H.r, 0)] = Rat(1);
        for (int j = 0; j < H_prime.r; ++j) {
            for (int rep = 0; rep < e[j]; ++rep) {
                // Multiply by the linear form sum_i a_ij u_i, then divide the
                // repeated factor's divided power at the end via binomials:
                // (x)^[k] is accumulated one factor at a time as x^k / k!.
                std::map<Exponents, Rat> next;
                for (const auto& [mono, coef] : acc)
                    for (int i = 0; i < H.r; ++i) {
                        const Rat a = A.at(i, j);
                        if (a.is_zero())
                            continue;
                        Exponents m2 = mono;
                        m2[i] += 1;
                        // u^[mono] * u_i = (mono_i + 1) u^[mono + delta_i]
                        const Rat c = coef * a * Rat(mono[i] + 1);
                        auto [it, inserted] = next.try_emplace(m2, Rat(0));
                        it->second += c;
                    }
                acc = std::move(next);
            }
            if (e[j] > 1) {
                // Divide by e_j! to turn the plain power into the divided power.
                mpz_class fact = 1;
                for (int t = 2; t <= e[j]; ++t)
                    fact *= t;
                const Rat inv{mpq_class(1) / mpq_class(fact)};
                for (auto& [mono, coef] : acc)
                    coef *= inv;
            }
        }
        images.push_back(std::move(acc));
    }

    ChainMap out = ChainMap::make(hs.total, ht.total);
    for (int q = out.min_deg; q <= std::max(hs.total.max_deg, ht.total.max_deg); ++q) {
        SparseRatMatrix m(ht.total.dim(q), hs.total.dim(q));
        const SparseRatMatrix gq = g.map(q);
        for (int k = 0; k < hs.monomial_count(); ++k) {
            const int coff = k * H_prime.C.dim(q);
            for (const auto& [mono, coef] : images[k]) {
                const auto it = target_index.find(mono);
                if (it == target_index.end())
                    continue;  // cannot happen: weights match and N is shared
                const int roff = it->second * H.C.dim(q);
                for (const auto& [i, j, v] : gq.entries())
                    m.set(roff + i, coff + j, v * coef);
            }
        }
        out.set_map(q, std::move(m));
    }
    validate(out);
    return out;
}

}  // namespace hirschlab
