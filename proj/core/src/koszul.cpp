#include "hirschlab/koszul.hpp"

#include <algorithm>
#include <map>

namespace hirschlab {

std::vector<std::vector<int>> wedge_subsets(int m, int q) {
    std::vector<std::vector<int>> out;
    if (q < 0 || q > m)
        return out;
    std::vector<int> cur(q);
    for (int i = 0; i < q; ++i)
        cur[i] = i;
    while (true) {
        out.push_back(cur);
        int k = q - 1;
        while (k >= 0 && cur[k] == m - q + k)
            --k;
        if (k < 0)
            break;
        ++cur[k];
        for (int t = k + 1; t < q; ++t)
            cur[t] = cur[t - 1] + 1;
    }
    if (q == 0)
        out = {{}};
    return out;
}

int insertion_sign(const std::vector<int>& T, int s) {
    int before = 0;
    for (int t : T) {
        if (t == s)
            return 0;
        if (t < s)
            ++before;
    }
    return before % 2 == 0 ? 1 : -1;
}

namespace {

long gamma_count(int dim, int k) {
    if (k < 0)
        return 0;
    if (dim == 0)
        return k == 0 ? 1 : 0;
    return static_cast<long>(pd_monomials_of_weight(dim, k).size());
}

long choose(int m, int q) { return static_cast<long>(wedge_subsets(m, q).size()); }

std::string wedge_label(const std::vector<int>& T, const std::string& stem) {
    if (T.empty())
        return "1";
    std::string s;
    for (int t : T) {
        if (!s.empty())
            s += "^";
        s += stem + std::to_string(t + 1);
    }
    return s;
}

}  // namespace

Complex koszul_complex(const KoszulInput& inp, int n) {
    if (n < 0)
        throw Error("IndexOutOfRange", "weight must be >= 0");
    const int qmax = std::min(n, inp.E2_dim);
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    std::vector<std::string> u_names;
    for (int i = 0; i < inp.E1_dim; ++i)
        u_names.push_back("u" + std::to_string(i + 1));

    std::vector<std::vector<Exponents>> monos;   // per degree: weight n-q monomials
    std::vector<std::vector<std::vector<int>>> wedges;
    for (int q = 0; q <= qmax; ++q) {
        monos.push_back(inp.E1_dim == 0 ? (n - q == 0 ? std::vector<Exponents>{{}} : std::vector<Exponents>{})
                                        : pd_monomials_of_weight(inp.E1_dim, n - q));
        wedges.push_back(wedge_subsets(inp.E2_dim, q));
        dims.push_back(static_cast<int>(monos[q].size() * wedges[q].size()) * inp.coeff_dim);
        std::vector<std::string> lab;
        for (const auto& a : monos[q])
            for (const auto& T : wedges[q])
                for (int v = 0; v < inp.coeff_dim; ++v) {
                    std::string s = monomial_label(a, u_names);
                    const std::string w = wedge_label(T, "f");
                    s = s.empty() ? w : (w == "1" ? s : s + "*" + w);
                    if (inp.coeff_dim > 1)
                        s += "(x)c" + std::to_string(v + 1);
                    lab.push_back(s);
                }
        labels.push_back(std::move(lab));
    }
    Complex K = Complex::make(0, std::move(dims), std::move(labels));

    for (int q = 0; q < qmax; ++q) {
        SparseRatMatrix d(K.dim(q + 1), K.dim(q));
        std::map<Exponents, int> mono_idx;
        for (size_t k = 0; k < monos[q + 1].size(); ++k)
            mono_idx[monos[q + 1][k]] = static_cast<int>(k);
        std::map<std::vector<int>, int> wedge_idx;
        for (size_t k = 0; k < wedges[q + 1].size(); ++k)
            wedge_idx[wedges[q + 1][k]] = static_cast<int>(k);

        const long wq = static_cast<long>(wedges[q].size());
        const long wq1 = static_cast<long>(wedges[q + 1].size());
        for (size_t am = 0; am < monos[q].size(); ++am) {
            const Exponents& a = monos[q][am];
            for (size_t tw = 0; tw < wedges[q].size(); ++tw) {
                const std::vector<int>& T = wedges[q][tw];
                const long col_base = (static_cast<long>(am) * wq + static_cast<long>(tw)) * inp.coeff_dim;
                for (int j = 0; j < inp.E1_dim; ++j) {
                    if (a[j] == 0)
                        continue;
                    Exponents low = a;
                    low[j] -= 1;
                    const int am2 = mono_idx.at(low);
                    for (int s = 0; s < inp.E2_dim; ++s) {
                        const Rat c = inp.psi.at(s, j);
                        if (c.is_zero())
                            continue;
                        const int sign = insertion_sign(T, s);
                        if (sign == 0)
                            continue;
                        std::vector<int> T2 = T;
                        T2.insert(std::lower_bound(T2.begin(), T2.end(), s), s);
                        const int tw2 = wedge_idx.at(T2);
                        const long row_base = (static_cast<long>(am2) * wq1 + tw2) * inp.coeff_dim;
                        const Rat val = sign > 0 ? c : -c;
                        for (int v = 0; v < inp.coeff_dim; ++v)
                            d.set(static_cast<int>(row_base) + v, static_cast<int>(col_base) + v, val);
                    }
                }
            }
        }
        K.set_diff(q, std::move(d));
    }
    return K;
}

KoszulProfile koszul_profile(const KoszulInput& inp, int n) {
    const Complex K = koszul_complex(inp, n);
    validate(K);
    const int r = rank(inp.psi);
    const int kdim = inp.E1_dim - r;
    const int cdim = inp.E2_dim - r;
    KoszulProfile out;
    for (int q = 0; q <= std::max(K.max_deg, std::min(n, inp.E2_dim)); ++q) {
        KoszulProfileRow row;
        row.q = q;
        row.computed = cohomology(K, q).dim;
        row.closed_form = static_cast<int>(gamma_count(kdim, n - q) * choose(cdim, q)) * inp.coeff_dim;
        if (row.computed != row.closed_form)
            out.match = false;
        out.rows.push_back(row);
    }
    return out;
}

GrIdentifyResult gr_identify(const HirschDatum& H, int i, int N) {
    if (!H.exterior)
        throw Error("NotExteriorType", "datum carries no exterior structure");
    if (N < i)
        throw Error("TruncationTooSmall", "need N >= i so gr_F^i is complete");
    const ExteriorStructure& ext = *H.exterior;
    if (H.C.min_deg != 0)
        throw Error("NotExteriorType", "exterior-type complexes start in degree 0");
    for (int q = 0; q <= H.C.max_deg; ++q)
        if (H.C.dim(q) != static_cast<int>(choose(ext.gens, q)) * ext.coeff_dim)
            throw Error("NotExteriorType", "dimension at degree " + std::to_string(q) +
                                               " is not an exterior power count");
    // The operators must be wedge by the declared 1-forms.
    for (int j = 0; j < H.r; ++j)
        for (int q = 0; q <= H.C.max_deg; ++q) {
            SparseRatMatrix expected(H.C.dim(q + 1), H.C.dim(q));
            const auto Ts = wedge_subsets(ext.gens, q);
            const auto T2s = wedge_subsets(ext.gens, q + 1);
            std::map<std::vector<int>, int> t2_idx;
            for (size_t k = 0; k < T2s.size(); ++k)
                t2_idx[T2s[k]] = static_cast<int>(k);
            for (size_t tw = 0; tw < Ts.size(); ++tw)
                for (int s = 0; s < ext.gens; ++s) {
                    const Rat c = ext.psi.at(s, j);
                    if (c.is_zero())
                        continue;
                    const int sign = insertion_sign(Ts[tw], s);
                    if (sign == 0)
                        continue;
                    std::vector<int> T2 = Ts[tw];
                    T2.insert(std::lower_bound(T2.begin(), T2.end(), s), s);
                    const int row = t2_idx.at(T2);
                    for (int v = 0; v < ext.coeff_dim; ++v)
                        expected.set(row * ext.coeff_dim + v, static_cast<int>(tw) * ext.coeff_dim + v,
                                     sign > 0 ? c : -c);
                }
            if (H.op(j, q) != expected)
                throw Error("NotExteriorType", "operator " + std::to_string(j + 1) +
                                                   " is not wedge by its declared 1-form at degree " +
                                                   std::to_string(q));
        }

    const TruncatedHirschExtension HE = truncated_extension(H, N);
    const FilteredComplex FC = hodge_filtration(HE);
    const GrData gd = gr_data(FC, i);

    KoszulInput inp;
    inp.E1_dim = H.r;
    inp.E2_dim = ext.gens;
    inp.psi = ext.psi;
    inp.coeff_dim = ext.coeff_dim;
    const Complex K = koszul_complex(inp, i);

    GrIdentifyResult out;
    out.iso = ChainMap::make(gd.gr, K);
    const int hi = std::max(gd.gr.max_deg, K.max_deg);
    for (int q = std::min(gd.gr.min_deg, K.min_deg); q <= hi; ++q) {
        if (gd.gr.dim(q) != K.dim(q)) {
            out.verified = false;
            return out;
        }
        out.iso.set_map(q, SparseRatMatrix::identity(K.dim(q)));
        // Both bases enumerate (weight i-q monomial, wedge tuple, coefficient), so the
        // matched differentials must agree entrywise.
        if (gd.gr.diff(q) != K.diff(q)) {
            out.verified = false;
            return out;
        }
    }
    validate(out.iso);
    return out;
}

}  // namespace hirschlab
