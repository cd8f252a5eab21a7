#include "hirschlab/filtration.hpp"

#include <algorithm>

namespace hirschlab {

bool FilteredComplex::has_level(int i) const {
    return std::binary_search(levels.begin(), levels.end(), i);
}

SparseRatMatrix FilteredComplex::span_at(int i, int q) const {
    if (!C.in_range(q))
        return SparseRatMatrix::zero(C.dim(q), 0);
    if (levels.empty() || i <= levels.front())
        return SparseRatMatrix::identity(C.dim(q));
    if (i > levels.back())
        return SparseRatMatrix::zero(C.dim(q), 0);
    const auto it = std::lower_bound(levels.begin(), levels.end(), i);
    const size_t k = static_cast<size_t>(it - levels.begin());
    return F[k][q - C.min_deg];
}

FilteredComplex filtration_from_levels(Complex C, const std::vector<std::vector<int>>& flevels) {
    FilteredComplex FC;
    int lo = 0, hi = -1;
    bool any = false;
    for (const auto& per_degree : flevels)
        for (int l : per_degree) {
            if (!any) {
                lo = hi = l;
                any = true;
            } else {
                lo = std::min(lo, l);
                hi = std::max(hi, l);
            }
        }
    if (!any) {
        FC.C = std::move(C);
        FC.levels = {0};
        FC.F.resize(1);
        for (int q = FC.C.min_deg; q <= FC.C.max_deg; ++q)
            FC.F[0].push_back(SparseRatMatrix::identity(FC.C.dim(q)));
        return FC;
    }
    for (int i = lo; i <= hi; ++i)
        FC.levels.push_back(i);
    FC.F.resize(FC.levels.size());
    for (size_t k = 0; k < FC.levels.size(); ++k) {
        const int i = FC.levels[k];
        for (int q = C.min_deg; q <= C.max_deg; ++q) {
            std::vector<int> cols;
            const auto& lv = flevels[q - C.min_deg];
            for (int j = 0; j < C.dim(q); ++j)
                if (lv[j] >= i)
                    cols.push_back(j);
            SparseRatMatrix sel(C.dim(q), static_cast<int>(cols.size()));
            for (size_t c = 0; c < cols.size(); ++c)
                sel.set(cols[c], static_cast<int>(c), Rat(1));
            FC.F[k].push_back(std::move(sel));
        }
    }
    FC.C = std::move(C);
    return FC;
}

FilteredComplex trivial_filtration(Complex C, int level) {
    std::vector<std::vector<int>> flevels;
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        flevels.emplace_back(C.dim(q), level);
    return filtration_from_levels(std::move(C), flevels);
}

FilteredComplex stupid_filtration(Complex C) {
    std::vector<std::vector<int>> flevels;
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        flevels.emplace_back(C.dim(q), q);
    return filtration_from_levels(std::move(C), flevels);
}

FilteredComplex extend_levels_to(FilteredComplex FC, int hi) {
    while (!FC.levels.empty() && FC.levels.back() < hi) {
        FC.levels.push_back(FC.levels.back() + 1);
        std::vector<SparseRatMatrix> spans;
        for (int q = FC.C.min_deg; q <= FC.C.max_deg; ++q)
            spans.push_back(SparseRatMatrix::zero(FC.C.dim(q), 0));
        FC.F.push_back(std::move(spans));
    }
    return FC;
}

void validate(const FilteredComplex& FC) {
    validate(FC.C);
    if (FC.levels.size() != FC.F.size())
        throw Error("ShapeMismatch", "levels/F size mismatch");
    for (size_t k = 1; k < FC.levels.size(); ++k)
        if (FC.levels[k] <= FC.levels[k - 1])
            throw Error("ShapeMismatch", "filtration levels must increase");
    for (size_t k = 0; k < FC.levels.size(); ++k) {
        if (static_cast<int>(FC.F[k].size()) != std::max(0, FC.C.max_deg - FC.C.min_deg + 1))
            throw Error("ShapeMismatch", "filtration span list at level " + std::to_string(FC.levels[k]));
        for (int q = FC.C.min_deg; q <= FC.C.max_deg; ++q) {
            const SparseRatMatrix& S = FC.F[k][q - FC.C.min_deg];
            if (S.rows() != FC.C.dim(q))
                throw Error("ShapeMismatch", "span ambient dimension at level " +
                                                 std::to_string(FC.levels[k]) + " degree " + std::to_string(q));
        }
    }
    for (int q = FC.C.min_deg; q <= FC.C.max_deg; ++q) {
        // Exhaustive at the smallest stored level.
        if (!FC.levels.empty() && rank(FC.F[0][q - FC.C.min_deg]) != FC.C.dim(q))
            throw Error("NotExhaustive", "F at the smallest level does not span degree " + std::to_string(q));
        for (size_t k = 0; k < FC.levels.size(); ++k) {
            const SparseRatMatrix& S = FC.F[k][q - FC.C.min_deg];
            if (k + 1 < FC.levels.size() && !in_span(S, FC.F[k + 1][q - FC.C.min_deg]))
                throw Error("ContainmentViolation", "F^" + std::to_string(FC.levels[k + 1]) +
                                                        " not contained in F^" + std::to_string(FC.levels[k]) +
                                                        " at degree " + std::to_string(q));
            if (!in_span(FC.span_at(FC.levels[k], q + 1), FC.C.diff(q) * S))
                throw Error("NotDStable", "d does not preserve F^" + std::to_string(FC.levels[k]) +
                                              " at degree " + std::to_string(q));
        }
    }
}

void validate(const FilteredChainMap& ff) {
    validate(ff.map);
    std::vector<int> levels = ff.source.levels;
    levels.insert(levels.end(), ff.target.levels.begin(), ff.target.levels.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (int i : levels)
        for (int q = ff.source.C.min_deg; q <= ff.source.C.max_deg; ++q) {
            const SparseRatMatrix img = ff.map.map(q) * ff.source.span_at(i, q);
            if (!in_span(ff.target.span_at(i, q), img))
                throw Error("NotFiltered", "map does not send F^" + std::to_string(i) + " into F^" +
                                               std::to_string(i) + " at degree " + std::to_string(q));
        }
}

GrData gr_data(const FilteredComplex& FC, int i) {
    GrData out;
    const Complex& C = FC.C;
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    std::vector<SparseRatMatrix> reps;
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        const QuotientResult quo = quotient_dims(FC.span_at(i + 1, q), FC.span_at(i, q));
        dims.push_back(quo.dim);
        std::vector<std::string> lab;
        for (int c = 0; c < quo.dim; ++c) {
            std::string s = render_combination(C.labels_at(q), quo.complement.select_columns({c}));
            if (s.size() > 60)
                s = s.substr(0, 57) + "...";
            lab.push_back(s);
        }
        labels.push_back(std::move(lab));
        reps.push_back(quo.complement);
    }
    out.gr = Complex::make(C.min_deg, std::move(dims), std::move(labels));
    out.reps = std::move(reps);
    // Induced differential: express d(rep) in the complement basis modulo F^{i+1}.
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        const SparseRatMatrix& R = out.reps[q - C.min_deg];
        const int gdim = out.gr.dim(q);
        const int gnext = out.gr.dim(q + 1);
        if (gdim == 0 || gnext == 0)
            continue;
        const SparseRatMatrix& Rn = out.reps[q + 1 - C.min_deg];
        const LinearSolver solver(hstack(Rn, FC.span_at(i + 1, q + 1)));
        const auto sol = solver.solve(C.diff(q) * R);
        if (!sol)
            throw Error("Internal", "gr differential escapes F^i at degree " + std::to_string(q));
        std::vector<int> rows(gnext);
        for (int k = 0; k < gnext; ++k)
            rows[k] = k;
        out.gr.set_diff(q, sol->select_rows(rows));
    }
    return out;
}

Complex gr(const FilteredComplex& FC, int i) { return gr_data(FC, i).gr; }

ChainMap induced_gr_map(const FilteredChainMap& ff, int i) {
    if (!ff.source.has_level(i) || !ff.target.has_level(i))
        throw Error("LevelMismatch", "level " + std::to_string(i) + " not stored on both sides");
    const GrData gs = gr_data(ff.source, i);
    const GrData gt = gr_data(ff.target, i);
    ChainMap out = ChainMap::make(gs.gr, gt.gr);
    for (int q = out.min_deg; q <= std::max(gs.gr.max_deg, gt.gr.max_deg); ++q) {
        if (gs.gr.dim(q) == 0)
            continue;
        const SparseRatMatrix img = ff.map.map(q) * gs.reps[q - gs.gr.min_deg];
        const int gdim = gt.gr.dim(q);
        const LinearSolver solver(hstack(gt.reps[q - gt.gr.min_deg], ff.target.span_at(i + 1, q)));
        const auto sol = solver.solve(img);
        if (!sol)
            throw Error("NotFiltered", "image escapes F^" + std::to_string(i) + " at degree " + std::to_string(q));
        std::vector<int> rows(gdim);
        for (int k = 0; k < gdim; ++k)
            rows[k] = k;
        out.set_map(q, sol->select_rows(rows));
    }
    return out;
}

FilteredQuasiIsoReport is_filtered_quasi_iso(const FilteredChainMap& ff, const std::vector<int>& levels) {
    FilteredQuasiIsoReport rep;
    for (int i : levels) {
        const ChainMap g = induced_gr_map(ff, i);
        const bool ok = is_quasi_iso(g).overall;
        rep.by_level.emplace_back(i, ok);
        rep.overall = rep.overall && ok;
    }
    return rep;
}

int SpectralPage::entry(int p, int q) const {
    const auto it = entries.find({p, q});
    return it == entries.end() ? 0 : it->second;
}

SparseRatMatrix SpectralPage::d_at(int p, int q) const {
    const auto it = d.find({p, q});
    if (it != d.end())
        return it->second;
    return SparseRatMatrix::zero(entry(p + r, q - r + 1), entry(p, q));
}

namespace {

// Z_r^{p,q} as a span matrix: combinations of F^p C^n landing in F^{p+r} under d.
SparseRatMatrix z_span(const FilteredComplex& FC, int r, int p, int n) {
    const SparseRatMatrix S = FC.span_at(p, n);
    if (S.cols() == 0)
        return S;
    const SparseRatMatrix T = FC.span_at(p + r, n + 1);
    const SparseRatMatrix dS = FC.C.diff(n) * S;
    const SparseRatMatrix K = kernel_basis(hstack(dS, T.scaled(Rat(-1))));
    std::vector<int> arows(S.cols());
    for (int k = 0; k < S.cols(); ++k)
        arows[k] = k;
    const SparseRatMatrix coeffs = image_basis(K.select_rows(arows));
    return S * coeffs;
}

struct Spot {
    SparseRatMatrix numerator;      // span of Z_r^{pq}
    SparseRatMatrix denominator;    // span of Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2}
    QuotientResult quo;             // reps of E_r^{pq}
};

Spot compute_spot(const FilteredComplex& FC, int r, int p, int n) {
    Spot s;
    s.numerator = z_span(FC, r, p, n);
    const SparseRatMatrix zin = z_span(FC, r - 1, p + 1, n);
    const SparseRatMatrix zup = z_span(FC, r - 1, p - r + 1, n - 1);
    s.denominator = image_basis(hstack(zin, FC.C.diff(n - 1) * zup));
    s.quo = quotient_dims(s.denominator, hstack(s.denominator, s.numerator));
    return s;
}

}  // namespace

SpectralPage spectral_page(const FilteredComplex& FC, int r) {
    if (r < 0)
        throw Error("IndexOutOfRange", "page index must be >= 0");
    SpectralPage page;
    page.r = r;
    const Complex& C = FC.C;
    std::map<std::pair<int, int>, Spot> spots;
    for (int p : FC.levels)
        for (int n = C.min_deg; n <= C.max_deg; ++n) {
            Spot s = compute_spot(FC, r, p, n);
            if (s.quo.dim > 0)
                page.entries[{p, n - p}] = s.quo.dim;
            spots.emplace(std::make_pair(p, n), std::move(s));
        }
    for (auto& [key, s] : spots) {
        const auto [p, n] = key;
        const int q = n - p;
        if (s.quo.dim == 0)
            continue;
        const int tq = q - r + 1;
        const auto ti = spots.find({p + r, n + 1});
        if (ti == spots.end() || ti->second.quo.dim == 0) {
            if (page.entry(p + r, tq) != 0)
                throw Error("Internal", "spectral target bookkeeping");
            continue;
        }
        const Spot& t = ti->second;
        const SparseRatMatrix dR = C.diff(n) * s.quo.complement;
        const LinearSolver solver(hstack(t.quo.complement, hstack(t.denominator, t.numerator)));
        const auto sol = solver.solve(dR);
        if (!sol)
            throw Error("Internal", "d_r image escapes the target spot at (p,q)=(" + std::to_string(p) +
                                        "," + std::to_string(q) + ")");
        std::vector<int> rows(t.quo.dim);
        for (int k = 0; k < t.quo.dim; ++k)
            rows[k] = k;
        const SparseRatMatrix m = sol->select_rows(rows);
        if (!m.is_zero())
            page.d[{p, q}] = m;
    }
    return page;
}

int stable_page_index(const FilteredComplex& FC) {
    return static_cast<int>(FC.levels.size()) + 1;
}

bool pages_consistent(const FilteredComplex& FC, int r) {
    const SpectralPage pr = spectral_page(FC, r);
    const SpectralPage pn = spectral_page(FC, r + 1);
    // d_r o d_r = 0.
    for (const auto& [key, m] : pr.d) {
        const auto [p, q] = key;
        const SparseRatMatrix next = pr.d_at(p + r, q - r + 1);
        if (!(next * m).is_zero())
            return false;
    }
    // Entries of the next page are the cohomology of this one, spot by spot.
    std::vector<std::pair<int, int>> keys;
    for (const auto& [key, dim] : pr.entries)
        keys.push_back(key);
    for (const auto& [key, dim] : pn.entries)
        keys.push_back(key);
    for (const auto& [p, q] : keys) {
        const SparseRatMatrix out = pr.d_at(p, q);
        const SparseRatMatrix in = pr.d_at(p - r, q + r - 1);
        const int expected = pr.entry(p, q) - rank(out) - rank(in);
        if (pn.entry(p, q) != expected)
            return false;
    }
    return true;
}

bool converges_to_cohomology(const FilteredComplex& FC) {
    const SpectralPage inf = spectral_page(FC, stable_page_index(FC));
    for (int n = FC.C.min_deg; n <= FC.C.max_deg; ++n) {
        int total = 0;
        for (int p : FC.levels)
            total += inf.entry(p, n - p);
        if (total != cohomology(FC.C, n).dim)
            return false;
    }
    return true;
}

DegenerationReport check_degeneration(const FilteredComplex& FC, int r0) {
    DegenerationReport rep;
    const int rmax = stable_page_index(FC);
    for (int r = std::max(0, r0); r <= rmax; ++r) {
        const SpectralPage page = spectral_page(FC, r);
        for (const auto& [key, m] : page.d) {
            if (!m.is_zero()) {
                rep.degenerates = false;
                rep.first_nonzero_r = r;
                rep.witness_p = key.first;
                rep.witness_q = key.second;
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace hirschlab
