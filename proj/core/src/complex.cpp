#include "hirschlab/complex.hpp"

#include <algorithm>

namespace hirschlab {

static const std::vector<std::string> kNoLabels;

int Complex::total_dim() const {
    int t = 0;
    for (int v : dims)
        t += v;
    return t;
}

const std::vector<std::string>& Complex::labels_at(int q) const {
    if (!in_range(q))
        return kNoLabels;
    return labels[q - min_deg];
}

SparseRatMatrix Complex::diff(int q) const {
    if (!in_range(q))
        return SparseRatMatrix::zero(dim(q + 1), 0);
    return d[q - min_deg];
}

Complex Complex::zero() { return Complex{}; }

Complex Complex::make(int min_deg, std::vector<int> dims, std::vector<std::vector<std::string>> labels) {
    Complex C;
    C.min_deg = min_deg;
    C.max_deg = min_deg + static_cast<int>(dims.size()) - 1;
    C.dims = std::move(dims);
    if (labels.empty()) {
        labels.resize(C.dims.size());
        for (size_t k = 0; k < C.dims.size(); ++k)
            for (int i = 0; i < C.dims[k]; ++i)
                labels[k].push_back("v" + std::to_string(min_deg + static_cast<int>(k)) + "_" +
                                    std::to_string(i));
    }
    C.labels = std::move(labels);
    C.d.resize(C.dims.size());
    for (size_t k = 0; k < C.dims.size(); ++k) {
        const int next = k + 1 < C.dims.size() ? C.dims[k + 1] : 0;
        C.d[k] = SparseRatMatrix::zero(next, C.dims[k]);
    }
    return C;
}

void Complex::set_diff(int q, SparseRatMatrix m) {
    if (!in_range(q))
        throw Error("IndexOutOfRange", "set_diff degree " + std::to_string(q));
    if (m.rows() != dim(q + 1) || m.cols() != dim(q))
        throw Error("ShapeMismatch", "differential at degree " + std::to_string(q) + " must be " +
                                         std::to_string(dim(q + 1)) + "x" + std::to_string(dim(q)));
    d[q - min_deg] = std::move(m);
}

void validate(const Complex& C) {
    if (C.max_deg < C.min_deg)
        return;
    if (C.dims.size() != C.labels.size() || C.dims.size() != C.d.size())
        throw Error("ShapeMismatch", "complex internal arrays disagree");
    for (int q = C.min_deg; q <= C.max_deg; ++q) {
        if (static_cast<int>(C.labels_at(q).size()) != C.dim(q))
            throw Error("ShapeMismatch", "labels at degree " + std::to_string(q));
        const SparseRatMatrix dq = C.diff(q);
        if (dq.rows() != C.dim(q + 1) || dq.cols() != C.dim(q))
            throw Error("ShapeMismatch", "differential shape at degree " + std::to_string(q));
        if (q + 1 <= C.max_deg) {
            const SparseRatMatrix sq = C.diff(q + 1) * dq;
            if (!sq.is_zero()) {
                int witness = 0;
                for (const auto& [i, j, v] : sq.entries()) {
                    witness = j;
                    break;
                }
                throw Error("DSquareNonzero",
                            "d^2 != 0 leaving degree " + std::to_string(q) + "; witness basis vector " +
                                (witness < static_cast<int>(C.labels_at(q).size())
                                     ? C.labels_at(q)[witness]
                                     : std::to_string(witness)));
            }
        }
    }
}

SparseRatMatrix ChainMap::map(int q) const {
    const int k = q - min_deg;
    if (k >= 0 && k < static_cast<int>(maps.size()))
        return maps[k];
    return SparseRatMatrix::zero(target.dim(q), source.dim(q));
}

void ChainMap::set_map(int q, SparseRatMatrix m) {
    const int k = q - min_deg;
    if (k < 0 || k >= static_cast<int>(maps.size()))
        throw Error("IndexOutOfRange", "set_map degree " + std::to_string(q));
    if (m.rows() != target.dim(q) || m.cols() != source.dim(q))
        throw Error("ShapeMismatch", "chain map block at degree " + std::to_string(q));
    maps[k] = std::move(m);
}

ChainMap ChainMap::make(Complex source, Complex target) {
    ChainMap f;
    f.min_deg = std::min(source.min_deg, target.min_deg);
    const int hi = std::max(source.max_deg, target.max_deg);
    f.maps.resize(std::max(0, hi - f.min_deg + 1));
    for (int q = f.min_deg; q <= hi; ++q)
        f.maps[q - f.min_deg] = SparseRatMatrix::zero(target.dim(q), source.dim(q));
    f.source = std::move(source);
    f.target = std::move(target);
    return f;
}

ChainMap ChainMap::identity(const Complex& C) {
    ChainMap f = make(C, C);
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        f.set_map(q, SparseRatMatrix::identity(C.dim(q)));
    return f;
}

void validate(const ChainMap& f) {
    const int lo = std::min(f.source.min_deg, f.target.min_deg);
    const int hi = std::max(f.source.max_deg, f.target.max_deg);
    for (int q = lo; q <= hi; ++q) {
        const SparseRatMatrix lhs = f.target.diff(q) * f.map(q);
        const SparseRatMatrix rhs = f.map(q + 1) * f.source.diff(q);
        if (lhs != rhs)
            throw Error("NotChainMap", "does not commute with d at degree " + std::to_string(q));
    }
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
    ChainMap h = ChainMap::make(f.source, g.target);
    const int lo = h.min_deg;
    const int hi = lo + static_cast<int>(h.maps.size()) - 1;
    for (int q = lo; q <= hi; ++q)
        h.set_map(q, g.map(q) * f.map(q));
    return h;
}

CohomologyData cohomology(const Complex& C, int q) {
    CohomologyData out;
    out.kernel = kernel_basis(C.diff(q));
    out.image = image_basis(C.diff(q - 1));
    const QuotientResult quo = quotient_dims(out.image, hstack(out.image, out.kernel));
    out.dim = quo.dim;
    out.reps = quo.complement;
    return out;
}

int euler_characteristic(const Complex& C) {
    int chi = 0;
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        chi += (q % 2 == 0 ? 1 : -1) * C.dim(q);
    return chi;
}

Complex shift(const Complex& C, int k) {
    if (C.max_deg < C.min_deg)
        return C;
    std::vector<std::vector<std::string>> labels = C.labels;
    Complex S = Complex::make(C.min_deg - k, C.dims, std::move(labels));
    const Rat sign((k % 2 == 0) ? 1 : -1);
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        S.set_diff(q - k, C.diff(q).scaled(sign));
    return S;
}

ConeResult mapping_cone(const ChainMap& f) {
    const Complex& A = f.source;
    const Complex& B = f.target;
    const int lo = std::min(A.min_deg - 1, B.min_deg);
    const int hi = std::max(A.max_deg - 1, B.max_deg);

    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    for (int q = lo; q <= hi; ++q) {
        dims.push_back(A.dim(q + 1) + B.dim(q));
        std::vector<std::string> lab;
        for (const auto& s : A.labels_at(q + 1))
            lab.push_back("s(" + s + ")");
        for (const auto& s : B.labels_at(q))
            lab.push_back(s);
        labels.push_back(std::move(lab));
    }
    Complex MC = Complex::make(lo, std::move(dims), std::move(labels));
    for (int q = lo; q <= hi; ++q) {
        const SparseRatMatrix dA = A.diff(q + 1).scaled(Rat(-1));
        const SparseRatMatrix fq = f.map(q + 1);
        const SparseRatMatrix dB = B.diff(q);
        MC.set_diff(q, from_blocks({{&dA, nullptr}, {&fq, &dB}}, {A.dim(q + 2), B.dim(q + 1)},
                                   {A.dim(q + 1), B.dim(q)}));
    }

    ConeResult out;
    out.cone = MC;
    out.inclusion = ChainMap::make(B, MC);
    for (int q = B.min_deg; q <= B.max_deg; ++q) {
        SparseRatMatrix inc(MC.dim(q), B.dim(q));
        for (int i = 0; i < B.dim(q); ++i)
            inc.set(A.dim(q + 1) + i, i, Rat(1));
        out.inclusion.set_map(q, std::move(inc));
    }
    const Complex A1 = shift(A, 1);
    out.projection = ChainMap::make(MC, A1);
    for (int q = lo; q <= hi; ++q) {
        SparseRatMatrix prj(A.dim(q + 1), MC.dim(q));
        for (int i = 0; i < A.dim(q + 1); ++i)
            prj.set(i, i, Rat(1));
        out.projection.set_map(q, std::move(prj));
    }
    return out;
}

Complex direct_sum(const std::vector<Complex>& parts) {
    if (parts.empty())
        return Complex::zero();
    int lo = parts[0].min_deg, hi = parts[0].max_deg;
    for (const Complex& P : parts) {
        lo = std::min(lo, P.min_deg);
        hi = std::max(hi, P.max_deg);
    }
    if (hi < lo)
        return Complex::zero();
    std::vector<int> dims;
    std::vector<std::vector<std::string>> labels;
    for (int q = lo; q <= hi; ++q) {
        int dq = 0;
        std::vector<std::string> lab;
        for (size_t s = 0; s < parts.size(); ++s) {
            dq += parts[s].dim(q);
            for (const auto& l : parts[s].labels_at(q))
                lab.push_back(parts.size() > 1 ? "#" + std::to_string(s) + "." + l : l);
        }
        dims.push_back(dq);
        labels.push_back(std::move(lab));
    }
    Complex S = Complex::make(lo, std::move(dims), std::move(labels));
    for (int q = lo; q <= hi; ++q) {
        std::vector<std::vector<const SparseRatMatrix*>> blocks(parts.size(),
                                                                std::vector<const SparseRatMatrix*>(parts.size(), nullptr));
        std::vector<SparseRatMatrix> diag;
        diag.reserve(parts.size());
        std::vector<int> rsz, csz;
        for (const Complex& P : parts)
            diag.push_back(P.diff(q));
        for (size_t s = 0; s < parts.size(); ++s) {
            blocks[s][s] = &diag[s];
            rsz.push_back(parts[s].dim(q + 1));
            csz.push_back(parts[s].dim(q));
        }
        S.set_diff(q, from_blocks(blocks, rsz, csz));
    }
    return S;
}

bool is_acyclic(const Complex& C) {
    for (int q = C.min_deg; q <= C.max_deg; ++q)
        if (cohomology(C, q).dim != 0)
            return false;
    return true;
}

SparseRatMatrix induced_cohomology_map(const ChainMap& f, int q, const CohomologyData& hsource,
                                       const CohomologyData& htarget) {
    if (hsource.dim == 0)
        return SparseRatMatrix::zero(htarget.dim, 0);
    const SparseRatMatrix images = f.map(q) * hsource.reps;
    const LinearSolver solver(hstack(htarget.reps, htarget.image));
    const auto sol = solver.solve(images);
    if (!sol)
        throw Error("Internal", "chain map image escapes the target kernel at degree " + std::to_string(q));
    std::vector<int> rep_rows(htarget.dim);
    for (int i = 0; i < htarget.dim; ++i)
        rep_rows[i] = i;
    return sol->select_rows(rep_rows);
}

QuasiIsoReport is_quasi_iso(const ChainMap& f) {
    QuasiIsoReport rep;
    const int lo = std::min(f.source.min_deg, f.target.min_deg);
    const int hi = std::max(f.source.max_deg, f.target.max_deg);
    for (int q = lo; q <= hi; ++q) {
        const CohomologyData hs = cohomology(f.source, q);
        const CohomologyData ht = cohomology(f.target, q);
        bool iso = false;
        if (hs.dim == ht.dim) {
            const SparseRatMatrix m = induced_cohomology_map(f, q, hs, ht);
            iso = rank(m) == hs.dim;
        }
        rep.by_degree.emplace_back(q, iso);
        rep.overall = rep.overall && iso;
    }
    // Independent route: the cone of a quasi-isomorphism is acyclic.
    const bool cone_acyclic = is_acyclic(mapping_cone(f).cone);
    if (cone_acyclic != rep.overall)
        throw Error("Internal", "quasi-isomorphism verdicts disagree between induced maps and cone");
    return rep;
}

ExactnessReport check_exact_sequence(const std::vector<ChainMap>& maps, bool augmented) {
    if (maps.empty())
        throw Error("EmptySequence", "no maps given");
    for (size_t k = 0; k + 1 < maps.size(); ++k) {
        if (maps[k].target.dims != maps[k + 1].source.dims || maps[k].target.min_deg != maps[k + 1].source.min_deg)
            throw Error("ShapeMismatch", "maps " + std::to_string(k) + " and " + std::to_string(k + 1) +
                                             " are not composable");
        const ChainMap comp = compose(maps[k + 1], maps[k]);
        for (int q = comp.min_deg; q <= comp.min_deg + static_cast<int>(comp.maps.size()) - 1; ++q)
            if (!comp.map(q).is_zero())
                throw Error("CompositionNonzero", "maps " + std::to_string(k) + "," + std::to_string(k + 1) +
                                                      " compose nonzero at degree " + std::to_string(q));
    }

    ExactnessReport rep;
    const int nodes = static_cast<int>(maps.size()) + 1;
    for (int node = 0; node < nodes; ++node) {
        const bool has_in = node > 0;
        const bool has_out = node + 1 < nodes;
        if (!augmented && (!has_in || !has_out))
            continue;
        const Complex& A = has_in ? maps[node - 1].target : maps[node].source;
        for (int q = A.min_deg; q <= A.max_deg; ++q) {
            const SparseRatMatrix in_map =
                has_in ? maps[node - 1].map(q) : SparseRatMatrix::zero(A.dim(q), 0);
            const SparseRatMatrix out_map =
                has_out ? maps[node].map(q) : SparseRatMatrix::zero(0, A.dim(q));
            const int kdim = A.dim(q) - rank(out_map);
            const int idim = rank(in_map);
            if (kdim != idim) {
                rep.exact = false;
                rep.defects.emplace_back(node, q, kdim - idim);
            }
        }
    }
    return rep;
}

std::string render_combination(const std::vector<std::string>& labels, const SparseRatMatrix& column) {
    std::string out;
    for (const auto& [i, j, v] : column.entries()) {
        const std::string name = i < static_cast<int>(labels.size()) ? labels[i] : "e" + std::to_string(i);
        if (out.empty()) {
            if (v == Rat(1))
                out = name;
            else if (v == Rat(-1))
                out = "-" + name;
            else
                out = v.str() + "*" + name;
        } else {
            const Rat a = v.sign() < 0 ? -v : v;
            out += v.sign() < 0 ? " - " : " + ";
            if (a == Rat(1))
                out += name;
            else
                out += a.str() + "*" + name;
        }
    }
    return out.empty() ? "0" : out;
}

}  // namespace hirschlab
