/**
 * @file building.cpp
 * @brief Additive norms, canonical forms, parahoric and Moy–Prasad membership.
 */
#include "stf/building.hpp"

#include <algorithm>
#include <numeric>

namespace stf {

namespace {

void check_rank(size_t n) {
    if (n == 0 || n > kMaxRank) throw DomainError("matrix size must be between 1 and 8");
}

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

/** ord(x) ≥ bound (scaled), deciding unresolved zeros when their bound suffices. */
bool ord_at_least(const LaurentElem& x, int64_t bound) {
    if (x.is_exact_zero()) return true;
    if (x.is_zero_class()) {
        if (x.valuation_bound() >= ceil_div(bound, kOffsetDen)) return true;
        throw PrecisionError("entry is an unresolved zero below the required valuation");
    }
    return x.ord() * kOffsetDen >= bound;
}

bool ord_greater(const LaurentElem& x, int64_t bound) {
    if (x.is_exact_zero()) return true;
    if (x.is_zero_class()) {
        if (x.valuation_bound() * kOffsetDen > bound) return true;
        throw PrecisionError("entry is an unresolved zero below the required valuation");
    }
    return x.ord() * kOffsetDen > bound;
}

const FieldTower* tower_of(const LMatrix& m) { return m.a.at(0).tower(); }
uint32_t layer_of(const LMatrix& m) { return m.a.at(0).layer(); }

}  // namespace

AdditiveNorm standard_norm(const FieldTower* t, uint32_t layer, const std::vector<int64_t>& offsets) {
    check_rank(offsets.size());
    return AdditiveNorm{identity_matrix(t, layer, offsets.size()), offsets};
}

int64_t evaluate(const AdditiveNorm& x, const std::vector<LaurentElem>& v, int64_t prec_if_exact) {
    check_rank(x.basis.n);
    if (x.offsets.size() != x.basis.n || v.size() != x.basis.n)
        throw DomainError("evaluate: dimension mismatch");
    std::vector<LaurentElem> a = solve(x.basis, v, prec_if_exact);
    // Coordinates known only to vanish modulo their precision give lower bounds.
    int64_t best = kInf, bound = kInf;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_exact_zero()) continue;
        if (a[i].is_zero_class())
            bound = std::min(bound, a[i].valuation_bound() * kOffsetDen + x.offsets[i]);
        else
            best = std::min(best, a[i].ord() * kOffsetDen + x.offsets[i]);
    }
    if (bound < best) throw PrecisionError("norm value not determined at the working precision");
    return best;
}

AdditiveNorm act(const LMatrix& g, const AdditiveNorm& x) {
    if (g.n != x.basis.n) throw DomainError("act: dimension mismatch");
    bool singular = false;
    try {
        singular = determinant(g, 40).is_zero_class();
    } catch (const PrecisionError&) {
        singular = true;
    }
    if (singular) throw DomainError("act: singular matrix");
    return AdditiveNorm{g * x.basis, x.offsets};
}

bool norm_geq(const AdditiveNorm& x, const AdditiveNorm& y, int64_t prec_if_exact) {
    const size_t n = y.basis.n;
    for (size_t j = 0; j < n; ++j) {
        std::vector<LaurentElem> b(n);
        for (size_t i = 0; i < n; ++i) b[i] = y.basis.at(i, j);
        if (evaluate(x, b, prec_if_exact) < y.offsets[j]) return false;
    }
    return true;
}

bool norm_equal(const AdditiveNorm& x, const AdditiveNorm& y, int64_t prec_if_exact) {
    return norm_geq(x, y, prec_if_exact) && norm_geq(y, x, prec_if_exact);
}

bool in_fundamental_simplex(const std::vector<int64_t>& c) {
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i] < 0 || c[i] >= kOffsetDen) return false;
        if (i > 0 && c[i] > c[i - 1]) return false;
    }
    return true;
}

CanonicalForm canonicalize(const AdditiveNorm& x) {
    const size_t n = x.basis.n;
    check_rank(n);
    std::vector<int64_t> frac(n);
    LMatrix scaled = x.basis;
    for (size_t i = 0; i < n; ++i) {
        const int64_t fl = floor_div(x.offsets[i], kOffsetDen);
        frac[i] = x.offsets[i] - fl * kOffsetDen;
        for (size_t r = 0; r < n; ++r) scaled.at(r, i) = scaled.at(r, i).shifted(-fl);
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return frac[a] > frac[b]; });
    CanonicalForm out{std::vector<int64_t>(n), scaled};
    for (size_t k = 0; k < n; ++k) {
        out.offsets[k] = frac[order[k]];
        for (size_t r = 0; r < n; ++r) out.witness.at(r, k) = scaled.at(r, order[k]);
    }
    return out;
}

bool parahoric_member(const std::vector<int64_t>& c, const LMatrix& g, int64_t prec_if_exact) {
    check_rank(g.n);
    if (!in_fundamental_simplex(c)) throw DomainError("parahoric test needs a point of the simplex");
    for (size_t i = 0; i < g.n; ++i)
        for (size_t j = 0; j < g.n; ++j)
            if (!ord_at_least(g.at(i, j), kOffsetDen * ceil_div(c[j] - c[i], kOffsetDen))) return false;
    return determinant(g, prec_if_exact).ord() == 0;
}

bool stabilizes(const std::vector<int64_t>& c, const LMatrix& g, int64_t prec_if_exact) {
    AdditiveNorm x = standard_norm(tower_of(g), layer_of(g), c);
    return norm_equal(act(g, x), x, prec_if_exact);
}

bool mp_lie_member(const std::vector<int64_t>& c, const LMatrix& X, int64_t r, bool plus) {
    check_rank(X.n);
    for (size_t i = 0; i < X.n; ++i)
        for (size_t j = 0; j < X.n; ++j) {
            const int64_t bound = r + c[j] - c[i];
            if (plus ? !ord_greater(X.at(i, j), bound) : !ord_at_least(X.at(i, j), bound)) return false;
        }
    return true;
}

bool mp_group_member(const std::vector<int64_t>& c, const LMatrix& g, int64_t r, bool plus,
                     int64_t prec_if_exact) {
    if (r < 0) throw DomainError("Moy-Prasad depth must be non-negative");
    if (r == 0 && !plus) return parahoric_member(c, g, prec_if_exact);
    LMatrix X = g - identity_matrix(tower_of(g), layer_of(g), g.n);
    if (!mp_lie_member(c, X, r, plus)) return false;
    return determinant(g, prec_if_exact).ord() == 0;
}

LMatrix mp_iso(const std::vector<int64_t>& c, const LMatrix& g, int64_t r, int64_t prec_if_exact) {
    if (r <= 0 || !mp_group_member(c, g, r, false, prec_if_exact))
        throw DomainError("mp_iso: element is not in G_{x,r} for r > 0");
    return g - identity_matrix(tower_of(g), layer_of(g), g.n);
}

LMatrix mp_iso_inv(const std::vector<int64_t>& c, const LMatrix& X, int64_t r) {
    if (r <= 0 || !mp_lie_member(c, X, r, false))
        throw DomainError("mp_iso_inv: element is not in g_{x,r} for r > 0");
    return X + identity_matrix(tower_of(X), layer_of(X), X.n);
}

int64_t AffineRoot::evaluate(const std::vector<int64_t>& c) const {
    return c.at(i) - c.at(j) + m * kOffsetDen;
}

LMatrix root_element(const FieldTower* t, uint32_t layer, size_t n, size_t i, size_t j,
                     const LaurentElem& a) {
    if (i == j || i >= n || j >= n) throw DomainError("root element needs distinct indices in range");
    LMatrix u = identity_matrix(t, layer, n);
    u.at(i, j) = a;
    return u;
}

bool affine_root_member(const AffineRoot& psi, const LMatrix& u) {
    check_rank(u.n);
    if (psi.i == psi.j || psi.i >= u.n || psi.j >= u.n) throw DomainError("invalid affine root");
    for (size_t r = 0; r < u.n; ++r)
        for (size_t s = 0; s < u.n; ++s) {
            const auto& e = u.at(r, s);
            if (r == psi.i && s == psi.j) continue;
            bool ok = (r == s) ? (e - LaurentElem::one(e.tower(), e.layer())).is_zero_class()
                               : e.is_zero_class();
            if (!ok) throw DomainError("matrix is not of the shape 1 + a E_ij");
        }
    return ord_at_least(u.at(psi.i, psi.j), psi.m * kOffsetDen);
}

bool half_plane_fixes(const AffineRoot& psi, const std::vector<int64_t>& c) { return psi.evaluate(c) >= 0; }

ParahoricFactorization factor_parahoric(const std::vector<int64_t>& c, const LMatrix& g,
                                        int64_t prec_if_exact) {
    if (!parahoric_member(c, g, prec_if_exact)) throw DomainError("element is not in the parahoric");
    const size_t n = g.n;
    const auto* t = tower_of(g);
    const uint32_t layer = layer_of(g);
    LMatrix A = g;
    // Each op multiplies A on the left by 1 + a E_ij; record the inverse factor 1 − a E_ij.
    std::vector<std::tuple<size_t, size_t, LaurentElem>> ops;
    auto row_add = [&](size_t target, size_t source, const LaurentElem& a) {
        AffineRoot psi{target, source, 0};
        const int64_t need = c[source] - c[target];
        psi.m = ceil_div(need, kOffsetDen);
        LMatrix u = root_element(t, layer, n, target, source, a);
        if (!affine_root_member(psi, u) || !half_plane_fixes(psi, c))
            throw DomainError("row operation leaves the parahoric");
        for (size_t j = 0; j < n; ++j) A.at(target, j) = A.at(target, j) + a * A.at(source, j);
        ops.emplace_back(target, source, -a);
    };
    for (size_t col = 0; col < n; ++col) {
        const auto& diag = A.at(col, col);
        if (diag.is_zero_class() || diag.ord() != 0) {
            size_t piv = n;
            for (size_t r = col + 1; r < n && piv == n; ++r)
                if (c[r] == c[col] && !A.at(r, col).is_zero_class() && A.at(r, col).ord() == 0) piv = r;
            if (piv == n) throw PrecisionError("no unit pivot within the block");
            row_add(col, piv, LaurentElem::one(t, layer));
        }
        LaurentElem inv = invert(A.at(col, col), prec_if_exact);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || A.at(r, col).is_zero_class()) continue;
            row_add(r, col, -(A.at(r, col) * inv));
        }
    }
    ParahoricFactorization f;
    f.diagonal = identity_matrix(t, layer, n);
    for (size_t i = 0; i < n; ++i) f.diagonal.at(i, i) = A.at(i, i);
    // g = (E_K ⋯ E_1)^{-1} D = E_1^{-1} ⋯ E_K^{-1} D
    for (auto& op : ops) f.roots.push_back(op);
    return f;
}

LMatrix expand(const ParahoricFactorization& f) {
    const auto* t = tower_of(f.diagonal);
    const uint32_t layer = layer_of(f.diagonal);
    LMatrix acc = identity_matrix(t, layer, f.diagonal.n);
    for (const auto& [i, j, a] : f.roots) acc = acc * root_element(t, layer, f.diagonal.n, i, j, a);
    return acc * f.diagonal;
}

}  // namespace stf
