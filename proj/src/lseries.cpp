/**
 * @file lseries.cpp
 * @brief Truncated Laurent-series arithmetic, matrices over F, and the text syntax.
 */
#include "stf/lseries.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#include "stf/numtheory.hpp"

namespace stf {

namespace {

int64_t sat_add(int64_t a, int64_t b) {
    if (a >= kInf || b >= kInf) return kInf;
    return a + b;
}

uint32_t lcm_layer(const LaurentElem& a, const LaurentElem& b) {
    if (a.tower() != b.tower()) throw DomainError("Laurent elements from different towers");
    uint32_t l = std::lcm(a.layer(), b.layer());
    a.tower()->require_layer(l);
    return l;
}

}  // namespace

void LaurentElem::normalize() {
    if (!tower_) throw DomainError("Laurent element requires a tower");
    if (prec_ < kInf && !c_.empty()) {
        int64_t keep = prec_ - v_;
        if (keep <= 0) c_.clear();
        else if (int64_t(c_.size()) > keep) c_.resize(size_t(keep));
    }
    size_t lead = 0;
    while (lead < c_.size() && c_[lead] == 0) ++lead;
    if (lead == c_.size()) {
        c_.clear();
        v_ = kInf;
        return;
    }
    if (lead) {
        c_.erase(c_.begin(), c_.begin() + lead);
        v_ += int64_t(lead);
    }
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

LaurentElem LaurentElem::zero(const FieldTower* t, uint32_t layer, int64_t prec) {
    LaurentElem x;
    x.tower_ = t;
    x.layer_ = layer;
    x.prec_ = prec;
    t->require_layer(layer);
    return x;
}

LaurentElem LaurentElem::one(const FieldTower* t, uint32_t layer, int64_t prec) {
    return monomial(t, layer, 1, 0, prec);
}

LaurentElem LaurentElem::monomial(const FieldTower* t, uint32_t layer, uint32_t code, int64_t k,
                                  int64_t prec) {
    return from_coefficients(t, layer, k, {code}, prec);
}

LaurentElem LaurentElem::constant(const FqElem& c, int64_t prec) {
    return monomial(c.tower(), c.layer(), c.code(), 0, prec);
}

LaurentElem LaurentElem::from_coefficients(const FieldTower* t, uint32_t layer, int64_t start,
                                           std::vector<uint32_t> codes, int64_t prec) {
    t->require_layer(layer);
    for (uint32_t c : codes)
        if (!t->in_layer(c, layer)) throw DomainError("coefficient outside the residue layer");
    LaurentElem x;
    x.tower_ = t;
    x.layer_ = layer;
    x.v_ = start;
    x.c_ = std::move(codes);
    x.prec_ = prec;
    x.normalize();
    return x;
}

int64_t LaurentElem::ord() const {
    if (c_.empty()) {
        if (is_exact()) return kInf;
        throw PrecisionError("valuation of an unresolved zero (all coefficients below precision " +
                             std::to_string(prec_) + " vanish)");
    }
    return v_;
}

uint32_t LaurentElem::coef(int64_t k) const {
    if (k >= prec_) throw PrecisionError("coefficient beyond the known precision");
    if (c_.empty() || k < v_ || k >= v_ + int64_t(c_.size())) return 0;
    return c_[size_t(k - v_)];
}

LaurentElem LaurentElem::truncated(int64_t N) const {
    LaurentElem x = *this;
    x.prec_ = std::min(prec_, N);
    x.normalize();
    return x;
}

LaurentElem LaurentElem::head(int64_t k) const {
    if (k > prec_) throw PrecisionError("head beyond the known precision");
    LaurentElem x = *this;
    if (!x.c_.empty() && k - v_ < int64_t(x.c_.size()))
        x.c_.resize(size_t(std::max<int64_t>(0, k - v_)));
    x.prec_ = kInf;
    x.normalize();
    return x;
}

LaurentElem LaurentElem::embed(uint32_t layer) const {
    if (layer % layer_) throw DomainError("embedding target does not contain the layer");
    tower_->require_layer(layer);
    LaurentElem x = *this;
    x.layer_ = layer;
    return x;
}

LaurentElem LaurentElem::restrict_to(uint32_t layer) const {
    for (uint32_t c : c_)
        if (!tower_->in_layer(c, layer)) throw DomainError("coefficient outside the target layer");
    LaurentElem x = *this;
    x.layer_ = layer;
    return x;
}

LaurentElem LaurentElem::operator+(const LaurentElem& o) const {
    const uint32_t L = lcm_layer(*this, o);
    const int64_t prec = std::min(prec_, o.prec_);
    LaurentElem out = zero(tower_, L, prec);
    if (c_.empty() && o.c_.empty()) return out;
    int64_t lo = kInf, hi = 0;
    for (const LaurentElem* x : {this, &o}) {
        if (x->c_.empty()) continue;
        lo = std::min(lo, x->v_);
        hi = std::max(hi, x->support_end());
    }
    if (lo == kInf) return out;
    hi = std::min(hi, prec);
    if (hi <= lo) return out;
    out.v_ = lo;
    out.c_.assign(size_t(hi - lo), 0);
    auto accumulate = [&](const LaurentElem& x) {
        for (size_t i = 0; i < x.c_.size(); ++i) {
            int64_t k = x.v_ + int64_t(i);
            if (k >= hi) break;
            uint32_t& slot = out.c_[size_t(k - lo)];
            slot = tower_->add(slot, x.c_[i]);
        }
    };
    accumulate(*this);
    accumulate(o);
    out.normalize();
    return out;
}

LaurentElem LaurentElem::operator-() const {
    LaurentElem x = *this;
    for (auto& c : x.c_) c = tower_->neg(c);
    return x;
}

LaurentElem LaurentElem::operator-(const LaurentElem& o) const { return *this + (-o); }

LaurentElem LaurentElem::operator*(const LaurentElem& o) const {
    const uint32_t L = lcm_layer(*this, o);
    if (is_exact_zero() || o.is_exact_zero()) return zero(tower_, L);
    const int64_t prec =
        std::min(sat_add(valuation_bound(), o.prec_), sat_add(o.valuation_bound(), prec_));
    LaurentElem out = zero(tower_, L, prec);
    if (c_.empty() || o.c_.empty()) return out;
    const int64_t lo = v_ + o.v_;
    int64_t hi = std::min(prec, v_ + int64_t(c_.size()) + o.v_ + int64_t(o.c_.size()) - 1);
    if (hi <= lo) return out;
    out.v_ = lo;
    out.c_.assign(size_t(hi - lo), 0);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            int64_t k = int64_t(i + j);
            if (lo + k >= hi) break;
            if (o.c_[j] == 0) continue;
            uint32_t& slot = out.c_[size_t(k)];
            slot = tower_->add(slot, tower_->mul(c_[i], o.c_[j]));
        }
    }
    out.normalize();
    return out;
}

LaurentElem LaurentElem::scaled(uint32_t code) const {
    LaurentElem x = *this;
    if (code == 0) return zero(tower_, layer_, kInf);
    if (!tower_->in_layer(code, layer_)) x.layer_ = std::lcm(layer_, tower_->min_layer(code));
    for (auto& c : x.c_) c = tower_->mul(c, code);
    x.normalize();
    return x;
}

LaurentElem LaurentElem::shifted(int64_t k) const {
    LaurentElem x = *this;
    if (!x.c_.empty()) x.v_ += k;
    if (x.prec_ < kInf) x.prec_ += k;
    return x;
}

bool LaurentElem::operator==(const LaurentElem& o) const {
    return tower_ == o.tower_ && layer_ == o.layer_ && prec_ == o.prec_ && c_ == o.c_ &&
           (c_.empty() || v_ == o.v_);
}

LaurentElem invert(const LaurentElem& x, int64_t prec_if_exact) {
    const int64_t v = x.ord();
    if (v >= kInf) throw DomainError("inverse of zero");
    const auto* t = x.tower();
    // exact monomials invert exactly
    if (x.is_exact() && x.support_end() == v + 1)
        return LaurentElem::monomial(t, x.layer(), t->inv(x.coef(v)), -v);
    const int64_t R = x.is_exact() ? prec_if_exact + v : x.precision() - v;
    if (R <= 0) throw PrecisionError("inverse has no known coefficients at this precision");
    std::vector<uint32_t> u(static_cast<size_t>(R)), y(static_cast<size_t>(R));
    for (int64_t i = 0; i < R; ++i) u[size_t(i)] = x.coef(v + i);
    const uint32_t y0 = t->inv(u[0]);
    y[0] = y0;
    for (int64_t k = 1; k < R; ++k) {
        uint32_t acc = 0;
        for (int64_t i = 1; i <= k; ++i)
            if (u[size_t(i)] && y[size_t(k - i)]) acc = t->add(acc, t->mul(u[size_t(i)], y[size_t(k - i)]));
        y[size_t(k)] = t->neg(t->mul(y0, acc));
    }
    return LaurentElem::from_coefficients(t, x.layer(), -v, std::move(y), -v + R);
}

LaurentElem power(const LaurentElem& x, int64_t e, int64_t prec_if_exact) {
    LaurentElem base = e < 0 ? invert(x, prec_if_exact) : x;
    uint64_t k = e < 0 ? uint64_t(-e) : uint64_t(e);
    LaurentElem acc = LaurentElem::one(x.tower(), x.layer());
    while (k) {
        if (k & 1) acc = acc * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return acc;
}

LaurentElem galois(const LaurentElem& x, int64_t steps, uint32_t base_degree) {
    if (x.is_zero_class()) return x;
    const auto* t = x.tower();
    const int64_t s = steps * int64_t(base_degree);
    std::vector<uint32_t> c;
    const int64_t v = x.valuation_bound();
    for (int64_t k = v; k < x.support_end(); ++k) c.push_back(t->frob(x.coef(k), s));
    return LaurentElem::from_coefficients(t, x.layer(), v, std::move(c), x.precision());
}

LaurentElem norm_E_to_M(const LaurentElem& x, uint32_t sublayer) {
    if (x.layer() % sublayer) throw DomainError("norm target is not a subfield");
    const uint32_t m = x.layer() / sublayer;
    LaurentElem acc = x;
    for (uint32_t i = 1; i < m; ++i) acc = acc * galois(x, i, sublayer);
    return acc.restrict_to(sublayer);
}

LaurentElem trace_E_to_M(const LaurentElem& x, uint32_t sublayer) {
    if (x.layer() % sublayer) throw DomainError("trace target is not a subfield");
    const uint32_t m = x.layer() / sublayer;
    LaurentElem acc = x;
    for (uint32_t i = 1; i < m; ++i) acc = acc + galois(x, i, sublayer);
    return acc.restrict_to(sublayer);
}

TorusCoord make_torus_coord(const LaurentElem& value, bool norm_one, uint32_t base_layer) {
    if (value.ord() >= kInf) throw DomainError("torus coordinate must be invertible");
    if (norm_one) {
        LaurentElem N = norm_E_to_M(value, base_layer);
        if (!N.congruent(LaurentElem::one(value.tower(), base_layer)))
            throw DomainError("torus coordinate flagged norm one has norm different from 1");
    }
    return TorusCoord{value, norm_one};
}

// ----------------------------------------------------------------------------
// Matrices

LMatrix identity_matrix(const FieldTower* t, uint32_t layer, size_t n, int64_t prec) {
    LMatrix m(n, LaurentElem::zero(t, layer));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = LaurentElem::one(t, layer, prec);
    return m;
}

LMatrix operator*(const LMatrix& x, const LMatrix& y) {
    if (x.n != y.n) throw DomainError("matrix size mismatch");
    LMatrix out(x.n, x.a.at(0) - x.a.at(0));
    for (size_t i = 0; i < x.n; ++i)
        for (size_t j = 0; j < x.n; ++j) {
            LaurentElem acc = x.at(i, 0) * y.at(0, j);
            for (size_t k = 1; k < x.n; ++k) acc = acc + x.at(i, k) * y.at(k, j);
            out.at(i, j) = acc;
        }
    return out;
}

LMatrix operator+(const LMatrix& x, const LMatrix& y) {
    if (x.n != y.n) throw DomainError("matrix size mismatch");
    LMatrix out = x;
    for (size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] + y.a[i];
    return out;
}

LMatrix operator-(const LMatrix& x, const LMatrix& y) {
    if (x.n != y.n) throw DomainError("matrix size mismatch");
    LMatrix out = x;
    for (size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] - y.a[i];
    return out;
}

namespace {

/** Row reduction on [A | B]; returns the pivot product sign-adjusted determinant of A. */
LaurentElem eliminate(LMatrix A, std::vector<std::vector<LaurentElem>>& rhs, int64_t prec_if_exact,
                      bool need_solution) {
    const size_t n = A.n;
    const auto* t = A.a.at(0).tower();
    const uint32_t layer = A.a.at(0).layer();
    LaurentElem det = LaurentElem::one(t, layer);
    bool negate = false;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = n;
        int64_t best = kInf;
        for (size_t r = col; r < n; ++r) {
            const auto& e = A.at(r, col);
            if (e.is_zero_class()) continue;
            if (e.ord() < best) {
                best = e.ord();
                piv = r;
            }
        }
        if (piv == n) {
            bool unresolved = false;
            for (size_t r = col; r < n; ++r)
                if (!A.at(r, col).is_exact_zero()) unresolved = true;
            if (unresolved) throw PrecisionError("pivot undetermined at working precision");
            throw DomainError("singular matrix");
        }
        if (piv != col) {
            for (size_t j = 0; j < n; ++j) std::swap(A.at(piv, j), A.at(col, j));
            std::swap(rhs[piv], rhs[col]);
            negate = !negate;
        }
        det = det * A.at(col, col);
        LaurentElem inv = invert(A.at(col, col), prec_if_exact);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || (!need_solution && r < col)) continue;
            if (A.at(r, col).is_exact_zero()) continue;
            LaurentElem f = A.at(r, col) * inv;
            for (size_t j = col; j < n; ++j) A.at(r, j) = A.at(r, j) - f * A.at(col, j);
            for (size_t j = 0; j < rhs[r].size(); ++j) rhs[r][j] = rhs[r][j] - f * rhs[col][j];
        }
        if (need_solution) {
            for (size_t j = 0; j < rhs[col].size(); ++j) rhs[col][j] = rhs[col][j] * inv;
            for (size_t j = col; j < n; ++j) A.at(col, j) = A.at(col, j) * inv;
        }
    }
    return negate ? -det : det;
}

}  // namespace

std::vector<LaurentElem> solve(const LMatrix& A, const std::vector<LaurentElem>& b,
                               int64_t prec_if_exact) {
    if (b.size() != A.n) throw DomainError("right-hand side length mismatch");
    std::vector<std::vector<LaurentElem>> rhs(A.n);
    for (size_t i = 0; i < A.n; ++i) rhs[i] = {b[i]};
    eliminate(A, rhs, prec_if_exact, true);
    std::vector<LaurentElem> x(A.n);
    for (size_t i = 0; i < A.n; ++i) x[i] = rhs[i][0];
    return x;
}

LMatrix inverse(const LMatrix& A, int64_t prec_if_exact) {
    const auto* t = A.a.at(0).tower();
    const uint32_t layer = A.a.at(0).layer();
    std::vector<std::vector<LaurentElem>> rhs(A.n, std::vector<LaurentElem>(A.n, LaurentElem::zero(t, layer)));
    for (size_t i = 0; i < A.n; ++i) rhs[i][i] = LaurentElem::one(t, layer);
    eliminate(A, rhs, prec_if_exact, true);
    LMatrix out(A.n, LaurentElem::zero(t, layer));
    for (size_t i = 0; i < A.n; ++i)
        for (size_t j = 0; j < A.n; ++j) out.at(i, j) = rhs[i][j];
    return out;
}

LaurentElem determinant(const LMatrix& A, int64_t prec_if_exact) {
    std::vector<std::vector<LaurentElem>> rhs(A.n);
    try {
        return eliminate(A, rhs, prec_if_exact, false);
    } catch (const DomainError&) {
        return LaurentElem::zero(A.a.at(0).tower(), A.a.at(0).layer());
    }
}

std::vector<LaurentElem> characteristic_polynomial(const LMatrix& A) {
    const size_t n = A.n;
    const auto* t = A.a.at(0).tower();
    const uint32_t layer = A.a.at(0).layer();
    if (t->p() <= n) throw DomainError("characteristic polynomial needs p > n");
    std::vector<LaurentElem> c(n + 1, LaurentElem::zero(t, layer));
    c[n] = LaurentElem::one(t, layer);
    LMatrix I = identity_matrix(t, layer, n);
    LMatrix M = I;
    for (size_t k = 1; k <= n; ++k) {
        if (k > 1) {
            M = A * M;
            for (size_t i = 0; i < n; ++i) M.at(i, i) = M.at(i, i) + c[n - k + 1];
        }
        LMatrix AM = A * M;
        LaurentElem tr = AM.at(0, 0);
        for (size_t i = 1; i < n; ++i) tr = tr + AM.at(i, i);
        uint32_t inv_k = t->inv(t->from_int(int64_t(k)));
        c[n - k] = -tr.scaled(inv_k);
    }
    return c;
}

int64_t min_entry_ord(const LMatrix& A) {
    int64_t m = kInf;
    for (const auto& e : A.a) m = std::min(m, e.ord());
    return m;
}

LMatrix regular_matrix(const LaurentElem& gamma, uint32_t base_layer) {
    const auto* t = gamma.tower();
    const uint32_t n = gamma.layer() / base_layer;
    const uint32_t theta = t->layer_generator(gamma.layer());
    std::vector<uint32_t> basis(n);
    uint32_t acc = 1;
    for (uint32_t i = 0; i < n; ++i) {
        basis[i] = acc;
        acc = t->mul(acc, theta);
    }
    return regular_matrix(gamma, base_layer, basis);
}

LMatrix regular_matrix(const LaurentElem& gamma, uint32_t base_layer,
                       const std::vector<uint32_t>& basis) {
    const auto* t = gamma.tower();
    const uint32_t L = gamma.layer();
    if (L % base_layer) throw DomainError("base layer does not divide the element layer");
    const size_t n = L / base_layer;
    if (basis.size() != n) throw DomainError("basis has the wrong size");
    // trace form T_ij = Tr(θ_i θ_j) over the base layer, inverted to get the dual basis
    std::vector<std::vector<FqElem>> T(n, std::vector<FqElem>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            T[i][j] = FqElem(t, base_layer, t->trace(t->mul(basis[i], basis[j]), L, base_layer));
    std::vector<std::vector<FqElem>> S(n, std::vector<FqElem>(n, FqElem::zero(t, base_layer)));
    for (size_t i = 0; i < n; ++i) S[i][i] = FqElem::one(t, base_layer);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && T[piv][col].is_zero()) ++piv;
        if (piv == n) throw DomainError("regular_matrix: input is not a basis");
        std::swap(T[piv], T[col]);
        std::swap(S[piv], S[col]);
        FqElem inv = T[col][col].inverse();
        for (size_t j = 0; j < n; ++j) {
            T[col][j] = T[col][j] * inv;
            S[col][j] = S[col][j] * inv;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col || T[r][col].is_zero()) continue;
            FqElem f = T[r][col];
            for (size_t j = 0; j < n; ++j) {
                T[r][j] = T[r][j] - f * T[col][j];
                S[r][j] = S[r][j] - f * S[col][j];
            }
        }
    }
    std::vector<uint32_t> dual(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) dual[i] = t->add(dual[i], t->mul(S[i][j].code(), basis[j]));

    const int64_t v = gamma.valuation_bound();
    const int64_t end = gamma.is_exact() ? gamma.support_end() : gamma.precision();
    LMatrix M(n, LaurentElem::zero(t, base_layer));
    for (size_t j = 0; j < n; ++j) {
        std::vector<std::vector<uint32_t>> coeffs(n);
        for (int64_t k = v; k < end; ++k) {
            uint32_t x = t->mul(gamma.coef(k), basis[j]);
            for (size_t i = 0; i < n; ++i)
                coeffs[i].push_back(t->trace(t->mul(x, dual[i]), L, base_layer));
        }
        for (size_t i = 0; i < n; ++i)
            M.at(i, j) = LaurentElem::from_coefficients(t, base_layer, v, coeffs[i], gamma.precision());
    }
    return M;
}

std::pair<LaurentElem, LaurentElem> head_tail_split(const LaurentElem& gamma, int64_t r,
                                                    int64_t prec_if_exact) {
    if (r < 1) throw DomainError("head_tail_split needs r >= 1");
    if (gamma.ord() != 0) throw DomainError("head_tail_split needs a unit");
    LaurentElem head = gamma.head(r);
    LaurentElem tail = invert(head, gamma.is_exact() ? prec_if_exact : gamma.precision()) * gamma;
    if (gamma.is_exact() && tail.is_exact() == false) tail = tail.truncated(prec_if_exact);
    return {head, tail};
}

// ----------------------------------------------------------------------------
// Text syntax

namespace {

std::string coef_text(const FieldTower* t, uint32_t layer, uint32_t code) {
    if (t->in_layer(code, 1)) return std::to_string(code);
    uint64_t step = (t->size() - 1) / (t->layer_size(layer) - 1);
    uint64_t j = t->log(code) / step;
    return "g^" + std::to_string(j);
}

std::string strip(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

int64_t parse_int(const std::string& s, const std::string& context) {
    std::string x = strip(s);
    if (x.empty()) throw ParseError("missing integer in '" + context + "'");
    size_t pos = 0;
    if (x[0] == '-' || x[0] == '+') pos = 1;
    if (pos == x.size()) throw ParseError("malformed integer in '" + context + "'");
    for (size_t i = pos; i < x.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(x[i])))
            throw ParseError("malformed integer '" + x + "' in '" + context + "'");
    try {
        return std::stoll(x);
    } catch (const std::exception&) {
        throw ParseError("integer out of range in '" + context + "'");
    }
}

}  // namespace

std::string to_text(const LaurentElem& x) {
    std::ostringstream out;
    const auto* t = x.tower();
    bool first = true;
    if (!x.is_zero_class()) {
        for (int64_t k = x.valuation_bound(); k < x.support_end(); ++k) {
            uint32_t c = x.coef(k);
            if (c == 0) continue;
            if (!first) out << " + ";
            first = false;
            if (k == 0) {
                out << coef_text(t, x.layer(), c);
            } else {
                if (c != 1) out << coef_text(t, x.layer(), c) << "*";
                out << "w^" << k;
            }
        }
    }
    if (first) out << "0";
    if (!x.is_exact()) out << " (prec " << x.precision() << ")";
    return out.str();
}

LaurentElem parse_laurent(const std::string& text, const FieldTower* t, uint32_t layer) {
    t->require_layer(layer);
    std::string body = strip(text);
    int64_t prec = kInf;
    auto open = body.find('(');
    if (open != std::string::npos) {
        auto close = body.find(')', open);
        if (close == std::string::npos || strip(body.substr(close + 1)) != "")
            throw ParseError("malformed precision suffix in '" + text + "'");
        std::string inner = strip(body.substr(open + 1, close - open - 1));
        if (inner.rfind("prec", 0) != 0) throw ParseError("expected '(prec N)' in '" + text + "'");
        prec = parse_int(inner.substr(4), text);
        body = strip(body.substr(0, open));
    }
    if (body.empty()) throw ParseError("empty element literal");
    // split into signed terms; a sign directly after '^' belongs to an exponent
    std::vector<std::pair<bool, std::string>> terms;
    std::string cur;
    bool negative = false;
    for (size_t i = 0; i < body.size(); ++i) {
        const char ch = body[i];
        const bool sep = (ch == '+' || ch == '-') && !(i > 0 && body[i - 1] == '^');
        if (!sep) {
            cur += ch;
            continue;
        }
        if (strip(cur).empty()) {
            if (!terms.empty() || ch == '+') throw ParseError("dangling operator in '" + text + "'");
        } else {
            terms.emplace_back(negative, strip(cur));
        }
        negative = (ch == '-');
        cur.clear();
    }
    if (strip(cur).empty()) throw ParseError("dangling operator in '" + text + "'");
    terms.emplace_back(negative, strip(cur));

    std::map<int64_t, uint32_t> coeffs;
    const uint32_t g = t->layer_generator(layer);
    for (const auto& [neg, term] : terms) {
        std::string coef_part = term, w_part;
        auto star = term.find('*');
        if (star != std::string::npos) {
            coef_part = strip(term.substr(0, star));
            w_part = strip(term.substr(star + 1));
        } else if (!term.empty() && term[0] == 'w') {
            coef_part = "";
            w_part = term;
        }
        int64_t k = 0;
        if (!w_part.empty()) {
            if (w_part == "w") k = 1;
            else if (w_part.rfind("w^", 0) == 0) k = parse_int(w_part.substr(2), text);
            else throw ParseError("malformed power of w '" + w_part + "' in '" + text + "'");
        }
        uint32_t c;
        if (coef_part.empty()) c = 1;
        else if (coef_part == "g") c = g;
        else if (coef_part.rfind("g^", 0) == 0) c = t->pow(g, parse_int(coef_part.substr(2), text));
        else c = t->from_int(parse_int(coef_part, text));
        if (neg) c = t->neg(c);
        uint32_t& slot = coeffs[k];
        slot = t->add(slot, c);
    }
    if (coeffs.empty()) return LaurentElem::zero(t, layer, prec);
    const int64_t lo = coeffs.begin()->first, hi = coeffs.rbegin()->first;
    std::vector<uint32_t> dense(size_t(hi - lo + 1), 0);
    for (const auto& [k, c] : coeffs) dense[size_t(k - lo)] = c;
    return LaurentElem::from_coefficients(t, layer, lo, std::move(dense), prec);
}

}  // namespace stf
