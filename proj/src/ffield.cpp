/**
 * @file ffield.cpp
 * @brief Conway-polynomial field lattice and table-driven finite-field arithmetic.
 */
#include "stf/ffield.hpp"

#include <algorithm>

#include "stf/numtheory.hpp"

namespace stf {

namespace {

using Poly = std::vector<uint32_t>;

/** Arithmetic in F_p[x]/(f) for monic f given by its low coefficients f_0..f_{n-1}. */
struct PolyRing {
    uint32_t p;
    Poly f;  // low coefficients, x^n = -Σ f_i x^i
    size_t n() const { return f.size(); }

    Poly mul(const Poly& a, const Poly& b) const {
        const size_t n = this->n();
        std::vector<uint64_t> r(2 * n - 1, 0);
        for (size_t i = 0; i < n; ++i) {
            if (!a[i]) continue;
            for (size_t j = 0; j < n; ++j) r[i + j] = (r[i + j] + uint64_t(a[i]) * b[j]) % p;
        }
        for (size_t i = 2 * n - 2; i >= n; --i) {
            uint64_t c = r[i];
            if (!c) continue;
            r[i] = 0;
            for (size_t j = 0; j < n; ++j) r[i - n + j] = (r[i - n + j] + (p - c) * f[j]) % p;
        }
        Poly out(n);
        for (size_t i = 0; i < n; ++i) out[i] = uint32_t(r[i]);
        return out;
    }

    Poly pow(Poly base, uint64_t e) const {
        Poly r(n(), 0);
        r[0] = 1;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }

    Poly x() const {
        Poly r(n(), 0);
        if (n() == 1) {
            r[0] = (p - f[0]) % p;
        } else {
            r[1] = 1;
        }
        return r;
    }

    static bool is_one(const Poly& a) {
        if (a[0] != 1) return false;
        for (size_t i = 1; i < a.size(); ++i)
            if (a[i]) return false;
        return true;
    }

    /** Evaluate a polynomial with F_p coefficients (low to high, monic included) at h. */
    Poly eval(const Poly& coeffs, const Poly& h) const {
        Poly acc(n(), 0);
        for (size_t i = coeffs.size(); i-- > 0;) {
            acc = mul(acc, h);
            acc[0] = (acc[0] + coeffs[i]) % p;
        }
        return acc;
    }
};

bool is_zero_poly(const Poly& a) {
    return std::all_of(a.begin(), a.end(), [](uint32_t c) { return c == 0; });
}

}  // namespace

FpSolver::FpSolver(uint32_t p, const std::vector<std::vector<uint32_t>>& columns, size_t rows)
    : p_(p), rows_(rows), unknowns_(columns.size()) {
    // Gauss-Jordan on [A | I]; afterwards transform_ * A = [I_k ; 0].
    std::vector<std::vector<uint64_t>> a(rows, std::vector<uint64_t>(unknowns_ + rows, 0));
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < unknowns_; ++c) a[r][c] = columns[c].at(r) % p;
        a[r][unknowns_ + r] = 1;
    }
    size_t prow = 0;
    for (size_t c = 0; c < unknowns_; ++c) {
        size_t piv = prow;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) throw DomainError("FpSolver: columns are linearly dependent");
        std::swap(a[piv], a[prow]);
        uint64_t inv = powmod(a[prow][c], p - 2, p);
        for (auto& v : a[prow]) v = v * inv % p;
        for (size_t r = 0; r < rows; ++r) {
            if (r == prow || a[r][c] == 0) continue;
            uint64_t f = a[r][c];
            for (size_t k = 0; k < a[r].size(); ++k) a[r][k] = (a[r][k] + (p - f) * a[prow][k]) % p;
        }
        ++prow;
    }
    transform_.assign(rows, std::vector<uint32_t>(rows));
    for (size_t r = 0; r < rows; ++r)
        for (size_t k = 0; k < rows; ++k) transform_[r][k] = uint32_t(a[r][unknowns_ + k]);
}

std::optional<std::vector<uint32_t>> FpSolver::solve(const std::vector<uint32_t>& target) const {
    std::vector<uint32_t> out(unknowns_);
    for (size_t r = 0; r < rows_; ++r) {
        uint64_t s = 0;
        for (size_t k = 0; k < rows_; ++k) s += uint64_t(transform_[r][k]) * target.at(k);
        s %= p_;
        if (r < unknowns_)
            out[r] = uint32_t(s);
        else if (s != 0)
            return std::nullopt;
    }
    return out;
}

std::vector<std::vector<uint32_t>> fp_kernel(uint32_t p, std::vector<std::vector<uint32_t>> rows,
                                             size_t cols) {
    std::vector<int> pivot_col;
    size_t prow = 0;
    for (size_t c = 0; c < cols && prow < rows.size(); ++c) {
        size_t piv = prow;
        while (piv < rows.size() && rows[piv][c] % p == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[prow]);
        uint64_t inv = powmod(rows[prow][c] % p, p - 2, p);
        for (auto& v : rows[prow]) v = uint32_t(uint64_t(v % p) * inv % p);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == prow) continue;
            uint64_t f = rows[r][c] % p;
            if (!f) continue;
            for (size_t k = 0; k < cols; ++k)
                rows[r][k] = uint32_t((rows[r][k] % p + (p - f) * rows[prow][k]) % p);
        }
        pivot_col.push_back(int(c));
        ++prow;
    }
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<uint32_t>> basis;
    for (size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<uint32_t> v(cols, 0);
        v[free] = 1;
        for (size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = (p - rows[r][free] % p) % p;
        basis.push_back(v);
    }
    return basis;
}

FieldTower::FieldTower(uint32_t p, uint32_t top_degree) : p_(p), D_(top_degree) {
    if (!is_prime(p)) throw DomainError("characteristic must be prime");
    if (top_degree < 1) throw DomainError("top degree must be positive");
    Q_ = 1;
    pow_p_.push_back(1);
    for (uint32_t i = 0; i < D_; ++i) {
        if (Q_ > kMaxFieldSize / p) throw CapacityError("field size exceeds cap of 10^7 elements");
        Q_ *= p;
        pow_p_.push_back(Q_);
    }

    // Conway polynomials for every divisor, in increasing degree.
    conway_.assign(D_ + 1, {});
    for (uint64_t n : divisors(D_)) {
        const uint64_t qn = ipow(p, unsigned(n));
        const auto primes = prime_factors(qn - 1);
        std::vector<uint32_t> alpha(n, 0);  // alpha[0] is α_{n-1}, most significant
        bool found = false;
        while (!found) {
            // increment lexicographically (α_{n-1}, …, α_0)
            size_t pos = n;
            while (pos > 0) {
                --pos;
                if (++alpha[pos] < p) break;
                alpha[pos] = 0;
                if (pos == 0) throw Error("Conway search exhausted");
            }
            // coefficient of x^i is (−1)^{n−i} α_i, α_i = alpha[n-1-i]
            Poly f(n);
            for (size_t i = 0; i < n; ++i) {
                uint32_t a = alpha[n - 1 - i];
                f[i] = ((n - i) % 2 == 0) ? a : (p - a) % p;
            }
            if (f[0] == 0) continue;
            PolyRing ring{p, f};
            Poly x = ring.x();
            if (!PolyRing::is_one(ring.pow(x, qn - 1))) continue;
            bool primitive = true;
            for (uint64_t r : primes) {
                if (PolyRing::is_one(ring.pow(x, (qn - 1) / r))) {
                    primitive = false;
                    break;
                }
            }
            if (!primitive) continue;
            bool compatible = true;
            for (uint64_t d : divisors(n)) {
                if (d == n) continue;
                const uint64_t qd = ipow(p, unsigned(d));
                Poly h = ring.pow(x, (qn - 1) / (qd - 1));
                if (!is_zero_poly(ring.eval(conway_[d], h))) {
                    compatible = false;
                    break;
                }
            }
            if (!compatible) continue;
            Poly full = f;
            full.push_back(1);
            conway_[n] = full;
            found = true;
        }
    }

    // exp/log tables for g = x mod C(p,D).
    const auto& f = conway_[D_];
    exp_.resize(Q_ - 1);
    log_.assign(Q_, 0);
    std::vector<uint32_t> dg(D_, 0);
    dg[0] = 1;
    for (uint64_t i = 0; i + 1 < Q_; ++i) {
        uint64_t code = 0;
        for (uint32_t j = D_; j-- > 0;) code = code * p + dg[j];
        exp_[i] = uint32_t(code);
        log_[code] = uint32_t(i);
        // multiply by x
        uint32_t top = dg[D_ - 1];
        for (uint32_t j = D_ - 1; j > 0; --j) dg[j] = dg[j - 1];
        dg[0] = 0;
        if (top)
            for (uint32_t j = 0; j < D_; ++j) dg[j] = uint32_t((dg[j] + uint64_t(p - top) * f[j]) % p);
    }
    if (Q_ <= 1024) {
        add_table_.resize(Q_ * Q_);
        for (uint32_t a = 0; a < Q_; ++a)
            for (uint32_t b = 0; b < Q_; ++b) add_table_[uint64_t(a) * Q_ + b] = digit_add(a, b, false);
    }

    layer_solvers_.resize(D_ + 1);
    for (uint64_t d : divisors(D_)) {
        std::vector<std::vector<uint32_t>> cols;
        uint32_t z = layer_generator(uint32_t(d));
        uint32_t acc = 1;
        for (uint64_t j = 0; j < d; ++j) {
            cols.push_back(digits(acc));
            acc = mul(acc, z);
        }
        layer_solvers_[d] = std::make_unique<FpSolver>(p_, cols, D_);
    }
}

uint64_t FieldTower::layer_size(uint32_t d) const {
    require_layer(d);
    return pow_p_[d];
}

void FieldTower::require_layer(uint32_t d) const {
    if (!has_layer(d))
        throw DomainError("degree " + std::to_string(d) + " is not a layer of F_{" + std::to_string(p_) + "^" +
                          std::to_string(D_) + "}");
}

const std::vector<uint32_t>& FieldTower::conway(uint32_t d) const {
    require_layer(d);
    return conway_[d];
}

uint32_t FieldTower::from_int(int64_t c) const { return uint32_t(pmod(c, p_)); }

uint32_t FieldTower::digit_add(uint32_t a, uint32_t b, bool subtract) const {
    uint64_t out = 0;
    for (uint32_t i = 0; i < D_; ++i) {
        uint32_t x = uint32_t((a / pow_p_[i]) % p_);
        uint32_t y = uint32_t((b / pow_p_[i]) % p_);
        uint32_t s = subtract ? (x + p_ - y) % p_ : (x + y) % p_;
        out += uint64_t(s) * pow_p_[i];
    }
    return uint32_t(out);
}

uint32_t FieldTower::add(uint32_t a, uint32_t b) const {
    if (!add_table_.empty()) return add_table_[uint64_t(a) * Q_ + b];
    if (a == 0) return b;
    if (b == 0) return a;
    return digit_add(a, b, false);
}

uint32_t FieldTower::sub(uint32_t a, uint32_t b) const {
    if (b == 0) return a;
    return add(a, neg(b));
}

uint32_t FieldTower::neg(uint32_t a) const {
    if (a == 0) return 0;
    return digit_add(0, a, true);
}

uint32_t FieldTower::mul(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    uint64_t s = uint64_t(log_[a]) + log_[b];
    if (s >= Q_ - 1) s -= Q_ - 1;
    return exp_[s];
}

uint32_t FieldTower::inv(uint32_t a) const {
    if (a == 0) throw DomainError("inverse of zero in finite field");
    uint64_t l = log_[a];
    return exp_[l == 0 ? 0 : Q_ - 1 - l];
}

uint32_t FieldTower::pow(uint32_t a, int64_t e) const {
    if (a == 0) {
        if (e < 0) throw DomainError("negative power of zero");
        return e == 0 ? 1 : 0;
    }
    int64_t m = int64_t(Q_ - 1);
    __int128 l = __int128(log_[a]) * (e % m);
    int64_t r = int64_t(l % m);
    if (r < 0) r += m;
    return exp_[r];
}

uint32_t FieldTower::scale(uint32_t a, int64_t c) const { return mul(a, from_int(c)); }

uint32_t FieldTower::exp(int64_t i) const { return exp_[pmod(i, int64_t(Q_ - 1))]; }

uint64_t FieldTower::log(uint32_t a) const {
    if (a == 0) throw DomainError("logarithm of zero");
    return log_[a];
}

uint32_t FieldTower::frob(uint32_t a, int64_t steps) const {
    if (a == 0) return 0;
    int64_t s = pmod(steps, D_);
    uint64_t l = log_[a];
    uint64_t e = pow_p_[s] % (Q_ - 1);
    return exp_[uint64_t((__int128(l) * e) % (Q_ - 1))];
}

bool FieldTower::in_layer(uint32_t a, uint32_t d) const {
    require_layer(d);
    if (a == 0) return true;
    uint64_t step = (Q_ - 1) / (pow_p_[d] - 1);
    return log_[a] % step == 0;
}

uint32_t FieldTower::min_layer(uint32_t a) const {
    for (uint64_t d : divisors(D_))
        if (in_layer(a, uint32_t(d))) return uint32_t(d);
    return D_;
}

uint32_t FieldTower::layer_generator(uint32_t d) const {
    require_layer(d);
    return exp_[(Q_ - 1) / (pow_p_[d] - 1) % (Q_ - 1)];
}

const FpSolver& FieldTower::layer_solver(uint32_t d) const {
    require_layer(d);
    return *layer_solvers_[d];
}

std::vector<uint32_t> FieldTower::coordinates(uint32_t a, uint32_t d) const {
    auto r = layer_solver(d).solve(digits(a));
    if (!r) throw DomainError("element does not lie in the requested layer");
    return *r;
}

uint32_t FieldTower::from_coordinates(const std::vector<uint32_t>& c, uint32_t d) const {
    require_layer(d);
    if (c.size() != d) throw DomainError("coordinate vector has wrong length");
    uint32_t z = layer_generator(d), acc = 1, out = 0;
    for (uint32_t j = 0; j < d; ++j) {
        out = add(out, scale(acc, c[j]));
        acc = mul(acc, z);
    }
    return out;
}

uint32_t FieldTower::norm(uint32_t a, uint32_t d, uint32_t s) const {
    require_layer(d);
    require_layer(s);
    if (d % s) throw DomainError("norm target is not a subfield");
    if (a == 0) return 0;
    uint64_t e = (pow_p_[d] - 1) / (pow_p_[s] - 1);
    return exp_[uint64_t((__int128(log_[a]) * e) % (Q_ - 1))];
}

uint32_t FieldTower::trace(uint32_t a, uint32_t d, uint32_t s) const {
    require_layer(d);
    require_layer(s);
    if (d % s) throw DomainError("trace target is not a subfield");
    uint32_t out = 0, x = a;
    for (uint32_t i = 0; i < d / s; ++i) {
        out = add(out, x);
        x = frob(x, s);
    }
    return out;
}

std::vector<uint32_t> FieldTower::digits(uint32_t a) const {
    std::vector<uint32_t> out(D_);
    for (uint32_t i = 0; i < D_; ++i) {
        out[i] = a % p_;
        a /= p_;
    }
    return out;
}

uint32_t FieldTower::from_digits(const std::vector<uint32_t>& dg) const {
    uint64_t out = 0;
    for (uint32_t i = D_; i-- > 0;) out = out * p_ + dg.at(i) % p_;
    return uint32_t(out);
}

TowerPtr make_tower(uint32_t p, uint32_t top_degree) {
    return std::make_shared<const FieldTower>(p, top_degree);
}

FqElem::FqElem(const FieldTower* tower, uint32_t layer, uint32_t code)
    : tower_(tower), layer_(layer), code_(code) {
    if (!tower_) throw DomainError("FqElem requires a tower");
    if (!tower_->in_layer(code, layer)) throw DomainError("value does not lie in the stated layer");
}

FqElem FqElem::from_int(const FieldTower* t, uint32_t layer, int64_t c) {
    return FqElem(t, layer, t->from_int(c));
}

FqElem FqElem::from_coefficients(const FieldTower* t, uint32_t layer, const std::vector<uint32_t>& c) {
    return FqElem(t, layer, t->from_coordinates(c, layer));
}

std::vector<uint32_t> FqElem::coefficients() const { return tower_->coordinates(code_, layer_); }

namespace {
uint32_t common_layer(const FqElem& a, const FqElem& b) {
    if (a.tower() != b.tower()) throw DomainError("elements from different towers");
    uint32_t x = a.layer(), y = b.layer();
    uint32_t l = x / std::gcd(x, y) * y;
    a.tower()->require_layer(l);
    return l;
}
}  // namespace

FqElem FqElem::operator+(const FqElem& o) const {
    return FqElem(tower_, common_layer(*this, o), tower_->add(code_, o.code_));
}
FqElem FqElem::operator-(const FqElem& o) const {
    return FqElem(tower_, common_layer(*this, o), tower_->sub(code_, o.code_));
}
FqElem FqElem::operator-() const { return FqElem(tower_, layer_, tower_->neg(code_)); }
FqElem FqElem::operator*(const FqElem& o) const {
    return FqElem(tower_, common_layer(*this, o), tower_->mul(code_, o.code_));
}
FqElem FqElem::operator/(const FqElem& o) const {
    return FqElem(tower_, common_layer(*this, o), tower_->mul(code_, tower_->inv(o.code_)));
}
FqElem FqElem::pow(int64_t e) const { return FqElem(tower_, layer_, tower_->pow(code_, e)); }
FqElem FqElem::inverse() const { return FqElem(tower_, layer_, tower_->inv(code_)); }
FqElem FqElem::embed(uint32_t layer) const {
    if (layer % layer_) throw DomainError("embedding target does not contain the layer");
    return FqElem(tower_, layer, code_);
}

FqElem frobenius(const FqElem& x, int64_t steps) {
    return FqElem(x.tower(), x.layer(), x.tower()->frob(x.code(), steps));
}

FqElem norm_to(const FqElem& x, uint32_t sublayer) {
    return FqElem(x.tower(), sublayer, x.tower()->norm(x.code(), x.layer(), sublayer));
}

FqElem trace_to(const FqElem& x, uint32_t sublayer) {
    return FqElem(x.tower(), sublayer, x.tower()->trace(x.code(), x.layer(), sublayer));
}

int sgn(const FqElem& x) {
    if (x.is_zero()) throw DomainError("sgn of zero");
    uint64_t Q = x.tower()->layer_size(x.layer());
    if (Q % 2 == 0) throw DomainError("sgn requires odd characteristic");
    // x^{(Q-1)/2} = ±1; via logs: x = g^l lies in the layer, its layer log is l / step.
    const auto* t = x.tower();
    uint64_t step = (t->size() - 1) / (Q - 1);
    uint64_t l = t->log(x.code()) / step;
    return (l % 2 == 0) ? 1 : -1;
}

int sgn_norm_one(const FqElem& x, uint32_t sublayer) {
    const auto* t = x.tower();
    if (norm_to(x, sublayer).code() != 1) throw DomainError("sgn_norm_one: element is not of norm one");
    uint64_t Qd = t->layer_size(x.layer()), Qs = t->layer_size(sublayer);
    uint64_t K = (Qd - 1) / (Qs - 1);
    if (K % 2) throw DomainError("sgn_norm_one: norm-one subgroup has odd order");
    uint64_t step = (t->size() - 1) / K;  // kernel = <g^step>
    uint64_t idx = t->log(x.code()) / step;
    return (idx % 2 == 0) ? 1 : -1;
}

std::vector<FqElem> norm_one_subgroup(const FieldTower* t, uint32_t layer, uint32_t sublayer) {
    t->require_layer(layer);
    t->require_layer(sublayer);
    if (layer % sublayer) throw DomainError("sublayer does not divide layer");
    uint64_t K = (t->layer_size(layer) - 1) / (t->layer_size(sublayer) - 1);
    uint64_t step = (t->size() - 1) / K;
    std::vector<FqElem> out;
    out.reserve(K);
    for (uint64_t i = 0; i < K; ++i) out.emplace_back(t, layer, t->exp(int64_t(i * step)));
    return out;
}

}  // namespace stf
