/**
 * @file depth.cpp
 * @brief Root orders, depths, Newton polygons and discriminants.
 */
#include "stf/depth.hpp"

#include <algorithm>
#include <numeric>

#include "stf/numtheory.hpp"

namespace stf {

std::vector<LaurentElem> conjugates(const LaurentElem& gamma, uint32_t base_layer) {
    if (gamma.layer() % base_layer) throw DomainError("base layer does not divide the element layer");
    const uint32_t n = gamma.layer() / base_layer;
    std::vector<LaurentElem> out;
    out.reserve(n);
    for (uint32_t i = 0; i < n; ++i) out.push_back(galois(gamma, i, base_layer));
    return out;
}

RootOrderVector root_orders_of_eigenvalues(const std::vector<LaurentElem>& eig) {
    RootOrderVector r;
    r.n = eig.size();
    r.value.assign(r.n * r.n, kInf);
    for (size_t j = 0; j < r.n; ++j) {
        const int64_t vj = eig[j].ord();
        if (vj >= kInf) throw DomainError("root orders need nonzero eigenvalues");
        for (size_t i = 0; i < r.n; ++i) {
            if (i == j) continue;
            const int64_t o = (eig[i] - eig[j]).ord();
            r.value[i * r.n + j] = o >= kInf ? kInf : o - vj;
        }
    }
    return r;
}

RootOrderVector root_orders(const LaurentElem& gamma, uint32_t base_layer) {
    return root_orders_of_eigenvalues(conjugates(gamma, base_layer));
}

int64_t min_root_order(const RootOrderVector& rov) {
    int64_t m = kInf;
    for (size_t i = 0; i < rov.n; ++i)
        for (size_t j = 0; j < rov.n; ++j)
            if (i != j) m = std::min(m, rov.at(i, j));
    return m;
}

int64_t torus_depth(const LaurentElem& gamma, uint32_t base_layer) {
    return min_root_order(root_orders(gamma, base_layer));
}

bool is_good(const LaurentElem& gamma, uint32_t base_layer, int64_t r) {
    const auto rov = root_orders(gamma, base_layer);
    if (min_root_order(rov) != r) return false;
    for (size_t i = 0; i < rov.n; ++i)
        for (size_t j = 0; j < rov.n; ++j)
            if (i != j && rov.at(i, j) < kInf && rov.at(i, j) != r) return false;
    return true;
}

int64_t weyl_discriminant_exponent(const RootOrderVector& rov) {
    int64_t s = 0;
    for (size_t i = 0; i < rov.n; ++i)
        for (size_t j = 0; j < rov.n; ++j) {
            if (i == j) continue;
            if (rov.at(i, j) >= kInf) throw DomainError("Weyl discriminant of an irregular element");
            s += rov.at(i, j);
        }
    return s;
}

int64_t levi_discriminant_exponent(const RootOrderVector& rov, const std::vector<size_t>& block_of) {
    if (block_of.size() != rov.n) throw DomainError("block assignment has the wrong size");
    int64_t s = 0;
    for (size_t i = 0; i < rov.n; ++i)
        for (size_t j = 0; j < rov.n; ++j) {
            if (i == j || block_of[i] != block_of[j]) continue;
            if (rov.at(i, j) >= kInf) throw DomainError("Weyl discriminant of an irregular element");
            s += rov.at(i, j);
        }
    return s;
}

mpq_class q_power(const mpz_class& q, int64_t e) {
    mpz_class m;
    mpz_pow_ui(m.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
    mpq_class out = e < 0 ? mpq_class(1, m) : mpq_class(m);
    out.canonicalize();
    return out;
}

mpq_class newton_depth(const LMatrix& gamma) {
    const size_t n = gamma.n;
    if (n == 0) throw DomainError("empty matrix");
    const auto* t = gamma.a[0].tower();
    const uint32_t layer = gamma.a[0].layer();
    if (t->p() <= n) throw DomainError("Newton depth needs p > n");
    for (const auto& e : gamma.a)
        if (e.valuation_bound() < 0) throw DomainError("Newton depth needs an integral matrix");
    LaurentElem tr = LaurentElem::zero(t, layer);
    for (size_t i = 0; i < n; ++i) tr = tr + gamma.at(i, i);
    const uint32_t inv_n = t->inv(t->from_int(static_cast<int64_t>(n)));
    const LaurentElem mean = tr.scaled(inv_n);
    LMatrix X = gamma;
    for (size_t i = 0; i < n; ++i) X.at(i, i) = X.at(i, i) - mean;
    const auto c = characteristic_polynomial(X);
    bool have = false, bounded = false;
    mpq_class best, bound;
    for (size_t i = 0; i < n; ++i) {
        if (c[i].is_exact_zero()) continue;
        if (c[i].is_zero_class()) {
            mpq_class b(c[i].valuation_bound(), static_cast<long>(n - i));
            b.canonicalize();
            if (!bounded || b < bound) bound = b;
            bounded = true;
            continue;
        }
        mpq_class s(c[i].ord(), static_cast<long>(n - i));
        s.canonicalize();
        if (!have || s < best) best = s;
        have = true;
    }
    if (!have) {
        if (bounded) throw PrecisionError("Newton polygon undetermined at working precision");
        throw DomainError("Newton depth of a central element");
    }
    if (bounded && bound < best) throw PrecisionError("Newton polygon undetermined at working precision");
    return best;
}

int64_t matrix_depth(const LMatrix& g) {
    const auto* t = g.a.at(0).tower();
    const uint32_t layer = g.a.at(0).layer();
    const LMatrix X = g - identity_matrix(t, layer, g.n);
    int64_t best = kInf, bound = kInf;
    for (const auto& e : X.a) {
        if (e.is_exact_zero()) continue;
        if (e.is_zero_class())
            bound = std::min(bound, e.valuation_bound());
        else
            best = std::min(best, e.ord());
    }
    if (bound < best) throw PrecisionError("matrix depth undetermined at working precision");
    if (best >= 1) return best;
    for (const auto& e : g.a)
        if (!e.is_zero_class() && e.ord() < 0) throw DomainError("matrix is not integral");
    if (determinant(g, 8).ord() != 0) throw DomainError("matrix is not in GL_n(O)");
    return 0;
}

int64_t central_twist_depth(const LaurentElem& gamma, uint32_t base_layer, int64_t prec_if_exact) {
    const int64_t d = torus_depth(gamma, base_layer);
    if (d >= kInf) return kInf;
    if (d == 0) return matrix_depth(regular_matrix(gamma, base_layer));
    LaurentElem head = gamma.head(d).restrict_to(base_layer);
    LaurentElem z = invert(head, prec_if_exact).embed(gamma.layer());
    return matrix_depth(regular_matrix(z * gamma, base_layer));
}

int64_t roots_outside_subfield(uint32_t n, uint32_t degree) {
    if (degree == 0 || n % degree) throw DomainError("subfield degree must divide n");
    return int64_t(n) * n - int64_t(n) * (n / degree);
}

void validate_tower(uint32_t n, const std::vector<HoweStep>& tower) {
    for (size_t i = 0; i < tower.size(); ++i) {
        if (tower[i].degree == 0 || n % tower[i].degree) throw DomainError("tower degree must divide n");
        if (tower[i].depth < 0) throw DomainError("tower depths must be non-negative");
        if (i > 0) {
            if (tower[i].degree >= tower[i - 1].degree || tower[i - 1].degree % tower[i].degree)
                throw DomainError("tower fields must strictly decrease");
            if (tower[i].depth <= tower[i - 1].depth) throw DomainError("tower depths must strictly increase");
        }
    }
}

int64_t discriminant_of_representative(uint32_t n, const std::vector<HoweStep>& tower) {
    validate_tower(n, tower);
    int64_t e = 0;
    for (size_t i = 0; i < tower.size(); ++i) {
        const uint32_t next = i + 1 < tower.size() ? tower[i + 1].degree : 1;
        e += tower[i].depth * (roots_outside_subfield(n, tower[i].degree) - roots_outside_subfield(n, next));
    }
    return e;
}

uint32_t BlockElement::n() const {
    uint32_t s = 0;
    for (auto d : degrees()) s += d;
    return s;
}

std::vector<uint32_t> BlockElement::degrees() const {
    std::vector<uint32_t> out;
    for (const auto& b : blocks) {
        if (b.layer() % base_layer) throw DomainError("block layer must be a multiple of the base layer");
        out.push_back(b.layer() / base_layer);
    }
    return out;
}

uint32_t BlockElement::splitting_layer() const {
    uint32_t l = 1;
    for (auto d : degrees()) l = std::lcm(l, d);
    return base_layer * l;
}

std::vector<LaurentElem> BlockElement::eigenvalues() const {
    const uint32_t L = splitting_layer();
    if (blocks.empty()) throw DomainError("block element has no blocks");
    blocks[0].tower()->require_layer(L);
    std::vector<LaurentElem> out;
    for (const auto& b : blocks)
        for (const auto& c : conjugates(b, base_layer)) out.push_back(c.embed(L));
    return out;
}

std::vector<size_t> BlockElement::block_of_index() const {
    std::vector<size_t> out;
    const auto deg = degrees();
    for (size_t b = 0; b < deg.size(); ++b) out.insert(out.end(), deg[b], b);
    return out;
}

RootOrderVector BlockElement::root_orders() const { return root_orders_of_eigenvalues(eigenvalues()); }

int64_t BlockElement::depth() const { return min_root_order(root_orders()); }

LMatrix BlockElement::matrix() const {
    const size_t N = n();
    const auto* t = blocks.at(0).tower();
    LMatrix out(N, LaurentElem::zero(t, base_layer));
    size_t off = 0;
    for (const auto& b : blocks) {
        LMatrix m = regular_matrix(b, base_layer);
        for (size_t i = 0; i < m.n; ++i)
            for (size_t j = 0; j < m.n; ++j) out.at(off + i, off + j) = m.at(i, j);
        off += m.n;
    }
    return out;
}

void BlockElement::validate() const {
    if (blocks.empty()) throw DomainError("block element has no blocks");
    for (const auto& b : blocks)
        if (b.ord() != 0) throw DomainError("blocks must be units");
    const auto rov = root_orders();
    for (size_t i = 0; i < rov.n; ++i)
        for (size_t j = 0; j < rov.n; ++j)
            if (i != j && rov.at(i, j) >= kInf) throw DomainError("block element is not regular");
}

}  // namespace stf
