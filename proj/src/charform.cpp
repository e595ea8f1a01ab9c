/**
 * @file charform.cpp
 * @brief Character table rows, local character expansion terms, ε signs and the conjectural formula.
 */
#include "stf/charform.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "stf/numtheory.hpp"

namespace stf {

namespace {

mpz_class base_q(const LaurentElem& x, uint32_t base_layer) {
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), x.tower()->p(), base_layer);
    return q;
}

int sign_of_power(int64_t e) { return (e % 2 == 0) ? 1 : -1; }

/** q^e for an exponent that must be an integer. */
mpq_class integral_q_power(const mpz_class& q, mpq_class e) {
    e.canonicalize();
    if (e.get_den() != 1) throw DomainError("half-integral q-exponent without a square root of q");
    return q_power(q, e.get_num().get_si());
}

/** Visits every assignment of blocks to labelled Levi parts with matching sums. */
void for_each_matching(const NilOrbit& orbit, const std::vector<uint32_t>& degrees,
                       const std::function<void(const std::vector<size_t>&)>& visit) {
    std::vector<int64_t> room(orbit.levi.begin(), orbit.levi.end());
    std::vector<size_t> assign(degrees.size());
    std::function<void(size_t)> rec = [&](size_t b) {
        if (b == degrees.size()) {
            if (std::all_of(room.begin(), room.end(), [](int64_t r) { return r == 0; })) visit(assign);
            return;
        }
        for (size_t part = 0; part < room.size(); ++part) {
            if (room[part] < int64_t(degrees[b])) continue;
            room[part] -= degrees[b];
            assign[b] = part;
            rec(b + 1);
            room[part] += degrees[b];
        }
    };
    rec(0);
}

}  // namespace

SignConvention parse_sign_convention(const std::string& text) {
    if (text == "table") return SignConvention::Table;
    if (text == "raw") return SignConvention::Raw;
    throw ParseError("sign convention must be 'table' or 'raw', got '" + text + "'");
}

std::string to_string(SignConvention c) { return c == SignConvention::Table ? "table" : "raw"; }

// ----------------------------------------------------------------------------
// Nilpotent orbits

NilOrbit::NilOrbit(std::vector<uint32_t> parts) : levi(std::move(parts)) {
    if (levi.empty() || std::find(levi.begin(), levi.end(), 0u) != levi.end())
        throw DomainError("a Levi partition needs positive parts");
    std::sort(levi.begin(), levi.end(), std::greater<>());
}

uint32_t NilOrbit::n() const { return std::accumulate(levi.begin(), levi.end(), 0u); }

int64_t NilOrbit::levi_roots() const {
    int64_t s = 0;
    for (auto m : levi) s += int64_t(m) * m;
    return s - n();
}

int64_t NilOrbit::dim() const {
    const int64_t N = n();
    return (N * N - N) - levi_roots();
}

std::vector<uint32_t> NilOrbit::jordan_type() const { return dual_partition(levi); }

int64_t NilOrbit::dim_from_jordan_type() const {
    const int64_t N = n();
    int64_t s = 0;
    for (auto m : dual_partition(jordan_type())) s += int64_t(m) * m;
    return N * N - s;
}

std::vector<uint32_t> dual_partition(const std::vector<uint32_t>& parts) {
    std::vector<uint32_t> sorted = parts;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<uint32_t> out;
    if (sorted.empty()) return out;
    for (uint32_t k = 1; k <= sorted.front(); ++k)
        out.push_back(uint32_t(std::count_if(sorted.begin(), sorted.end(), [k](uint32_t m) { return m >= k; })));
    return out;
}

std::vector<std::vector<uint32_t>> partitions(uint32_t n) {
    std::vector<std::vector<uint32_t>> out;
    std::vector<uint32_t> cur;
    std::function<void(uint32_t, uint32_t)> rec = [&](uint32_t left, uint32_t cap) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (uint32_t m = std::min(left, cap); m >= 1; --m) {
            cur.push_back(m);
            rec(left - m, m);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

uint64_t merge_matchings(const NilOrbit& orbit, const std::vector<uint32_t>& block_degrees) {
    uint64_t count = 0;
    for_each_matching(orbit, block_degrees, [&](const std::vector<size_t>&) { ++count; });
    return count;
}

bool orbit_leq(const NilOrbit& a, const NilOrbit& b) {
    if (a.n() != b.n()) throw DomainError("orbits of different groups");
    return merge_matchings(a, b.levi) > 0;
}

std::vector<NilOrbit> admissible_orbits(const BlockElement& gamma) {
    gamma.validate();
    const auto degrees = gamma.degrees();
    std::vector<NilOrbit> out;
    for (auto& part : partitions(gamma.n())) {
        NilOrbit o(part);
        if (merge_matchings(o, degrees) > 0) out.push_back(o);
    }
    return out;
}

// ----------------------------------------------------------------------------
// Roots

bool RootRealization::symmetric(uint32_t i, uint32_t j) const {
    return n % 2 == 0 && (j + n - i) % n == n / 2;
}

size_t RootRealization::symmetric_count() const {
    size_t c = 0;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
            if (i != j && symmetric(i, j)) ++c;
    return c;
}

std::vector<std::vector<std::pair<uint32_t, uint32_t>>> RootRealization::orbits() const {
    std::set<std::pair<uint32_t, uint32_t>> seen;
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> out;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j) {
            if (i == j || seen.count({i, j})) continue;
            std::vector<std::pair<uint32_t, uint32_t>> orbit;
            for (uint32_t s = 0; s < n; ++s) {
                std::pair<uint32_t, uint32_t> a{(i + s) % n, (j + s) % n};
                if (seen.insert(a).second) orbit.push_back(a);
                if (!symmetric(i, j)) {
                    std::pair<uint32_t, uint32_t> b{a.second, a.first};
                    if (seen.insert(b).second) orbit.push_back(b);
                }
            }
            out.push_back(std::move(orbit));
        }
    return out;
}

// ----------------------------------------------------------------------------
// Local character expansion

mpq_class lce_term(const NilOrbit& orbit, int64_t psi_depth, const BlockElement& gamma, SignConvention conv) {
    gamma.validate();
    const uint32_t n = gamma.n();
    if (orbit.n() != n) throw DomainError("orbit and element live in different groups");
    const auto degrees = gamma.degrees();
    const auto block_of = gamma.block_of_index();
    const auto rov = gamma.root_orders();
    const mpz_class q = base_q(gamma.blocks[0], gamma.base_layer);
    mpq_class sum = 0;
    uint64_t w = 0;
    for_each_matching(orbit, degrees, [&](const std::vector<size_t>& assign) {
        ++w;
        int64_t s = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (i != j && assign[block_of[i]] != assign[block_of[j]]) s += rov.at(i, j);
        sum += integral_q_power(q, mpq_class(s, 2));
    });
    if (w == 0) throw DomainError("orbit is not below the orbit of γ");
    const int64_t r = int64_t(orbit.rank());
    const int sign = sign_of_power(conv == SignConvention::Table ? n + r - 1 : n + r);
    mpz_class fact = 1;
    for (int64_t k = 2; k < r; ++k) fact *= k;
    mpq_class levi = integral_q_power(q, mpq_class(psi_depth * orbit.levi_roots(), 2));
    mpq_class out = mpq_class(int64_t(n) * sign) * fact * levi * sum / mpq_class(mpz_class(std::to_string(w)));
    out.canonicalize();
    return out;
}

// ----------------------------------------------------------------------------
// ε signs

int epsilon_r(const LaurentElem& head, uint32_t base_layer, int64_t r, uint32_t field_degree, uint32_t next_degree) {
    if (r % 2 != 0) return 1;
    if (head.is_zero_class()) return 1;
    const auto* t = head.tower();
    const uint32_t L = head.layer();
    if (L % base_layer) throw DomainError("base layer does not divide the element layer");
    const uint32_t n = L / base_layer;
    if (field_degree == 0 || n % field_degree || next_degree == 0 || field_degree % next_degree)
        throw DomainError("tower step degrees must divide n and each other");
    if (head.ord() != 0) throw DomainError("ε needs a unit head");
    const auto conj = conjugates(head, base_layer);
    RootRealization roots{n};
    int eps = 1;
    for (const auto& orbit : roots.orbits()) {
        const auto [i, j] = orbit.front();
        const bool in_step = (i % next_degree == j % next_degree) && (i % field_degree != j % field_degree);
        if (!in_step || conj[i].congruent(conj[j])) continue;
        const uint32_t x = t->mul(conj[i].coef(0), t->inv(conj[j].coef(0)));
        eps *= roots.symmetric(i, j) ? sgn_norm_one(FqElem(t, L, x), L / 2) : sgn(FqElem(t, L, x));
    }
    return eps;
}

int epsilon_psi(const std::vector<HoweStep>& tower, const LaurentElem& gamma, uint32_t base_layer,
                SignConvention conv) {
    const uint32_t n = gamma.layer() / base_layer;
    validate_tower(n, tower);
    const int64_t dg = torus_depth(gamma, base_layer);
    if (dg >= kInf) throw DomainError("ε_ψ of a central element");
    int eps = 1;
    for (size_t i = 0; i < tower.size(); ++i) {
        const uint32_t next = i + 1 < tower.size() ? tower[i + 1].degree : 1;
        const int64_t r = tower[i].depth;
        eps *= epsilon_r(gamma.head(r), base_layer, r, tower[i].degree, next);
        const int64_t gap = conv == SignConvention::Table ? std::max<int64_t>(r - dg, 0) : std::max<int64_t>(dg - r, 0);
        eps *= sign_of_power(int64_t(n - 1) * gap);
    }
    return eps;
}

// ----------------------------------------------------------------------------
// Character table

TableRow table_row_on_torus(int64_t psi_depth, int64_t gamma_depth) {
    return gamma_depth < psi_depth ? TableRow::OnTorusShallow : TableRow::OnTorusDeep;
}

TableRow table_row_off_torus(int64_t psi_depth, const BlockElement& gamma) {
    return gamma.depth() > psi_depth ? TableRow::OffTorusNear : TableRow::OffTorusFar;
}

mpq_class table_coefficient(uint32_t ell, const mpz_class& q, int64_t psi_depth, int64_t gamma_depth) {
    if (!is_prime(ell)) throw DomainError("the character table needs a prime degree");
    if (psi_depth < 0 || gamma_depth < 0) throw DomainError("depths must be non-negative");
    const int64_t roots = int64_t(ell) * ell - ell;
    const int global = sign_of_power(ell);
    if (table_row_on_torus(psi_depth, gamma_depth) == TableRow::OnTorusShallow)
        return global * sign_of_power(int64_t(ell - 1) * (gamma_depth - psi_depth)) *
               q_power(q, gamma_depth * roots / 2);
    return global * q_power(q, psi_depth * roots / 2);
}

CycNumber theta_table(const TorusQuotient& Q, const Character& psi, const LaurentElem& gamma) {
    Q.check_member(gamma);
    const auto& spec = Q.spec();
    const int64_t dg = torus_depth(gamma, spec.base_layer);
    if (dg >= kInf) throw DomainError("Θ on the torus needs a regular element");
    const mpz_class q = mpz_class(std::to_string(spec.q()));
    const mpq_class c = table_coefficient(spec.degree, q, character_depth(Q, psi), dg);
    return CycNumber(c) * galois_orbit_sum(Q, psi, gamma);
}

mpq_class theta_table_off_torus(int64_t psi_depth, const BlockElement& gamma, SignConvention conv) {
    if (!is_prime(gamma.n())) throw DomainError("the character table needs a prime degree");
    if (gamma.blocks.size() < 2) throw DomainError("elliptic elements belong on the torus");
    if (table_row_off_torus(psi_depth, gamma) == TableRow::OffTorusFar) return 0;
    mpq_class s = 0;
    for (const auto& o : admissible_orbits(gamma)) s += lce_term(o, psi_depth, gamma, conv);
    return s;
}

// ----------------------------------------------------------------------------
// Conjectural formula

mpq_class head_discriminant_exponent(const LaurentElem& gamma, uint32_t base_layer, int64_t r) {
    if (r <= 0) return 0;
    const LaurentElem head = gamma.head(r);
    if (head.is_zero_class()) return 0;
    const auto conj = conjugates(head, base_layer);
    int64_t s = 0;
    for (size_t i = 0; i < conj.size(); ++i)
        for (size_t j = 0; j < conj.size(); ++j) {
            if (i == j || conj[i].congruent(conj[j])) continue;
            s += (conj[i] - conj[j]).ord() - conj[j].ord();
        }
    mpq_class e(s, 2);
    e.canonicalize();
    return e;
}

std::vector<HoweStep> truncated_tower(const std::vector<HoweStep>& tower, int64_t gamma_depth) {
    std::vector<HoweStep> out;
    for (const auto& s : tower)
        if (s.depth <= gamma_depth) out.push_back(s);
    return out;
}

mpq_class conjecture_coefficient(const std::vector<HoweStep>& tower, const LaurentElem& gamma, uint32_t base_layer,
                                 SignConvention conv) {
    if (tower.empty()) throw DomainError("the trivial character has no Howe tower");
    const uint32_t n = gamma.layer() / base_layer;
    validate_tower(n, tower);
    const int64_t dg = torus_depth(gamma, base_layer);
    if (dg >= kInf) throw DomainError("Θ on the torus needs a regular element");
    const int64_t r = tower.back().depth;
    const mpq_class e =
        head_discriminant_exponent(gamma, base_layer, r) +
        mpq_class(discriminant_of_representative(n, truncated_tower(tower, dg)), 2);
    int sign = epsilon_psi(tower, gamma, base_layer, conv);
    if (conv == SignConvention::Table) sign *= sign_of_power(n);
    return sign * integral_q_power(base_q(gamma, base_layer), e);
}

CycNumber theta_conjecture(const TorusQuotient& Q, const Character& psi, const LaurentElem& gamma,
                           SignConvention conv) {
    Q.check_member(gamma);
    const mpq_class c = conjecture_coefficient(howe_tower(Q, psi), gamma, Q.spec().base_layer, conv);
    return CycNumber(c) * galois_orbit_sum(Q, psi, gamma);
}

mpq_class constant_term(uint32_t n, const mpz_class& q, const std::vector<HoweStep>& tower) {
    validate_tower(n, tower);
    int64_t s = 0;
    for (size_t i = 0; i < tower.size(); ++i) {
        const uint32_t next = i + 1 < tower.size() ? tower[i + 1].degree : 1;
        s += tower[i].depth * (int64_t(n / next) - int64_t(n / tower[i].degree));
    }
    return int64_t(n) * integral_q_power(q, mpq_class(int64_t(n) * s, 2));
}

}  // namespace stf
