/**
 * @file chargroup.cpp
 * @brief Presentation, Smith normal form and dual of T/T_R; character invariants and counts.
 */
#include "stf/chargroup.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "stf/numtheory.hpp"

namespace stf {

// ----------------------------------------------------------------------------
// Torus data

uint64_t TorusSpec::q() const { return ipow(tower->p(), base_layer); }

uint64_t TorusSpec::residue_order() const {
    const uint64_t qn = ipow(q(), degree);
    return kind == TorusKind::NormOne ? (qn - 1) / (q() - 1) : qn - 1;
}

uint64_t TorusSpec::layer_order() const {
    return kind == TorusKind::NormOne ? ipow(q(), degree - 1) : ipow(q(), degree);
}

std::vector<uint32_t> trace_kernel_basis(const FieldTower* t, uint32_t layer, uint32_t sublayer) {
    t->require_layer(layer);
    if (layer % sublayer) throw DomainError("trace kernel needs a subfield");
    const uint32_t z = t->layer_generator(layer);
    std::vector<uint32_t> powers(layer);
    uint32_t acc = 1;
    for (uint32_t i = 0; i < layer; ++i) {
        powers[i] = acc;
        acc = t->mul(acc, z);
    }
    if (layer == sublayer) return {};
    std::vector<std::vector<uint32_t>> rows(sublayer, std::vector<uint32_t>(layer));
    for (uint32_t i = 0; i < layer; ++i) {
        const auto c = t->coordinates(t->trace(powers[i], layer, sublayer), sublayer);
        for (uint32_t r = 0; r < sublayer; ++r) rows[r][i] = c[r];
    }
    std::vector<uint32_t> out;
    for (const auto& v : fp_kernel(t->p(), rows, layer)) out.push_back(t->from_coordinates(v, layer));
    return out;
}

std::vector<uint32_t> TorusSpec::layer_basis() const {
    if (kind == TorusKind::NormOne) return trace_kernel_basis(tower, layer(), base_layer);
    const uint32_t z = tower->layer_generator(layer());
    std::vector<uint32_t> out;
    uint32_t acc = 1;
    for (uint32_t i = 0; i < layer(); ++i) {
        out.push_back(acc);
        acc = tower->mul(acc, z);
    }
    return out;
}

LaurentElem lift_norm_one(const FieldTower* t, uint32_t layer, uint32_t sublayer, int64_t j, uint32_t b,
                          int64_t R) {
    const uint32_t e = layer / sublayer;
    if (e % t->p() == 0) throw DomainError("relative degree divisible by p");
    const uint32_t inv_e = t->inv(t->from_int(e));
    LaurentElem x = (LaurentElem::one(t, layer) + LaurentElem::monomial(t, layer, b, j)).truncated(R);
    for (;;) {
        LaurentElem dev = norm_E_to_M(x, sublayer) - LaurentElem::one(t, sublayer);
        if (dev.is_zero_class()) return x;
        const int64_t s = dev.ord();
        if (s <= j && s < R) throw DomainError("lift_norm_one: leading term is not trace zero");
        const uint32_t w = t->mul(dev.coef(s), inv_e);
        x = x * (LaurentElem::one(t, layer) - LaurentElem::monomial(t, layer, w, s));
    }
}

// ----------------------------------------------------------------------------
// Smith normal form

namespace {

/** Diagonalize A (rows × cols) by unimodular row and column operations; V tracks the column ops. */
void smith_normal_form(std::vector<std::vector<mpz_class>>& A, std::vector<std::vector<mpz_class>>& V) {
    const size_t m = A.size(), n = A.empty() ? 0 : A[0].size();
    V.assign(n, std::vector<mpz_class>(n, 0));
    for (size_t i = 0; i < n; ++i) V[i][i] = 1;
    auto col_axpy = [&](size_t dst, size_t src, const mpz_class& f) {  // col_dst -= f·col_src
        for (size_t i = 0; i < m; ++i) A[i][dst] -= f * A[i][src];
        for (size_t i = 0; i < n; ++i) V[i][dst] -= f * V[i][src];
    };
    auto swap_cols = [&](size_t a, size_t b) {
        for (size_t i = 0; i < m; ++i) std::swap(A[i][a], A[i][b]);
        for (size_t i = 0; i < n; ++i) std::swap(V[i][a], V[i][b]);
    };
    for (size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            // smallest nonzero entry of the remaining block becomes the pivot
            size_t pr = m, pc = n;
            for (size_t i = t; i < m; ++i)
                for (size_t j = t; j < n; ++j)
                    if (A[i][j] != 0 && (pr == m || abs(A[i][j]) < abs(A[pr][pc]))) {
                        pr = i;
                        pc = j;
                    }
            if (pr == m) return;
            std::swap(A[t], A[pr]);
            swap_cols(t, pc);
            bool clean = true;
            for (size_t i = t + 1; i < m; ++i) {
                if (A[i][t] == 0) continue;
                mpz_class f;
                mpz_fdiv_q(f.get_mpz_t(), A[i][t].get_mpz_t(), A[t][t].get_mpz_t());
                for (size_t j = t; j < n; ++j) A[i][j] -= f * A[t][j];
                if (A[i][t] != 0) clean = false;
            }
            for (size_t j = t + 1; j < n; ++j) {
                if (A[t][j] == 0) continue;
                mpz_class f;
                mpz_fdiv_q(f.get_mpz_t(), A[t][j].get_mpz_t(), A[t][t].get_mpz_t());
                col_axpy(j, t, f);
                if (A[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            size_t bad = m;
            for (size_t i = t + 1; i < m && bad == m; ++i)
                for (size_t j = t + 1; j < n; ++j)
                    if (A[i][j] % A[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad == m) break;
            for (size_t j = t; j < n; ++j) A[t][j] += A[bad][j];
        }
        if (A[t][t] < 0) {
            for (size_t i = 0; i < m; ++i) A[i][t] = -A[i][t];
            for (size_t i = 0; i < n; ++i) V[i][t] = -V[i][t];
        }
    }
}

int64_t mod_pos(int64_t a, int64_t m) {
    a %= m;
    return a < 0 ? a + m : a;
}

}  // namespace

// ----------------------------------------------------------------------------
// TorusQuotient

TorusQuotient::TorusQuotient(const TorusSpec& spec, int64_t R) : spec_(spec), R_(R) {
    const auto* t = spec.tower;
    if (!t) throw DomainError("torus needs a field tower");
    if (R < 1) throw DomainError("quotient level must be at least 1");
    t->require_layer(spec.layer());
    if (spec.degree % t->p() == 0) throw DomainError("degree must be prime to p");
    const uint32_t L = spec.layer();
    const uint64_t qE = t->layer_size(L);
    const uint64_t s = (t->size() - 1) / (qE - 1);
    g0_log_step_ = spec.kind == TorusKind::NormOne ? s * (spec.q() - 1) : s;
    g0_ = LaurentElem::monomial(t, L, t->exp(int64_t(g0_log_step_)), 0);

    basis_ = spec.layer_basis();
    std::vector<std::vector<uint32_t>> cols;
    for (auto b : basis_) cols.push_back(t->digits(b));
    basis_solver_ = FpSolver(t->p(), cols, t->top_degree());
    const size_t B = basis_.size();
    h_.assign(size_t(R - 1), {});
    h_inv_.assign(size_t(R - 1), {});
    for (int64_t j = 1; j < R; ++j)
        for (auto b : basis_) {
            LaurentElem h = spec.kind == TorusKind::NormOne
                                ? lift_norm_one(t, L, spec.base_layer, j, b, R)
                                : (LaurentElem::one(t, L) + LaurentElem::monomial(t, L, b, j)).truncated(R);
            h_[size_t(j - 1)].push_back(h);
            h_inv_[size_t(j - 1)].push_back(invert(h, R).truncated(R));
        }

    // relation lattice of the presentation
    const size_t G = generator_count();
    std::vector<std::vector<mpz_class>> A(G, std::vector<mpz_class>(G, 0));
    A[0][0] = mpz_class(std::to_string(spec.residue_order()));
    for (int64_t j = 1; j < R; ++j)
        for (size_t b = 0; b < B; ++b) {
            const size_t g = 1 + size_t(j - 1) * B + b;
            const auto e = discrete_log(reduce(power(h_[size_t(j - 1)][b], t->p())));
            for (size_t k = 0; k < G; ++k) A[g][k] = -e[k];
            A[g][g] += t->p();
        }
    std::vector<std::vector<mpz_class>> V;
    smith_normal_form(A, V);
    mpz_class ord = 1;
    std::vector<size_t> kept;
    for (size_t i = 0; i < G; ++i) {
        if (A[i][i] == 0) throw DomainError("torus quotient presentation is not finite");
        ord *= A[i][i];
        if (A[i][i] != 1) {
            kept.push_back(i);
            inv_.push_back(A[i][i].get_si());
        }
    }
    mpz_class expected = mpz_class(std::to_string(spec.residue_order()));
    for (int64_t j = 1; j < R; ++j) expected *= mpz_class(std::to_string(spec.layer_order()));
    if (ord != expected) throw DomainError("torus quotient order does not match its filtration");
    if (!ord.fits_ulong_p()) throw CapacityError("torus quotient too large");
    order_ = ord.get_ui();
    N_ = inv_.empty() ? 1 : inv_.back();
    V_.assign(G, std::vector<int64_t>(kept.size()));
    for (size_t g = 0; g < G; ++g)
        for (size_t c = 0; c < kept.size(); ++c) {
            mpz_class r;
            mpz_fdiv_r(r.get_mpz_t(), V[g][kept[c]].get_mpz_t(), mpz_class(inv_[c]).get_mpz_t());
            V_[g][c] = r.get_si();
        }

    residue_probe_ = weights(g0_);
    level_probes_.assign(size_t(R - 1), {});
    for (int64_t j = 1; j < R; ++j)
        for (size_t b = 0; b < B; ++b) level_probes_[size_t(j - 1)].push_back(weights(h_[size_t(j - 1)][b]));

    for (auto m : divisors(spec.degree)) {
        if (m == spec.degree) continue;
        KernelProbes kp;
        kp.degree = uint32_t(m);
        const uint32_t S = spec.base_layer * uint32_t(m);
        const uint64_t qM = t->layer_size(S);
        kp.residue = weights(LaurentElem::monomial(t, L, t->exp(int64_t(s * (qM - 1))), 0));
        const auto kb = trace_kernel_basis(t, L, S);
        kp.levels.assign(size_t(R - 1), {});
        for (int64_t j = 1; j < R; ++j)
            for (auto b : kb) kp.levels[size_t(j - 1)].push_back(weights(lift_norm_one(t, L, S, j, b, R)));
        kernel_probes_.push_back(std::move(kp));
    }
}

std::vector<int64_t> TorusQuotient::discrete_log(const LaurentElem& xin) const {
    const auto* t = spec_.tower;
    if (xin.layer() != spec_.layer()) throw DomainError("element is not in the torus layer");
    if (xin.precision() < R_) throw PrecisionError("element known to less than the quotient level");
    LaurentElem x = reduce(xin);
    if (x.is_zero_class() || x.ord() != 0) throw DomainError("torus element must be a unit");
    const size_t B = basis_.size();
    std::vector<int64_t> e(generator_count(), 0);
    const uint64_t lg = t->log(x.coef(0));
    if (lg % g0_log_step_) throw DomainError("residue is not in T(f)");
    const uint64_t e0 = lg / g0_log_step_;
    e[0] = int64_t(e0 % spec_.residue_order());
    LaurentElem y = x.scaled(t->exp(-int64_t(lg)));
    for (int64_t j = 1; j < R_; ++j) {
        const uint32_t u = y.coef(j);
        if (u == 0) continue;
        const auto c = basis_solver_.solve(t->digits(u));
        if (!c) throw DomainError("element is not in the torus (level term outside the layer space)");
        for (size_t b = 0; b < B; ++b) {
            e[1 + size_t(j - 1) * B + b] = (*c)[b];
            for (uint32_t k = 0; k < (*c)[b]; ++k) y = reduce(y * h_inv_[size_t(j - 1)][b]);
        }
    }
    return e;
}

std::vector<int64_t> TorusQuotient::coordinates_from_log(const std::vector<int64_t>& e) const {
    std::vector<int64_t> y(inv_.size(), 0);
    for (size_t c = 0; c < inv_.size(); ++c) {
        __int128 acc = 0;
        for (size_t g = 0; g < e.size(); ++g) acc += static_cast<__int128>(e[g]) * V_[g][c];
        y[c] = mod_pos(int64_t(acc % inv_[c]), inv_[c]);
    }
    return y;
}

std::vector<int64_t> TorusQuotient::coordinates(const LaurentElem& x) const {
    return coordinates_from_log(discrete_log(x));
}

std::vector<int64_t> TorusQuotient::weights(const LaurentElem& x) const {
    auto y = coordinates(x);
    for (size_t c = 0; c < y.size(); ++c) y[c] = y[c] * (N_ / inv_[c]) % N_;
    return y;
}

LaurentElem TorusQuotient::element_from_log(const std::vector<int64_t>& e) const {
    const auto* t = spec_.tower;
    const size_t B = basis_.size();
    LaurentElem x = LaurentElem::monomial(t, spec_.layer(), t->exp(int64_t(g0_log_step_) * e.at(0)), 0).truncated(R_);
    for (int64_t j = 1; j < R_; ++j)
        for (size_t b = 0; b < B; ++b) {
            const int64_t k = e.at(1 + size_t(j - 1) * B + b);
            if (k) x = reduce(x * power(k > 0 ? h_[size_t(j - 1)][b] : h_inv_[size_t(j - 1)][b], k > 0 ? k : -k));
        }
    return x;
}

int64_t TorusQuotient::element_level(const LaurentElem& x) const {
    const LaurentElem d = reduce(x) - LaurentElem::one(spec_.tower, spec_.layer());
    if (d.is_zero_class()) return R_;
    return std::min(R_, d.ord());
}

void TorusQuotient::check_member(const LaurentElem& x) const {
    if (x.layer() != spec_.layer()) throw DomainError("element is not in the torus layer");
    if (x.precision() < R_) throw PrecisionError("element known to less than the quotient level");
    if (x.is_zero_class() || x.ord() != 0) throw DomainError("torus element must be a unit");
    if (spec_.kind == TorusKind::NormOne) {
        auto N = norm_E_to_M(reduce(x), spec_.base_layer);
        if (!N.congruent(LaurentElem::one(spec_.tower, spec_.base_layer)))
            throw DomainError("torus element must have norm one");
    }
}

// ----------------------------------------------------------------------------
// Characters

std::string format_character(const TorusQuotient& Q, const Character& psi) {
    std::ostringstream os;
    os << "psi=[";
    for (size_t i = 0; i < psi.a.size(); ++i) os << (i ? "," : "") << psi.a[i];
    os << "]@r=" << Q.level() - 1;
    return os.str();
}

std::pair<Character, int64_t> parse_character(const std::string& text) {
    auto fail = [&]() -> std::pair<Character, int64_t> {
        throw ParseError("malformed character label '" + text + "'");
    };
    const std::string head = "psi=[";
    if (text.compare(0, head.size(), head) != 0) return fail();
    const auto close = text.find(']');
    if (close == std::string::npos || text.compare(close, 4, "]@r=") != 0) return fail();
    Character psi;
    std::string body = text.substr(head.size(), close - head.size());
    std::stringstream ss(body);
    std::string item;
    while (!body.empty() && std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            psi.a.push_back(std::stoll(item, &used));
            if (used != item.size()) return fail();
        } catch (const std::logic_error&) {
            return fail();
        }
    }
    int64_t r = 0;
    try {
        size_t used = 0;
        const std::string tail = text.substr(close + 4);
        r = std::stoll(tail, &used);
        if (used != tail.size() || r < 0) return fail();
    } catch (const std::logic_error&) {
        return fail();
    }
    return {psi, r};
}

void validate_character(const TorusQuotient& Q, const Character& psi) {
    if (psi.a.size() != Q.invariants().size())
        throw DomainError("character label has " + std::to_string(psi.a.size()) + " entries, expected " +
                          std::to_string(Q.invariants().size()));
    for (size_t i = 0; i < psi.a.size(); ++i)
        if (psi.a[i] < 0 || psi.a[i] >= Q.invariants()[i])
            throw DomainError("character exponent out of range");
}

int64_t pair_exponent(const TorusQuotient& Q, const Character& psi, const std::vector<int64_t>& w) {
    const int64_t N = Q.exponent();
    __int128 acc = 0;
    for (size_t i = 0; i < w.size(); ++i) acc += static_cast<__int128>(psi.a.at(i)) * w[i];
    return mod_pos(int64_t(acc % N), N);
}

CycNumber eval(const TorusQuotient& Q, const Character& psi, const LaurentElem& x) {
    Q.check_member(x);
    return CycNumber::root_of_unity(uint64_t(Q.exponent()), pair_exponent(Q, psi, Q.weights(x)));
}

CycNumber galois_orbit_sum(const TorusQuotient& Q, const Character& psi, const LaurentElem& gamma) {
    CycNumber acc(0L);
    for (const auto& c : conjugates(gamma, Q.spec().base_layer)) acc += eval(Q, psi, c);
    return acc;
}

bool is_trivial(const TorusQuotient& Q, const Character& psi) {
    validate_character(Q, psi);
    return std::all_of(psi.a.begin(), psi.a.end(), [](int64_t v) { return v == 0; });
}

int64_t character_depth(const TorusQuotient& Q, const Character& psi) {
    validate_character(Q, psi);
    for (int64_t j = Q.level() - 1; j >= 1; --j)
        for (const auto& w : Q.level_probes(j))
            if (pair_exponent(Q, psi, w) != 0) return j;
    if (pair_exponent(Q, psi, Q.residue_probe()) != 0) return 0;
    throw DomainError("the trivial character has no depth");
}

uint32_t character_beta(const TorusQuotient& Q, const Character& psi) {
    const int64_t r = character_depth(Q, psi);
    if (r < 1) throw DomainError("β_ψ needs depth at least 1");
    const auto* t = Q.spec().tower;
    const uint32_t p = t->p();
    const auto& basis = Q.basis();
    const size_t B = basis.size();
    const int64_t step = Q.exponent() / p;
    std::vector<uint32_t> c(B);
    for (size_t b = 0; b < B; ++b) {
        const int64_t e = pair_exponent(Q, psi, Q.level_probes(r)[b]);
        if (e % step) throw DomainError("level character is not of order p");
        c[b] = uint32_t(e / step);
    }
    std::vector<std::vector<uint32_t>> cols(B, std::vector<uint32_t>(B));
    for (size_t b2 = 0; b2 < B; ++b2)
        for (size_t b = 0; b < B; ++b)
            cols[b2][b] = t->trace(t->mul(basis[b], basis[b2]), Q.spec().layer(), 1);
    const auto x = FpSolver(p, cols, B).solve(c);
    if (!x) throw DomainError("trace form is degenerate on the layer space");
    uint32_t beta = 0;
    for (size_t b = 0; b < B; ++b) beta = t->add(beta, t->scale(basis[b], (*x)[b]));
    return beta;
}

uint32_t generated_degree(const TorusSpec& spec, uint32_t beta) {
    const uint32_t d = spec.tower->min_layer(beta);
    return std::lcm(d, spec.base_layer) / spec.base_layer;
}

bool factors_through_norm(const TorusQuotient& Q, const Character& psi, uint32_t m) {
    validate_character(Q, psi);
    const uint32_t n = Q.spec().degree;
    if (m == 0 || n % m) throw DomainError("subfield degree must divide n");
    if (m == n) return true;
    for (const auto& kp : Q.kernel_probes()) {
        if (kp.degree != m) continue;
        if (pair_exponent(Q, psi, kp.residue) != 0) return false;
        for (const auto& lvl : kp.levels)
            for (const auto& w : lvl)
                if (pair_exponent(Q, psi, w) != 0) return false;
        return true;
    }
    throw DomainError("no kernel data for that subfield");
}

ProbeLayout::ProbeLayout(const TorusQuotient& Q) : Q_(&Q) {
    residue_ = add(Q.residue_probe());
    for (int64_t j = 1; j < Q.level(); ++j) {
        level_.emplace_back();
        for (const auto& w : Q.level_probes(j)) level_.back().push_back(add(w));
    }
    for (const auto& kp : Q.kernel_probes()) {
        KernelIdx k{kp.degree, add(kp.residue), {}};
        for (const auto& lvl : kp.levels) {
            k.levels.emplace_back();
            for (const auto& w : lvl) k.levels.back().push_back(add(w));
        }
        kernels_.push_back(std::move(k));
    }
}

size_t ProbeLayout::add(const std::vector<int64_t>& w) {
    probes_.push_back(w);
    return probes_.size() - 1;
}

int64_t ProbeLayout::depth(const int64_t* v) const {
    for (size_t j = level_.size(); j-- > 0;)
        for (size_t idx : level_[j])
            if (v[idx]) return int64_t(j + 1);
    return v[residue_] ? 0 : -1;
}

bool ProbeLayout::kernel_trivial(const KernelIdx& k, const int64_t* v, int64_t s) const {
    if (s == 0 && v[k.residue]) return false;
    for (size_t j = size_t(std::max<int64_t>(s, 1)); j <= k.levels.size(); ++j)
        for (size_t idx : k.levels[j - 1])
            if (v[idx]) return false;
    return true;
}

uint32_t ProbeLayout::minimal_field(const int64_t* v, int64_t s) const {
    const uint32_t n = Q_->spec().degree;
    std::vector<uint32_t> cand;
    for (const auto& k : kernels_)
        if (kernel_trivial(k, v, s)) cand.push_back(k.degree);
    cand.push_back(n);
    std::vector<uint32_t> minimal;
    for (auto m : cand) {
        bool has_smaller = false;
        for (auto m2 : cand)
            if (m2 < m && m % m2 == 0) has_smaller = true;
        if (!has_smaller) minimal.push_back(m);
    }
    if (minimal.size() != 1) throw DomainError("no unique minimal subfield for the character");
    return minimal[0];
}

uint32_t ProbeLayout::field_degree(const int64_t* v, int64_t depth) const { return minimal_field(v, depth); }

std::vector<HoweStep> ProbeLayout::tower(const int64_t* v, int64_t depth) const {
    std::vector<HoweStep> out;
    for (int64_t s = 0; s <= depth; ++s) {
        const uint32_t m = minimal_field(v, s);
        if (!out.empty() && out.back().degree == m)
            out.back().depth = s;
        else
            out.push_back({m, s});
    }
    return out;
}

namespace {

std::vector<int64_t> probe_values(const TorusQuotient& Q, const Character& psi, const ProbeLayout& layout) {
    std::vector<int64_t> v;
    for (const auto& w : layout.probes()) v.push_back(pair_exponent(Q, psi, w));
    return v;
}

}  // namespace

std::vector<HoweStep> howe_tower(const TorusQuotient& Q, const Character& psi) {
    const int64_t d = character_depth(Q, psi);
    ProbeLayout layout(Q);
    return layout.tower(probe_values(Q, psi, layout).data(), d);
}

uint32_t field_of_psi(const TorusQuotient& Q, const Character& psi) {
    const int64_t d = character_depth(Q, psi);
    ProbeLayout layout(Q);
    return layout.field_degree(probe_values(Q, psi, layout).data(), d);
}

CharacterHandle describe(const TorusQuotient& Q, const Character& psi) {
    CharacterHandle h;
    h.label = psi;
    h.depth = character_depth(Q, psi);
    h.beta = h.depth >= 1 ? character_beta(Q, psi) : 0;
    h.tower = howe_tower(Q, psi);
    return h;
}

// ----------------------------------------------------------------------------
// Counting

mpz_class count_by_depth(uint32_t ell, uint64_t q, int64_t r) {
    if (r < 0) throw DomainError("depth must be non-negative");
    mpz_class Q = q, qn, ql;
    mpz_pow_ui(qn.get_mpz_t(), Q.get_mpz_t(), ell);
    const mpz_class T = (qn - 1) / (Q - 1);
    if (r == 0) return T - 1;
    mpz_pow_ui(ql.get_mpz_t(), Q.get_mpz_t(), ell - 1);
    mpz_class tail;
    mpz_pow_ui(tail.get_mpz_t(), ql.get_mpz_t(), static_cast<unsigned long>(r - 1));
    return T * (ql - 1) * tail;
}

std::vector<uint64_t> enumerate_depth_counts(const TorusQuotient& Q) {
    ProbeLayout layout(Q);
    std::vector<uint64_t> counts(size_t(Q.level()), 0);
    for_each_character(Q, layout.probes(), [&](const std::vector<int64_t>&, const int64_t* v) {
        const int64_t d = layout.depth(v);
        if (d >= 0) ++counts[size_t(d)];
    });
    return counts;
}

std::vector<std::vector<MoebiusResult>> moebius_sums(const TorusQuotient& Q, const std::vector<LaurentElem>& ts) {
    const int64_t r = Q.level() - 1;
    if (r < 1) throw DomainError("the Möbius identity needs r ≥ 1");
    const uint32_t n = Q.spec().degree;
    const int64_t N = Q.exponent();
    std::vector<std::vector<int64_t>> probes;
    std::vector<size_t> level_idx;
    for (const auto& w : Q.level_probes(r)) {
        level_idx.push_back(probes.size());
        probes.push_back(w);
    }
    // kernel probes at level r for each proper subfield M ⊋ F
    struct Kern {
        uint32_t degree;
        std::vector<size_t> idx;
    };
    std::vector<Kern> kerns;
    for (const auto& kp : Q.kernel_probes()) {
        Kern k{kp.degree, {}};
        for (const auto& w : kp.levels[size_t(r - 1)]) {
            k.idx.push_back(probes.size());
            probes.push_back(w);
        }
        kerns.push_back(std::move(k));
    }
    std::vector<size_t> t_idx;
    for (const auto& t : ts) {
        Q.check_member(t);
        t_idx.push_back(probes.size());
        probes.push_back(Q.weights(t));
    }
    std::vector<uint32_t> degrees;
    for (auto m : divisors(n))
        if (m > 1) degrees.push_back(uint32_t(m));
    const size_t T = ts.size(), Md = degrees.size();
    std::vector<int64_t> rhs_hist(T * size_t(N), 0), lhs_hist(T * Md * size_t(N), 0);
    std::vector<size_t> slot_of_degree(n + 1, 0);
    for (size_t k = 0; k < Md; ++k) slot_of_degree[degrees[k]] = k;
    for_each_character(Q, probes, [&](const std::vector<int64_t>&, const int64_t* v) {
        bool deep = false;
        for (size_t i : level_idx)
            if (v[i]) {
                deep = true;
                break;
            }
        if (!deep) {
            for (size_t k = 0; k < T; ++k) {
                const int64_t e = v[t_idx[k]];
                ++rhs_hist[k * size_t(N) + size_t(e ? N - e : 0)];
            }
            return;
        }
        uint32_t field = n;
        for (const auto& kp : kerns) {
            if (kp.degree == 1) continue;
            bool triv = true;
            for (size_t i : kp.idx)
                if (v[i]) {
                    triv = false;
                    break;
                }
            if (triv && kp.degree < field) {
                if (field != n && field % kp.degree && kp.degree % field)
                    throw DomainError("no unique minimal subfield for the character");
                field = kp.degree;
            }
        }
        const size_t slot = slot_of_degree[field];
        for (size_t k = 0; k < T; ++k) {
            const int64_t e = v[t_idx[k]];
            ++lhs_hist[(k * Md + slot) * size_t(N) + size_t(e ? N - e : 0)];
        }
    });
    std::vector<std::vector<MoebiusResult>> out(T);
    for (size_t k = 0; k < T; ++k) {
        std::vector<int64_t> rh(rhs_hist.begin() + long(k * size_t(N)), rhs_hist.begin() + long((k + 1) * size_t(N)));
        const CycNumber below = CycNumber::from_histogram(uint64_t(N), rh);
        for (size_t s = 0; s < Md; ++s) {
            std::vector<int64_t> lh(lhs_hist.begin() + long((k * Md + s) * size_t(N)),
                                    lhs_hist.begin() + long((k * Md + s + 1) * size_t(N)));
            out[k].push_back({degrees[s], CycNumber::from_histogram(uint64_t(N), lh),
                              below * CycNumber(long(mobius(degrees[s])))});
        }
    }
    return out;
}

bool moebius_hypothesis(const TorusQuotient& Q, const LaurentElem& t, int64_t r) {
    const int64_t lev = Q.element_level(t);
    if (lev < r) return true;
    if (lev > r) return false;
    const auto& spec = Q.spec();
    const auto* tw = spec.tower;
    const uint32_t u = t.coef(r);
    for (auto m : divisors(spec.degree)) {
        if (m == 1) continue;
        if (tw->trace(u, spec.layer(), spec.base_layer * uint32_t(m)) == 0) return false;
    }
    return true;
}

std::pair<uint64_t, mpz_class> stabilizer_count_check(const TorusSpec& spec, uint32_t m) {
    const auto* t = spec.tower;
    const uint32_t n = spec.degree, k = spec.base_layer, L = spec.layer();
    if (m == 0 || n % m) throw DomainError("period must divide n");
    const uint64_t Q = t->layer_size(L);
    const uint64_t step = (t->size() - 1) / (Q - 1);
    uint64_t count = 0;
    for (uint64_t i = 0; i < Q; ++i) {
        const uint32_t Y = i == 0 ? 0 : t->exp(int64_t((i - 1) * step));
        if (t->trace(Y, L, k) != 0) continue;
        uint32_t period = n;
        for (uint32_t j = 1; j <= n; ++j)
            if (t->frob(Y, int64_t(j) * k) == Y) {
                period = j;
                break;
            }
        if (period == m) ++count;
    }
    mpz_class rhs = 0;
    for (auto d : divisors(m)) {
        mpz_class qd;
        mpz_pow_ui(qd.get_mpz_t(), mpz_class(std::to_string(spec.q())).get_mpz_t(), d - 1);
        rhs += mobius(m / d) * qd;
    }
    return {count, rhs};
}

std::vector<FiberCount> fiber_counts(const TorusQuotient& Q) {
    const auto& spec = Q.spec();
    if (spec.kind != TorusKind::NormOne) throw DomainError("fiber counts are defined for the norm-one torus");
    const int64_t r = Q.level() - 1;
    if (r < 1) throw DomainError("fiber counts need r ≥ 1");
    const uint32_t n = spec.degree;
    ProbeLayout layout(Q);
    std::vector<uint64_t> by_degree(n + 1, 0);
    for_each_character(Q, layout.probes(), [&](const std::vector<int64_t>&, const int64_t* v) {
        if (layout.depth(v) == r) ++by_degree[layout.field_degree(v, r)];
    });
    std::vector<FiberCount> out;
    const mpz_class q = mpz_class(std::to_string(spec.q()));
    for (auto mm : divisors(n)) {
        const uint32_t m = uint32_t(mm);
        if (m == 1) continue;
        FiberCount f;
        f.m = m;
        f.enumerated = by_degree[m];
        f.torus_m = TorusQuotient({spec.tower, spec.base_layer, m, TorusKind::NormOne}, r).order();
        mpz_class qm, tail;
        mpz_pow_ui(qm.get_mpz_t(), q.get_mpz_t(), m);
        mpz_pow_ui(tail.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>((r - 1) * (m - 1)));
        f.c_formula = (qm - 1) / (q - 1) * tail;
        f.s_below = m == n ? 1
                           : TorusQuotient({spec.tower, spec.base_layer * m, n / m, TorusKind::NormOne}, r).order();
        f.strongly_primitive = stabilizer_count_check({spec.tower, spec.base_layer, m, TorusKind::NormOne}, m).first;
        out.push_back(f);
    }
    return out;
}

}  // namespace stf
