/**
 * @file transfer.cpp
 * @brief Brute-force and closed-form evaluation of the stable transfer factor.
 */
#include "stf/transfer.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

#include "stf/errors.hpp"
#include "stf/numtheory.hpp"

namespace stf {

namespace {

int sign_of_power(int64_t e) { return (e % 2 == 0) ? 1 : -1; }

mpz_class to_mpz(uint64_t v) { return mpz_class(std::to_string(v)); }

/** q^{num/2}; num must be even. */
mpq_class q_half_power(const mpz_class& q, int64_t num) {
    if (num % 2 != 0) throw DomainError("half-integral exponent in a closed form");
    return q_power(q, num / 2);
}

mpz_class norm_one_residue_order(uint32_t n, const mpz_class& q) {
    mpz_class qn;
    mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), n);
    return (qn - 1) / (q - 1);
}

int64_t working_precision(const LaurentElem& a, const LaurentElem& b) {
    const int64_t p = std::min(a.precision(), b.precision());
    return p >= kInf ? 32 : p;
}

// ----------------------------------------------------------------------------
// Enumeration engine

/** Count the exponent of ψ(x) over nontrivial ψ with d(ψ) ≤ max_depth. */
struct ProbeRequest {
    size_t query = 0;
    LaurentElem x;
    int64_t max_depth = kInf;
};

struct KeyInfo {
    int64_t depth = 0;
    uint32_t field = 0;
    std::vector<HoweStep> tower;
};

struct EngineResult {
    int64_t N = 1;
    std::map<uint64_t, KeyInfo> keys;
    std::map<uint64_t, uint64_t> key_counts;                        // characters per key
    std::vector<std::map<uint64_t, std::vector<int64_t>>> hist;     // per query
};

uint64_t tower_code(const std::vector<HoweStep>& tower) {
    uint64_t code = 0;
    for (const auto& s : tower) code = (code << 16) | (uint64_t(s.degree) << 8) | uint64_t(s.depth);
    return code;
}

/** Odometer over the characters whose last coordinate lies in [begin, end). */
template <class Visit>
void enumerate_range(const TorusQuotient& Q, const std::vector<std::vector<int64_t>>& probes, int64_t begin,
                     int64_t end, Visit&& visit) {
    const auto& d = Q.invariants();
    const int64_t N = Q.exponent();
    const size_t s = d.size(), P = probes.size();
    std::vector<int64_t> values(P, 0);
    if (s == 0) {
        if (begin == 0) visit(static_cast<const int64_t*>(values.data()));
        return;
    }
    std::vector<int64_t> a(s, 0);
    a[s - 1] = begin;
    for (size_t k = 0; k < P; ++k) values[k] = (begin % N) * probes[k][s - 1] % N;
    for (;;) {
        visit(static_cast<const int64_t*>(values.data()));
        size_t i = 0;
        for (; i < s; ++i) {
            for (size_t k = 0; k < P; ++k) {
                int64_t v = values[k] + probes[k][i];
                values[k] = v >= N ? v - N : v;
            }
            const int64_t limit = (i + 1 == s) ? end : d[i];
            if (++a[i] < limit) break;
            a[i] = 0;
        }
        if (i == s) break;
    }
}

EngineResult run_engine(const TorusQuotient& Q, const std::vector<ProbeRequest>& requests, size_t queries,
                        bool need_tower, unsigned jobs) {
    if (Q.order() > kEnumerationCap) throw CapacityError("character enumeration exceeds the size cap");
    ProbeLayout layout(Q);
    std::vector<size_t> probe_index;
    for (const auto& r : requests) {
        if (r.x.precision() < Q.level()) throw PrecisionError("probe element known below the quotient level");
        probe_index.push_back(layout.add(Q.weights(r.x)));
    }
    const int64_t N = Q.exponent();
    const auto& inv = Q.invariants();
    const int64_t last = inv.empty() ? 1 : inv.back();
    jobs = std::max<unsigned>(1, std::min<unsigned>(jobs, unsigned(std::min<int64_t>(last, 64))));

    struct Local {
        std::unordered_map<uint64_t, size_t> index;
        std::vector<uint64_t> codes;
        std::vector<KeyInfo> info;
        std::vector<uint64_t> counts;
        std::vector<std::vector<std::vector<int64_t>>> hist;  // [key][query][exponent]
    };
    std::vector<Local> locals(jobs);
    auto work = [&](unsigned job) {
        Local& L = locals[job];
        const int64_t begin = last * job / jobs, end = last * (job + 1) / jobs;
        enumerate_range(Q, layout.probes(), begin, end, [&](const int64_t* v) {
            const int64_t depth = layout.depth(v);
            if (depth < 0) return;
            uint64_t code = uint64_t(depth);
            std::vector<HoweStep> tower;
            if (need_tower) {
                tower = layout.tower(v, depth);
                code = tower_code(tower);
            }
            auto it = L.index.find(code);
            size_t k;
            if (it == L.index.end()) {
                k = L.codes.size();
                L.index.emplace(code, k);
                L.codes.push_back(code);
                KeyInfo ki{depth, need_tower ? tower.back().degree : Q.spec().degree, tower};
                L.info.push_back(std::move(ki));
                L.counts.push_back(0);
                L.hist.emplace_back(queries, std::vector<int64_t>(size_t(N), 0));
            } else {
                k = it->second;
            }
            ++L.counts[k];
            auto& h = L.hist[k];
            for (size_t r = 0; r < requests.size(); ++r)
                if (depth <= requests[r].max_depth) ++h[requests[r].query][size_t(v[probe_index[r]])];
        });
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(work, j);
        for (auto& th : threads) th.join();
    }

    EngineResult out;
    out.N = N;
    out.hist.resize(queries);
    for (const auto& L : locals)
        for (size_t k = 0; k < L.codes.size(); ++k) {
            const uint64_t code = L.codes[k];
            out.keys.emplace(code, L.info[k]);
            out.key_counts[code] += L.counts[k];
            for (size_t qi = 0; qi < queries; ++qi) {
                auto& dst = out.hist[qi][code];
                if (dst.empty()) dst.assign(size_t(N), 0);
                for (size_t e = 0; e < size_t(N); ++e) dst[e] += L.hist[k][qi][e];
            }
        }
    return out;
}

/** c with Θ_ψ(γ) = c Σ_σ ψ(γ^σ) for the key's characters. */
mpq_class key_coefficient(const TorusSpec& spec, const KeyInfo& key, const LaurentElem& gamma, int64_t gamma_depth,
                          SignConvention conv) {
    if (is_prime(spec.degree)) return table_coefficient(spec.degree, to_mpz(spec.q()), key.depth, gamma_depth);
    return conjecture_coefficient(key.tower, gamma, spec.base_layer, conv);
}

void finish_report(SummationReport& rep, bool prime, int64_t D) {
    rep.partial_sums.clear();
    CycNumber acc;
    rep.stabilization_depth = -1;
    for (size_t d = 0; d < rep.strata.size(); ++d) {
        acc += rep.strata[d];
        rep.partial_sums.push_back(acc);
        if (!rep.strata[d].is_zero()) rep.stabilization_depth = int64_t(d);
    }
    rep.vanishing_from = rep.stabilization_depth + 1;
    rep.stabilized = rep.vanishing_from < int64_t(rep.strata.size());
    rep.certified = prime && rep.stabilized && rep.vanishing_from <= D + 1;
    if (rep.certified)
        rep.certificate = "strata of depth > " + std::to_string(D) +
                          " vanish: the coefficient is constant on each stratum and every γ^σ t^{-1} lies outside T_" +
                          std::to_string(D + 1) + ", so each stratum is a difference of full character sums over "
                          "T/T_{m+1} and T/T_m that both vanish";
    else if (rep.stabilized)
        rep.certificate = "enumerated strata beyond depth " + std::to_string(rep.stabilization_depth) +
                          " vanish; deeper strata are not covered by a proof (coefficient depends on the Howe tower)";
    else
        rep.certificate = "the deepest enumerated stratum is nonzero";
}

}  // namespace

// ----------------------------------------------------------------------------
// Geometry

int64_t unit_level(const LaurentElem& x) {
    if (x.is_zero_class() || x.ord() != 0) throw DomainError("unit_level needs a unit");
    if (x.coef(0) != 1) return 0;
    const LaurentElem y = x - LaurentElem::one(x.tower(), x.layer());
    return y.is_zero_class() ? kInf : y.ord();
}

PairGeometry pair_geometry(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t) {
    if (gamma.layer() != spec.layer() || t.layer() != spec.layer())
        throw DomainError("γ and t must lie in the torus field");
    PairGeometry g;
    g.gamma_depth = torus_depth(gamma, spec.base_layer);
    g.t_depth = torus_depth(t, spec.base_layer);
    if (g.gamma_depth >= kInf) throw DomainError("γ must be regular");
    const int64_t prec = working_precision(gamma, t);
    const LaurentElem tinv = invert(t, prec);
    for (const auto& c : conjugates(gamma, spec.base_layer)) {
        LaurentElem x = (c * tinv).truncated(prec);
        const int64_t lv = unit_level(x);
        g.twists.push_back(std::move(x));
        g.levels.push_back(lv);
        if (lv >= kInf) {
            g.conjugate_index = int64_t(g.levels.size() - 1);
        } else {
            g.max_finite_level = std::max(g.max_finite_level, lv);
            if (g.gamma_depth == g.t_depth && lv > g.gamma_depth) g.nearly_conjugate = true;
        }
    }
    return g;
}

// ----------------------------------------------------------------------------
// Brute force

std::vector<BruteResult> brute_L_batch(const TorusSpec& spec, const std::vector<TransferQuery>& queries,
                                       const TransferOptions& opt) {
    const uint32_t n = spec.degree;
    const bool prime = is_prime(n);
    std::vector<PairGeometry> geo;
    std::vector<ProbeRequest> requests;
    int64_t top = 0;
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        geo.push_back(pair_geometry(spec, queries[qi].gamma, queries[qi].t));
        const auto& g = geo.back();
        int64_t need = g.max_finite_level + 1;
        if (g.conjugate_index >= 0) {
            if (!prime) throw DomainError("stably conjugate pairs are supported in prime degree only");
            if (n == 2) throw DomainError("ℓ = 2 stably conjugate pair: the sum has poles");
            need = std::max(need, g.gamma_depth - 1);
        }
        if (need > opt.depth_cap)
            throw StabilizationError("depth cap " + std::to_string(opt.depth_cap) + " is below the stabilization bound " +
                                     std::to_string(need));
        top = std::max(top, need);
        for (size_t s = 0; s < g.twists.size(); ++s)
            requests.push_back({qi, g.twists[s], int64_t(s) == g.conjugate_index ? g.gamma_depth - 1 : kInf});
    }
    const TorusQuotient Q(spec, top + 1);
    const EngineResult eng = run_engine(Q, requests, queries.size(), !prime, opt.jobs);

    std::vector<BruteResult> out;
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        const auto& g = geo[qi];
        BruteResult res;
        auto& rep = res.report;
        rep.strata.assign(size_t(top + 1), CycNumber());
        for (const auto& [code, key] : eng.keys) {
            const auto& h = eng.hist[qi].at(code);
            const mpq_class c = key_coefficient(spec, key, queries[qi].gamma, g.gamma_depth, opt.conv);
            rep.strata[size_t(key.depth)] += CycNumber(c) * CycNumber::from_histogram(uint64_t(eng.N), h);
        }
        finish_report(rep, prime, g.max_finite_level);
        res.value.smooth = rep.partial_sums.back();
        if (g.conjugate_index >= 0) {
            const mpz_class q = to_mpz(spec.q());
            const mpq_class c_inf = table_coefficient(n, q, g.gamma_depth, g.gamma_depth);
            uint64_t below = 1;  // |T/T_{d(γ)}|: the trivial character and every ψ with d(ψ) < d(γ)
            for (const auto& [code, key] : eng.keys)
                if (key.depth < g.gamma_depth) below += eng.key_counts.at(code);
            rep.regularization = CycNumber(-c_inf * mpq_class(to_mpz(below)));
            res.value.smooth += rep.regularization;
            for (const auto& c : conjugates(queries[qi].gamma, spec.base_layer)) res.value.atoms.push_back({c, c_inf});
        }
        out.push_back(std::move(res));
    }
    return out;
}

BruteResult brute_L(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t,
                    const TransferOptions& opt) {
    return brute_L_batch(spec, {{gamma, t}}, opt).front();
}

BruteResult brute_L_off_torus(const TorusSpec& spec, const BlockElement& gamma, const LaurentElem& t,
                              const TransferOptions& opt) {
    gamma.validate();
    if (gamma.n() != spec.degree) throw DomainError("γ and the torus have different degrees");
    const int64_t dplus = gamma.depth();
    BruteResult res;
    if (dplus <= 0) {
        res.report.strata.clear();
        finish_report(res.report, true, -1);
        res.report.certified = true;
        res.report.certificate = "d⁺(γ) = 0: every character is in table row 4";
        return res;
    }
    if (dplus - 1 > opt.depth_cap) throw CapacityError("off-torus sum needs strata beyond the depth cap");
    const TorusQuotient Q(spec, dplus);
    const int64_t prec = std::min<int64_t>(t.precision(), std::max<int64_t>(dplus + 4, 8));
    const EngineResult eng = run_engine(Q, {{0, invert(t, prec), kInf}}, 1, false, opt.jobs);
    res.report.strata.assign(size_t(dplus), CycNumber());
    for (const auto& [code, key] : eng.keys) {
        const mpq_class c = theta_table_off_torus(key.depth, gamma, opt.conv);
        res.report.strata[size_t(key.depth)] += CycNumber(c) * CycNumber::from_histogram(uint64_t(eng.N), eng.hist[0].at(code));
    }
    finish_report(res.report, true, dplus - 1);
    res.report.certified = true;
    res.report.certificate = "characters with d(ψ) ≥ d⁺(γ) = " + std::to_string(dplus) + " vanish by table row 4";
    res.value.smooth = res.report.partial_sums.empty() ? CycNumber() : res.report.partial_sums.back();
    return res;
}

// ----------------------------------------------------------------------------
// Closed forms

mpz_class torus_quotient_order(uint32_t n, const mpz_class& q, int64_t r) {
    if (r <= 0) return 1;
    mpz_class layer;
    mpz_pow_ui(layer.get_mpz_t(), q.get_mpz_t(), unsigned((r - 1) * int64_t(n - 1)));
    return norm_one_residue_order(n, q) * layer;
}

mpz_class stratum_sum(uint32_t n, const mpz_class& q, int64_t m, int64_t k) {
    if (m < 0) throw DomainError("negative stratum");
    if (m == 0) return k >= 1 ? norm_one_residue_order(n, q) - 1 : mpz_class(-1);
    mpz_class s = 0;
    if (k >= m + 1) s += torus_quotient_order(n, q, m + 1);
    if (k >= m) s -= torus_quotient_order(n, q, m);
    return s;
}

PackagedConstants packaged_constants(uint32_t ell, const mpz_class& q) {
    const int64_t l = ell;
    const mpq_class rho = (q_half_power(q, l * l - l) - 1) / (q_half_power(q, l * l + l - 2) - 1);
    const mpq_class T = mpq_class(norm_one_residue_order(ell, q));
    const int s = l * sign_of_power(l);
    return {s * (T * (rho - 1) - 1), s * T * rho};
}

namespace {

/** F(k) = Σ_{m≤k} c(m) S_m(k) for one twist at level k. */
mpq_class twist_sum(uint32_t n, const mpz_class& q, int64_t gamma_depth, int64_t k) {
    mpq_class s = 0;
    for (int64_t m = 0; m <= k; ++m)
        s += table_coefficient(n, q, m, gamma_depth) * mpq_class(stratum_sum(n, q, m, k));
    return s;
}

}  // namespace

PrimeClosedForm closed_L_prime(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t) {
    const uint32_t n = spec.degree;
    if (!is_prime(n)) throw DomainError("closed_L_prime needs a prime degree");
    const mpz_class q = to_mpz(spec.q());
    const PairGeometry g = pair_geometry(spec, gamma, t);
    PrimeClosedForm out;
    out.constants = packaged_constants(n, q);
    if (n == 2 && g.nearly_conjugate && g.conjugate_index < 0) {
        out.routed_to_sl2 = true;
        out.value.smooth = CycNumber(closed_L_sl2(spec, gamma, t).formula);
        return out;
    }
    mpq_class v = 0;
    for (size_t s = 0; s < g.levels.size(); ++s)
        if (int64_t(s) != g.conjugate_index) v += twist_sum(n, q, g.gamma_depth, g.levels[s]);
    if (g.conjugate_index >= 0) {
        if (n == 2) throw DomainError("ℓ = 2 stably conjugate pair: the sum has poles");
        const mpq_class c_inf = table_coefficient(n, q, g.gamma_depth, g.gamma_depth);
        for (int64_t m = 0; m < g.gamma_depth; ++m)
            v += table_coefficient(n, q, m, g.gamma_depth) * mpq_class(count_by_depth(n, q.get_ui(), m));
        v -= c_inf * mpq_class(torus_quotient_order(n, q, g.gamma_depth));
        for (const auto& c : conjugates(gamma, spec.base_layer)) out.value.atoms.push_back({c, c_inf});
    }
    out.value.smooth = CycNumber(v);
    out.packaged_applies = g.conjugate_index < 0 && !g.nearly_conjugate;
    const int64_t mn = std::min(g.gamma_depth, g.t_depth);
    const mpq_class growth = q_half_power(q, mn * (int64_t(n) * n + n - 2));
    out.packaged = out.constants.E_T + out.constants.C_T * growth;
    out.packaged_flipped = out.constants.E_T - out.constants.C_T * growth;
    out.diff = v - out.packaged;
    out.diff_flipped = v - out.packaged_flipped;
    return out;
}

Sl2ClosedForm closed_L_sl2(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t) {
    if (spec.degree != 2) throw DomainError("closed_L_sl2 needs ℓ = 2");
    const PairGeometry g = pair_geometry(spec, gamma, t);
    if (g.conjugate_index >= 0) throw DomainError("γ and t are stably conjugate");
    if (g.gamma_depth != g.t_depth) throw DomainError("closed_L_sl2 needs d(γ) = d(t)");
    int64_t sigma0 = -1, hits = 0;
    for (size_t s = 0; s < g.levels.size(); ++s)
        if (g.levels[s] > g.gamma_depth) {
            sigma0 = int64_t(s);
            ++hits;
        }
    if (hits != 1) throw DomainError("closed_L_sl2 needs exactly one nearly conjugate twist");
    const mpz_class q = to_mpz(spec.q());
    Sl2ClosedForm out;
    out.depth = g.gamma_depth;
    out.M = torus_depth(g.twists[size_t(sigma0)], spec.base_layer);
    out.formula = 2 * sign_of_power(out.depth + out.M) * q_power(q, out.depth + out.M);
    const LaurentElem diff = trace_E_to_M(gamma, spec.base_layer) - trace_E_to_M(t, spec.base_layer);
    if (diff.is_zero_class()) throw PrecisionError("Tr γ − Tr t vanishes to working precision");
    out.trace_order = diff.ord();
    out.trace_value = 2 * sign_of_power(out.trace_order) * q_power(q, out.trace_order);
    out.identity_holds = out.formula == out.trace_value;
    return out;
}

OffTorusClosedForm closed_L_off_torus(const TorusSpec& spec, const BlockElement& gamma, const LaurentElem& t,
                                      SignConvention conv) {
    gamma.validate();
    const uint32_t n = gamma.n();
    if (n != spec.degree || !is_prime(n)) throw DomainError("off-torus closed form needs the prime torus degree");
    const mpz_class q = to_mpz(spec.q());
    const int64_t dplus = gamma.depth();
    const int64_t k = unit_level(t);
    OffTorusClosedForm out;
    for (int64_t m = 0; m < dplus && m <= k; ++m)
        out.finite_sum += theta_table_off_torus(m, gamma, conv) * mpq_class(stratum_sum(n, q, m, k));
    const mpq_class T = mpq_class(norm_one_residue_order(n, q));
    const int64_t shallow = std::min<int64_t>(k, dplus - 1);
    for (const auto& o : admissible_orbits(gamma)) {
        const int64_t phi = o.levi_roots();
        const mpq_class rho = (q_half_power(q, phi) - 1) / (q_half_power(q, phi + 2 * (int64_t(n) - 1)) - 1);
        const mpq_class K = lce_term(o, 0, gamma, SignConvention::Raw);
        const mpq_class E = K * (T * (rho - 1) - 1);
        const mpq_class C = k < dplus ? mpq_class(K * T * rho) : mpq_class(K * T * (rho - 1));
        out.packaged += E + C * q_half_power(q, shallow * (phi + 2 * (int64_t(n) - 1)));
    }
    out.diff = out.finite_sum - out.packaged;
    return out;
}

// ----------------------------------------------------------------------------
// Pairing and composite strata

CycNumber pair_L(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& u, int64_t m,
                 const TransferOptions& opt) {
    if (m < 0) throw DomainError("pair_L needs m ≥ 0");
    if (m > opt.depth_cap) throw CapacityError("ball deeper than the depth cap");
    const int64_t dg = torus_depth(gamma, spec.base_layer);
    if (dg >= kInf) throw DomainError("γ must be regular");
    const int64_t prec = working_precision(gamma, u);
    const LaurentElem uinv = invert(u, prec);
    std::vector<ProbeRequest> req;
    for (const auto& c : conjugates(gamma, spec.base_layer)) req.push_back({0, (c * uinv).truncated(prec), kInf});
    const TorusQuotient Q(spec, m + 1);
    const EngineResult eng = run_engine(Q, req, 1, !is_prime(spec.degree), opt.jobs);
    CycNumber s;
    for (const auto& [code, key] : eng.keys)
        s += CycNumber(key_coefficient(spec, key, gamma, dg, opt.conv)) *
             CycNumber::from_histogram(uint64_t(eng.N), eng.hist[0].at(code));
    return s * CycNumber(mpq_class(1, to_mpz(Q.order())));
}

std::vector<FieldStrata> field_strata_batch(const TorusSpec& spec, const std::vector<TransferQuery>& queries,
                                            int64_t max_depth, const TransferOptions& opt) {
    if (max_depth < 0 || max_depth > opt.depth_cap) throw CapacityError("strata depth outside [0, depth cap]");
    std::vector<ProbeRequest> req;
    std::vector<int64_t> depths;
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        const auto& g = queries[qi].gamma;
        depths.push_back(torus_depth(g, spec.base_layer));
        if (depths.back() >= kInf) throw DomainError("γ must be regular");
        const int64_t prec = working_precision(g, queries[qi].t);
        const LaurentElem tinv = invert(queries[qi].t, prec);
        for (const auto& c : conjugates(g, spec.base_layer)) req.push_back({qi, (c * tinv).truncated(prec), kInf});
    }
    const TorusQuotient Q(spec, max_depth + 1);
    const EngineResult eng = run_engine(Q, req, queries.size(), true, opt.jobs);
    std::vector<FieldStrata> out(queries.size());
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        auto& fs = out[qi];
        fs.total.assign(size_t(max_depth + 1), CycNumber());
        for (auto m : divisors(spec.degree))
            if (m > 1) fs.by_field[uint32_t(m)].assign(size_t(max_depth + 1), CycNumber());
        for (const auto& [code, key] : eng.keys) {
            const mpq_class c = key_coefficient(spec, key, queries[qi].gamma, depths[qi], opt.conv);
            const CycNumber v = CycNumber(c) * CycNumber::from_histogram(uint64_t(eng.N), eng.hist[qi].at(code));
            fs.by_field[key.field][size_t(key.depth)] += v;
            fs.total[size_t(key.depth)] += v;
            if (key.depth == 0) fs.depth_zero_counts[key.field] += eng.key_counts.at(code);
        }
        for (const auto& v : fs.total) fs.L += v;
    }
    return out;
}

TransferValue L_M_stratum(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t, uint32_t m,
                          const TransferOptions& opt) {
    if (spec.degree % m != 0 || m == 1) throw DomainError("M must be a subfield layer strictly above F");
    const auto fs = field_strata_batch(spec, {{gamma, t}}, opt.depth_cap, opt).front();
    TransferValue v;
    for (const auto& s : fs.by_field.at(m)) v.smooth += s;
    return v;
}

// ----------------------------------------------------------------------------
// Composite displays

mpz_class primitive_trace_zero_count(uint32_t m, const mpz_class& q) {
    mpz_class s = 0;
    for (auto d : divisors(m)) {
        mpz_class p;
        mpz_pow_ui(p.get_mpz_t(), q.get_mpz_t(), unsigned(d - 1));
        s += mobius(m / d) * p;
    }
    return s;
}

mpq_class eform_value(uint32_t n, const mpz_class& q, uint64_t depth_zero_count, int64_t A) {
    const int64_t N = n;
    const int sg = sign_of_power(N);
    const mpq_class T = mpq_class(norm_one_residue_order(n, q));
    const mpq_class mu_sum = mpq_class(primitive_trace_zero_count(n, q));
    const mpq_class lead = q_half_power(q, N * N - N);
    const mpq_class den = q_half_power(q, N * N + N - 2) - 1;
    return N * sg * mpq_class(to_mpz(depth_zero_count)) - N * sg * T * lead * mu_sum / den +
           N * sg * T * lead * (mu_sum / den + mobius(n)) * q_half_power(q, (A - 1) * (N * N + N - 2));
}

mpq_class mprimeform_value(uint32_t n, uint32_t m, const mpz_class& q, uint64_t depth_zero_count, int64_t dt) {
    if (n % m != 0 || !is_prime(n / m)) throw DomainError("Mprimeform needs [E:M] prime");
    const int64_t N = n, Mm = m;
    const int sg = sign_of_power(N);
    const mpq_class T = mpq_class(norm_one_residue_order(n, q));
    const mpq_class TM = mpq_class(norm_one_residue_order(m, q));
    const mpq_class mu = mpq_class(primitive_trace_zero_count(m, q));
    const mpq_class X = q_half_power(q, N * N + N * N / Mm - N * Mm - N);
    const mpq_class R = (q_power(q, N - Mm) - 1) / (q_half_power(q, N * N / Mm + N - 2 * Mm) - 1);
    const int64_t a2 = N * N - N * Mm + 2 * (Mm - 1);      // 2a, a = (n²−nm)/2 + m − 1
    const int64_t b2 = N * N + N * N / Mm - N * Mm + N - 2;  // 2b
    const mpq_class qa = q_half_power(q, a2) - 1, qb = q_half_power(q, b2) - 1;
    const mpq_class lowM = q_half_power(q, N * N - N * Mm);
    const mpq_class grow_a = q_half_power(q, (dt - 1) * a2), grow_b = q_half_power(q, (dt - 1) * b2);
    const int mum = mobius(m);
    mpq_class v = N * sg * mpq_class(to_mpz(depth_zero_count));
    v += -N * sg * T * X * R * mu * (1 / qa + 1 / qb);
    v += N * sg * TM * lowM * mu / qa;
    v += N * sg * T * X * R * (mu / qa + mum) * grow_a;
    v += -N * sg * TM * lowM * (mu / qa + mum) * grow_a;
    v += N * sg * T * X * R * (mu / qb + mum) * grow_b;
    return v;
}

InnerConstants inner_constants(uint32_t n, uint32_t m, const mpz_class& q, int64_t r) {
    if (n % m != 0) throw DomainError("m must divide n");
    const int64_t N = n, Mm = m, l = N / Mm;
    const int sg = sign_of_power(l);
    const mpq_class S = mpq_class(norm_one_residue_order(uint32_t(l), mpz_class(q_power(q, Mm))));
    InnerConstants out;
    out.E = l * sg * S * q_half_power(q, N * N / Mm - N) * (q_power(q, N - Mm) - 1) /
            (q_half_power(q, N * N / Mm + N - 2 * Mm) - 1);
    out.E_prime = out.E - l * sg;
    out.P_display = out.E_prime + out.E * q_half_power(q, (r - 1) * (N * N / Mm + N - 2 * Mm));
    const mpz_class qm = mpz_class(q_power(q, Mm));
    for (int64_t j = 0; j < r; ++j)
        out.P_finite += l * sg * q_half_power(qm, j * (l * l - l)) * mpq_class(count_by_depth(uint32_t(l), qm.get_ui(), j));
    return out;
}

std::vector<std::pair<std::string, mpq_class>> composite_constants(uint32_t n, const mpz_class& q) {
    std::vector<uint64_t> pf;
    for (uint64_t m = n, d = 2; m > 1; ++d)
        while (m % d == 0) {
            pf.push_back(d);
            m /= d;
        }
    if (pf.size() != 2 || pf[0] == 2 || pf[1] == 2)
        throw DomainError("composite constants need n = ℓ² or ℓ₁ℓ₂ with odd primes");
    const mpq_class T = mpq_class(norm_one_residue_order(n, q));
    auto Tdeg = [&](uint64_t d) -> mpq_class { return mpq_class(norm_one_residue_order(uint32_t(d), q)); };
    auto frac = [&](int64_t a2, int64_t b2) -> mpq_class { return (q_half_power(q, a2) - 1) / (q_half_power(q, b2) - 1); };
    std::vector<std::pair<std::string, mpq_class>> out;
    if (pf[0] == pf[1]) {
        const int64_t l = int64_t(pf[0]), l2 = l * l, l3 = l2 * l, l4 = l2 * l2;
        const mpq_class inner = T * (frac(l3 - l2, l3 + l2 - 2 * l) - 1);
        out.emplace_back("B_l2", -l2 * (inner + Tdeg(uint64_t(l))) * frac(l4 - l3, l4 - l3 + 2 * (l - 1)));
        out.emplace_back("C_l2", -l2 * inner * frac(l4 - l3, l4 + l2 - 2));
        return out;
    }
    const int64_t l1 = int64_t(pf[0]), l2 = int64_t(pf[1]), p = l1 * l2;
    for (int i = 1; i <= 2; ++i) {
        const int64_t li = i == 1 ? l1 : l2, lj = i == 1 ? l2 : l1;
        const mpq_class inner = T * (frac(li * lj * lj - p, li * lj * lj + p - 2 * li) - 1);
        const std::string idx = std::to_string(i);
        out.emplace_back("B^" + idx, -p * (inner + Tdeg(uint64_t(lj))) *
                                          frac(p * p - li * li * lj, p * p - li * li * lj + 2 * (li - 1)));
    }
    for (int i = 1; i <= 2; ++i) {
        const int64_t li = i == 1 ? l1 : l2, lj = i == 1 ? l2 : l1;
        const int64_t top = p * p + li * lj * lj - li * li * lj + p;
        const std::string idx = std::to_string(i);
        out.emplace_back("C^" + idx, p * T * q_power(q, li - p) * (q_power(q, p - li) - 1) /
                                         (q_half_power(q, li * lj * lj + p - 2 * li) - 1) * frac(top - 2 * li, top - 2));
    }
    const mpq_class num = mpq_class(q_power(q, p - 1) - q_power(q, l1 - 1) - q_power(q, l2 - 1) + 1);
    out.emplace_back("C", -p * T * q_power(q, 1 - p) * (num / (q_half_power(q, p * p + p - 2) - 1) + 1));
    return out;
}

// ----------------------------------------------------------------------------
// Element constructions

std::vector<uint32_t> generating_trace_zero(const TorusSpec& spec) {
    const FieldTower& t = *spec.tower;
    const uint32_t L = spec.layer();
    const uint64_t step = (t.size() - 1) / (t.layer_size(L) - 1);
    std::vector<uint32_t> out;
    for (uint64_t i = 0; i + 1 < t.layer_size(L); ++i) {
        const uint32_t x = t.exp(int64_t(i * step));
        if (t.trace(x, L, spec.base_layer) == 0 && t.min_layer(x) == L) out.push_back(x);
    }
    if (out.empty()) throw DomainError("no trace-zero generator of the residue field");
    return out;
}

std::vector<uint32_t> generating_norm_one_residues(const TorusSpec& spec) {
    const FieldTower& t = *spec.tower;
    const uint32_t L = spec.layer();
    const uint64_t step = (t.size() - 1) / (t.layer_size(L) - 1);
    std::vector<uint32_t> out;
    for (uint64_t i = 0; i + 1 < t.layer_size(L); ++i) {
        const uint32_t x = t.exp(int64_t(i * step));
        if (t.norm(x, L, spec.base_layer) == 1 && t.min_layer(x) == L) out.push_back(x);
    }
    if (out.empty()) throw DomainError("no norm-one generator of the residue field");
    return out;
}

LaurentElem good_element(const TorusSpec& spec, int64_t depth, uint64_t index, int64_t prec) {
    if (depth < 0) throw DomainError("depth must be non-negative");
    const FieldTower* t = spec.tower;
    const uint32_t L = spec.layer();
    const auto bs = generating_trace_zero(spec);
    LaurentElem g;
    uint64_t rest;
    if (depth == 0) {
        const auto zs = generating_norm_one_residues(spec);
        g = LaurentElem::from_coefficients(t, L, 0, {zs[index % zs.size()]}, prec);
        rest = index / zs.size();
        if (rest > 0) g = (g * lift_norm_one(t, L, spec.base_layer, 1, bs[(rest - 1) % bs.size()], prec)).truncated(prec);
    } else {
        g = lift_norm_one(t, L, spec.base_layer, depth, bs[index % bs.size()], prec);
        rest = index / bs.size();
        if (rest > 0)
            g = (g * lift_norm_one(t, L, spec.base_layer, depth + 1, bs[(rest - 1) % bs.size()], prec)).truncated(prec);
    }
    return g;
}

LaurentElem near_twist(const TorusSpec& spec, const LaurentElem& gamma, int64_t k, int64_t M, uint64_t index,
                       int64_t prec) {
    const auto bs = generating_trace_zero(spec);
    const LaurentElem h = lift_norm_one(spec.tower, spec.layer(), spec.base_layer, M, bs[index % bs.size()], prec);
    return (galois(gamma, k, spec.base_layer) * h).truncated(prec);
}

}  // namespace stf
