/**
 * @file transfer.hpp
 * @brief The stable transfer factor L(γ,t) = Σ_{ψ≠1} Θ_ψ(γ)ψ(t^{−1}) on an unramified
 *        norm-one torus: regularized brute-force summation over the character group,
 *        closed forms as finite sums over depth strata, ball pairings for the delta
 *        atoms and the composite-degree stratification by E^ψ.
 *
 * Θ_ψ(γ) = c·Σ_σ ψ(γ^σ) on the torus, so every brute-force sum reduces to
 * histograms of the exponents of ψ(γ^σ t^{−1}) grouped by a key that fixes c:
 * the depth d(ψ) in prime degree and the Howe tower of ψ otherwise.
 * Measures are normalized by meas(T(F)) = 1.
 */
#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <map>
#include <string>
#include <vector>

#include "stf/charform.hpp"
#include "stf/chargroup.hpp"
#include "stf/cyclotomic.hpp"
#include "stf/depth.hpp"

namespace stf {

/** @brief A delta mass at a Galois-orbit representative. */
struct TransferAtom {
    LaurentElem location;
    mpq_class weight;
};

/** @brief L(γ,·) near t: the value of its smooth part and the delta atoms of the distribution. */
struct TransferValue {
    CycNumber smooth;
    std::vector<TransferAtom> atoms;
};

/** @brief Stratum-by-stratum account of a regularized sum. */
struct SummationReport {
    std::vector<CycNumber> strata;        ///< stratum sums, index d(ψ)
    std::vector<CycNumber> partial_sums;  ///< cumulative sums through each depth
    CycNumber regularization;             ///< term added after the strata (stable conjugacy)
    int64_t stabilization_depth = 0;      ///< m₀: last depth with a nonzero stratum (−1 if none)
    int64_t vanishing_from = 0;           ///< strata at this depth and beyond vanish
    bool stabilized = false;              ///< the enumerated strata beyond m₀ are all zero
    bool certified = false;               ///< vanishing beyond the enumeration is proved (prime degree)
    std::string certificate;
};

struct BruteResult {
    TransferValue value;
    SummationReport report;
};

struct TransferOptions {
    int64_t depth_cap = 4;  ///< deepest character stratum that may be enumerated
    SignConvention conv = SignConvention::Table;
    unsigned jobs = 1;
};

struct TransferQuery {
    LaurentElem gamma;
    LaurentElem t;
};

/** @brief Largest s with x ∈ 1 + ϖ^s O_E (0 when the residue of x is not 1); kInf when x ≡ 1 to its precision. */
int64_t unit_level(const LaurentElem& x);

/** @brief Relative position of γ and t on the torus. */
struct PairGeometry {
    int64_t gamma_depth = 0;
    int64_t t_depth = 0;
    std::vector<LaurentElem> twists;  ///< γ^σ t^{−1}, σ = σ^0 … σ^{n−1}
    std::vector<int64_t> levels;      ///< unit_level of each twist
    int64_t conjugate_index = -1;     ///< σ₀ with γ^{σ₀} = t to working precision, else −1
    int64_t max_finite_level = -1;    ///< D: largest finite level
    /** @brief d(γ) = d(t) and some twist has level > d(γ). */
    bool nearly_conjugate = false;
};
PairGeometry pair_geometry(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t);

/**
 * @brief Brute-force L(γ,t) for several pairs in one enumeration of the dual of T/T_R.
 *
 * Strata 0..D+1 are enumerated for each pair (D = max finite level of γ^σ t^{−1});
 * depth_cap < D + 1 raises StabilizationError. Stably conjugate pairs (ℓ odd prime) return
 * atoms of weight c_∞ at the conjugates of γ and the regularized smooth value.
 */
std::vector<BruteResult> brute_L_batch(const TorusSpec& spec, const std::vector<TransferQuery>& queries,
                                       const TransferOptions& opt);
BruteResult brute_L(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t,
                    const TransferOptions& opt);

/** @brief Off-torus γ ∈ GL_ℓ (ℓ prime): Σ_{d(ψ) < d⁺(γ)} Θ_ψ(γ)ψ(t^{−1}), literally finite by table row 4. */
BruteResult brute_L_off_torus(const TorusSpec& spec, const BlockElement& gamma, const LaurentElem& t,
                              const TransferOptions& opt);

/** @brief |T/T_r| for the norm-one torus of degree n: 1 at r = 0, |T(f)|q^{(r−1)(n−1)} otherwise. */
mpz_class torus_quotient_order(uint32_t n, const mpz_class& q, int64_t r);
/** @brief Σ_{ψ≠1, d(ψ)=m} ψ(x) for x at unit level k (k = kInf for x = 1). */
mpz_class stratum_sum(uint32_t n, const mpz_class& q, int64_t m, int64_t k);

/** @brief E_T and C_T of the prime-degree theorem. */
struct PackagedConstants {
    mpq_class E_T, C_T;
};
PackagedConstants packaged_constants(uint32_t ell, const mpz_class& q);

/** @brief Closed-form L(γ,t) for ℓ prime on the torus, with the packaged form alongside. */
struct PrimeClosedForm {
    TransferValue value;        ///< finite sum Σ_σ Σ_m c(m) S_m(level_σ) (+ regularization and atoms)
    bool routed_to_sl2 = false;  ///< ℓ = 2 nearly conjugate: value from closed_L_sl2
    bool packaged_applies = false;  ///< not nearly conjugate, not stably conjugate
    PackagedConstants constants;
    mpq_class packaged;          ///< E_T + C_T q^{min{d(γ),d(t)}(ℓ²+ℓ−2)/2}
    mpq_class diff;              ///< finite − packaged
    mpq_class packaged_flipped;  ///< E_T − C_T q^{…} (the sign of the derivation's last line)
    mpq_class diff_flipped;
};
PrimeClosedForm closed_L_prime(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t);

/** @brief SL₂ nearly-conjugate closed form and the trace identity. */
struct Sl2ClosedForm {
    int64_t depth = 0;         ///< d(γ) = d(t)
    int64_t M = 0;             ///< d(γ^{σ₀} t^{−1})
    mpq_class formula;         ///< 2(−1)^{d+M} q^{d+M}
    int64_t trace_order = 0;   ///< ord(Tr γ − Tr t)
    mpq_class trace_value;     ///< 2·sgn_E(Trγ−Trt)/|Trγ−Trt|
    bool identity_holds = false;
};
Sl2ClosedForm closed_L_sl2(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t);

/** @brief Off-torus closed forms: finite stratum sum and the packaged orbit-by-orbit display. */
struct OffTorusClosedForm {
    mpq_class finite_sum;
    mpq_class packaged;
    mpq_class diff;
};
OffTorusClosedForm closed_L_off_torus(const TorusSpec& spec, const BlockElement& gamma, const LaurentElem& t,
                                      SignConvention conv);

/**
 * @brief ⟨L(γ,·), 1_{u·T_{m+1}}⟩ = |T/T_{m+1}|^{−1} Σ_{ψ≠1, d(ψ)≤m} Θ_ψ(γ)ψ(u^{−1}).
 */
CycNumber pair_L(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& u, int64_t m,
                 const TransferOptions& opt);

/** @brief Strata of L split by E^ψ (composite degree). */
struct FieldStrata {
    std::map<uint32_t, std::vector<CycNumber>> by_field;  ///< [M:F] → stratum sums by depth
    std::map<uint32_t, uint64_t> depth_zero_counts;       ///< |{ψ : d(ψ) = 0, E^ψ = M}|
    std::vector<CycNumber> total;                         ///< Σ_M by depth
    CycNumber L;                                          ///< Σ of all enumerated strata
};
/** @brief L^M(γ,t) strata for several pairs, strata 0..max_depth. */
std::vector<FieldStrata> field_strata_batch(const TorusSpec& spec, const std::vector<TransferQuery>& queries,
                                            int64_t max_depth, const TransferOptions& opt);
/** @brief L^M(γ,t) = Σ_{E^ψ=M} Θ_ψ(γ)ψ(t^{−1}) through depth_cap. */
TransferValue L_M_stratum(const TorusSpec& spec, const LaurentElem& gamma, const LaurentElem& t, uint32_t m,
                          const TransferOptions& opt);

/** @brief Σ_{d|m} μ(m/d) q^{d−1}. */
mpz_class primitive_trace_zero_count(uint32_t m, const mpz_class& q);
/** @brief The L^E display for A = min{d(t),d(γ)} ≥ 1 (depth-zero count passed in). */
mpq_class eform_value(uint32_t n, const mpz_class& q, uint64_t depth_zero_count, int64_t A);
/** @brief The L^M display for [E:M] prime and 1 ≤ d(t) < d(γ) (depth-zero term added). */
mpq_class mprimeform_value(uint32_t n, uint32_t m, const mpz_class& q, uint64_t depth_zero_count, int64_t dt);
/** @brief E_{S^M}, E'_{S^M} and P^M = E' + E q^{(r−1)(n²/m+n−2m)/2} from the display. */
struct InnerConstants {
    mpq_class E, E_prime, P_display, P_finite;
};
/** @brief P_finite = (n/m)Σ_{j<r} c'(j)|{ψ' : d(ψ') = j}| on S^M with q' = q^m, trivial ψ' excluded. */
InnerConstants inner_constants(uint32_t n, uint32_t m, const mpz_class& q, int64_t r);

/** @brief Named constants of the n = ℓ² and n = ℓ₁ℓ₂ displays (odd primes) at a given q. */
std::vector<std::pair<std::string, mpq_class>> composite_constants(uint32_t n, const mpz_class& q);

/** @brief Trace-zero residues generating f_E over f. */
std::vector<uint32_t> generating_trace_zero(const TorusSpec& spec);
/** @brief Norm-one residues generating f_E over f. */
std::vector<uint32_t> generating_norm_one_residues(const TorusSpec& spec);
/**
 * @brief A good element of the norm-one torus of the given depth with trivial central part.
 *        index selects among the constructions deterministically.
 */
LaurentElem good_element(const TorusSpec& spec, int64_t depth, uint64_t index, int64_t prec);
/** @brief γ^{σ^k}·h with h the norm-one lift of 1 + ϖ^M b (b generating trace-zero, choice by index). */
LaurentElem near_twist(const TorusSpec& spec, const LaurentElem& gamma, int64_t k, int64_t M, uint64_t index,
                       int64_t prec);

}  // namespace stf
