/**
 * @file chargroup.hpp
 * @brief Characters of the finite quotients T/T_R of an unramified elliptic torus.
 *
 * T is either the norm-one torus ker(N_{E/F}) (NormOne, the SL_n case) or the
 * unit group O_E^× (Units, the GL_n case), filtered by T_0 = T and
 * T_r = T ∩ (1 + ϖ^r O_E). The quotient T/T_R is presented by a Teichmüller
 * generator of T(f) and lifts h_{j,b} of 1 + ϖ^j b (1 ≤ j < R, b running over
 * an F_p-basis of the layer space); its Smith normal form yields invariant
 * factors d_i and coordinates y_i(x) ∈ Z/d_i. A character is an exponent
 * vector a with ψ_a(x) = ζ_N^{Σ a_i y_i(x) N/d_i}, N the group exponent.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stf/cyclotomic.hpp"
#include "stf/depth.hpp"
#include "stf/lseries.hpp"

namespace stf {

enum class TorusKind { NormOne, Units };

/** @brief The torus attached to E/F with [E:F] = degree and residue field of F the base layer. */
struct TorusSpec {
    const FieldTower* tower = nullptr;
    uint32_t base_layer = 1;
    uint32_t degree = 1;
    TorusKind kind = TorusKind::NormOne;

    uint32_t layer() const { return base_layer * degree; }
    /** @brief q = |f|. */
    uint64_t q() const;
    /** @brief |T(f)|. */
    uint64_t residue_order() const;
    /** @brief |T_j/T_{j+1}| for j ≥ 1. */
    uint64_t layer_order() const;
    /** @brief F_p-basis (top codes) of the layer space: trace-zero part of f_E, or all of f_E. */
    std::vector<uint32_t> layer_basis() const;
};

/** @brief F_p-basis of ker(Tr: f_E → f_M), for layers M | E. */
std::vector<uint32_t> trace_kernel_basis(const FieldTower* t, uint32_t layer, uint32_t sublayer);
/** @brief Lift of 1 + ϖ^j b (Tr_{E/M} b = 0) to an element with N_{E/M} ≡ 1 mod ϖ^R. */
LaurentElem lift_norm_one(const FieldTower* t, uint32_t layer, uint32_t sublayer, int64_t j, uint32_t b,
                          int64_t R);

/** @brief Default cap on the number of characters any enumeration may visit. */
constexpr uint64_t kEnumerationCap = 400'000'000;

class TorusQuotient {
public:
    /** @brief The quotient T/T_R, R ≥ 1. */
    TorusQuotient(const TorusSpec& spec, int64_t R);

    const TorusSpec& spec() const { return spec_; }
    int64_t level() const { return R_; }
    /** @brief |T/T_R|. */
    uint64_t order() const { return order_; }
    /** @brief Invariant factors d_i > 1 with d_i | d_{i+1}. */
    const std::vector<int64_t>& invariants() const { return inv_; }
    /** @brief Group exponent N (1 for the trivial group). */
    int64_t exponent() const { return N_; }

    /** @brief Exponents of x over the presentation generators (g0, then h_{j,b} level by level). */
    std::vector<int64_t> discrete_log(const LaurentElem& x) const;
    /** @brief SNF coordinates y_i(x) mod d_i. */
    std::vector<int64_t> coordinates(const LaurentElem& x) const;
    /** @brief Pairing weights y_i(x)·N/d_i mod N. */
    std::vector<int64_t> weights(const LaurentElem& x) const;
    /** @brief Product of the generators with the given exponents, reduced mod ϖ^R. */
    LaurentElem element_from_log(const std::vector<int64_t>& e) const;
    /** @brief Coordinates of a presentation exponent vector. */
    std::vector<int64_t> coordinates_from_log(const std::vector<int64_t>& e) const;

    /** @brief Largest s ≤ R with x ∈ T_s (0 when the residue of x is not 1). */
    int64_t element_level(const LaurentElem& x) const;
    /** @brief Throws DomainError unless x is a unit (of norm one mod ϖ^R for NormOne). */
    void check_member(const LaurentElem& x) const;

    /** @brief Presentation generators. */
    const LaurentElem& residue_generator() const { return g0_; }
    const std::vector<uint32_t>& basis() const { return basis_; }
    const LaurentElem& level_generator(int64_t j, size_t b) const { return h_[size_t(j - 1)][b]; }

    /** @brief Weights of the residue generator and of the level generators (probes for depth). */
    const std::vector<int64_t>& residue_probe() const { return residue_probe_; }
    const std::vector<std::vector<int64_t>>& level_probes(int64_t j) const { return level_probes_[size_t(j - 1)]; }

    /** @brief Probes for ker(N_{E/M}) ∩ T: a residue generator and level generators per level. */
    struct KernelProbes {
        uint32_t degree = 1;  ///< [M:F]
        std::vector<int64_t> residue;
        std::vector<std::vector<std::vector<int64_t>>> levels;  ///< levels[j−1] = probes at level j
    };
    /** @brief One entry for every proper subfield M (degree m | n, m < n), increasing degree. */
    const std::vector<KernelProbes>& kernel_probes() const { return kernel_probes_; }

private:
    TorusSpec spec_;
    int64_t R_;
    uint64_t order_ = 1;
    int64_t N_ = 1;
    std::vector<int64_t> inv_;
    std::vector<std::vector<int64_t>> V_;  // SNF column transform, generators × invariants (kept columns)
    LaurentElem g0_;
    uint64_t g0_log_step_ = 1;  // top-field log of g0
    std::vector<uint32_t> basis_;
    FpSolver basis_solver_;
    std::vector<std::vector<LaurentElem>> h_, h_inv_;
    std::vector<int64_t> residue_probe_;
    std::vector<std::vector<std::vector<int64_t>>> level_probes_;
    std::vector<KernelProbes> kernel_probes_;

    size_t generator_count() const { return 1 + size_t(R_ - 1) * basis_.size(); }
    LaurentElem reduce(const LaurentElem& x) const { return x.truncated(R_); }
};

/** @brief Character label: exponent vector over the invariant factors of T/T_R. */
struct Character {
    std::vector<int64_t> a;
};

/** @brief "psi=[a_1,...,a_s]@r=R-1". */
std::string format_character(const TorusQuotient& Q, const Character& psi);
/** @brief Parse a label; returns the exponents and the r it names. */
std::pair<Character, int64_t> parse_character(const std::string& text);
/** @brief Checks the label matches the invariant factors. */
void validate_character(const TorusQuotient& Q, const Character& psi);

/** @brief Σ a_i w_i mod N. */
int64_t pair_exponent(const TorusQuotient& Q, const Character& psi, const std::vector<int64_t>& weights);
/** @brief ψ(x) as a root of unity of order dividing N. */
CycNumber eval(const TorusQuotient& Q, const Character& psi, const LaurentElem& x);
/** @brief Σ_{i<n} ψ(γ^{σ^i}). */
CycNumber galois_orbit_sum(const TorusQuotient& Q, const Character& psi, const LaurentElem& gamma);

bool is_trivial(const TorusQuotient& Q, const Character& psi);
/** @brief d(ψ) ≤ R−1; DomainError for the trivial character. */
int64_t character_depth(const TorusQuotient& Q, const Character& psi);
/** @brief β_ψ in the layer space with ψ(1 + ϖ^r u) = ζ_p^{Tr(β ū)}, r = d(ψ) ≥ 1. */
uint32_t character_beta(const TorusQuotient& Q, const Character& psi);
/** @brief [f(β):f] for a layer-space element β. */
uint32_t generated_degree(const TorusSpec& spec, uint32_t beta);
/** @brief ψ trivial on ker(N_{E/M}) ∩ T, M of degree m. */
bool factors_through_norm(const TorusQuotient& Q, const Character& psi, uint32_t m);
/** @brief Howe tower: distinct fields K_s (minimal M with ψ trivial on ker N_{E/M} ∩ T_s), s ≤ d(ψ). */
std::vector<HoweStep> howe_tower(const TorusQuotient& Q, const Character& psi);
/** @brief E^ψ as a degree over F: the field of the deepest tower step. */
uint32_t field_of_psi(const TorusQuotient& Q, const Character& psi);

/** @brief Cached description of a character. */
struct CharacterHandle {
    Character label;
    int64_t depth = 0;
    uint32_t beta = 0;  ///< 0 at depth 0
    std::vector<HoweStep> tower;
};
CharacterHandle describe(const TorusQuotient& Q, const Character& psi);

/**
 * @brief Visit every character of Q in odometer order, keeping probe exponents current.
 *
 * visit(a, values) receives the exponent vector and values[k] = Σ a_i probes[k][i] mod N.
 * Carrying a coordinate past d_i needs no correction because d_i·w_i ≡ 0 mod N.
 */
template <class Visit>
void for_each_character(const TorusQuotient& Q, const std::vector<std::vector<int64_t>>& probes, Visit&& visit,
                        uint64_t cap = kEnumerationCap) {
    if (Q.order() > cap) throw CapacityError("character enumeration exceeds the size cap");
    const auto& d = Q.invariants();
    const int64_t N = Q.exponent();
    const size_t s = d.size(), P = probes.size();
    std::vector<int64_t> a(s, 0), values(P, 0);
    for (;;) {
        visit(static_cast<const std::vector<int64_t>&>(a), static_cast<const int64_t*>(values.data()));
        size_t i = 0;
        for (; i < s; ++i) {
            for (size_t k = 0; k < P; ++k) {
                int64_t v = values[k] + probes[k][i];
                values[k] = v >= N ? v - N : v;
            }
            if (++a[i] < d[i]) break;
            a[i] = 0;
        }
        if (i == s) break;
    }
}

/** @brief Probe layout for depth and E^ψ determination inside enumerations. */
class ProbeLayout {
public:
    explicit ProbeLayout(const TorusQuotient& Q);
    /** @brief Append a probe; returns its index. */
    size_t add(const std::vector<int64_t>& weights);
    const std::vector<std::vector<int64_t>>& probes() const { return probes_; }
    /** @brief d(ψ) from probe values; −1 for the trivial character. */
    int64_t depth(const int64_t* values) const;
    /** @brief E^ψ degree from probe values (ψ nontrivial). */
    uint32_t field_degree(const int64_t* values, int64_t depth) const;
    /** @brief Howe tower from probe values (ψ nontrivial). */
    std::vector<HoweStep> tower(const int64_t* values, int64_t depth) const;

private:
    const TorusQuotient* Q_;
    std::vector<std::vector<int64_t>> probes_;
    size_t residue_ = 0;
    std::vector<std::vector<size_t>> level_;  // indices per level
    struct KernelIdx {
        uint32_t degree;
        size_t residue;
        std::vector<std::vector<size_t>> levels;
    };
    std::vector<KernelIdx> kernels_;
    bool kernel_trivial(const KernelIdx& k, const int64_t* values, int64_t s) const;
    uint32_t minimal_field(const int64_t* values, int64_t s) const;
};

/** @brief |{ψ : d(ψ) = r}| for the norm-one torus: |T(f)| − 1 at r = 0, else |T(f)|(q^{ℓ−1}−1)q^{(r−1)(ℓ−1)}. */
mpz_class count_by_depth(uint32_t ell, uint64_t q, int64_t r);
/** @brief Enumerated stratum sizes of the dual of Q (index r = 0..R−1, trivial character excluded). */
std::vector<uint64_t> enumerate_depth_counts(const TorusQuotient& Q);

/** @brief Left and right side of the Möbius identity for one (M, t). */
struct MoebiusResult {
    uint32_t m = 1;
    CycNumber lhs, rhs;
};
/**
 * @brief Σ_{E^ψ=M, d(ψ)=r} ψ(t^{−1}) and μ(m)·Σ_{d(ψ)<r} ψ(t^{−1}) (trivial character included)
 *        over Q = T/T_{r+1}, for every subfield M ⊋ F and every t, in one enumeration.
 *        result[ti][k] corresponds to the k-th divisor m > 1 of n.
 */
std::vector<std::vector<MoebiusResult>> moebius_sums(const TorusQuotient& Q, const std::vector<LaurentElem>& ts);
/** @brief True when the identity's hypothesis holds: level(t) < r, or level(t) = r and Tr_{E/L}(ū) ≠ 0 for all L ⊋ F. */
bool moebius_hypothesis(const TorusQuotient& Q, const LaurentElem& t, int64_t r);

/** @brief #{Y ∈ f_E : Tr_{E/F} Y = 0, exact Frobenius period m} and Σ_{d|m} μ(m/d) q^{d−1}. */
std::pair<uint64_t, mpz_class> stabilizer_count_check(const TorusSpec& spec, uint32_t m);

/** @brief Fiber data for B_{M,r} = {ψ : d(ψ) = r, E^ψ = M} (NormOne only). */
struct FiberCount {
    uint32_t m = 1;
    uint64_t enumerated = 0;        ///< |B_{M,r}| from the dual enumeration
    uint64_t torus_m = 0;           ///< |T^M/T^M_r| from the T^M quotient (= C_{M,r})
    mpz_class c_formula;            ///< |T^M(f)| q^{(r−1)(m−1)}
    uint64_t s_below = 0;           ///< |{ψ' ∈ S^M dual : d(ψ') < r}|
    uint64_t strongly_primitive = 0;  ///< |B''_{M,r}|
};
/** @brief For Q = T/T_{r+1}: counts per subfield M ⊋ F. */
std::vector<FiberCount> fiber_counts(const TorusQuotient& Q);

}  // namespace stf
