/**
 * @file charform.hpp
 * @brief Character values Θ_ψ(γ) of depth-positive supercuspidals attached to unramified tori:
 *        the prime-degree character table, local character expansion terms, ε signs,
 *        the conjectural on-torus formula and the constant term c₀.
 *
 * On the torus every formula here has the shape Θ_ψ(γ) = c · Σ_σ ψ(γ^σ) with a
 * rational c depending only on γ and on the Howe tower of ψ; the *_coefficient
 * functions return c so that character sums can reuse it across many ψ.
 */
#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <string>
#include <vector>

#include "stf/chargroup.hpp"
#include "stf/cyclotomic.hpp"
#include "stf/depth.hpp"

namespace stf {

/**
 * @brief Sign bookkeeping. Table: signs chosen to agree with the prime-degree character
 *        table (zero-orbit term (−1)^n, ε factor (−1)^{(n−1)max{r_i−d(γ),0}}, conjectural
 *        formula multiplied by (−1)^n). Raw: the expansion constant (−1)^{n+r_O}, the ε factor
 *        (−1)^{(n−1)max{d(γ)−r_i,0}} and no global sign.
 */
enum class SignConvention { Table, Raw };

SignConvention parse_sign_convention(const std::string& text);
std::string to_string(SignConvention c);

/** @brief Nilpotent orbit {0}_{M}^{G} induced from the Levi M with block sizes `levi`. */
struct NilOrbit {
    std::vector<uint32_t> levi;  ///< Levi block sizes m_i, sorted decreasingly

    explicit NilOrbit(std::vector<uint32_t> parts);
    uint32_t n() const;
    /** @brief r_O: number of Levi blocks (rank of the split centre of M). */
    size_t rank() const { return levi.size(); }
    /** @brief |Φ_O| = Σ m_i² − n. */
    int64_t levi_roots() const;
    /** @brief dim O = |Φ| − |Φ_O|. */
    int64_t dim() const;
    /** @brief Jordan type of the orbit: the dual partition of the Levi blocks. */
    std::vector<uint32_t> jordan_type() const;
    /** @brief n² − Σ (parts of the dual of the Jordan type)², computed through two dualizations. */
    int64_t dim_from_jordan_type() const;
    bool operator==(const NilOrbit& o) const { return levi == o.levi; }
};

/** @brief Dual (conjugate) partition. */
std::vector<uint32_t> dual_partition(const std::vector<uint32_t>& parts);
/** @brief All partitions of n, each sorted decreasingly, in reverse lexicographic order. */
std::vector<std::vector<uint32_t>> partitions(uint32_t n);
/** @brief a ≤ b in the sense that a's Levi blocks arise by merging b's blocks. */
bool orbit_leq(const NilOrbit& a, const NilOrbit& b);
/** @brief Number of maps from block degrees to the orbit's labelled Levi blocks with matching sums. */
uint64_t merge_matchings(const NilOrbit& orbit, const std::vector<uint32_t>& block_degrees);
/** @brief Orbits O ≤ O_γ, where O_γ has Levi blocks the block degrees of γ. */
std::vector<NilOrbit> admissible_orbits(const BlockElement& gamma);

/** @brief Ordered roots α_ij of GL_n with the cyclic Galois action (i,j) ↦ (i+1,j+1). */
struct RootRealization {
    uint32_t n = 0;
    /** @brief −α ∈ Γ·α, i.e. j − i ≡ n/2 (mod n). */
    bool symmetric(uint32_t i, uint32_t j) const;
    size_t symmetric_count() const;
    /** @brief Orbits of Γ × {±1} on asymmetric roots and of Γ on symmetric roots. */
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> orbits() const;
};

/**
 * @brief c_O · μ̂_O(γ − 1) for an off-torus block element γ and a character of depth d(ψ):
 *        n·sign·(r_O−1)!·q^{d(ψ)|Φ_O|/2}·(1/w_O)Σ_s q^{½Σ_{α∉Φ_O(s)} d_α(γ)}, s over the w_O
 *        block-to-Levi matchings.
 */
mpq_class lce_term(const NilOrbit& orbit, int64_t psi_depth, const BlockElement& gamma, SignConvention conv);

/**
 * @brief ε^r for one tower step: the product of quadratic characters of α(γ_{<r}) over
 *        root orbits of the step with α(γ_{<r}) ≠ 1 (1 when r is odd).
 * @param field_degree [E^i:F] of the step's field; @param next_degree [E^{i+1}:F].
 */
int epsilon_r(const LaurentElem& head, uint32_t base_layer, int64_t r, uint32_t field_degree, uint32_t next_degree);
/** @brief ε_ψ(γ): ε^{r_i}(γ_{<r_i}) over the tower times the convention's (−1)^{(n−1)·max} factor. */
int epsilon_psi(const std::vector<HoweStep>& tower, const LaurentElem& gamma, uint32_t base_layer,
                SignConvention conv);

/** @brief Which row of the prime-degree table applies. */
enum class TableRow { OnTorusShallow = 1, OnTorusDeep = 2, OffTorusNear = 3, OffTorusFar = 4 };

/** @brief c in row 1 / row 2: Θ_ψ(γ) = c Σ_σ ψ(γ^σ) for γ on the torus (ℓ prime). */
mpq_class table_coefficient(uint32_t ell, const mpz_class& q, int64_t psi_depth, int64_t gamma_depth);
/** @brief Θ_ψ(γ) by the table for γ on the torus. */
CycNumber theta_table(const TorusQuotient& Q, const Character& psi, const LaurentElem& gamma);
/** @brief Θ_ψ(γ) by rows 3 and 4 for an off-torus block element (depends on ψ only through its depth). */
mpq_class theta_table_off_torus(int64_t psi_depth, const BlockElement& gamma, SignConvention conv);
TableRow table_row_on_torus(int64_t psi_depth, int64_t gamma_depth);
TableRow table_row_off_torus(int64_t psi_depth, const BlockElement& gamma);

/** @brief q-exponent e with |D_G(γ_{<r})|^{−1/2} = q^e (α(γ_{<r}) = 1 roots omitted; 0 for r = 0). */
mpq_class head_discriminant_exponent(const LaurentElem& gamma, uint32_t base_layer, int64_t r);
/** @brief Tower steps with depth at most d(γ): the representative X*_{ψ,<d(γ)}. */
std::vector<HoweStep> truncated_tower(const std::vector<HoweStep>& tower, int64_t gamma_depth);
/** @brief c in the conjectural formula Θ_ψ(γ) = c Σ_σ ψ(γ^σ). */
mpq_class conjecture_coefficient(const std::vector<HoweStep>& tower, const LaurentElem& gamma, uint32_t base_layer,
                                 SignConvention conv);
CycNumber theta_conjecture(const TorusQuotient& Q, const Character& psi, const LaurentElem& gamma,
                           SignConvention conv = SignConvention::Table);

/** @brief c₀ = n · q^{(n/2)Σ r_i([E:E^{i+1}] − [E:E^i])} for a tower in degree n. */
mpq_class constant_term(uint32_t n, const mpz_class& q, const std::vector<HoweStep>& tower);

}  // namespace stf
