/**
 * @file depth.hpp
 * @brief Depth of torus and block-diagonal elements, Newton-polygon depth,
 *        good elements and Weyl discriminants for unramified tori.
 *
 * For γ in an unramified extension E/F of degree n with q-Frobenius σ, the
 * roots are α_ij(γ) = γ^{σ^i}/γ^{σ^j} and d_α(γ) = ord(α(γ) − 1). All depths
 * here are integers (or kInf).
 */
#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <vector>

#include "stf/lseries.hpp"

namespace stf {

/** @brief d_{α_ij}(γ) for all ordered pairs i ≠ j (diagonal holds kInf). */
struct RootOrderVector {
    size_t n = 0;
    std::vector<int64_t> value;
    int64_t at(size_t i, size_t j) const { return value[i * n + j]; }
};

/** @brief γ, γ^σ, …, γ^{σ^{n−1}} with σ the q-Frobenius of the base layer. */
std::vector<LaurentElem> conjugates(const LaurentElem& gamma, uint32_t base_layer);

/** @brief Root orders from a list of eigenvalues in a common layer. */
RootOrderVector root_orders_of_eigenvalues(const std::vector<LaurentElem>& eigenvalues);
/** @brief Root orders of a torus element γ ∈ E^×. */
RootOrderVector root_orders(const LaurentElem& gamma, uint32_t base_layer);

/** @brief min over roots of d_α(γ); kInf when γ is central. */
int64_t torus_depth(const LaurentElem& gamma, uint32_t base_layer);
int64_t min_root_order(const RootOrderVector& rov);
/** @brief Every finite root order equals r and the depth is r. */
bool is_good(const LaurentElem& gamma, uint32_t base_layer, int64_t r);

/** @brief S = Σ_α d_α(γ), so |D_G(γ)| = q^{−S}; DomainError for irregular γ. */
int64_t weyl_discriminant_exponent(const RootOrderVector& rov);
/** @brief The same sum restricted to roots inside the blocks (block_of[i] = block of index i). */
int64_t levi_discriminant_exponent(const RootOrderVector& rov, const std::vector<size_t>& block_of);
/** @brief q^e as an exact rational (e may be negative). */
mpq_class q_power(const mpz_class& q, int64_t e);

/** @brief Minimal Newton slope of ch_γ(x + Tr(γ)/n); needs γ integral, non-central, p > n. */
mpq_class newton_depth(const LMatrix& gamma);

/** @brief Largest r with g ∈ G_{x0,r} at the hyperspecial vertex (0 for GL_n(O) ∖ G_{x0,1}). */
int64_t matrix_depth(const LMatrix& g);
/**
 * @brief Matrix depth of the regular representation of zγ, with z ∈ F^× the inverse of the
 *        F-rational truncation of γ below its torus depth (the central normalization d⁺).
 */
int64_t central_twist_depth(const LaurentElem& gamma, uint32_t base_layer, int64_t prec_if_exact);

/** @brief One step of a Howe tower: a subfield of degree `degree` over F and its depth. */
struct HoweStep {
    uint32_t degree = 1;
    int64_t depth = 0;
};
/** @brief |Φ(G,T')| = n² − n·[E:E'] for the torus T' of the subfield of the given degree. */
int64_t roots_outside_subfield(uint32_t n, uint32_t degree);
/** @brief Exponent e with |D_G(X*)| = q^e: Σ r_i(|Φ(G,T^i)| − |Φ(G,T^{i+1})|), T^{d} = centre. */
int64_t discriminant_of_representative(uint32_t n, const std::vector<HoweStep>& tower);
/** @brief Checks a tower: degrees divide n and strictly decrease, depths strictly increase. */
void validate_tower(uint32_t n, const std::vector<HoweStep>& tower);

/**
 * @brief Regular semisimple element of GL_n(F) given by blocks γ_b ∈ E_b^× with E_b unramified
 *        of degree λ_b; its eigenvalues are the Galois conjugates of each block.
 */
struct BlockElement {
    std::vector<LaurentElem> blocks;
    uint32_t base_layer = 1;

    uint32_t n() const;
    /** @brief Block degrees λ_b. */
    std::vector<uint32_t> degrees() const;
    /** @brief Layer holding every eigenvalue: base·lcm(λ_b). */
    uint32_t splitting_layer() const;
    /** @brief All eigenvalues embedded in the splitting layer, block by block. */
    std::vector<LaurentElem> eigenvalues() const;
    /** @brief Block index of each eigenvalue. */
    std::vector<size_t> block_of_index() const;
    RootOrderVector root_orders() const;
    /** @brief d⁺: minimal root order. */
    int64_t depth() const;
    /** @brief Block-diagonal matrix of regular representations. */
    LMatrix matrix() const;
    /** @brief Throws DomainError unless all blocks are units and the element is regular. */
    void validate() const;
};

}  // namespace stf
