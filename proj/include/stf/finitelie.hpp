/**
 * @file finitelie.hpp
 * @brief GL_n over a finite field with anisotropic maximal torus T ≅ F_{q^n}^×: Deligne–Lusztig
 *        values at regular elements of T and the Fourier transform L(g,t) over the dual of T.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "stf/cyclotomic.hpp"
#include "stf/ffield.hpp"

namespace stf {

/** @brief The torus F_{q^n}^× inside a field tower, with q = p^{base_layer}. */
class FiniteTorus {
public:
    FiniteTorus(const FieldTower* tower, uint32_t base_layer, uint32_t n);

    uint32_t n() const { return n_; }
    uint64_t q() const { return q_; }
    /** @brief |T| = q^n − 1. */
    uint64_t order() const { return order_; }
    /** @brief Discrete logarithm of x against the fixed generator of F_{q^n}^×. */
    uint64_t index(uint32_t x) const;
    /** @brief The element with the given discrete logarithm. */
    uint32_t element(uint64_t e) const;
    /** @brief x, x^q, …, x^{q^{n−1}}. */
    std::vector<uint32_t> frobenius_orbit(uint32_t x) const;
    /** @brief x has n distinct Frobenius conjugates. */
    bool is_regular(uint32_t x) const;

private:
    const FieldTower* tower_;
    uint32_t layer_;
    uint32_t n_;
    uint64_t q_, order_, step_;
};

/** @brief ϑ_k(ω^e) = ζ^{ke} with ζ a primitive (q^n−1)-th root of unity. */
struct FiniteTorusChar {
    int64_t k = 0;
    uint64_t modulus = 1;

    FiniteTorusChar operator*(const FiniteTorusChar& o) const;
    bool is_trivial() const { return k % int64_t(modulus) == 0; }
    CycNumber operator()(const FiniteTorus& T, uint32_t x) const;
};

/** @brief R_{T,ϑ}(g) = Σ_i ϑ(g^{q^i}) for regular g ∈ T; DomainError otherwise. */
CycNumber dl_value_regular(const FiniteTorus& T, const FiniteTorusChar& theta, uint32_t g);

/** @brief L(g,t) = |T|^{−1} Σ_ϑ R_{T,ϑ}(g) ϑ(t^{−1}) over all q^n − 1 characters. */
CycNumber finite_L(const FiniteTorus& T, uint32_t g, uint32_t t);

/** @brief #{i : g^{q^i} = t}. */
uint64_t frobenius_match_count(const FiniteTorus& T, uint32_t g, uint32_t t);

/** @brief Outcome of the exhaustive check of L(g,t) = #{i : g^{q^i} = t} over all regular g and all t. */
struct FiniteCheckResult {
    uint64_t pairs = 0;
    uint64_t regular = 0;
    uint64_t mismatches = 0;
    uint64_t orbit_sum_failures = 0;  ///< regular g with Σ_t L(g,t) ≠ n
    uint64_t out_of_range = 0;        ///< values outside {0, 1}
};
FiniteCheckResult finite_corollary_check(const FiniteTorus& T, unsigned jobs = 1);

}  // namespace stf
