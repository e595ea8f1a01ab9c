/**
 * @file building.hpp
 * @brief The building of GL_n(F) as additive norms on F^n.
 *
 * A norm x_{B,c}(v) = min_i ord(a_i) + c_i, where v = Σ a_i b_i in the basis
 * B = (b_1, …, b_n) (matrix columns). Offsets are rationals with the fixed
 * denominator kOffsetDen and are stored as integer numerators; every value
 * returned by evaluate() uses the same scale.
 */
#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "stf/lseries.hpp"

namespace stf {

/** @brief Common denominator of all offsets and depths in this module. */
constexpr int64_t kOffsetDen = 60;
/** @brief Largest supported matrix size. */
constexpr size_t kMaxRank = 8;

struct AdditiveNorm {
    LMatrix basis;                 ///< columns b_i
    std::vector<int64_t> offsets;  ///< c_i · kOffsetDen
};

/** @brief x_c in the standard basis. */
AdditiveNorm standard_norm(const FieldTower* t, uint32_t layer, const std::vector<int64_t>& offsets);

/** @brief x(v) · kOffsetDen, or kInf for v = 0. */
int64_t evaluate(const AdditiveNorm& x, const std::vector<LaurentElem>& v, int64_t prec_if_exact);
/** @brief g·x, the norm v ↦ x(g^{-1}v); its basis is g·B. */
AdditiveNorm act(const LMatrix& g, const AdditiveNorm& x);
/** @brief x(v) ≥ y(v) for all v, decided on the basis of y. */
bool norm_geq(const AdditiveNorm& x, const AdditiveNorm& y, int64_t prec_if_exact);
bool norm_equal(const AdditiveNorm& x, const AdditiveNorm& y, int64_t prec_if_exact);

struct CanonicalForm {
    std::vector<int64_t> offsets;  ///< kOffsetDen > c_1 ≥ … ≥ c_n ≥ 0
    LMatrix witness;               ///< g with g·x_{offsets} = x
};
/** @brief Representative of the G(F)-orbit of x in the fundamental simplex. */
CanonicalForm canonicalize(const AdditiveNorm& x);

/** @brief True iff offsets satisfy kOffsetDen > c_1 ≥ … ≥ c_n ≥ 0. */
bool in_fundamental_simplex(const std::vector<int64_t>& offsets);

/** @brief Block test: g ∈ GL_n(O) and ord(g_ij) ≥ 1 where c_i < c_j (c in the simplex). */
bool parahoric_member(const std::vector<int64_t>& offsets, const LMatrix& g, int64_t prec_if_exact);
/** @brief Definitional test: g·x_c = x_c. */
bool stabilizes(const std::vector<int64_t>& offsets, const LMatrix& g, int64_t prec_if_exact);

/** @brief X ∈ g_{x,r} (strictly deeper when plus): ord(X_ij) ≥ r + c_j − c_i. r is scaled by kOffsetDen. */
bool mp_lie_member(const std::vector<int64_t>& offsets, const LMatrix& X, int64_t r, bool plus);
/** @brief g ∈ G_{x,r}; G_{x,0} is the parahoric. */
bool mp_group_member(const std::vector<int64_t>& offsets, const LMatrix& g, int64_t r, bool plus,
                     int64_t prec_if_exact);
/** @brief g ↦ g − 1 for g ∈ G_{x,r}, r > 0 (a representative modulo level 2r). */
LMatrix mp_iso(const std::vector<int64_t>& offsets, const LMatrix& g, int64_t r, int64_t prec_if_exact);
/** @brief X ↦ 1 + X for X ∈ g_{x,r}, r > 0. */
LMatrix mp_iso_inv(const std::vector<int64_t>& offsets, const LMatrix& X, int64_t r);

/** @brief Affine root α_ij + m. */
struct AffineRoot {
    size_t i = 0, j = 1;
    int64_t m = 0;
    /** @brief (α_ij + m)(c) · kOffsetDen = c_i − c_j + m·kOffsetDen. */
    int64_t evaluate(const std::vector<int64_t>& offsets) const;
};
/** @brief Root-group element 1 + a·E_ij. */
LMatrix root_element(const FieldTower* t, uint32_t layer, size_t n, size_t i, size_t j,
                     const LaurentElem& a);
/** @brief u = 1 + a E_ij with ord(a) ≥ m; DomainError for other shapes. */
bool affine_root_member(const AffineRoot& psi, const LMatrix& u);
/** @brief U_ψ fixes x_c iff ψ(c) ≥ 0. */
bool half_plane_fixes(const AffineRoot& psi, const std::vector<int64_t>& offsets);

/** @brief g = (Π roots, left to right) · diagonal. */
struct ParahoricFactorization {
    std::vector<std::tuple<size_t, size_t, LaurentElem>> roots;  ///< factors 1 + a E_ij
    LMatrix diagonal;
};
/** @brief Row-reduce a parahoric element into root-group factors fixing x_c and an integral diagonal. */
ParahoricFactorization factor_parahoric(const std::vector<int64_t>& offsets, const LMatrix& g,
                                        int64_t prec_if_exact);
/** @brief Multiply a factorization back out. */
LMatrix expand(const ParahoricFactorization& f);

}  // namespace stf
