/**
 * @file lseries.hpp
 * @brief Truncated Laurent series over finite fields: models of F = f((ϖ)) and
 *        of its unramified extensions E = f_E((ϖ)).
 *
 * A LaurentElem is Σ_{k ≥ v} c_k ϖ^k known modulo ϖ^N (absolute precision N),
 * or exactly when N is infinite. Coefficients are codes of one layer of a
 * FieldTower. Arithmetic propagates precision and never claims more than the
 * inputs determine.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stf/ffield.hpp"

namespace stf {

/** @brief Sentinel for an infinite precision or valuation. */
constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

class LaurentElem {
public:
    LaurentElem() = default;

    static LaurentElem zero(const FieldTower* t, uint32_t layer, int64_t prec = kInf);
    static LaurentElem one(const FieldTower* t, uint32_t layer, int64_t prec = kInf);
    /** @brief c·ϖ^k with c a layer code. */
    static LaurentElem monomial(const FieldTower* t, uint32_t layer, uint32_t code, int64_t k,
                                int64_t prec = kInf);
    static LaurentElem constant(const FqElem& c, int64_t prec = kInf);
    /** @brief Σ codes[i] ϖ^{start+i}. */
    static LaurentElem from_coefficients(const FieldTower* t, uint32_t layer, int64_t start,
                                         std::vector<uint32_t> codes, int64_t prec = kInf);

    const FieldTower* tower() const { return tower_; }
    uint32_t layer() const { return layer_; }
    int64_t precision() const { return prec_; }
    bool is_exact() const { return prec_ >= kInf; }

    /** @brief True for the exact zero. */
    bool is_exact_zero() const { return is_exact() && c_.empty(); }
    /** @brief True when every known coefficient vanishes (exact zero or unresolved zero). */
    bool is_zero_class() const { return c_.empty(); }
    /** @brief Valuation; kInf for the exact zero; throws PrecisionError on an unresolved zero. */
    int64_t ord() const;
    /** @brief Lower bound on the valuation (the precision for an unresolved zero). */
    int64_t valuation_bound() const { return c_.empty() ? prec_ : v_; }
    /** @brief Coefficient code of ϖ^k; throws PrecisionError for k ≥ precision. */
    uint32_t coef(int64_t k) const;
    FqElem coef_elem(int64_t k) const { return FqElem(tower_, layer_, coef(k)); }
    /** @brief Last index carrying a nonzero coefficient (exclusive end of support). */
    int64_t support_end() const { return c_.empty() ? valuation_bound() : v_ + int64_t(c_.size()); }

    /** @brief Same value with precision lowered to min(precision, N). */
    LaurentElem truncated(int64_t N) const;
    /** @brief Terms of degree < k only, as an exact element. */
    LaurentElem head(int64_t k) const;
    /** @brief The same value viewed in a larger residue layer. */
    LaurentElem embed(uint32_t layer) const;
    /** @brief The same value in a smaller layer; throws DomainError if a coefficient is outside it. */
    LaurentElem restrict_to(uint32_t layer) const;

    LaurentElem operator+(const LaurentElem& o) const;
    LaurentElem operator-(const LaurentElem& o) const;
    LaurentElem operator-() const;
    LaurentElem operator*(const LaurentElem& o) const;
    LaurentElem& operator+=(const LaurentElem& o) { return *this = *this + o; }
    LaurentElem& operator*=(const LaurentElem& o) { return *this = *this * o; }
    LaurentElem scaled(uint32_t code) const;
    LaurentElem shifted(int64_t k) const;  ///< multiplication by ϖ^k

    /** @brief True when the two values agree to the smaller precision. */
    bool congruent(const LaurentElem& o) const { return (*this - o).is_zero_class(); }
    /** @brief Structural equality: same layer, precision and coefficients. */
    bool operator==(const LaurentElem& o) const;

private:
    const FieldTower* tower_ = nullptr;
    uint32_t layer_ = 1;
    int64_t v_ = kInf;             // valuation of c_[0]
    std::vector<uint32_t> c_;      // c_[0] ≠ 0 when nonempty
    int64_t prec_ = kInf;

    void normalize();
};

/** @brief Inverse; exact inputs are inverted to absolute precision prec_if_exact. */
LaurentElem invert(const LaurentElem& x, int64_t prec_if_exact);
/** @brief x^e for e ≥ 0 (e < 0 uses invert with prec_if_exact). */
LaurentElem power(const LaurentElem& x, int64_t e, int64_t prec_if_exact = kInf);
/** @brief Coefficient-wise Frobenius x ↦ x^{σ^steps}, σ the p^{base_degree}-power map. */
LaurentElem galois(const LaurentElem& x, int64_t steps, uint32_t base_degree = 1);
/** @brief N_{E/M}: product of the conjugates over the relative Galois group. */
LaurentElem norm_E_to_M(const LaurentElem& x, uint32_t sublayer);
/** @brief Tr_{E/M}. */
LaurentElem trace_E_to_M(const LaurentElem& x, uint32_t sublayer);

/** @brief Torus coordinate: an invertible element of E, optionally flagged as norm one. */
struct TorusCoord {
    LaurentElem value;
    bool norm_one = false;
};
/** @brief Build a TorusCoord; verifies norm one to working precision when flagged. */
TorusCoord make_torus_coord(const LaurentElem& value, bool norm_one, uint32_t base_layer);

/** @brief Dense square matrix over a Laurent-series field. */
struct LMatrix {
    size_t n = 0;
    std::vector<LaurentElem> a;
    LMatrix() = default;
    LMatrix(size_t n_, const LaurentElem& fill) : n(n_), a(n_ * n_, fill) {}
    LaurentElem& at(size_t i, size_t j) { return a[i * n + j]; }
    const LaurentElem& at(size_t i, size_t j) const { return a[i * n + j]; }
};

LMatrix identity_matrix(const FieldTower* t, uint32_t layer, size_t n, int64_t prec = kInf);
LMatrix operator*(const LMatrix& x, const LMatrix& y);
LMatrix operator+(const LMatrix& x, const LMatrix& y);
LMatrix operator-(const LMatrix& x, const LMatrix& y);
/** @brief Solve A·x = b by Gaussian elimination with minimal-valuation pivots. */
std::vector<LaurentElem> solve(const LMatrix& A, const std::vector<LaurentElem>& b,
                               int64_t prec_if_exact);
LMatrix inverse(const LMatrix& A, int64_t prec_if_exact);
LaurentElem determinant(const LMatrix& A, int64_t prec_if_exact);
/** @brief Coefficients c_0..c_n (c_n = 1) of det(xI − A), by Faddeev–LeVerrier (needs p > n). */
std::vector<LaurentElem> characteristic_polynomial(const LMatrix& A);
/** @brief Minimum of ord over all entries (kInf if all are exact zeros). */
int64_t min_entry_ord(const LMatrix& A);

/**
 * @brief Matrix of multiplication by γ on E ≅ F^n in the basis 1, θ, …, θ^{n−1}.
 *
 * θ is the generator of the residue layer of γ (the Conway root), which
 * generates f_E over f; base_layer is the residue layer of F.
 */
LMatrix regular_matrix(const LaurentElem& gamma, uint32_t base_layer);
/** @brief Same, for an arbitrary f-basis of f_E given as layer codes. */
LMatrix regular_matrix(const LaurentElem& gamma, uint32_t base_layer,
                       const std::vector<uint32_t>& basis);

/**
 * @brief γ = head·tail with head the terms of degree < r and tail = head^{-1}γ ∈ 1+ϖ^r O_E.
 *
 * For exact γ the tail is computed to absolute precision prec_if_exact.
 */
std::pair<LaurentElem, LaurentElem> head_tail_split(const LaurentElem& gamma, int64_t r,
                                                    int64_t prec_if_exact);

/**
 * @brief Textual form "1 + g^2*w^1 + w^3 (prec 8)".
 *
 * Prime-field coefficients print as integers 0..p−1, others as g^j with g the
 * layer generator; a coefficient 1 is omitted for nonconstant terms.
 */
std::string to_text(const LaurentElem& x);
/** @brief Parse the textual form into the given layer; throws ParseError. */
LaurentElem parse_laurent(const std::string& text, const FieldTower* t, uint32_t layer);

}  // namespace stf
