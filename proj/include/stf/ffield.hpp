/**
 * @file ffield.hpp
 * @brief Exact arithmetic in a compatible lattice of finite fields F_p ⊂ F_{p^d} ⊂ F_{p^D}.
 *
 * A FieldTower is built from one top field F_{p^D} defined by the Conway
 * polynomial C(p,D). Every subfield F_{p^d} (d | D) is a layer; its elements
 * are the top-field elements fixed by x ↦ x^{p^d}. Top-field elements are
 * encoded as integers whose base-p digits are the coefficients in the power
 * basis of the generator g = x mod C(p,D). Multiplication uses exp/log
 * tables, so discrete logarithms are table lookups.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stf/errors.hpp"

namespace stf {

/** @brief Largest supported top field. */
constexpr uint64_t kMaxFieldSize = 10'000'000;

/**
 * @brief Solver for linear systems over F_p with a fixed coefficient matrix.
 *
 * The matrix is given by its columns; solve() returns the unique coefficient
 * vector expressing a target as a combination of the columns, or nullopt if
 * the target is outside their span. Columns must be linearly independent.
 */
class FpSolver {
public:
    FpSolver() = default;
    FpSolver(uint32_t p, const std::vector<std::vector<uint32_t>>& columns, size_t rows);

    std::optional<std::vector<uint32_t>> solve(const std::vector<uint32_t>& target) const;
    size_t unknowns() const { return unknowns_; }

private:
    uint32_t p_ = 0;
    size_t rows_ = 0, unknowns_ = 0;
    std::vector<std::vector<uint32_t>> transform_;  // rows x rows
};

/** @brief Basis of the kernel of an F_p-linear map given by its matrix rows. */
std::vector<std::vector<uint32_t>> fp_kernel(uint32_t p, std::vector<std::vector<uint32_t>> rows,
                                             size_t cols);

/**
 * @brief The lattice of subfields of F_{p^D}, with compatible Conway polynomials.
 */
class FieldTower {
public:
    /** @brief Build F_{p^D}; p prime, p^D ≤ kMaxFieldSize. */
    FieldTower(uint32_t p, uint32_t top_degree);

    uint32_t p() const { return p_; }
    uint32_t top_degree() const { return D_; }
    uint64_t size() const { return Q_; }
    uint64_t layer_size(uint32_t d) const;
    bool has_layer(uint32_t d) const { return d >= 1 && D_ % d == 0; }
    void require_layer(uint32_t d) const;

    /** @brief Conway polynomial C(p,d), coefficients from x^0 to x^d. */
    const std::vector<uint32_t>& conway(uint32_t d) const;

    uint32_t zero() const { return 0; }
    uint32_t one() const { return 1; }
    uint32_t from_int(int64_t c) const;
    uint32_t add(uint32_t a, uint32_t b) const;
    uint32_t sub(uint32_t a, uint32_t b) const;
    uint32_t neg(uint32_t a) const;
    uint32_t mul(uint32_t a, uint32_t b) const;
    uint32_t inv(uint32_t a) const;
    uint32_t pow(uint32_t a, int64_t e) const;
    /** @brief Multiply by an integer (mod p). */
    uint32_t scale(uint32_t a, int64_t c) const;

    /** @brief g^i for the top-field generator g. */
    uint32_t exp(int64_t i) const;
    /** @brief Discrete logarithm base g; a ≠ 0. */
    uint64_t log(uint32_t a) const;

    /** @brief a^{p^steps}; negative steps allowed. */
    uint32_t frob(uint32_t a, int64_t steps) const;
    /** @brief True iff a lies in the degree-d layer. */
    bool in_layer(uint32_t a, uint32_t d) const;
    /** @brief Smallest layer containing a. */
    uint32_t min_layer(uint32_t a) const;
    /** @brief Generator ζ_d = g^{(Q−1)/(p^d−1)} of the layer's multiplicative group; a root of C(p,d). */
    uint32_t layer_generator(uint32_t d) const;
    /** @brief Coordinates of a (which must lie in layer d) in the basis 1, ζ_d, …, ζ_d^{d−1}. */
    std::vector<uint32_t> coordinates(uint32_t a, uint32_t d) const;
    /** @brief Inverse of coordinates(). */
    uint32_t from_coordinates(const std::vector<uint32_t>& c, uint32_t d) const;

    /** @brief Relative norm from layer d to layer s (s | d); a must lie in layer d. */
    uint32_t norm(uint32_t a, uint32_t d, uint32_t s) const;
    /** @brief Relative trace from layer d to layer s. */
    uint32_t trace(uint32_t a, uint32_t d, uint32_t s) const;

    /** @brief Base-p digits of a code (length D). */
    std::vector<uint32_t> digits(uint32_t a) const;
    uint32_t from_digits(const std::vector<uint32_t>& dg) const;

private:
    uint32_t p_, D_;
    uint64_t Q_;
    std::vector<uint32_t> exp_;
    std::vector<uint32_t> log_;
    std::vector<uint32_t> add_table_;  // only for small fields
    std::vector<uint64_t> pow_p_;      // p^i for i ≤ D
    std::vector<std::vector<uint32_t>> conway_;  // indexed by degree
    mutable std::vector<std::unique_ptr<FpSolver>> layer_solvers_;

    uint32_t digit_add(uint32_t a, uint32_t b, bool subtract) const;
    const FpSolver& layer_solver(uint32_t d) const;
};

/** @brief Shared handle to an immutable tower. */
using TowerPtr = std::shared_ptr<const FieldTower>;

/** @brief Build a tower; throws CapacityError above the size cap. */
TowerPtr make_tower(uint32_t p, uint32_t top_degree);

/**
 * @brief Element of one layer of a FieldTower.
 *
 * The value is held as its top-field code; coefficients() gives the F_p
 * coordinate vector in the layer's power basis.
 */
class FqElem {
public:
    FqElem() = default;
    FqElem(const FieldTower* tower, uint32_t layer, uint32_t code);

    static FqElem zero(const FieldTower* t, uint32_t layer) { return FqElem(t, layer, 0); }
    static FqElem one(const FieldTower* t, uint32_t layer) { return FqElem(t, layer, 1); }
    static FqElem from_int(const FieldTower* t, uint32_t layer, int64_t c);
    static FqElem from_coefficients(const FieldTower* t, uint32_t layer,
                                    const std::vector<uint32_t>& c);

    const FieldTower* tower() const { return tower_; }
    uint32_t layer() const { return layer_; }
    uint32_t code() const { return code_; }
    bool is_zero() const { return code_ == 0; }
    std::vector<uint32_t> coefficients() const;

    FqElem operator+(const FqElem& o) const;
    FqElem operator-(const FqElem& o) const;
    FqElem operator-() const;
    FqElem operator*(const FqElem& o) const;
    FqElem operator/(const FqElem& o) const;
    FqElem pow(int64_t e) const;
    FqElem inverse() const;
    bool operator==(const FqElem& o) const { return code_ == o.code_; }
    bool operator!=(const FqElem& o) const { return code_ != o.code_; }

    /** @brief View the same value in a larger layer. */
    FqElem embed(uint32_t layer) const;

private:
    const FieldTower* tower_ = nullptr;
    uint32_t layer_ = 1;
    uint32_t code_ = 0;
};

/** @brief x^{p^steps}. */
FqElem frobenius(const FqElem& x, int64_t steps);
/** @brief N from x's layer to sublayer. */
FqElem norm_to(const FqElem& x, uint32_t sublayer);
/** @brief Tr from x's layer to sublayer. */
FqElem trace_to(const FqElem& x, uint32_t sublayer);
/** @brief Quadratic character of the layer's multiplicative group. */
int sgn(const FqElem& x);
/** @brief Quadratic character of the cyclic group ker(N: layer → sublayer). */
int sgn_norm_one(const FqElem& x, uint32_t sublayer);
/** @brief All elements of layer with norm 1 to sublayer. */
std::vector<FqElem> norm_one_subgroup(const FieldTower* t, uint32_t layer, uint32_t sublayer);

}  // namespace stf
