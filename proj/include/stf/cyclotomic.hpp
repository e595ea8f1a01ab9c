/**
 * @file cyclotomic.hpp
 * @brief Exact arithmetic in cyclotomic fields Q(ζ_m).
 *
 * A CycNumber is (c_0 + c_1 ζ_m + … + c_{φ(m)−1} ζ_m^{φ(m)−1}) / den with
 * integer c_i and positive den, reduced modulo the m-th cyclotomic
 * polynomial. Numbers of different moduli are combined in Q(ζ_lcm).
 * Rational values are normalized to modulus 1.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace stf {

/** @brief Coefficients (low to high) of the m-th cyclotomic polynomial. */
const std::vector<int64_t>& cyclotomic_polynomial(uint64_t m);

class CycNumber {
public:
    CycNumber() = default;
    CycNumber(long v) : CycNumber(mpq_class(v)) {}  // NOLINT(google-explicit-constructor)
    CycNumber(const mpq_class& v);                   // NOLINT(google-explicit-constructor)

    /** @brief ζ_m^k. */
    static CycNumber root_of_unity(uint64_t m, int64_t k);
    /** @brief (Σ_k counts[k] ζ_m^k) / den, where counts has length m. */
    static CycNumber from_histogram(uint64_t m, const std::vector<int64_t>& counts,
                                    const mpz_class& den = 1);
    static CycNumber from_histogram(uint64_t m, const std::vector<mpz_class>& counts,
                                    const mpz_class& den = 1);

    uint64_t modulus() const { return m_; }
    const std::vector<mpz_class>& numerator() const { return num_; }
    const mpz_class& denominator() const { return den_; }

    bool is_zero() const;
    bool is_rational() const;
    /** @brief Rational value; throws DomainError when irrational. */
    mpq_class to_rational() const;
    /** @brief Same number expressed with modulus m (a multiple of modulus()). */
    CycNumber lifted(uint64_t m) const;

    CycNumber operator+(const CycNumber& o) const;
    CycNumber operator-(const CycNumber& o) const;
    CycNumber operator-() const;
    CycNumber operator*(const CycNumber& o) const;
    CycNumber& operator+=(const CycNumber& o) { return *this = *this + o; }
    CycNumber& operator-=(const CycNumber& o) { return *this = *this - o; }
    CycNumber& operator*=(const CycNumber& o) { return *this = *this * o; }
    bool operator==(const CycNumber& o) const;
    bool operator!=(const CycNumber& o) const { return !(*this == o); }

    /** @brief "a/b" for rationals, otherwise "(c0 + c1*z + …)/den [z=zeta_m]". */
    std::string to_string() const;

private:
    uint64_t m_ = 1;
    std::vector<mpz_class> num_{mpz_class(0)};
    mpz_class den_ = 1;

    static CycNumber reduce(uint64_t m, std::vector<mpz_class> full, const mpz_class& den);
    void normalize();
};

}  // namespace stf
