/**
 * @file numtheory.hpp
 * @brief Small integer helpers: primality, factorization, divisors, Möbius function.
 */
#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "stf/errors.hpp"

namespace stf {

/** @brief Deterministic trial-division primality test (inputs are desk-scale). */
inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/** @brief Distinct prime factors of n in increasing order. */
inline std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/** @brief All positive divisors of n in increasing order. */
inline std::vector<uint64_t> divisors(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

/** @brief Möbius function. */
inline int mobius(uint64_t n) {
    int sign = 1;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            n /= d;
            if (n % d == 0) return 0;
            sign = -sign;
        }
    }
    if (n > 1) sign = -sign;
    return sign;
}

/** @brief Integer power with overflow check. */
inline uint64_t ipow(uint64_t base, unsigned e) {
    uint64_t r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (base != 0 && r > UINT64_MAX / base) throw CapacityError("integer power overflow");
        r *= base;
    }
    return r;
}

/** @brief Euler's totient. */
inline uint64_t euler_phi(uint64_t n) {
    uint64_t r = n;
    for (uint64_t p : prime_factors(n)) r = r / p * (p - 1);
    return r;
}

/** @brief Modular exponentiation for moduli below 2^32. */
inline uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

/** @brief Non-negative remainder. */
inline int64_t pmod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace stf
