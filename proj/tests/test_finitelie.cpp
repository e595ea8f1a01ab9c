/**
 * @file test_finitelie.cpp
 * @brief Unit tests for Deligne–Lusztig values and L(g,t) on the anisotropic torus of GL_n(F_q).
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stf/errors.hpp"
#include "stf/finitelie.hpp"

using namespace stf;

TEST_CASE("torus and characters") {
    FieldTower tw(5, 2);
    FiniteTorus T(&tw, 1, 2);
    CHECK(T.order() == 24);
    CHECK(T.q() == 5);
    const uint32_t one = T.element(0);
    CHECK_FALSE(T.is_regular(one));
    CHECK(T.is_regular(T.element(1)));
    CHECK_FALSE(T.is_regular(T.element(6)));  // ω^6 lies in F_5^×
    const FiniteTorusChar a{3, 24}, b{22, 24};
    CHECK((a * b).k == 1);
    CHECK(FiniteTorusChar{24, 24}.is_trivial());
    for (uint64_t e = 0; e < 24; ++e) CHECK((a * b)(T, T.element(e)) == a(T, T.element(e)) * b(T, T.element(e)));
}

TEST_CASE("Deligne-Lusztig values at regular elements") {
    FieldTower tw(3, 3);
    FiniteTorus T(&tw, 1, 3);
    const uint32_t g = T.element(1);
    CHECK(dl_value_regular(T, {0, T.order()}, g) == CycNumber(3));
    CHECK_THROWS_AS(dl_value_regular(T, {1, T.order()}, T.element(0)), DomainError);
    for (int64_t k = 0; k < int64_t(T.order()); ++k) {
        const FiniteTorusChar th{k, T.order()};
        CHECK(dl_value_regular(T, th, g) == dl_value_regular(T, th, T.frobenius_orbit(g)[1]));
    }
    // a Frobenius-stable character (k divisible by (q^n−1)/(q−1)) is rational on the orbit
    CHECK(dl_value_regular(T, {13, T.order()}, g).is_rational());
}

TEST_CASE("L(g,t) counts Frobenius twists") {
    FieldTower tw(3, 2);
    FiniteTorus T(&tw, 1, 2);
    const uint32_t g = T.element(1);
    CHECK(finite_L(T, g, g) == CycNumber(1));
    CHECK(finite_L(T, g, T.frobenius_orbit(g)[1]) == CycNumber(1));
    CHECK(finite_L(T, g, T.element(2)) == CycNumber(0));
    const FiniteCheckResult r = finite_corollary_check(T, 2);
    CHECK(r.regular == 6);
    CHECK(r.pairs == 48);
    CHECK(r.mismatches == 0);
    CHECK(r.orbit_sum_failures == 0);
    CHECK(r.out_of_range == 0);
}
