/**
 * @file test_ffield.cpp
 * @brief Unit tests for the finite-field lattice.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stf/ffield.hpp"
#include "stf/numtheory.hpp"

using namespace stf;

namespace {
std::vector<uint32_t> poly(std::initializer_list<uint32_t> c) { return c; }

/** Independent irreducibility test: no roots in any F_{p^d}, d ≤ n/2, via gcd-free counting. */
bool irreducible_by_enumeration(uint32_t p, const std::vector<uint32_t>& f) {
    // count roots of f in F_{p^n}: an irreducible polynomial of degree n has exactly n
    // distinct roots there and none in proper subfields
    const uint32_t n = uint32_t(f.size() - 1);
    FieldTower t(p, n);
    int roots = 0;
    for (uint32_t a = 0; a < t.size(); ++a) {
        uint32_t acc = 0;
        for (size_t i = f.size(); i-- > 0;) acc = t.add(t.mul(acc, a), f[i]);
        if (acc == 0) {
            if (t.min_layer(a) != n) return false;
            ++roots;
        }
    }
    return roots == int(n);
}
}  // namespace

TEST_CASE("Conway polynomials match known values") {
    CHECK(FieldTower(3, 2).conway(2) == poly({2, 2, 1}));
    CHECK(FieldTower(5, 2).conway(2) == poly({2, 4, 1}));
    CHECK(FieldTower(5, 3).conway(3) == poly({3, 3, 0, 1}));
    CHECK(FieldTower(5, 4).conway(4) == poly({2, 4, 4, 0, 1}));
    CHECK(FieldTower(3, 3).conway(3) == poly({1, 2, 0, 1}));
    CHECK(FieldTower(3, 4).conway(4) == poly({2, 0, 0, 2, 1}));
    CHECK(FieldTower(7, 2).conway(2) == poly({3, 6, 1}));
    CHECK(FieldTower(5, 1).conway(1) == poly({3, 1}));  // x − 2, 2 is the least primitive root
}

TEST_CASE("every layer polynomial is irreducible and embeddings commute with Frobenius") {
    FieldTower t(3, 6);
    for (uint32_t d : {1u, 2u, 3u, 6u}) {
        CHECK(irreducible_by_enumeration(3, t.conway(d)));
        uint32_t z = t.layer_generator(d);
        // ζ_d is a root of C(3,d)
        uint32_t acc = 0;
        const auto& f = t.conway(d);
        for (size_t i = f.size(); i-- > 0;) acc = t.add(t.mul(acc, z), f[i]);
        CHECK(acc == 0);
    }
    for (uint32_t a = 0; a < t.size(); a += 7) {
        FqElem x(&t, 6, a);
        CHECK(frobenius(x, 1) == x.pow(3));
        if (t.in_layer(a, 2)) {
            FqElem y(&t, 2, a);
            CHECK(frobenius(y.embed(6), 1).code() == frobenius(y, 1).code());
        }
    }
}

TEST_CASE("frobenius examples") {
    FieldTower t(3, 2);
    CHECK(frobenius(FqElem::zero(&t, 2), 3).is_zero());
    FqElem two = FqElem::from_int(&t, 2, 2);
    CHECK(frobenius(two, 5) == two);
    FqElem g(&t, 2, t.exp(1));
    CHECK(frobenius(g, 2) == g);
    CHECK(frobenius(g, 1) != g);
    CHECK(frobenius(frobenius(g, 1), 1) == frobenius(g, 2));
}

TEST_CASE("norm and trace examples") {
    FieldTower t9(3, 2);
    for (uint32_t a = 0; a < 9; ++a) {
        FqElem x(&t9, 2, a);
        CHECK(norm_to(x, 1) == x.pow(4));
    }
    CHECK(norm_to(FqElem::one(&t9, 2), 1) == FqElem::one(&t9, 1));

    FieldTower t25(5, 2);
    FqElem g(&t25, 2, t25.exp(1));
    FqElem ng = norm_to(g, 1);
    int order = 1;
    for (FqElem y = ng; y.code() != 1; y = y * ng) ++order;
    CHECK(order == 4);
    int kernel = 0;
    for (uint32_t a = 1; a < 25; ++a)
        if (norm_to(FqElem(&t25, 2, a), 1).code() == 1) ++kernel;
    CHECK(kernel == 6);

    CHECK(trace_to(FqElem::zero(&t25, 2), 1).is_zero());
    FqElem three = FqElem::from_int(&t25, 2, 3);
    CHECK(trace_to(three, 1) == FqElem::from_int(&t25, 1, 6));
}

TEST_CASE("norm and trace equal explicit conjugate products and sums, exhaustively up to 5^4") {
    for (auto [p, D] : {std::pair{3u, 4u}, std::pair{5u, 4u}, std::pair{5u, 3u}, std::pair{7u, 2u}}) {
        FieldTower t(p, D);
        for (uint32_t s : {1u, 2u}) {
            if (D % s) continue;
            for (uint32_t a = 0; a < t.size(); ++a) {
                FqElem x(&t, D, a);
                FqElem prod = FqElem::one(&t, D), sum = FqElem::zero(&t, D);
                FqElem y = x;
                for (uint32_t i = 0; i < D / s; ++i) {
                    prod = prod * y;
                    sum = sum + y;
                    y = frobenius(y, s);
                }
                REQUIRE(norm_to(x, s).code() == prod.code());
                REQUIRE(trace_to(x, s).code() == sum.code());
            }
        }
    }
}

TEST_CASE("quadratic characters") {
    FieldTower t5(5, 1);
    CHECK(sgn(FqElem::one(&t5, 1)) == 1);
    CHECK(sgn(FqElem::from_int(&t5, 1, 2)) == -1);
    CHECK(sgn(FqElem::from_int(&t5, 1, 4)) == 1);
    CHECK_THROWS_AS(sgn(FqElem::zero(&t5, 1)), DomainError);

    FieldTower t(5, 4);
    FqElem g(&t, 4, t.exp(1));
    CHECK(sgn(g) == -1);
    CHECK(sgn(g * g) == 1);
    for (uint32_t a = 1; a < t.size(); a += 13)
        for (uint32_t b = 1; b < t.size(); b += 29) {
            FqElem x(&t, 4, a), y(&t, 4, b);
            REQUIRE(sgn(x) * sgn(y) == sgn(x * y));
        }
    // sgn on a sublayer agrees with the squares of that sublayer
    for (uint32_t a = 1; a < 25; ++a) {
        uint32_t code = t.exp(int64_t(a) * ((t.size() - 1) / 24));
        FqElem x(&t, 2, code);
        bool square = false;
        for (uint32_t b = 1; b < t.size(); ++b)
            if (t.in_layer(b, 2) && t.mul(b, b) == code) square = true;
        CHECK((sgn(x) == 1) == square);
    }

    FieldTower t9(3, 2);
    auto kernel = norm_one_subgroup(&t9, 2, 1);
    REQUIRE(kernel.size() == 4);
    FqElem gen = kernel[1];
    int order = 1;
    for (FqElem y = gen; y.code() != 1; y = y * gen) ++order;
    CHECK(order == 4);
    CHECK(sgn_norm_one(gen, 1) == -1);
    CHECK(sgn_norm_one(gen * gen, 1) == 1);
    CHECK(sgn_norm_one(FqElem::one(&t9, 2), 1) == 1);
    CHECK_THROWS_AS(sgn_norm_one(FqElem(&t9, 2, t9.exp(1)), 1), DomainError);
}

TEST_CASE("norm-one subgroups") {
    FieldTower t9(3, 2), t125(5, 3), t5(5, 1);
    CHECK(norm_one_subgroup(&t9, 2, 1).size() == 4);
    CHECK(norm_one_subgroup(&t125, 3, 1).size() == 31);
    CHECK(norm_one_subgroup(&t5, 1, 1).size() == 1);
    for (auto& x : norm_one_subgroup(&t125, 3, 1)) CHECK(norm_to(x, 1).code() == 1);
    FieldTower t(5, 4);
    CHECK(norm_one_subgroup(&t, 4, 2).size() == 26);
}

TEST_CASE("coordinates round trip and frobenius order") {
    FieldTower t(5, 4);
    for (uint32_t a = 0; a < t.size(); ++a) {
        FqElem x(&t, 4, a);
        REQUIRE(FqElem::from_coefficients(&t, 4, x.coefficients()) == x);
        REQUIRE(frobenius(x, 4) == x);
    }
    for (uint32_t a = 0; a < t.size(); ++a)
        if (t.in_layer(a, 2)) {
            FqElem x(&t, 2, a);
            REQUIRE(x.coefficients().size() == 2);
            REQUIRE(FqElem::from_coefficients(&t, 2, x.coefficients()) == x);
        }
    CHECK_THROWS_AS(FqElem(&t, 2, t.exp(1)), DomainError);
    CHECK_THROWS_AS(FieldTower(5, 11), CapacityError);
}
