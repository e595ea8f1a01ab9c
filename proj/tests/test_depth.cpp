/**
 * @file test_depth.cpp
 * @brief Unit tests for root orders, torus and Newton depths, goodness and discriminants.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "stf/depth.hpp"

using namespace stf;

namespace {

constexpr int64_t kPrec = 14;

LaurentElem random_unit(const FieldTower& t, uint32_t layer, std::mt19937_64& rng, int64_t start) {
    const uint64_t Q = t.layer_size(layer);
    const uint64_t step = (t.size() - 1) / (Q - 1);
    std::vector<uint32_t> c{1};
    for (int64_t k = 1; k < kPrec; ++k) {
        uint64_t r = rng() % Q;
        c.push_back(k < start || r == 0 ? 0 : t.exp(int64_t((r - 1) * step)));
    }
    // random residue unit
    c[0] = t.exp(int64_t((rng() % (Q - 1)) * step));
    if (start > 0) c[0] = 1;
    return LaurentElem::from_coefficients(&t, layer, 0, c, kPrec);
}

/** y/σ(y): a norm-one element, of depth at least `start` when start ≥ 1. */
LaurentElem random_norm_one(const FieldTower& t, uint32_t base, uint32_t layer, std::mt19937_64& rng,
                            int64_t start) {
    LaurentElem y = random_unit(t, layer, rng, start);
    return y * invert(galois(y, 1, base), kPrec);
}

}  // namespace

TEST_CASE("torus depth examples") {
    FieldTower t(5, 2);
    const uint32_t zeta = t.layer_generator(2);
    CHECK(torus_depth(LaurentElem::one(&t, 2), 1) == kInf);
    CHECK(torus_depth(LaurentElem::monomial(&t, 2, zeta, 0), 1) == 0);
    LaurentElem g = LaurentElem::one(&t, 2) + LaurentElem::monomial(&t, 2, zeta, 1);
    CHECK(torus_depth(g, 1) == 1);
    CHECK(is_good(g, 1, 1));
    CHECK_FALSE(is_good(g, 1, 2));
    CHECK_FALSE(is_good(LaurentElem::one(&t, 2), 1, 1));
    auto rov = root_orders(g, 1);
    CHECK(weyl_discriminant_exponent(rov) == 2);
    CHECK(q_power(5, -weyl_discriminant_exponent(rov)) == mpq_class(1, 25));
    CHECK_THROWS_AS(weyl_discriminant_exponent(root_orders(LaurentElem::one(&t, 2), 1)), DomainError);
}

TEST_CASE("good and non-good depth one elements in degree four") {
    FieldTower t(5, 4);
    const uint32_t u = t.layer_generator(2);  // in f_{q^2}: conjugates repeat with period 2
    const uint32_t v = t.layer_generator(4);
    LaurentElem g = LaurentElem::from_coefficients(&t, 4, 0, {1, u, v});
    auto rov = root_orders(g, 1);
    CHECK(torus_depth(g, 1) == 1);
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j)
            if (i != j) CHECK(rov.at(i, j) == ((i + j) % 2 == 0 ? 2 : 1));
    CHECK_FALSE(is_good(g, 1, 1));
    LaurentElem h = LaurentElem::from_coefficients(&t, 4, 0, {1, v});
    CHECK(is_good(h, 1, 1));
    // Levi restriction over blocks {0,2},{1,3}
    CHECK(levi_discriminant_exponent(rov, {0, 1, 0, 1}) == 4 * 2);
    CHECK(weyl_discriminant_exponent(rov) == 4 * 2 + 8 * 1);
}

TEST_CASE("Newton depth") {
    FieldTower t(5, 2);
    LMatrix g = identity_matrix(&t, 1, 2);
    g.at(0, 1) = LaurentElem::monomial(&t, 1, 1, 1);
    g.at(1, 0) = LaurentElem::monomial(&t, 1, 1, 1);
    CHECK(newton_depth(g) == 1);
    CHECK_THROWS_AS(newton_depth(identity_matrix(&t, 1, 2)), DomainError);
    LMatrix bad = g;
    bad.at(0, 0) = LaurentElem::monomial(&t, 1, 1, -1);
    CHECK_THROWS_AS(newton_depth(bad), DomainError);
}

TEST_CASE("Newton depth equals torus depth on random norm-one elements") {
    std::mt19937_64 rng(17);
    for (auto [p, n] : {std::pair{3u, 2u}, {5u, 3u}, {5u, 4u}}) {
        FieldTower t(p, n);
        for (int k = 0; k < 40; ++k) {
            LaurentElem g = random_norm_one(t, 1, n, rng, k % 4);
            const int64_t d = torus_depth(g, 1);
            if (d >= kInf) continue;
            CHECK(newton_depth(regular_matrix(g, 1)) == d);
            CHECK(central_twist_depth(g, 1, kPrec) == d);
            for (uint32_t i = 1; i < n; ++i) CHECK(torus_depth(galois(g, i, 1), 1) == d);
            // residue-field central twists never exceed the torus depth
            for (uint32_t z = 1; z < p; ++z) {
                LaurentElem zg = g.scaled(t.from_int(z));
                int64_t md = 0;
                try {
                    md = matrix_depth(regular_matrix(zg, 1));
                } catch (const DomainError&) {
                    md = -1;
                }
                CHECK(md <= d);
            }
        }
    }
}

TEST_CASE("discriminant of a Howe tower representative") {
    CHECK(discriminant_of_representative(3, {{3, 2}}) == 2 * 6);
    CHECK(discriminant_of_representative(5, {}) == 0);
    // two-step tower for n = 4 against direct root counts
    auto count_outside = [](uint32_t n, uint32_t deg) {
        int64_t c = 0;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = 0; j < n; ++j)
                if (i != j && (i % deg) != (j % deg)) ++c;
        return c;
    };
    for (uint32_t deg : {1u, 2u, 4u}) CHECK(roots_outside_subfield(4, deg) == count_outside(4, deg));
    const int64_t direct = 1 * (count_outside(4, 4) - count_outside(4, 2)) + 3 * (count_outside(4, 2) - 0);
    CHECK(discriminant_of_representative(4, {{4, 1}, {2, 3}}) == direct);
    CHECK_THROWS_AS(discriminant_of_representative(4, {{2, 1}, {4, 3}}), DomainError);
    CHECK_THROWS_AS(discriminant_of_representative(4, {{4, 3}, {2, 3}}), DomainError);
}

TEST_CASE("block elements") {
    FieldTower t(5, 6);
    const uint32_t z2 = t.layer_generator(2), z3 = t.layer_generator(3);
    BlockElement g;
    g.base_layer = 1;
    g.blocks = {LaurentElem::from_coefficients(&t, 2, 0, {1, z2}), LaurentElem::from_coefficients(&t, 1, 0, {2, 1})};
    CHECK(g.n() == 3);
    CHECK(g.splitting_layer() == 2);
    g.validate();
    CHECK(g.depth() == 0);
    const auto M = g.matrix();
    CHECK(M.n == 3);
    CHECK(M.at(2, 0).is_exact_zero());
    CHECK(g.block_of_index() == std::vector<size_t>{0, 0, 1});
    BlockElement h{{LaurentElem::from_coefficients(&t, 3, 0, {1, z3}), LaurentElem::one(&t, 2)}, 1};
    CHECK(h.splitting_layer() == 6);
    CHECK_THROWS_AS(h.validate(), DomainError);  // the degree-2 block 1 has equal conjugates
    BlockElement e{{LaurentElem::from_coefficients(&t, 3, 0, {1, 0, z3})}, 1};
    e.validate();
    CHECK(e.depth() == 2);
    CHECK(newton_depth(e.matrix()) == 2);
}
