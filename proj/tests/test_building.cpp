/**
 * @file test_building.cpp
 * @brief Unit tests for additive norms, canonical forms and parahoric membership.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "stf/building.hpp"

using namespace stf;

namespace {

constexpr int64_t kPrec = 30;

LaurentElem wpow(const FieldTower& t, int64_t k) { return LaurentElem::monomial(&t, 1, 1, k); }

LaurentElem random_scalar(const FieldTower& t, std::mt19937_64& rng, int64_t lo, int64_t hi) {
    const int64_t v = lo + int64_t(rng() % uint64_t(hi - lo + 1));
    std::vector<uint32_t> c;
    for (int k = 0; k < 3; ++k) c.push_back(uint32_t(rng() % t.p()));
    if (c[0] == 0) c[0] = 1;
    return LaurentElem::from_coefficients(&t, 1, v, c);
}

LMatrix random_matrix(const FieldTower& t, std::mt19937_64& rng, size_t n, int64_t lo, int64_t hi) {
    for (;;) {
        LMatrix g(n, LaurentElem::zero(&t, 1));
        for (auto& e : g.a)
            if (rng() % 4 != 0) e = random_scalar(t, rng, lo, hi);
        try {
            if (!determinant(g, kPrec).is_zero_class()) return g;
        } catch (const PrecisionError&) {
            // singular to working precision; draw again
        }
    }
}

/** Random element of the stabilizer of x_c: a product of fixing root elements and a unit diagonal. */
LMatrix random_parahoric(const FieldTower& t, std::mt19937_64& rng, const std::vector<int64_t>& c) {
    const size_t n = c.size();
    LMatrix g = identity_matrix(&t, 1, n);
    for (size_t i = 0; i < n; ++i) g.at(i, i) = random_scalar(t, rng, 0, 0);
    for (int k = 0; k < 6; ++k) {
        size_t i = rng() % n, j = rng() % n;
        if (i == j) continue;
        const int64_t m = (c[j] - c[i] + kOffsetDen - 1 + 10 * kOffsetDen) / kOffsetDen - 10;
        g = root_element(&t, 1, n, i, j, random_scalar(t, rng, m, m + 1)) * g;
    }
    return g;
}

std::vector<LaurentElem> random_vector(const FieldTower& t, std::mt19937_64& rng, size_t n) {
    std::vector<LaurentElem> v(n, LaurentElem::zero(&t, 1));
    for (auto& e : v)
        if (rng() % 3 != 0) e = random_scalar(t, rng, -2, 3);
    return v;
}

}  // namespace

TEST_CASE("evaluate examples") {
    FieldTower t(3, 1);
    auto x0 = standard_norm(&t, 1, {0, 0});
    CHECK(evaluate(x0, {LaurentElem::one(&t, 1), LaurentElem::zero(&t, 1)}, kPrec) == 0);
    auto x = standard_norm(&t, 1, {30, 0});
    CHECK(evaluate(x, {wpow(t, 1), LaurentElem::one(&t, 1) + wpow(t, 1)}, kPrec) == 0);
    CHECK(evaluate(x, {wpow(t, 1), LaurentElem::zero(&t, 1)}, kPrec) == 90);
    CHECK(evaluate(x, {LaurentElem::zero(&t, 1), LaurentElem::zero(&t, 1)}, kPrec) == kInf);
}

TEST_CASE("norm axioms on random triples") {
    FieldTower t(3, 1);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const size_t n = 2 + trial % 2;
        std::vector<int64_t> c(n);
        for (auto& ci : c) ci = int64_t(rng() % 181) - 60;
        AdditiveNorm x{random_matrix(t, rng, n, -1, 1), c};
        auto v = random_vector(t, rng, n), u = random_vector(t, rng, n);
        LaurentElem a = random_scalar(t, rng, -2, 2);
        std::vector<LaurentElem> av(n), sum(n);
        for (size_t i = 0; i < n; ++i) {
            av[i] = a * v[i];
            sum[i] = u[i] + v[i];
        }
        const int64_t xv = evaluate(x, v, kPrec), xu = evaluate(x, u, kPrec);
        if (xv < kInf) CHECK(evaluate(x, av, kPrec) == a.ord() * kOffsetDen + xv);
        CHECK(evaluate(x, sum, kPrec) >= std::min(xu, xv));
    }
}

TEST_CASE("action examples") {
    FieldTower t(5, 1);
    std::mt19937_64 rng(3);
    auto x0 = standard_norm(&t, 1, {0, 0});
    CHECK(norm_equal(act(identity_matrix(&t, 1, 2), x0), x0, kPrec));
    LMatrix g = random_matrix(t, rng, 2, -1, 2);
    CHECK(norm_equal(act(g, act(inverse(g, kPrec), x0)), x0, kPrec));
    LMatrix d = identity_matrix(&t, 1, 2);
    d.at(0, 0) = wpow(t, 1);
    auto y = act(d, x0);
    CHECK(evaluate(y, {LaurentElem::one(&t, 1), LaurentElem::zero(&t, 1)}, kPrec) == -60);
    CHECK(canonicalize(y).offsets == std::vector<int64_t>{0, 0});
    LMatrix z(2, LaurentElem::zero(&t, 1));
    CHECK_THROWS_AS(act(z, x0), DomainError);
    // (g·x)(v) = x(g^{-1}v)
    for (int k = 0; k < 20; ++k) {
        auto v = random_vector(t, rng, 2);
        LMatrix gi = inverse(g, kPrec);
        std::vector<LaurentElem> w(2, LaurentElem::zero(&t, 1));
        for (size_t i = 0; i < 2; ++i)
            for (size_t j = 0; j < 2; ++j) w[i] = w[i] + gi.at(i, j) * v[j];
        CHECK(evaluate(act(g, x0), v, kPrec) == evaluate(x0, w, kPrec));
    }
}

TEST_CASE("canonical forms") {
    FieldTower t(3, 1);
    auto x = standard_norm(&t, 1, {90, 18});
    CHECK(canonicalize(x).offsets == std::vector<int64_t>{30, 18});
    std::mt19937_64 rng(5);
    const std::vector<std::vector<int64_t>> bases = {{0, 0, 0}, {30, 18, 18}, {45, 20, 0}, {-70, 130, 5}};
    for (const auto& c : bases) {
        AdditiveNorm base{random_matrix(t, rng, 3, -1, 1), c};
        const auto ref = canonicalize(base);
        CHECK(in_fundamental_simplex(ref.offsets));
        CHECK(norm_equal(act(ref.witness, standard_norm(&t, 1, ref.offsets)), base, kPrec));
        for (int k = 0; k < 20; ++k) {
            auto y = act(random_matrix(t, rng, 3, -2, 2), base);
            auto cf = canonicalize(y);
            CHECK(cf.offsets == ref.offsets);
            CHECK(norm_equal(act(cf.witness, standard_norm(&t, 1, cf.offsets)), y, kPrec));
        }
    }
}

TEST_CASE("parahoric membership") {
    FieldTower t(3, 1);
    std::mt19937_64 rng(9);
    const std::vector<int64_t> c0{0, 0};
    CHECK(parahoric_member(c0, identity_matrix(&t, 1, 2), kPrec));
    LMatrix u = identity_matrix(&t, 1, 2);
    u.at(0, 1) = wpow(t, -1);
    CHECK_FALSE(parahoric_member(c0, u, kPrec));
    CHECK_THROWS_AS(parahoric_member({10, 20}, u, kPrec), DomainError);
    const std::vector<std::vector<int64_t>> points = {{0, 0, 0}, {30, 18, 18}, {40, 40, 0}};
    for (const auto& c : points) {
        int members = 0;
        for (int k = 0; k < 120; ++k) {
            LMatrix g = (k % 2) ? random_parahoric(t, rng, c) : random_matrix(t, rng, 3, 0, 1);
            const bool block = parahoric_member(c, g, kPrec);
            CHECK(block == stabilizes(c, g, kPrec));
            members += block;
            if (block) {
                auto f = factor_parahoric(c, g, kPrec);
                for (const auto& [i, j, a] : f.roots) {
                    AffineRoot psi{i, j, a.is_zero_class() ? 0 : a.ord()};
                    CHECK(half_plane_fixes(psi, c));
                }
                for (size_t i = 0; i < 3; ++i) CHECK(f.diagonal.at(i, i).ord() == 0);
                LMatrix back = expand(f);
                for (size_t i = 0; i < 9; ++i) CHECK(back.a[i].congruent(g.a[i]));
            }
        }
        CHECK(members > 30);
    }
}

TEST_CASE("Moy-Prasad filtration") {
    FieldTower t(5, 1);
    std::mt19937_64 rng(21);
    const std::vector<int64_t> c0{0, 0};
    LMatrix one = identity_matrix(&t, 1, 2);
    CHECK(mp_group_member(c0, one, 120, false, kPrec));
    CHECK(mp_group_member(c0, one, 120, true, kPrec));
    LMatrix u = root_element(&t, 1, 2, 0, 1, wpow(t, 1));
    CHECK(mp_group_member(c0, u, 60, false, kPrec));
    CHECK_FALSE(mp_group_member(c0, u, 60, true, kPrec));
    CHECK(mp_group_member(c0, u, 30, false, kPrec));
    CHECK_FALSE(mp_group_member(c0, u, 61, false, kPrec));
    LMatrix zero(2, LaurentElem::zero(&t, 1));
    CHECK(mp_lie_member(c0, zero, 600, true));
    LMatrix d = identity_matrix(&t, 1, 2);
    d.at(0, 0) = wpow(t, 2);
    d.at(1, 1) = wpow(t, 2).scaled(3);
    for (int64_t r = 0; r <= 180; r += 30) CHECK(mp_lie_member(c0, d, r, false) == (r <= 120));
    for (int k = 0; k < 50; ++k) {
        LMatrix X = random_matrix(t, rng, 2, 1, 3);
        for (int64_t r : {30, 60, 90, 120}) CHECK(mp_group_member(c0, X + one, r, false, kPrec) == mp_lie_member(c0, X, r, false));
    }
    CHECK(mp_iso(c0, one, 60, kPrec).a[0].is_exact_zero());
    CHECK(mp_iso_inv(c0, zero, 60).a[0] == LaurentElem::one(&t, 1));
    CHECK_THROWS_AS(mp_iso(c0, u, 90, kPrec), DomainError);
    // Group closure at a non-special point.
    const std::vector<int64_t> c{40, 10};
    for (int k = 0; k < 30; ++k) {
        LMatrix a = one, b = one;
        a.at(0, 1) = random_scalar(t, rng, 1, 2);
        a.at(1, 0) = random_scalar(t, rng, 1, 2);
        a.at(0, 0) = LaurentElem::one(&t, 1) + random_scalar(t, rng, 1, 2);
        b.at(1, 0) = random_scalar(t, rng, 2, 3);
        b.at(1, 1) = LaurentElem::one(&t, 1) + random_scalar(t, rng, 1, 2);
        REQUIRE(mp_group_member(c, a, 30, false, kPrec));
        REQUIRE(mp_group_member(c, b, 30, false, kPrec));
        CHECK(mp_group_member(c, a * b, 30, false, kPrec));
        CHECK(mp_group_member(c, inverse(a, kPrec), 30, false, kPrec));
        LMatrix rt = mp_iso_inv(c, mp_iso(c, a, 30, kPrec), 30);
        CHECK(mp_group_member(c, inverse(a, kPrec) * rt, 60, false, kPrec));
    }
}

TEST_CASE("affine roots") {
    FieldTower t(3, 1);
    std::mt19937_64 rng(4);
    LMatrix u0 = root_element(&t, 1, 2, 0, 1, LaurentElem::zero(&t, 1));
    for (int64_t m = -3; m <= 3; ++m) CHECK(affine_root_member(AffineRoot{0, 1, m}, u0));
    LMatrix u1 = root_element(&t, 1, 2, 0, 1, wpow(t, 1));
    CHECK(affine_root_member(AffineRoot{0, 1, 1}, u1));
    CHECK_FALSE(affine_root_member(AffineRoot{0, 1, 2}, u1));
    CHECK_THROWS_AS(affine_root_member(AffineRoot{1, 0, 0}, u1), DomainError);
    CHECK(AffineRoot{0, 1, 1}.evaluate({30, 12}) == 78);
    for (int k = 0; k < 100; ++k) {
        const int64_t m = int64_t(rng() % 5) - 2;
        std::vector<int64_t> c{int64_t(rng() % 121) - 60, int64_t(rng() % 121) - 60};
        AffineRoot psi{0, 1, m};
        LMatrix u = root_element(&t, 1, 2, 0, 1, random_scalar(t, rng, m, m));
        REQUIRE(affine_root_member(psi, u));
        AdditiveNorm x{identity_matrix(&t, 1, 2), c};
        bool fixes = true;
        for (int s = 0; s < 10; ++s) {
            auto v = random_vector(t, rng, 2);
            std::vector<LaurentElem> uv{u.at(0, 0) * v[0] + u.at(0, 1) * v[1], v[1]};
            if (evaluate(x, uv, kPrec) != evaluate(x, v, kPrec)) fixes = false;
        }
        if (half_plane_fixes(psi, c)) CHECK(fixes);
        CHECK(half_plane_fixes(psi, c) == norm_equal(act(u, x), x, kPrec));
    }
}
