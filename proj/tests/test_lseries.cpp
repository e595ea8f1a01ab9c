/**
 * @file test_lseries.cpp
 * @brief Unit tests for truncated Laurent series, matrices over F and cyclotomic numbers.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "stf/cyclotomic.hpp"
#include "stf/lseries.hpp"

using namespace stf;

namespace {

LaurentElem random_elem(const FieldTower& t, uint32_t layer, std::mt19937_64& rng, int64_t v,
                        int64_t prec, bool unit_lead = true) {
    const uint64_t Q = t.layer_size(layer);
    const uint64_t step = (t.size() - 1) / (Q - 1);
    std::vector<uint32_t> c;
    for (int64_t k = v; k < prec; ++k) {
        uint64_t r = rng() % Q;
        uint32_t code = r == 0 ? 0 : t.exp(int64_t((r - 1) * step));
        if (k == v && unit_lead && code == 0) code = 1;
        c.push_back(code);
    }
    return LaurentElem::from_coefficients(&t, layer, v, c, prec);
}

LaurentElem w(const FieldTower& t, uint32_t layer, int64_t k = 1) {
    return LaurentElem::monomial(&t, layer, 1, k);
}

}  // namespace

TEST_CASE("valuation examples") {
    FieldTower t(5, 3);
    CHECK((w(t, 1, 2) + w(t, 1, 5)).ord() == 2);
    CHECK(LaurentElem::one(&t, 1).ord() == 0);
    LaurentElem u = LaurentElem::from_coefficients(&t, 3, -3, {t.exp(7), 1, 2});
    CHECK(u.ord() == -3);
    CHECK(LaurentElem::zero(&t, 1).ord() == kInf);
    LaurentElem unresolved = LaurentElem::zero(&t, 1, 6);
    CHECK_THROWS_AS(unresolved.ord(), PrecisionError);
    LaurentElem x = LaurentElem::one(&t, 1, 4) - LaurentElem::one(&t, 1);
    CHECK(x.is_zero_class());
    CHECK_THROWS_AS(x.ord(), PrecisionError);
}

TEST_CASE("precision propagation") {
    FieldTower t(5, 3);
    LaurentElem a = LaurentElem::one(&t, 1, 8), b = w(t, 1, 2).truncated(5);
    CHECK((a + b).precision() == 5);
    CHECK((a * b).precision() == std::min(0 + 5, 2 + 8));
    LaurentElem exact = w(t, 1, 3);
    CHECK((exact * a).precision() == 11);
    CHECK((exact * exact).is_exact());
}

TEST_CASE("inversion") {
    FieldTower t(5, 3);
    LaurentElem x = LaurentElem::one(&t, 1) + w(t, 1);
    LaurentElem y = invert(x, 6);
    CHECK(to_text(y) == "1 + 4*w^1 + w^2 + 4*w^3 + w^4 + 4*w^5 (prec 6)");
    CHECK(invert(w(t, 1), 10) == w(t, 1, -1));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        LaurentElem u = random_elem(t, 3, rng, int64_t(rng() % 5) - 2, 9);
        LaurentElem prod = u * invert(u, 0);
        CHECK(prod.congruent(LaurentElem::one(&t, 3)));
        CHECK(prod.precision() == u.precision() - u.ord());
    }
    CHECK_THROWS_AS(invert(LaurentElem::zero(&t, 1, 5), 5), PrecisionError);
}

TEST_CASE("valuation is additive and ultrametric on random elements") {
    FieldTower t(5, 4);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        LaurentElem x = random_elem(t, 4, rng, int64_t(rng() % 7) - 3, 10);
        LaurentElem y = random_elem(t, 4, rng, int64_t(rng() % 7) - 3, 10);
        CHECK((x * y).ord() == x.ord() + y.ord());
        LaurentElem s = x + y;
        if (!s.is_zero_class()) {
            CHECK(s.ord() >= std::min(x.ord(), y.ord()));
            if (x.ord() != y.ord()) CHECK(s.ord() == std::min(x.ord(), y.ord()));
        }
    }
}

TEST_CASE("galois action") {
    FieldTower t(5, 4);
    std::mt19937_64 rng(3);
    LaurentElem rational = random_elem(t, 2, rng, 0, 8).embed(4);
    CHECK(galois(rational, 1, 2) == rational);
    for (int i = 0; i < 50; ++i) {
        LaurentElem x = random_elem(t, 4, rng, 0, 8), y = random_elem(t, 4, rng, -1, 8);
        CHECK(galois(x, 2, 2) == x);
        CHECK(galois(x * y, 1, 1) == galois(x, 1, 1) * galois(y, 1, 1));
        LaurentElem N = x * galois(x, 1, 2);
        CHECK_NOTHROW(N.restrict_to(2));
    }
}

TEST_CASE("norm and trace") {
    FieldTower t(5, 4);
    CHECK(norm_E_to_M(LaurentElem::one(&t, 4), 1) == LaurentElem::one(&t, 1));
    CHECK(norm_E_to_M(w(t, 4), 2) == w(t, 2, 2));
    CHECK(norm_E_to_M(w(t, 4), 1) == w(t, 1, 4));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        LaurentElem x = random_elem(t, 4, rng, 0, 7);
        LaurentElem prod = x, sum = x;
        for (int s = 1; s < 4; ++s) {
            prod = prod * galois(x, s, 1);
            sum = sum + galois(x, s, 1);
        }
        CHECK(norm_E_to_M(x, 1).congruent(prod.restrict_to(1)));
        CHECK(trace_E_to_M(x, 1) == sum.restrict_to(1));
        CHECK(norm_E_to_M(norm_E_to_M(x, 2), 1).congruent(norm_E_to_M(x, 1)));
    }
}

TEST_CASE("regular representation") {
    FieldTower t(5, 3);
    LMatrix I = regular_matrix(LaurentElem::one(&t, 3), 1);
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j) CHECK(I.at(i, j) == (i == j ? LaurentElem::one(&t, 1) : LaurentElem::zero(&t, 1)));
    LMatrix W = regular_matrix(w(t, 3), 1);
    for (size_t i = 0; i < 3; ++i) CHECK(W.at(i, i) == w(t, 1));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 30; ++i) {
        LaurentElem g1 = random_elem(t, 3, rng, 0, 8), g2 = random_elem(t, 3, rng, 0, 8);
        LMatrix M1 = regular_matrix(g1, 1), M2 = regular_matrix(g2, 1);
        CHECK(determinant(M1, 8).congruent(norm_E_to_M(g1, 1)));
        LMatrix M12 = regular_matrix(g1 * g2, 1), P = M1 * M2;
        for (size_t k = 0; k < 9; ++k) CHECK(M12.a[k].congruent(P.a[k]));
        // the characteristic polynomial vanishes at every conjugate of g1
        auto c = characteristic_polynomial(M1);
        for (int s = 0; s < 3; ++s) {
            LaurentElem root = galois(g1, s), acc = LaurentElem::zero(&t, 3);
            for (size_t k = c.size(); k-- > 0;) acc = acc * root + c[k].embed(3);
            CHECK(acc.is_zero_class());
        }
    }
}

TEST_CASE("head and tail") {
    FieldTower t(5, 3);
    LaurentElem deep = LaurentElem::one(&t, 3) + w(t, 3, 3).scaled(t.exp(5));
    auto [h1, t1] = head_tail_split(deep, 3, 10);
    CHECK(h1 == LaurentElem::one(&t, 3));
    CHECK(t1 == deep);
    LaurentElem shallow = LaurentElem::from_coefficients(&t, 3, 0, {t.exp(2), t.exp(9)});
    auto [h2, t2] = head_tail_split(shallow, 3, 10);
    CHECK(h2 == shallow);
    CHECK(t2.congruent(LaurentElem::one(&t, 3)));
    std::mt19937_64 rng(13);
    for (int i = 0; i < 40; ++i) {
        LaurentElem g = random_elem(t, 3, rng, 0, 9);
        int64_t r = 1 + int64_t(rng() % 5);
        auto [h, tl] = head_tail_split(g, r, 9);
        CHECK((h * tl).congruent(g));
        LaurentElem tm1 = tl - LaurentElem::one(&t, 3);
        if (!tm1.is_zero_class()) CHECK(tm1.ord() >= r);
        CHECK(h.support_end() <= r);
    }
}

TEST_CASE("text syntax round trip") {
    FieldTower t(5, 2);
    LaurentElem x = parse_laurent("1 + g^2*w^1 + w^3 (prec 8)", &t, 2);
    CHECK(x.precision() == 8);
    CHECK(to_text(x) == "1 + g^2*w^1 + w^3 (prec 8)");
    CHECK(to_text(parse_laurent("w^-3 + 3*w^-1", &t, 2)) == "w^-3 + 3*w^-1");
    CHECK(to_text(parse_laurent("0 (prec 5)", &t, 2)) == "0 (prec 5)");
    CHECK(to_text(parse_laurent("0", &t, 2)) == "0");
    CHECK(to_text(parse_laurent("-1 + w", &t, 2)) == "4 + w^1");
    CHECK(to_text(parse_laurent("g^12", &t, 2)) == "4");  // g^12 = −1 in F_25
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        LaurentElem y = random_elem(t, 2, rng, int64_t(rng() % 9) - 4, 6, false);
        CHECK(parse_laurent(to_text(y), &t, 2) == y);
        CHECK(to_text(parse_laurent(to_text(y), &t, 2)) == to_text(y));
    }
    CHECK_THROWS_AS(parse_laurent("1 + ", &t, 2), ParseError);
    CHECK_THROWS_AS(parse_laurent("1 + x^2", &t, 2), ParseError);
    CHECK_THROWS_AS(parse_laurent("1 (precision 4)", &t, 2), ParseError);
    CHECK_THROWS_AS(parse_laurent("", &t, 2), ParseError);
}

TEST_CASE("cyclotomic numbers") {
    CHECK(cyclotomic_polynomial(1) == std::vector<int64_t>{-1, 1});
    CHECK(cyclotomic_polynomial(6) == std::vector<int64_t>{1, -1, 1});
    CHECK(cyclotomic_polynomial(12) == std::vector<int64_t>{1, 0, -1, 0, 1});
    CHECK(cyclotomic_polynomial(15).size() == 9);
    // the sum of all m-th roots of unity vanishes; partial sums over a subgroup do too
    for (uint64_t m : {2u, 3u, 4u, 12u, 30u, 156u}) {
        CycNumber s;
        for (uint64_t k = 0; k < m; ++k) s += CycNumber::root_of_unity(m, int64_t(k));
        CHECK(s.is_zero());
    }
    CycNumber z5 = CycNumber::root_of_unity(5, 1), z3 = CycNumber::root_of_unity(3, 1);
    CHECK(z5 * z5 * z5 * z5 * z5 == CycNumber(1));
    CHECK((z5 * z3) == CycNumber::root_of_unity(15, 8));
    CHECK((z3 + z3 * z3) == CycNumber(-1));
    CHECK(CycNumber::root_of_unity(4, 1) * CycNumber::root_of_unity(4, 1) == CycNumber(-1));
    CycNumber half(mpq_class(1, 2));
    CHECK((half + half) == CycNumber(1));
    CHECK((z5 * CycNumber(mpq_class(2, 3))).denominator() == 3);
    CHECK(CycNumber(mpq_class(6, 4)).to_string() == "3/2");
    CHECK_THROWS_AS(z5.to_rational(), DomainError);
    std::vector<int64_t> hist(12, 0);
    hist[0] = 2;
    hist[6] = 2;  // 2 + 2ζ^6 = 0
    CHECK(CycNumber::from_histogram(12, hist).is_zero());
    // Gauss sum for p = 5: (Σ_{squares} − Σ_{non-squares}) ζ_5^a squares to 5
    CycNumber g = z5 + CycNumber::root_of_unity(5, 4) - CycNumber::root_of_unity(5, 2) -
                  CycNumber::root_of_unity(5, 3);
    CHECK(g * g == CycNumber(5));
}
