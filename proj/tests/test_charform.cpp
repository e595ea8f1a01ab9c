/**
 * @file test_charform.cpp
 * @brief Unit tests for nilpotent orbits, expansion terms, ε signs and the character formulas.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stf/charform.hpp"

using namespace stf;

namespace {

constexpr int64_t kPrec = 12;

/** A trace-zero residue generating the full layer. */
uint32_t generating_trace_zero(const FieldTower& t, uint32_t layer) {
    for (auto b : trace_kernel_basis(&t, layer, 1))
        if (t.min_layer(b) == layer) return b;
    for (uint64_t i = 1; i < t.size(); ++i) {
        const uint32_t x = t.exp(int64_t(i));
        if (t.in_layer(x, layer) && t.trace(x, layer, 1) == 0 && t.min_layer(x) == layer) return x;
    }
    throw DomainError("no generating trace-zero element");
}

}  // namespace

TEST_CASE("orbit dimensions agree for every partition up to 8") {
    for (uint32_t n = 1; n <= 8; ++n)
        for (const auto& part : partitions(n)) {
            NilOrbit o(part);
            CHECK(o.dim() == o.dim_from_jordan_type());
            CHECK(dual_partition(o.jordan_type()) == o.levi);
            CHECK(o.dim() >= 0);
        }
    CHECK(partitions(5).size() == 7);
    CHECK(partitions(8).size() == 22);
    CHECK(NilOrbit({3}).dim() == 0);
    CHECK(NilOrbit({1, 1, 1}).dim() == 6);
    CHECK(orbit_leq(NilOrbit({3}), NilOrbit({2, 1})));
    CHECK_FALSE(orbit_leq(NilOrbit({2, 1}), NilOrbit({3})));
    CHECK(merge_matchings(NilOrbit({1, 1, 1}), {1, 1, 1}) == 6);
}

TEST_CASE("admissible orbits by merging block degrees") {
    FieldTower t(5, 6);
    const uint32_t z3 = t.layer_generator(3), z2 = t.layer_generator(2);
    BlockElement elliptic{{LaurentElem::from_coefficients(&t, 3, 0, {z3})}, 1};
    CHECK(admissible_orbits(elliptic) == std::vector<NilOrbit>{NilOrbit({3})});
    BlockElement split{{LaurentElem::from_coefficients(&t, 1, 0, {1}), LaurentElem::from_coefficients(&t, 1, 0, {2}),
                        LaurentElem::from_coefficients(&t, 1, 0, {3})},
                       1};
    CHECK(admissible_orbits(split).size() == 3);
    BlockElement mixed{{LaurentElem::from_coefficients(&t, 2, 0, {z2}), LaurentElem::from_coefficients(&t, 1, 0, {1})},
                       1};
    CHECK(admissible_orbits(mixed) == std::vector<NilOrbit>{NilOrbit({3}), NilOrbit({2, 1})});
}

TEST_CASE("symmetric roots") {
    for (uint32_t n = 2; n <= 8; ++n) {
        RootRealization r{n};
        CHECK(r.symmetric_count() == (n % 2 == 0 ? n : 0));
        size_t total = 0;
        for (const auto& o : r.orbits()) total += o.size();
        CHECK(total == size_t(n) * (n - 1));
    }
}

TEST_CASE("local character expansion terms") {
    FieldTower t(5, 6);
    const mpz_class q = 5;
    // split regular element with all root orders 1
    BlockElement split{{LaurentElem::from_coefficients(&t, 1, 0, {1, 0}), LaurentElem::from_coefficients(&t, 1, 0, {1, 1}),
                        LaurentElem::from_coefficients(&t, 1, 0, {1, 2})},
                       1};
    CHECK(split.depth() == 1);
    const NilOrbit regular({1, 1, 1});
    // 3·(−1)^{3+3−1}·2!·q^{½·6·1}
    CHECK(lce_term(regular, 0, split, SignConvention::Table) == -3 * 2 * 125);
    CHECK(lce_term(regular, 2, split, SignConvention::Table) == lce_term(regular, 0, split, SignConvention::Table));
    CHECK(lce_term(regular, 0, split, SignConvention::Raw) == 3 * 2 * 125);
    // zero orbit: n(−1)^n q^{d(ψ)(n²−n)/2}
    const NilOrbit zero({3});
    CHECK(lce_term(zero, 1, split, SignConvention::Table) == -3 * 125);
    CHECK(lce_term(zero, 1, split, SignConvention::Raw) == 3 * 125);
    // row 3 sums the admissible orbits; row 4 vanishes
    const mpq_class row3 = theta_table_off_torus(0, split, SignConvention::Table);
    mpq_class manual = 0;
    for (const auto& o : admissible_orbits(split)) manual += lce_term(o, 0, split, SignConvention::Table);
    CHECK(row3 == manual);
    CHECK(theta_table_off_torus(1, split, SignConvention::Table) == 0);
    CHECK(table_row_off_torus(1, split) == TableRow::OffTorusFar);
    // the zero-orbit term matches row 2 of the table for a character blind to γ
    for (int64_t r = 0; r < 3; ++r) CHECK(lce_term(zero, r, split, SignConvention::Table) == 3 * table_coefficient(3, q, r, r + 1));
}

TEST_CASE("epsilon signs") {
    FieldTower t(3, 2);
    const uint32_t u = t.exp(1);  // generator of f_9^×
    LaurentElem head = LaurentElem::from_coefficients(&t, 2, 0, {u});
    CHECK(epsilon_r(head, 1, 1, 2, 1) == 1);
    CHECK(epsilon_r(head, 1, 2, 2, 1) == -1);
    CHECK(epsilon_r(galois(head, 1, 1), 1, 2, 2, 1) == -1);
    // norm-one residues are squares in the norm-one group
    LaurentElem norm_one = LaurentElem::from_coefficients(&t, 2, 0, {t.exp(2)});
    CHECK(epsilon_r(norm_one, 1, 2, 2, 1) == 1);

    // sign factor of the tower: n = 2, one step of depth r = 1, d(γ) = 2
    const uint32_t b = generating_trace_zero(t, 2);
    LaurentElem g = lift_norm_one(&t, 2, 1, 2, b, kPrec);
    CHECK(torus_depth(g, 1) == 2);
    CHECK(epsilon_psi({{2, 1}}, g, 1, SignConvention::Raw) == -1);
    CHECK(epsilon_psi({{2, 1}}, g, 1, SignConvention::Table) == 1);
    CHECK(epsilon_psi({{2, 3}}, g, 1, SignConvention::Table) == -1);
    CHECK(epsilon_psi({{2, 2}}, g, 1, SignConvention::Table) == 1);

    // n odd: only the ε^r factors
    FieldTower t5(5, 3);
    const uint32_t b3 = generating_trace_zero(t5, 3);
    LaurentElem g3 = lift_norm_one(&t5, 3, 1, 1, b3, kPrec);
    for (int64_t r = 0; r < 4; ++r)
        CHECK(epsilon_psi({{3, r}}, g3, 1, SignConvention::Raw) == epsilon_psi({{3, r}}, g3, 1, SignConvention::Table));
}

TEST_CASE("character table on the torus") {
    FieldTower t(3, 2);
    TorusQuotient Q({&t, 1, 2, TorusKind::NormOne}, 3);
    const uint32_t b = generating_trace_zero(t, 2);
    LaurentElem g = lift_norm_one(&t, 2, 1, 1, b, kPrec);
    ProbeLayout layout(Q);
    int seen = 0;
    for_each_character(Q, layout.probes(), [&](const std::vector<int64_t>& a, const int64_t* v) {
        const int64_t d = layout.depth(v);
        if (d != 0) return;
        Character psi{a};
        CHECK(theta_table(Q, psi, g) == galois_orbit_sum(Q, psi, g));
        ++seen;
    });
    CHECK(seen == 3);

    FieldTower t5(5, 3);
    TorusQuotient Q5({&t5, 1, 3, TorusKind::NormOne}, 3);
    const uint32_t b3 = generating_trace_zero(t5, 3);
    LaurentElem g2 = lift_norm_one(&t5, 3, 1, 2, b3, kPrec);
    ProbeLayout layout5(Q5);
    int checked = 0;
    for_each_character(Q5, layout5.probes(), [&](const std::vector<int64_t>& a, const int64_t* v) {
        if (layout5.depth(v) != 1 || checked >= 20) return;
        Character psi{a};
        CHECK(theta_table(Q5, psi, g2) == CycNumber(-3 * 125));
        ++checked;
    });
    CHECK(checked == 20);
}

TEST_CASE("conjectural formula matches the table on the torus") {
    for (auto [p, ell] : {std::pair{3u, 2u}, {5u, 3u}}) {
        FieldTower t(p, ell);
        TorusQuotient Q({&t, 1, ell, TorusKind::NormOne}, 3);
        const uint32_t b = generating_trace_zero(t, ell);
        std::vector<LaurentElem> gammas{LaurentElem::from_coefficients(&t, ell, 0, {t.exp(int64_t(p - 1))}, kPrec)};
        for (int64_t d = 1; d <= 3; ++d) gammas.push_back(lift_norm_one(&t, ell, 1, d, b, kPrec));
        ProbeLayout layout(Q);
        int count = 0;
        for_each_character(Q, layout.probes(), [&](const std::vector<int64_t>& a, const int64_t* v) {
            if (layout.depth(v) < 0 || (++count % 7)) return;
            Character psi{a};
            for (const auto& g : gammas) {
                if (torus_depth(g, 1) >= kInf) continue;
                CHECK(theta_conjecture(Q, psi, g) == theta_table(Q, psi, g));
            }
        });
    }
}

TEST_CASE("constant term") {
    const mpz_class q = 5;
    CHECK(constant_term(3, q, {{3, 2}}) == 3 * q_power(q, 3 * 2 * 2 / 2));
    CHECK(constant_term(4, q, {}) == 4);
    const std::vector<HoweStep> tower{{4, 1}, {2, 3}};
    CHECK(constant_term(4, q, tower) == 4 * q_power(q, discriminant_of_representative(4, tower) / 2));
    CHECK(parse_sign_convention("raw") == SignConvention::Raw);
    CHECK_THROWS_AS(parse_sign_convention("other"), ParseError);
}
