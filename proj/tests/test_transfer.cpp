/**
 * @file test_transfer.cpp
 * @brief Unit tests for the transfer factor: brute sums, closed forms, pairings and strata.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stf/transfer.hpp"

using namespace stf;

namespace {

constexpr int64_t kPrec = 12;

/** All residues of f_E with trace zero down to f. */
std::vector<uint32_t> trace_zero_residues(const TorusSpec& s) {
    const FieldTower& t = *s.tower;
    std::vector<uint32_t> out{0};
    for (uint64_t i = 0; i + 1 < t.size(); ++i) {
        const uint32_t x = t.exp(int64_t(i));
        if (t.in_layer(x, s.layer()) && t.trace(x, s.layer(), s.base_layer) == 0) out.push_back(x);
    }
    return out;
}

}  // namespace

TEST_CASE("counting helpers") {
    const mpz_class q = 5;
    CHECK(torus_quotient_order(3, q, 0) == 1);
    CHECK(torus_quotient_order(3, q, 1) == 31);
    CHECK(torus_quotient_order(3, q, 3) == 31 * 625);
    // Σ_m S_m(k) over all strata of T/T_R is |T/T_R|[x ∈ T_R] − 1
    for (int64_t k : {int64_t(0), int64_t(1), int64_t(2), kInf}) {
        mpz_class s = 0;
        for (int64_t m = 0; m < 3; ++m) s += stratum_sum(3, q, m, k);
        CHECK(s == (k >= 3 ? torus_quotient_order(3, q, 3) - 1 : mpz_class(-1)));
    }
    CHECK(primitive_trace_zero_count(1, q) == 1);
    CHECK(primitive_trace_zero_count(2, q) == 4);
}

TEST_CASE("good elements and twists") {
    FieldTower t(5, 3);
    TorusSpec s{&t, 1, 3, TorusKind::NormOne};
    for (int64_t d = 0; d <= 3; ++d)
        for (uint64_t i = 0; i < 3; ++i) {
            const LaurentElem g = good_element(s, d, i, kPrec);
            CHECK(torus_depth(g, 1) == d);
            CHECK(is_good(g, 1, d));
            CHECK(norm_E_to_M(g, 1).truncated(kPrec - 1) == LaurentElem::one(&t, 1).truncated(kPrec - 1));
        }
    const LaurentElem g = good_element(s, 1, 0, kPrec);
    const PairGeometry geo = pair_geometry(s, g, near_twist(s, g, 2, 3, 0, kPrec));
    CHECK(geo.nearly_conjugate);
    CHECK(geo.conjugate_index == -1);
    CHECK(geo.levels[2] == 3);
    CHECK(pair_geometry(s, g, galois(g, 1, 1)).conjugate_index == 1);
}

TEST_CASE("prime-degree anchors") {
    FieldTower t(5, 3);
    TorusSpec s{&t, 1, 3, TorusKind::NormOne};
    const LaurentElem g = good_element(s, 2, 0, kPrec);
    const BruteResult at0 = brute_L(s, g, good_element(s, 0, 0, kPrec), {});
    const BruteResult at1 = brute_L(s, g, good_element(s, 1, 0, kPrec), {});
    CHECK(at0.value.smooth == CycNumber(3));
    CHECK(at1.value.smooth == CycNumber(11535));
    CHECK(at1.report.certified);
    CHECK(at1.report.vanishing_from <= 3);
    CHECK(closed_L_prime(s, g, good_element(s, 0, 0, kPrec)).value.smooth == CycNumber(3));
    const PrimeClosedForm c1 = closed_L_prime(s, g, good_element(s, 1, 0, kPrec));
    CHECK(c1.value.smooth == CycNumber(11535));
    CHECK(c1.packaged_applies);
    // the packaged form with the opposite C_T sign differs from the finite sum by ℓ(−1)^ℓ|T(f)|
    CHECK(c1.diff_flipped == -93);
    CHECK(closed_L_prime(s, g, good_element(s, 0, 0, kPrec)).diff_flipped == -93);
    CHECK(c1.diff != 0);

    TransferOptions tight;
    tight.depth_cap = 1;
    CHECK_THROWS_AS(brute_L(s, g, good_element(s, 1, 0, kPrec), tight), StabilizationError);
}

TEST_CASE("Galois symmetry and worker independence") {
    FieldTower t(5, 3);
    TorusSpec s{&t, 1, 3, TorusKind::NormOne};
    const LaurentElem g = good_element(s, 2, 1, kPrec), u = good_element(s, 1, 2, kPrec);
    const CycNumber base = brute_L(s, g, u, {}).value.smooth;
    CHECK(brute_L(s, galois(g, 1, 1), u, {}).value.smooth == base);
    CHECK(brute_L(s, g, galois(u, 2, 1), {}).value.smooth == base);
    TransferOptions par;
    par.jobs = 3;
    const BruteResult p = brute_L(s, g, u, par);
    CHECK(p.value.smooth == base);
    CHECK(p.report.strata == brute_L(s, g, u, {}).report.strata);
}

TEST_CASE("nearly conjugate and stably conjugate pairs in odd degree") {
    FieldTower t(5, 3);
    TorusSpec s{&t, 1, 3, TorusKind::NormOne};
    const LaurentElem g = good_element(s, 1, 0, kPrec);
    const CycNumber generic = brute_L(s, g, good_element(s, 1, 1, kPrec), {}).value.smooth;
    CHECK_FALSE(pair_geometry(s, g, good_element(s, 1, 1, kPrec)).nearly_conjugate);
    for (int64_t M : {2, 3}) {
        const LaurentElem h = near_twist(s, g, 1, M, 0, kPrec);
        CHECK(brute_L(s, g, h, {}).value.smooth == generic);
        CHECK(closed_L_prime(s, g, h).value.smooth == generic);
    }
    const BruteResult conj = brute_L(s, g, g, {});
    REQUIRE(conj.value.atoms.size() == 3);
    CHECK(conj.value.atoms[0].weight == -125);
    CHECK(conj.value.smooth == closed_L_prime(s, g, g).value.smooth);
}

TEST_CASE("degree two: packaged constants and the SL2 formula") {
    FieldTower t(3, 2);
    TorusSpec s{&t, 1, 2, TorusKind::NormOne};
    const LaurentElem g = good_element(s, 1, 0, kPrec), u = good_element(s, 2, 0, kPrec);
    const PrimeClosedForm c = closed_L_prime(s, g, u);
    CHECK(brute_L(s, g, u, {}).value.smooth == CycNumber(-18));
    CHECK(c.value.smooth == CycNumber(-18));
    CHECK(c.constants.E_T == -8);
    CHECK(c.constants.C_T == 2);
    CHECK(c.packaged == 10);

    const LaurentElem h = near_twist(s, g, 1, 2, 0, kPrec);
    const Sl2ClosedForm f = closed_L_sl2(s, g, h);
    CHECK(f.depth == 1);
    CHECK(f.M == 2);
    CHECK(f.formula == -54);
    CHECK(f.trace_value == -54);
    CHECK(f.identity_holds);
    CHECK(closed_L_prime(s, g, h).routed_to_sl2);
    // the enumerated sum has the opposite sign
    CHECK(brute_L(s, g, h, {}).value.smooth == CycNumber(54));
    CHECK_THROWS_AS(brute_L(s, g, g, {}), DomainError);
}

TEST_CASE("ball pairings") {
    FieldTower t(5, 3);
    TorusSpec s{&t, 1, 3, TorusKind::NormOne};
    const LaurentElem g = good_element(s, 1, 0, kPrec);
    const auto bs = trace_zero_residues(s);
    REQUIRE(bs.size() == 25);
    // additivity: u·T_2 is the disjoint union of u·v_b·T_3
    const LaurentElem u = good_element(s, 0, 1, kPrec);
    CycNumber parts;
    for (auto b : bs) {
        const LaurentElem v = b == 0 ? LaurentElem::one(&t, 3) : lift_norm_one(&t, 3, 1, 2, b, kPrec);
        parts += pair_L(s, g, (u * v).truncated(kPrec), 2, {});
    }
    CHECK(pair_L(s, g, u, 1, {}) == parts);
    // the whole torus pairs to zero: Σ over residues of the balls z·T_1
    CycNumber whole;
    const uint64_t step = (t.size() - 1) / (t.layer_size(3) - 1);
    for (uint64_t i = 0; i + 1 < t.layer_size(3); ++i) {
        const uint32_t z = t.exp(int64_t(i * step));
        if (t.norm(z, 3, 1) != 1) continue;
        whole += pair_L(s, g, LaurentElem::from_coefficients(&t, 3, 0, {z}, kPrec), 0, {});
    }
    CHECK(whole.is_zero());
}

TEST_CASE("off-torus sums") {
    FieldTower t(5, 3);
    TorusSpec s{&t, 1, 3, TorusKind::NormOne};
    BlockElement split{{LaurentElem::from_coefficients(&t, 1, 0, {1, 0}, kPrec),
                        LaurentElem::from_coefficients(&t, 1, 0, {1, 1}, kPrec),
                        LaurentElem::from_coefficients(&t, 1, 0, {1, 2}, kPrec)},
                       1};
    REQUIRE(split.depth() == 1);
    for (int64_t d = 0; d <= 2; ++d) {
        const LaurentElem u = good_element(s, d, 0, kPrec);
        const BruteResult b = brute_L_off_torus(s, split, u, {});
        const OffTorusClosedForm c = closed_L_off_torus(s, split, u, SignConvention::Table);
        CHECK(b.value.smooth == CycNumber(c.finite_sum));
        CHECK(b.value.atoms.empty());
    }
}

TEST_CASE("composite degree strata") {
    FieldTower t(3, 4);
    TorusSpec s{&t, 1, 4, TorusKind::NormOne};
    TransferOptions o;
    o.depth_cap = 2;
    const LaurentElem g = good_element(s, 2, 0, 10), u = good_element(s, 1, 1, 10);
    const FieldStrata fs = field_strata_batch(s, {{g, u}}, 2, o).front();
    CycNumber sum;
    for (const auto& [m, strata] : fs.by_field)
        for (const auto& v : strata) sum += v;
    CHECK(sum == fs.L);
    CHECK(fs.by_field.size() == 2);
    CHECK(fs.depth_zero_counts.at(2) + fs.depth_zero_counts.at(4) == 39);
    CHECK(brute_L(s, g, u, o).value.smooth == fs.L);
    CHECK(L_M_stratum(s, g, u, 2, o).smooth + L_M_stratum(s, g, u, 4, o).smooth == fs.L);

    const InnerConstants ic = inner_constants(4, 2, 5, 2);
    CHECK(ic.P_finite == 31250);
    CHECK(ic.P_display == 31298);
    CHECK(composite_constants(9, 3).size() == 2);
    CHECK(composite_constants(15, 2).size() == 5);
    CHECK_THROWS_AS(composite_constants(4, 3), DomainError);
}
