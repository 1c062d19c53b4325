#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "supercohom/algebra.hpp"

using namespace supercohom;

namespace {

Payload gp(const AlgebraFamily& fam, const char* s) {
    return fam.payload_from_poly(parse_poly(s, fam.ctx(), fam.field()));
}

SuperPolynomial pp(const AlgebraFamily& fam, const char* s) {
    return parse_poly(s, fam.ctx(), fam.field());
}

// reduce a rational exactly mod p
FieldElement mod_p(const FieldElement& q, const Field& Fp) {
    const BigRational& r = q.rational();
    return Fp.from_bigint(boost::multiprecision::numerator(r)) /
           Fp.from_bigint(boost::multiprecision::denominator(r));
}

}  // namespace

TEST_CASE("family construction and standard gradings") {
    Field F;
    auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F);
    CHECK(B1.name() == "B(1)");
    CHECK(B1.grade_shift() == -2);  // g(x)=g(X)=1 by default
    auto M1 = AlgebraFamily::make(FamilyKind::M, 1, 0, F);
    CHECK(M1.ctx()->odd_name(0) == "T");
    CHECK(M1.ctx()->odd_grade(0) == 2);
    CHECK(M1.grade_shift() == -2);
    auto K1 = AlgebraFamily::make(FamilyKind::K, 1, 1, F);
    CHECK(K1.name() == "K(3|1)");
    CHECK(K1.ctx()->even_name(0) == "t");
    CHECK(K1.grade_shift() == -2);
    auto W11 = AlgebraFamily::make(FamilyKind::W, 1, 1, F);
    CHECK(W11.component_count() == 2);

    // inconsistent gradings are rejected
    auto bad = std::make_shared<VariableContext>(std::vector<std::string>{"x"}, std::vector<int>{1},
                                                 std::vector<std::string>{"X"}, std::vector<int>{3});
    CHECK_NOTHROW(AlgebraFamily::make(FamilyKind::B, 1, 0, F, bad));
    auto bad2 = std::make_shared<VariableContext>(
        std::vector<std::string>{"x", "y"}, std::vector<int>{1, 2},
        std::vector<std::string>{"X", "Y"}, std::vector<int>{-1, -1});
    CHECK_THROWS_AS(AlgebraFamily::make(FamilyKind::B, 2, 0, F, bad2), UsageError);
    CHECK_THROWS_AS(AlgebraFamily::make(FamilyKind::B, 2, 0, F, bad), UsageError);
}

namespace {
ContextPtr ctx_b1() {  // g(x)=1, g(X)=-1
    return std::make_shared<VariableContext>(std::vector<std::string>{"x"}, std::vector<int>{1},
                                             std::vector<std::string>{"X"}, std::vector<int>{-1});
}
}  // namespace

TEST_CASE("bracket formulas on sampled elements") {
    Field F;

    SUBCASE("B(1): [x^i X, x^j X] = (i-j) x^{i+j-1} X") {
        auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_b1());
        CHECK(B1.bracket(gp(B1, "x^2 X"), gp(B1, "x X")).comps[0] == pp(B1, "x^2 X"));
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; j <= 3; ++j) {
                auto xpow = [](int e) {
                    return e == 0 ? std::string("X") : "x^" + std::to_string(e) + " X";
                };
                std::string fi = xpow(i), fj = xpow(j);
                SuperPolynomial expect = i + j == 0
                                             ? B1.zero_poly()
                                             : pp(B1, xpow(i + j - 1).c_str()).scaled(F.from_int(i - j));
                CHECK(B1.bracket(gp(B1, fi.c_str()), gp(B1, fj.c_str())).comps[0] == expect);
            }
    }

    SUBCASE("SLe(2): [XY, x^i y^j] = -(j x^i y^{j-1} X - i x^{i-1} y^j Y)") {
        auto ctx = std::make_shared<VariableContext>(
            std::vector<std::string>{"x", "y"}, std::vector<int>{1, 1},
            std::vector<std::string>{"X", "Y"}, std::vector<int>{-1, -1});
        auto SLe2 = AlgebraFamily::make(FamilyKind::SLe, 2, 0, F, ctx);
        CHECK(SLe2.bracket(gp(SLe2, "X Y"), gp(SLe2, "x^2 y")).comps[0] ==
              pp(SLe2, "2 x y Y - x^2 X"));
        CHECK(SLe2.bracket(gp(SLe2, "X Y"), gp(SLe2, "x y^2")).comps[0] ==
              pp(SLe2, "y^2 Y - 2 x y X"));
    }

    SUBCASE("Po(2|0): {p,q} = 1, and 0 in the quotient H") {
        auto Po = AlgebraFamily::make(FamilyKind::Po, 1, 0, F);
        CHECK(Po.bracket(gp(Po, "p"), gp(Po, "q")).comps[0] == pp(Po, "1"));
        auto H = quotient_center(Po);
        CHECK(H.bracket(gp(H, "p"), gp(H, "q")).comps[0].is_zero());
    }

    SUBCASE("M(1): [x X, x^2] = 2 x^2") {
        auto ctx = std::make_shared<VariableContext>(
            std::vector<std::string>{"x"}, std::vector<int>{1},
            std::vector<std::string>{"T", "X"}, std::vector<int>{0, -1});
        auto M1 = AlgebraFamily::make(FamilyKind::M, 1, 0, F, ctx);
        CHECK(M1.bracket(gp(M1, "x X"), gp(M1, "x^2")).comps[0] == pp(M1, "2 x^2"));
    }

    SUBCASE("W(1|0): [x d/dx, x^2 d/dx] = x^2 d/dx") {
        auto W = AlgebraFamily::make(FamilyKind::W, 1, 0, F);
        Payload f, g;
        f.comps = {pp(W, "x")};
        g.comps = {pp(W, "x^2")};
        Payload r = W.bracket(f, g);
        CHECK(r.comps[0] == pp(W, "x^2"));
    }

    SUBCASE("mixed-parity operands are rejected") {
        auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_b1());
        CHECK_THROWS_AS(B1.bracket(gp(B1, "x + X"), gp(B1, "x")), UsageError);
    }
}

TEST_CASE("constraint operators") {
    Field F;
    auto SB1 = AlgebraFamily::make(FamilyKind::SB, 1, 0, F, ctx_b1());
    CHECK(SB1.constraint_apply(gp(SB1, "x X")) == pp(SB1, "1"));
    CHECK(SB1.constraint_apply(gp(SB1, "x^2 X")) == pp(SB1, "2 x"));
    CHECK(SB1.constraint_apply(gp(SB1, "x^3")).is_zero());

    auto ctxm = std::make_shared<VariableContext>(
        std::vector<std::string>{"x"}, std::vector<int>{1}, std::vector<std::string>{"T", "X"},
        std::vector<int>{0, -1});
    auto SM1 = AlgebraFamily::make(FamilyKind::SM, 1, 0, F, ctxm);
    for (int i = 0; i <= 4; ++i) {
        std::string s = i ? "x^" + std::to_string(i) : "1";
        CHECK(SM1.constraint_apply(gp(SM1, s.c_str())).is_zero());
    }

    auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_b1());
    CHECK_THROWS_AS(B1.constraint_apply(gp(B1, "x")), UsageError);

    // divergence for S
    auto S = AlgebraFamily::make(FamilyKind::S, 1, 1, F);
    Payload f;
    f.comps = {pp(S, "x^2"), pp(S, "0")};
    CHECK(S.constraint_apply(f) == pp(S, "2 x"));
}

TEST_CASE("basis enumeration") {
    Field F;

    SUBCASE("B(1) grade 0 under g(x)=1, g(X)=-1: {xX even, 1 odd}") {
        auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_b1());
        CHECK(B1.grade_shift() == 0);
        auto basis = enumerate_basis(B1, 0);
        REQUIRE(basis.size() == 2);
        CHECK(basis[0].parity == Parity::Even);
        CHECK(basis[0].payload.comps[0] == pp(B1, "x X"));
        CHECK(basis[1].parity == Parity::Odd);
        CHECK(basis[1].payload.comps[0] == pp(B1, "1"));
    }

    SUBCASE("SLe(1): grade -1 is {X}, grade 0 empty") {
        auto SLe1 = AlgebraFamily::make(FamilyKind::SLe, 1, 0, F, ctx_b1());
        auto gm1 = enumerate_basis(SLe1, -1);
        REQUIRE(gm1.size() == 1);
        CHECK(gm1[0].payload.comps[0] == pp(SLe1, "X"));
        CHECK(gm1[0].parity == Parity::Even);
        CHECK(enumerate_basis(SLe1, 0).empty());
        // Le(1) keeps x^i at every grade i >= 0 but excludes the constant at grade 0
        auto Le1 = AlgebraFamily::make(FamilyKind::Le, 1, 0, F, ctx_b1());
        auto g0 = enumerate_basis(Le1, 0);
        REQUIRE(g0.size() == 1);
        CHECK(g0[0].payload.comps[0] == pp(Le1, "x X"));
    }

    SUBCASE("constraint kernels are constraint-free and parity homogeneous") {
        auto ctx3 = std::make_shared<VariableContext>(
            std::vector<std::string>{"x", "y", "z"}, std::vector<int>{1, 1, 1},
            std::vector<std::string>{"X", "Y", "Z"}, std::vector<int>{-1, -1, -1});
        auto SB3 = AlgebraFamily::make(FamilyKind::SB, 3, 0, F, ctx3);
        for (int g = -3; g <= 2; ++g) {
            for (const auto& e : enumerate_basis(SB3, g)) {
                CHECK(SB3.constraint_apply(e.payload).is_zero());
                CHECK(*SB3.element_grade(e.payload) == g);
                CHECK(*SB3.element_parity(e.payload) == e.parity);
            }
        }
    }

    SUBCASE("dimensions agree over Q and Z_46337") {
        Field Fp(FieldSpec::prime_field(46337));
        for (auto kind : {FamilyKind::SB, FamilyKind::SLe, FamilyKind::SM}) {
            int n = kind == FamilyKind::SM ? 1 : 2;
            ContextPtr ctx;
            if (kind == FamilyKind::SM)
                ctx = std::make_shared<VariableContext>(
                    std::vector<std::string>{"x"}, std::vector<int>{1},
                    std::vector<std::string>{"T", "X"}, std::vector<int>{0, -1});
            else
                ctx = std::make_shared<VariableContext>(
                    std::vector<std::string>{"x", "y"}, std::vector<int>{1, 1},
                    std::vector<std::string>{"X", "Y"}, std::vector<int>{-1, -1});
            auto fq = AlgebraFamily::make(kind, n, 0, Field(), ctx);
            auto fp = AlgebraFamily::make(kind, n, 0, Fp, ctx);
            for (int g = -2; g <= 3; ++g)
                CHECK(enumerate_basis(fq, g).size() == enumerate_basis(fp, g).size());
        }
    }
}

TEST_CASE("slices and structure constants") {
    Field F;
    auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_b1());
    AlgebraSlice s = build_slice(B1, -1, 4);

    SUBCASE("bracket table matches payload brackets") {
        for (int i = 0; i < s.size(); ++i) {
            for (int j = 0; j < s.size(); ++j) {
                BracketEntry e = s.bracket_terms(i, j);
                if (e.out_of_range) continue;
                Payload expect = B1.bracket(s.elem(i).payload, s.elem(j).payload);
                Payload got;
                got.comps = {B1.zero_poly()};
                for (const auto& [k, c] : e.terms) got = got + s.elem(k).payload.scaled(c);
                CHECK(got.comps[0] == expect.comps[0]);
            }
        }
    }

    SUBCASE("[b,b] = 0 for even b; grade additivity; Jacobi") {
        VerifyReport rep = verify_algebra(s);
        CHECK(rep.ok);
        for (int i = 0; i < s.size(); ++i) {
            if (s.elem(i).parity != Parity::Even) continue;
            BracketEntry e = s.bracket_terms(i, i);
            if (!e.out_of_range) CHECK(e.terms.empty());
        }
    }

    SUBCASE("out-of-range products are flagged, not dropped") {
        // even grade-4 element paired with the odd grade-1 element has a
        // nonzero product at grade 5, outside the [-1, 4] window
        int top = -1, other = -1;
        for (int i = 0; i < s.size(); ++i)
            if (s.elem(i).grade == 4 && s.elem(i).parity == Parity::Even) top = i;
        for (int i = 0; i < s.size(); ++i)
            if (s.elem(i).grade == 1 && s.elem(i).parity == Parity::Odd) other = i;
        REQUIRE(top >= 0);
        REQUIRE(other >= 0);
        CHECK(s.bracket_terms(top, other).out_of_range);
        // a product that is identically zero is never flagged even when its
        // nominal grade leaves the window
        int otop = -1;
        for (int i = 0; i < s.size(); ++i)
            if (s.elem(i).grade == 4 && s.elem(i).parity == Parity::Odd) otop = i;
        REQUIRE(otop >= 0);
        BracketEntry z = s.bracket_terms(otop, other);
        CHECK_FALSE(z.out_of_range);
        CHECK(z.terms.empty());
    }

    SUBCASE("structure constants over Q reduce mod p entry-wise") {
        Field Fp(FieldSpec::prime_field(46337));
        auto B1p = AlgebraFamily::make(FamilyKind::B, 1, 0, Fp, ctx_b1());
        AlgebraSlice sp = build_slice(B1p, -1, 4);
        REQUIRE(sp.size() == s.size());
        for (int i = 0; i < s.size(); ++i)
            for (int j = i; j < s.size(); ++j) {
                BracketEntry eq = s.bracket_terms(i, j), ep = sp.bracket_terms(i, j);
                CHECK(eq.out_of_range == ep.out_of_range);
                REQUIRE(eq.terms.size() == ep.terms.size());
                for (size_t t = 0; t < eq.terms.size(); ++t) {
                    CHECK(eq.terms[t].first == ep.terms[t].first);
                    CHECK(mod_p(eq.terms[t].second, Fp) == ep.terms[t].second);
                }
            }
    }

    SUBCASE("expand_at_grade recovers exact coordinates") {
        Payload p = gp(B1, "3 x^2 X - x");  // mixed basis combo at grade 1
        ExactVector v = s.expand_at_grade(1, p);
        Payload back;
        back.comps = {B1.zero_poly()};
        const auto& ids = s.ids_at_grade(1);
        REQUIRE(ids.size() == v.size());
        for (size_t k = 0; k < v.size(); ++k) back = back + s.elem(ids[k]).payload.scaled(v[k]);
        CHECK(back.comps[0] == p.comps[0]);
        CHECK_THROWS(s.expand_at_grade(0, p));
    }

    SUBCASE("user-supplied bases replace the automatic one") {
        std::vector<Payload> user = {gp(B1, "2 x X"), gp(B1, "-1")};
        AlgebraSlice su = build_slice(B1, 0, 0, user);
        REQUIRE(su.size() == 2);
        CHECK(su.elem(0).payload.comps[0] == pp(B1, "2 x X"));
        CHECK(verify_algebra(su).ok);
        CHECK_THROWS_AS(build_slice(B1, 0, 0, {gp(B1, "x X")}), UsageError);
        CHECK_THROWS_AS(build_slice(B1, 0, 0, {gp(B1, "x X"), gp(B1, "3 x X")}), UsageError);
    }
}

TEST_CASE("more family slices pass verification") {
    Field F;
    auto ctx2 = std::make_shared<VariableContext>(
        std::vector<std::string>{"x", "y"}, std::vector<int>{1, 1},
        std::vector<std::string>{"X", "Y"}, std::vector<int>{-1, -1});
    auto ctxm = std::make_shared<VariableContext>(
        std::vector<std::string>{"x"}, std::vector<int>{1}, std::vector<std::string>{"T", "X"},
        std::vector<int>{0, -1});
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::SLe, 2, 0, F, ctx2), -2, 3),
                         20000)
              .ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::SB, 2, 0, F, ctx2), -2, 2),
                         20000)
              .ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::SM, 1, 0, F, ctxm), -1, 3)).ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::M, 1, 0, F, ctxm), -1, 3)).ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::W, 1, 1, F), -1, 2)).ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::S, 1, 1, F), -1, 2)).ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::Po, 1, 1, F), -2, 2)).ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::H, 1, 1, F), -2, 2)).ok);
    CHECK(verify_algebra(build_slice(AlgebraFamily::make(FamilyKind::K, 1, 0, F), -2, 2)).ok);
}

TEST_CASE("bracket parity and constraint closure on random pairs") {
    Field F;
    std::mt19937 rng(1618);
    auto ctx2 = std::make_shared<VariableContext>(
        std::vector<std::string>{"x", "y"}, std::vector<int>{1, 1},
        std::vector<std::string>{"X", "Y"}, std::vector<int>{-1, -1});
    for (auto kind : {FamilyKind::B, FamilyKind::SB, FamilyKind::Po, FamilyKind::K}) {
        AlgebraFamily fam = kind == FamilyKind::B || kind == FamilyKind::SB
                                ? AlgebraFamily::make(kind, 2, 0, F, ctx2)
                                : AlgebraFamily::make(kind, 1, 1, F);
        std::vector<BasisElement> pool;
        for (int g = fam.min_element_grade(); g <= 3; ++g)
            for (auto& e : enumerate_basis(fam, g)) pool.push_back(e);
        REQUIRE(pool.size() > 3);
        for (int it = 0; it < 60; ++it) {
            const auto& a = pool[rng() % pool.size()];
            const auto& b = pool[rng() % pool.size()];
            Payload r = fam.bracket(a.payload, b.payload);
            if (r.is_zero()) continue;
            // generating-function parity: even brackets preserve, odd brackets flip
            Parity pf = *a.payload.comps[0].parity(), pg = *b.payload.comps[0].parity();
            Parity expect = fam.odd_bracket() ? flip(pf + pg) : pf + pg;
            CHECK(*r.comps[0].parity() == expect);
            CHECK(*fam.element_grade(r) == a.grade + b.grade);
            if (fam.has_constraint()) CHECK(fam.constraint_apply(r).is_zero());
        }
    }
}

TEST_CASE("custom algebras") {
    Field F;
    const char* sl2 =
        "supercohom-algebra v1\n"
        "<a graded sl2: h at grade 0, e up, f down>\n"
        "element h even 0\n"
        "element e even 1\n"
        "element f even -1\n"
        "[0, 1] = 2 1\n"
        "[0, 2] = -2 2\n"
        "[1, 2] = 1 0\n";
    auto fam = AlgebraFamily::make_custom(parse_custom_algebra(sl2, F), F);
    AlgebraSlice s = build_slice(fam, -1, 1);
    CHECK(verify_algebra(s).ok);

    SUBCASE("internal grading element is h/2") {
        auto ge = find_internal_grading_element(s);
        REQUIRE(ge.has_value());
        REQUIRE(ge->coeffs.size() == 1);
        CHECK(ge->coeffs[0] == F.from_fraction(1, 2));
    }

    SUBCASE("corrupted table fails Jacobi with a named triple") {
        std::string bad(sl2);
        bad.replace(bad.find("[0, 1] = 2 1"), 12, "[0, 1] = 3 1");
        auto famb = AlgebraFamily::make_custom(parse_custom_algebra(bad, F), F);
        VerifyReport rep = verify_algebra(build_slice(famb, -1, 1));
        CHECK(!rep.ok);
        REQUIRE(!rep.violations.empty());
        CHECK(rep.violations[0].find("Jacobi") != std::string::npos);
    }

    SUBCASE("2-element abelian algebra passes; 1-dim abelian has no grading element") {
        const char* ab =
            "supercohom-algebra v1\n"
            "element a even 0\n"
            "element b even 0\n";
        auto fab = AlgebraFamily::make_custom(parse_custom_algebra(ab, F), F);
        CHECK(verify_algebra(build_slice(fab, 0, 0)).ok);
        const char* one =
            "supercohom-algebra v1\n"
            "element a even 1\n";
        auto f1 = AlgebraFamily::make_custom(parse_custom_algebra(one, F), F);
        CHECK(!find_internal_grading_element(build_slice(f1, 1, 1)).has_value());
    }

    SUBCASE("parse errors carry line numbers") {
        CHECK_THROWS_AS(parse_custom_algebra("nonsense\n", F), UsageError);
        CHECK_THROWS_AS(parse_custom_algebra("supercohom-algebra v1\nelement a sideways 0\n", F),
                        UsageError);
        CHECK_THROWS_AS(parse_custom_algebra("supercohom-algebra v1\n[0, 1] = 1 0\n", F),
                        UsageError);
    }
}

TEST_CASE("internal grading elements for the vector-field families") {
    Field F;
    auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_b1());
    auto ge = find_internal_grading_element(build_slice(B1, -1, 3));
    REQUIRE(ge.has_value());
    // the Euler-type direction x X (up to the odd grade-0 part, which acts by zero)
    Payload probe = gp(B1, "x^2 X");
    Payload acted = B1.bracket(ge->payload, probe);
    CHECK(acted.comps[0] == probe.comps[0]);  // grade(x^2 X) = 1

    auto SB1 = AlgebraFamily::make(FamilyKind::SB, 1, 0, F, ctx_b1());
    CHECK(!find_internal_grading_element(build_slice(SB1, -1, 3)).has_value());
}
