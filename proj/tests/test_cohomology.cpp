#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "supercohom/cohomology.hpp"

using namespace supercohom;

namespace {

ContextPtr ctx_x() {
    return std::make_shared<VariableContext>(std::vector<std::string>{"x"}, std::vector<int>{1},
                                             std::vector<std::string>{"X"}, std::vector<int>{-1});
}

ContextPtr ctx_m() {
    return std::make_shared<VariableContext>(std::vector<std::string>{"x"}, std::vector<int>{1},
                                             std::vector<std::string>{"T", "X"},
                                             std::vector<int>{0, -1});
}

}  // namespace

TEST_CASE("dimension results at grade zero") {
    Field F;

    SUBCASE("two classes in degree 3 for the full odd-bracket algebra") {
        auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_x());
        CohomologyEngine eng(B1, ModuleSpec::trivial(), 3, 0, 0);
        CohomologyResult r = eng.compute(3, 0);
        CHECK(r.even_dim + r.odd_dim == 2);
        CHECK(r.representatives.size() == 2);
        Cochain a3 = parse_cochain(eng.slice(), "C(X,x X,x^2 X)");
        Cochain b3 = parse_cochain(eng.slice(), "C(X,x X,x) - 1/2 C(X,x^2 X,1)");
        CHECK(eng.is_cocycle(a3));
        CHECK(eng.is_cocycle(b3));
        CHECK_FALSE(eng.is_coboundary(a3).is_coboundary);
        CHECK_FALSE(eng.is_coboundary(b3).is_coboundary);
        // the computed representatives span the same two classes
        for (const Cochain& rep : r.representatives) {
            CHECK(eng.is_cocycle(rep));
            CHECK_FALSE(eng.is_coboundary(rep).is_coboundary);
        }
    }

    SUBCASE("the central quotient keeps the expected low-degree classes") {
        auto Le1 = AlgebraFamily::make(FamilyKind::Le, 1, 0, F, ctx_x());
        CohomologyEngine eng(Le1, ModuleSpec::trivial(), 5, 0, 0);
        CohomologyResult h2 = eng.compute(2, 0);
        CHECK(h2.even_dim + h2.odd_dim == 1);
        CHECK(eng.class_equal(h2.representatives[0], parse_cochain(eng.slice(), "C(X,x)")));
        CohomologyResult h3 = eng.compute(3, 0);
        CHECK(h3.even_dim + h3.odd_dim == 2);
        CHECK(eng.compute(4, 0).even_dim + eng.compute(4, 0).odd_dim == 0);
        CohomologyResult h5 = eng.compute(5, 0);
        CHECK(h5.even_dim + h5.odd_dim == 0);
    }

    SUBCASE("degree 2 at grade 0 vanishes for the odd contact quotient") {
        auto SM1 = AlgebraFamily::make(FamilyKind::SM, 1, 0, F, ctx_m());
        CohomologyEngine eng(SM1, ModuleSpec::trivial(), 2, 0, 0);
        CohomologyResult r = eng.compute(2, 0);
        CHECK(r.even_dim == 0);
        CHECK(r.odd_dim == 0);
        CHECK(r.representatives.empty());
    }
}

TEST_CASE("cocycle, coboundary and class tests") {
    Field F;
    auto SB1 = AlgebraFamily::make(FamilyKind::SB, 1, 0, F, ctx_x());
    CohomologyEngine eng(SB1, ModuleSpec::trivial(), 4, -1, 3);
    const AlgebraSlice& s = eng.slice();

    SUBCASE("printed low-degree classes verify") {
        Cochain a1 = parse_cochain(s, "C(X)");
        Cochain a31 = parse_cochain(s, "C(X,1,x^2)-C(X,x,x)");
        for (const Cochain* c : {&a1, &a31}) {
            CHECK(eng.is_cocycle(*c));
            CHECK_FALSE(eng.is_coboundary(*c).is_coboundary);
        }
        CHECK_FALSE(eng.is_cocycle(parse_cochain(s, "C(X,x,x)")));
        CHECK(eng.compute(1, -1).even_dim + eng.compute(1, -1).odd_dim == 1);
        CHECK(eng.compute(3, 1).even_dim + eng.compute(3, 1).odd_dim == 1);
    }

    SUBCASE("coboundary checks carry verified certificates") {
        Cochain gen = parse_cochain(s, "C(X,x,x^2)");
        Cochain db = apply_differential(s, ModuleSpec::trivial(), gen);
        if (!db.is_zero()) {
            CoboundaryCheck cb = eng.is_coboundary(db);
            CHECK(cb.is_coboundary);
            CHECK(apply_differential(s, ModuleSpec::trivial(), cb.preimage) == db);
        }
        // boundary of a random degree-4 combination at (3, 1)
        Cochain w(F, 4, 1, Parity::Even);
        auto keys = cochain_basis(s, ModuleSpec::trivial(), 4, 1, Parity::Even);
        REQUIRE(!keys.empty());
        for (size_t i = 0; i < keys.size(); ++i)
            w.add(keys[i], F.from_int(static_cast<long long>(i % 7) - 3));
        Cochain bw = apply_differential(s, ModuleSpec::trivial(), w);
        if (!bw.is_zero()) CHECK(eng.is_coboundary(bw).is_coboundary);
    }

    SUBCASE("class equality separates classes and absorbs boundaries") {
        Cochain a31 = parse_cochain(s, "C(X,1,x^2)-C(X,x,x)");
        Cochain w(F, 4, 1, Parity::Even);
        auto keys = cochain_basis(s, ModuleSpec::trivial(), 4, 1, a31.parity());
        REQUIRE(!keys.empty());
        w = Cochain(F, 4, 1, a31.parity());
        w.add(keys[0], F.from_int(3));
        Cochain shifted = a31 + apply_differential(s, ModuleSpec::trivial(), w);
        CHECK(eng.class_equal(a31, shifted));
        CHECK(eng.class_equal(a31, a31));
        Cochain zero(F, 3, 1, a31.parity());
        CHECK_FALSE(eng.class_equal(a31, zero));
    }
}

TEST_CASE("alternative forms") {
    Field F;
    auto M1 = AlgebraFamily::make(FamilyKind::M, 1, 0, F, ctx_m());
    CohomologyEngine eng(M1, ModuleSpec::trivial(), 3, 0, 0);
    CohomologyResult r = eng.compute(3, 0);
    REQUIRE(r.even_dim + r.odd_dim == 1);
    const Cochain& rep = r.representatives[0];
    std::vector<Cochain> forms = eng.alternative_forms(rep, 4);
    CHECK(!forms.empty());
    for (const Cochain& f : forms) {
        CHECK(eng.is_cocycle(f));
        CHECK(eng.class_equal(f, rep));
        CHECK_FALSE(f == rep);
    }
    // the printed equivalent expressions all land in this class
    const AlgebraSlice& s = eng.slice();
    std::vector<std::string> printed = {
        "C(T,T X,x) - 1/2 C(T,x T X,1)",
        "C(X,x X,x T) - 1/2 C(T,x T X,1)",
        "-C(X,T,x T) - 1/2 C(T,x T X,1)",
        "C(X,x T X,x) + 1/2 C(x^2 X,T X,1) + 1/2 C(x T,T X,1)",
        "-C(x X,T X,x) - 1/2 C(T,x T X,1)",
    };
    for (const std::string& t : printed) {
        Cochain c = parse_cochain(s, t);
        CHECK(eng.is_cocycle(c));
        CHECK(eng.class_equal(c, parse_cochain(s, printed[0])));
    }
}

TEST_CASE("scan grids") {
    Field F;
    auto B1 = AlgebraFamily::make(FamilyKind::B, 1, 0, F, ctx_x());
    CohomologyEngine eng(B1, ModuleSpec::trivial(), 4, -3, 3);

    SUBCASE("nonzero grades are empty under the internal grading") {
        auto cells = eng.scan(1, 4, -3, 3, 4);
        CHECK(cells.size() == 4 * 7);
        int idx = 0;
        for (int k = 1; k <= 4; ++k)
            for (int g = -3; g <= 3; ++g) {
                CHECK(cells[idx].k == k);
                CHECK(cells[idx].g == g);
                if (g != 0) {
                    CHECK(cells[idx].even_dim == 0);
                    CHECK(cells[idx].odd_dim == 0);
                }
                ++idx;
            }
    }
    SUBCASE("threaded and serial scans agree") {
        auto a = eng.scan(1, 3, -2, 2, 1);
        auto b = eng.scan(1, 3, -2, 2, 8);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].even_dim == b[i].even_dim);
            CHECK(a[i].odd_dim == b[i].odd_dim);
        }
    }
    SUBCASE("scan dimensions match compute") {
        auto cells = eng.scan(3, 3, 0, 0, 1);
        CohomologyResult r = eng.compute(3, 0);
        CHECK(cells[0].even_dim == r.even_dim);
        CHECK(cells[0].odd_dim == r.odd_dim);
    }
}

TEST_CASE("prime-field dimensions agree with the rationals") {
    Field Q;
    Field Fp(FieldSpec::prime_field(46337));
    auto dims = [](const Field& F) {
        auto SB1 = AlgebraFamily::make(FamilyKind::SB, 1, 0, F, ctx_x());
        CohomologyEngine eng(SB1, ModuleSpec::trivial(), 3, -1, 1);
        std::vector<int> out;
        for (auto& c : eng.scan(1, 3, -1, 1, 2)) {
            out.push_back(c.even_dim);
            out.push_back(c.odd_dim);
        }
        return out;
    };
    CHECK(dims(Q) == dims(Fp));
}

TEST_CASE("normalization and envelope errors") {
    Field F;
    auto SB1 = AlgebraFamily::make(FamilyKind::SB, 1, 0, F, ctx_x());
    CohomologyEngine eng(SB1, ModuleSpec::trivial(), 2, -1, 1);
    Cochain c = parse_cochain(eng.slice(), "-3 C(X)");
    Cochain n = CohomologyEngine::normalize(c);
    CHECK(n == parse_cochain(eng.slice(), "C(X)"));
    CHECK(CohomologyEngine::normalize(Cochain(F, 1, 0, Parity::Even)).is_zero());
    CHECK_THROWS_AS(eng.compute(3, 0), UsageError);
    CHECK_THROWS_AS(CohomologyEngine(SB1, ModuleSpec::trivial(), -1, 0, 0), UsageError);
    CHECK_THROWS_AS(CohomologyEngine(SB1, ModuleSpec::adjoint(), 2, 0, 0), UsageError);
}
