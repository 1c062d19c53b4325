#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "supercohom/field.hpp"

using namespace supercohom;

TEST_CASE("rational arithmetic is exact and canonical") {
    Field Q;
    CHECK(format_scalar(Q.from_fraction(1, 2) + Q.from_fraction(1, 3)) == "5/6");
    CHECK(Q.from_fraction(-2, -4) == Q.from_fraction(1, 2));
    CHECK(format_scalar(Q.from_fraction(-3, 4)) == "-3/4");
    CHECK(Q.parse("-3/4") == Q.from_fraction(-3, 4));
    CHECK(Q.parse("7") == Q.from_int(7));
    CHECK((Q.from_int(5) / Q.from_int(5)).is_one());
    CHECK_THROWS_AS(Q.from_int(1) / Q.zero(), ArithmeticError);
    CHECK_THROWS_AS(Q.zero().inv(), ArithmeticError);
    CHECK_THROWS_AS(Q.parse("1/x"), UsageError);
    CHECK_THROWS_AS(Q.parse(""), UsageError);
    CHECK_THROWS_AS(Q.parse("3/0"), ArithmeticError);
}

TEST_CASE("prime field arithmetic") {
    Field F5(FieldSpec::prime_field(5));
    CHECK(F5.from_int(2).inv() == F5.from_int(3));
    CHECK(F5.parse("7") == F5.from_int(2));
    CHECK(F5.parse("1/2") == F5.from_int(3));
    CHECK(format_scalar(F5.from_int(-1)) == "4");
    CHECK_THROWS_AS(F5.parse("1/5"), ArithmeticError);

    CHECK_THROWS_AS(FieldSpec::prime_field(2), UsageError);
    CHECK_THROWS_AS(FieldSpec::prime_field(3), UsageError);
    CHECK_THROWS_AS(FieldSpec::prime_field(4), UsageError);
    CHECK_THROWS_AS(FieldSpec::prime_field(46338), UsageError);
    CHECK_NOTHROW(FieldSpec::prime_field(46337));
    CHECK(FieldSpec::prime_field(46337).name() == "Zp(46337)");

    Field Q;
    CHECK_THROWS_AS(Q.one() + F5.one(), UsageError);
}

TEST_CASE("format/parse round trip") {
    Field Q;
    Field Fp(FieldSpec::prime_field(46337));
    std::mt19937 rng(12345);
    for (int i = 0; i < 200; ++i) {
        long long n = static_cast<long long>(rng() % 20011) - 10005;
        long long d = 1 + rng() % 9973;
        FieldElement a = Q.from_fraction(n, d);
        CHECK(parse_scalar(format_scalar(a), Q.spec()) == a);
        FieldElement b = Fp.from_int(n);
        CHECK(parse_scalar(format_scalar(b), Fp.spec()) == b);
    }
}

TEST_CASE("field axioms on randomized triples") {
    std::mt19937 rng(987);
    for (Field F : {Field(), Field(FieldSpec::prime_field(46337))}) {
        auto rnd = [&] {
            long long n = static_cast<long long>(rng() % 401) - 200;
            long long d = 1 + rng() % 37;
            return F.spec().kind == FieldKind::Rationals ? F.from_fraction(n, d) : F.from_int(n);
        };
        for (int i = 0; i < 300; ++i) {
            FieldElement a = rnd(), b = rnd(), c = rnd();
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + (-a) == F.zero());
            if (!a.is_zero()) {
                CHECK(a * a.inv() == F.one());
                CHECK(a / a == F.one());
            }
        }
    }
}

TEST_CASE("Fermat: a^(p-1) = 1 in Z_p") {
    Field Fp(FieldSpec::prime_field(46337));
    std::mt19937 rng(5150);
    for (int i = 0; i < 50; ++i) {
        FieldElement a = Fp.from_int(1 + rng() % 46336);
        FieldElement acc = Fp.one();
        std::uint64_t e = 46336;
        FieldElement base = a;
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        CHECK(acc.is_one());
    }
}
