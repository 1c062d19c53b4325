#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "supercohom/linalg.hpp"

using namespace supercohom;

namespace {

ExactMatrix from_rows(const std::vector<std::vector<long long>>& rows, const Field& F, int cols) {
    ExactMatrix m(static_cast<int>(rows.size()), cols, F);
    for (size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < cols; ++c)
            if (rows[r][c]) m.set(static_cast<int>(r), c, F.from_int(rows[r][c]));
    return m;
}

ExactMatrix random_matrix(int rows, int cols, const Field& F, std::mt19937& rng, int density = 2) {
    ExactMatrix m(rows, cols, F);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (static_cast<int>(rng() % 3) < density) {
                long long v = static_cast<long long>(rng() % 9) - 4;
                if (v) m.set(r, c, F.from_int(v));
            }
    return m;
}

bool is_zero_vec(const ExactVector& v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

}  // namespace

TEST_CASE("row echelon basics") {
    Field F;
    auto m = from_rows({{2, 4}, {1, 2}}, F, 2);
    auto e = row_echelon(m);
    CHECK(e.rank == 1);
    REQUIRE(e.pivot_cols.size() == 1);
    CHECK(e.pivot_cols[0] == 0);
    CHECK(e.rref.at(0, 0).is_one());
    CHECK(e.rref.at(0, 1) == F.from_int(2));

    auto id = from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, F, 3);
    auto ei = row_echelon(id);
    CHECK(ei.rank == 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(ei.rref.at(r, c) == id.at(r, c));
}

TEST_CASE("transform rows reproduce the RREF") {
    Field F;
    std::mt19937 rng(31);
    for (int it = 0; it < 30; ++it) {
        auto m = random_matrix(5, 7, F, rng);
        auto e = row_echelon(m, true);
        REQUIRE(e.has_transform);
        CHECK(e.transform.rows() == m.rows());
        // transform * m equals rref rows then zero rows
        for (int r = 0; r < m.rows(); ++r) {
            ExactVector acc(m.cols(), F.zero());
            for (const auto& [k, v] : e.transform.row(r))
                for (const auto& [c, w] : m.row(k)) acc[c] += v * w;
            for (int c = 0; c < m.cols(); ++c)
                CHECK(acc[c] == (r < e.rank ? e.rref.at(r, c) : F.zero()));
        }
        // RREF idempotence
        auto e2 = row_echelon(e.rref);
        CHECK(e2.rank == e.rank);
        for (int r = 0; r < e.rank; ++r)
            for (int c = 0; c < m.cols(); ++c) CHECK(e2.rref.at(r, c) == e.rref.at(r, c));
        // transform has full row rank
        CHECK(rank(e.transform) == m.rows());
    }
}

TEST_CASE("kernel bases") {
    Field F;
    auto k1 = kernel_basis(from_rows({{1, 1}}, F, 2));
    REQUIRE(k1.size() == 1);
    CHECK(k1[0][0] == F.from_int(-1));
    CHECK(k1[0][1] == F.one());

    CHECK(kernel_basis(ExactMatrix(2, 3, F)).size() == 3);
    CHECK(kernel_basis(ExactMatrix(0, 4, F)).size() == 4);

    std::mt19937 rng(99);
    for (int it = 0; it < 30; ++it) {
        auto m = random_matrix(4, 6, F, rng);
        auto ker = kernel_basis(m);
        CHECK(static_cast<int>(ker.size()) == 6 - rank(m));
        for (const auto& v : ker) CHECK(is_zero_vec(m.multiply(v)));
    }
}

TEST_CASE("solve and span membership") {
    Field F;
    std::mt19937 rng(7);
    for (int it = 0; it < 30; ++it) {
        auto m = random_matrix(5, 3, F, rng);
        // v = first column
        ExactVector v(5, F.zero());
        for (int r = 0; r < 5; ++r) v[r] = m.at(r, 0);
        auto sc = in_span(m, v);
        CHECK(sc.in_span);
        CHECK(m.multiply(sc.certificate) == v);
    }
    auto m = from_rows({{1, 2}, {2, 4}, {0, 0}}, F, 2);  // rank 1
    ExactVector outside{F.zero(), F.zero(), F.one()};
    CHECK(!in_span(m, outside).in_span);
    CHECK(!solve(m, outside).has_value());
}

TEST_CASE("rank over Q agrees with rank mod 46337 on random corpus") {
    Field Q;
    Field Fp(FieldSpec::prime_field(46337));
    std::mt19937 rng(20240831);
    for (int it = 0; it < 25; ++it) {
        ExactMatrix mq(6, 8, Q), mp(6, 8, Fp);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 8; ++c)
                if (rng() % 2) {
                    long long v = static_cast<long long>(rng() % 19) - 9;
                    if (!v) continue;
                    mq.set(r, c, Q.from_int(v));
                    mp.set(r, c, Fp.from_int(v));
                }
        CHECK(rank(mq) == rank(mp));
    }
}

TEST_CASE("quotient_basis extracts cohomology representatives") {
    Field F;

    SUBCASE("whole line survives when Z and b vanish") {
        ExactMatrix Z(1, 1, F), b(1, 1, F);
        auto reps = quotient_basis(Z, b);
        REQUIRE(reps.size() == 1);
        CHECK(!is_zero_vec(reps[0]));
    }

    SUBCASE("im b = ker Z kills everything") {
        std::mt19937 rng(5);
        for (int it = 0; it < 20; ++it) {
            auto Z = random_matrix(3, 6, F, rng);
            auto ker = kernel_basis(Z);
            auto b = ExactMatrix::from_columns(6, F, ker);
            CHECK(quotient_basis(Z, b).empty());
        }
    }

    SUBCASE("randomized: count identity and representative validity") {
        std::mt19937 rng(911);
        for (int it = 0; it < 40; ++it) {
            int N = 4 + rng() % 5;
            auto Z = random_matrix(2 + rng() % 3, N, F, rng, 1);
            // columns of b must lie inside ker Z so that "d o d = 0" holds
            auto ker = kernel_basis(Z);
            std::vector<ExactVector> cols;
            for (size_t i = 0; i < ker.size(); ++i)
                if (rng() % 2) {
                    ExactVector col(N, F.zero());
                    for (size_t j = 0; j <= i; ++j) {
                        FieldElement c = F.from_int(static_cast<long long>(rng() % 5) - 2);
                        for (int r = 0; r < N; ++r) col[r] += c * ker[j][r];
                    }
                    cols.push_back(col);
                }
            auto b = ExactMatrix::from_columns(N, F, cols);
            auto reps = quotient_basis(Z, b);
            int nullity = N - rank(Z);
            CHECK(static_cast<int>(reps.size()) == nullity - rank(b));
            for (const auto& v : reps) {
                CHECK(is_zero_vec(Z.multiply(v)));
                CHECK(!in_span(b, v).in_span);
            }
            // reps are independent modulo im b: [b | reps] has rank rank(b) + #reps
            auto all = cols;
            for (const auto& v : reps) all.push_back(v);
            CHECK(rank(ExactMatrix::from_columns(N, F, all)) ==
                  rank(b) + static_cast<int>(reps.size()));
        }
    }
}

TEST_CASE("matrix dump format") {
    Field F;
    auto m = from_rows({{1, 0}, {0, -2}}, F, 2);
    CHECK(dump_matrix(m) == "2 2 Q\n0 0 1\n1 1 -2\n");
}
