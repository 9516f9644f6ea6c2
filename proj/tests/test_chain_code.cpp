#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace ringpir;

namespace {

struct RingChoice {
    u64 p;
    u32 e;
};
const RingChoice kRings[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};

Mat random_small_generator(const RingChoice& ring, Rng& rng, std::size_t max_rows = 3, std::size_t max_n = 6) {
    const u64 pe = modarith::checked_pow(ring.p, ring.e);
    const std::size_t n = 2 + rng.below(max_n - 1);
    const std::size_t rows = 1 + rng.below(max_rows);
    return oracles::random_mat(pe, rows, n, rng);
}

}  // namespace

TEST_CASE("standard_form worked examples over Z_4") {
    const ChainCode c1 = standard_form(mat_from(4, {{2, 2}, {1, 1}}), 2, 2);
    CHECK(c1.subtype.counts == std::vector<u32>{1, 0});
    CHECK(c1.generator_rows() == mat_from(4, {{1, 1}}));

    const ChainCode c2 = standard_form(mat_from(4, {{2, 0}, {0, 2}}), 2, 2);
    CHECK(c2.subtype.counts == std::vector<u32>{0, 2});
    CHECK(row_span_equal(c2, standard_form(mat_from(4, {{2, 0}, {0, 2}}), 2, 2)));

    const ChainCode full = standard_form(mat_identity(4, 3), 2, 2);
    CHECK(full.subtype.counts == std::vector<u32>{3, 0});

    const ChainCode zero = standard_form(make_mat(4, 2, 3), 2, 2);
    CHECK(zero.rank() == 0);
    CHECK(zero.subtype.counts == std::vector<u32>{0, 0});
}

TEST_CASE("span and cardinality agree with enumeration") {
    Rng rng(101);
    for (int rep = 0; rep < 60; ++rep) {
        const RingChoice ring = kRings[rng.below(4)];
        const Mat g = random_small_generator(ring, rng);
        const ChainCode c = standard_form(g, ring.p, ring.e);
        const auto span = oracles::enumerate_span(g);
        REQUIRE(cardinality(c).has_value());
        CHECK(span.size() == *cardinality(c));
        // Every generator row of the standard form lies in the original span.
        const Mat rows = c.generator_rows();
        for (std::size_t i = 0; i < rows.rows; ++i) CHECK(span.count(mat_row(rows, i)) == 1);
        // And membership agrees with enumeration on random vectors.
        for (int probe = 0; probe < 10; ++probe) {
            std::vector<u64> w(g.cols);
            for (u64& v : w) v = rng.below(g.mod);
            CHECK(contains(c, w) == (span.count(w) == 1));
        }
    }
}

TEST_CASE("subtype is an invariant of the code, not the generator") {
    Rng rng(202);
    for (int rep = 0; rep < 40; ++rep) {
        const RingChoice ring = kRings[rng.below(4)];
        const u64 pe = modarith::checked_pow(ring.p, ring.e);
        Mat g = random_small_generator(ring, rng);
        const ChainCode c = standard_form(g, ring.p, ring.e);
        // Row operations preserve the span: add a random multiple of another
        // row, scale a row by a unit, shuffle.
        for (int op = 0; op < 8; ++op) {
            const std::size_t i = rng.below(g.rows), j = rng.below(g.rows);
            if (i != j) {
                const u64 coeff = rng.below(pe);
                for (std::size_t col = 0; col < g.cols; ++col)
                    g.at(i, col) = modarith::add(g.at(i, col), modarith::mul(coeff, g.at(j, col), pe), pe);
            } else {
                u64 unit = rng.below(pe);
                while (unit % ring.p == 0) unit = rng.below(pe);
                for (std::size_t col = 0; col < g.cols; ++col) g.at(i, col) = modarith::mul(unit, g.at(i, col), pe);
            }
        }
        const ChainCode c2 = standard_form(g, ring.p, ring.e);
        CHECK(c.subtype == c2.subtype);
        CHECK(row_span_equal(c, c2));
    }
}

TEST_CASE("standard_form is idempotent") {
    Rng rng(303);
    for (int rep = 0; rep < 30; ++rep) {
        const RingChoice ring = kRings[rng.below(4)];
        const ChainCode c = standard_form(random_small_generator(ring, rng), ring.p, ring.e);
        const ChainCode again = standard_form(c.generator_rows(), ring.p, ring.e);
        CHECK(c.subtype == again.subtype);
        CHECK(row_span_equal(c, again));
    }
}

TEST_CASE("parity_check worked examples") {
    // Full code: dual is {0}, so H is empty.
    const ChainCode full = standard_form(mat_identity(9, 4), 3, 2);
    CHECK(parity_check(full).rows == 0);

    // Circulant of x + 2 over Z_9, n = 5: H row-span-equal to (3 3 3 3 3).
    const ChainCode cin9 = standard_form(circulant_expand(poly_terms(9, 5, {{0, 2}, {1, 1}})), 3, 2);
    const Mat h9 = parity_check(cin9);
    CHECK(row_span_equal(standard_form(h9, 3, 2), standard_form(mat_from(9, {{3, 3, 3, 3, 3}}), 3, 2)));

    // Zero code of length 5 over Z_4: H spans the identity.
    const ChainCode zero = standard_form(make_mat(4, 1, 5), 2, 2);
    CHECK(row_span_equal(standard_form(parity_check(zero), 2, 2), standard_form(mat_identity(4, 5), 2, 2)));
}

TEST_CASE("parity check annihilates the code and cuts it out exactly") {
    Rng rng(404);
    for (int rep = 0; rep < 40; ++rep) {
        const RingChoice ring = kRings[rng.below(4)];
        // Keep p^{e n} small enough to enumerate the kernel.
        const std::size_t n = ring.p == 2 ? (ring.e == 2 ? 5 : 4) : (ring.e == 2 ? 4 : 3);
        const u64 pe = modarith::checked_pow(ring.p, ring.e);
        const Mat g = oracles::random_mat(pe, 1 + rng.below(3), n, rng);
        const ChainCode c = standard_form(g, ring.p, ring.e);
        const Mat h = parity_check(c);

        CHECK(mat_mul(g, mat_transpose(h)).is_zero());
        CHECK(oracles::enumerate_kernel(h) == oracles::enumerate_span(g));
    }
}

TEST_CASE("dual subtype law and double dual") {
    Rng rng(505);
    for (int rep = 0; rep < 40; ++rep) {
        const RingChoice ring = kRings[rng.below(4)];
        const Mat g = random_small_generator(ring, rng);
        const ChainCode c = standard_form(g, ring.p, ring.e);
        const ChainCode dual_code = standard_form(parity_check(c), ring.p, ring.e);

        std::vector<u32> expect{static_cast<u32>(c.n) - c.rank()};
        for (u32 i = ring.e - 1; i >= 1; --i) expect.push_back(c.subtype.counts[i]);
        CHECK(dual_code.subtype.counts == expect);

        const ChainCode dd = standard_form(parity_check(dual_code), ring.p, ring.e);
        CHECK(row_span_equal(dd, c));
    }
}

TEST_CASE("zp_dimension and cardinality formulas") {
    Subtype st{{1, 1}};
    CHECK(st.zp_dimension() == 3);
    const ChainCode c = standard_form(mat_from(4, {{1, 0}, {0, 2}}), 2, 2);
    CHECK(zp_dimension(c) == 3);
    CHECK(cardinality(c) == 8);

    const ChainCode z = standard_form(make_mat(4, 0, 2), 2, 2);
    CHECK(zp_dimension(z) == 0);
    CHECK(cardinality(z) == 1);

    const ChainCode g = standard_form(mat_from(4, {{2, 2}, {1, 1}}), 2, 2);
    CHECK(zp_dimension(g) == 2);
    CHECK(cardinality(g) == 4);
}

TEST_CASE("non_free_part spans exactly the positive-valuation rows") {
    const ChainCode free_code = standard_form(mat_identity(4, 3), 2, 2);
    CHECK(non_free_part(free_code).rank() == 0);

    const ChainCode c = standard_form(mat_from(4, {{1, 0}, {0, 2}}), 2, 2);
    const ChainCode nf = non_free_part(c);
    const auto nf_span = oracles::enumerate_span(nf.generator_rows());
    CHECK(nf_span.size() == 2);
    CHECK(nf_span.count({0, 2}) == 1);

    // Projection of the worked-example inner code to Z_9: the non-free part
    // consists of multiples of 3.
    const ChainCode cin9 = standard_form(circulant_expand(poly_terms(9, 5, {{0, 2}, {1, 1}})), 3, 2);
    const ChainCode nf9 = non_free_part(cin9);
    const Mat rows = nf9.generator_rows();
    for (u64 v : rows.a) CHECK(v % 3 == 0);
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        const std::vector<u64> w = detail::sample_uniform(nf9, rng);
        for (u64 v : w) CHECK(v % 3 == 0);
        CHECK(contains(cin9, w));
    }
}

TEST_CASE("contains and row_span_equal basics") {
    const ChainCode id2 = standard_form(mat_identity(4, 2), 2, 2);
    CHECK(contains(id2, std::vector<u64>{1, 3}));
    CHECK(contains(id2, std::vector<u64>{0, 0}));
    const ChainCode a = standard_form(mat_from(4, {{2, 2}, {1, 1}}), 2, 2);
    const ChainCode b = standard_form(mat_from(4, {{1, 1}}), 2, 2);
    CHECK(row_span_equal(a, b));
    const ChainCode c = standard_form(mat_from(4, {{1, 3}}), 2, 2);
    CHECK_FALSE(row_span_equal(a, c));
    CHECK_THROWS_AS(contains(a, std::vector<u64>{1, 2, 3}), ShapeMismatch);
}
