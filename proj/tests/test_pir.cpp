#include <catch2/catch_amalgamated.hpp>

#include "ringpir/fixtures.hpp"
#include "oracles.hpp"

using namespace ringpir;

TEST_CASE("worked-example suite validation") {
    const SchemeParams params = example41::params();
    const ValidationReport rep = validate_suite(params, example41::suite());
    CHECK(rep.nested);
    CHECK(rep.meets_inner);
    CHECK(rep.meets_dual_minus_inner);
    CHECK_FALSE(rep.no_hensel_lifts);  // condition 3 fails for this instance
    CHECK_FALSE(rep.m_invertible);     // det M = 34, a zero divisor mod 36
    CHECK(rep.recovery_conditions_ok());
}

TEST_CASE("degenerate suites hit the right conditions") {
    const SchemeParams params = example41::params();
    // C~_s = <0>: condition 2 fails.
    std::vector<Poly> tilde = example41::tilde_gens();
    tilde[2] = poly_zero(36, 5);
    const CodeSuite broken = make_suite(params, example41::inner_gen(), tilde, example41::mixing_matrix());
    const ValidationReport rep = validate_suite(params, broken);
    CHECK_FALSE(rep.meets_inner);
    CHECK_FALSE(rep.meets_dual_minus_inner);

    // All outer codes equal: nesting is reflexive.
    const CodeSuite equal_suite =
        make_suite(params, example41::inner_gen(), {tilde[0], tilde[0], tilde[0]}, example41::mixing_matrix());
    CHECK(validate_suite(params, equal_suite).nested);
}

TEST_CASE("build_gout shapes and worked-example row") {
    const std::vector<Poly> gens = example41::tilde_gens();
    const PolyMat diag = build_gout(gens, mat_identity(36, 3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(diag.at(i, j) == (i == j ? gens[i] : poly_zero(36, 5)));

    const PolyMat gout = build_gout(gens, example41::mixing_matrix());
    CHECK(gout.at(0, 0) == poly_terms(36, 5, {{0, 1}, {1, 9}}));
    CHECK(gout.at(0, 1) == poly_zero(36, 5));
    CHECK(gout.at(0, 2) == poly_terms(36, 5, {{0, 2}, {1, 18}}));  // 2 * (9x + 1)
    CHECK(gout.at(2, 0) == gens[2]);
    CHECK(gout.at(2, 1) == gens[2]);

    const PolyMat zeros = build_gout({poly_zero(36, 5), poly_zero(36, 5), poly_zero(36, 5)}, example41::mixing_matrix());
    for (const Poly& p : zeros.e) CHECK(p.is_zero());
}

TEST_CASE("query shapes and m'-divisibility under the alternative convention") {
    const SchemeParams params = make_params(36, 5, 3, 2, 4, 3);
    const CodeSuite suite = default_suite(params);
    Rng rng(50);
    const auto [query, secrets] = query_gen(params, suite, 3, rng, {});
    CHECK(query.q.rows == params.r * params.t);
    CHECK(query.q.cols == 2 * params.n * params.s);
    for (u64 v : query.q.a) CHECK(v % params.mod.m_prime == 0);
    CHECK(secrets.gamma >= 1);
    CHECK(secrets.gamma <= params.s - params.r + 1);
    CHECK(secrets.u_diag.size() == params.r);

    const SchemeParams tiny = make_params(36, 5, 3, 2, 1, 2);
    Rng rng2(51);
    const auto [q1, sec1] = query_gen(tiny, default_suite(tiny), 1, rng2, {});
    CHECK(q1.q.rows == tiny.r);  // t = 1: a single block of r rows

    CHECK_THROWS_AS(query_gen(params, suite, 0, rng, {}), InvalidIndex);
    CHECK_THROWS_AS(query_gen(params, suite, 5, rng, {}), InvalidIndex);
}

TEST_CASE("server_respond validates inputs") {
    const SchemeParams params = example41::params();
    const Query query = example41::query();
    CHECK(server_respond(make_mat(36, 3, 6), query, params).s_mat.is_zero());

    Mat bad = example41::database();
    bad.at(0, 0) = 7;  // not in Z_6
    CHECK_THROWS_AS(server_respond(bad, query, params), std::invalid_argument);
    CHECK_THROWS_AS(server_respond(make_mat(36, 2, 6), query, params), ShapeMismatch);

    Query zero_q{make_mat(36, 6, 30)};
    CHECK(server_respond(example41::database(), zero_q, params).s_mat.is_zero());
}

TEST_CASE("telescoping identity and E-annihilation hold exactly") {
    const SchemeParams params = make_params(36, 5, 3, 2, 4, 3);
    const CodeSuite suite = default_suite(params);
    Rng rng(60);
    for (int rep = 0; rep < 10; ++rep) {
        const Mat db = random_database(params, rng);
        const std::size_t d = 1 + rng.below(params.t);
        const auto [query, secrets] = query_gen(params, suite, d, rng, {});
        const Response resp = server_respond(db, query, params);
        const RecoverySystems sys = compute_final_systems(resp, suite, secrets, params);

        // B = [DB^d U^d]_m H_Gamma^T exactly.
        PolyMat u_full = make_polymat(36, 5, params.r, params.s);
        for (std::size_t lam = 0; lam < params.r; ++lam)
            u_full.at(lam, secrets.gamma - 1 + lam) = secrets.u_diag[lam];
        Mat dbd = make_mat(36, params.L, params.r);
        for (std::size_t i = 0; i < params.L; ++i)
            for (std::size_t j = 0; j < params.r; ++j) dbd.at(i, j) = db.at(i, (d - 1) * params.r + j);
        PolyMat dbu = make_polymat(36, 5, params.L, params.s);
        for (std::size_t i = 0; i < params.L; ++i)
            for (std::size_t k = 0; k < params.r; ++k)
                for (std::size_t j = 0; j < params.s; ++j)
                    dbu.at(i, j) = poly_add(dbu.at(i, j), poly_scale(dbd.at(i, k), u_full.at(k, j)));
        const Mat expect = mat_mul(expand_flat(dbu), mat_transpose(suite.h_gamma));
        CHECK(sys.b_full == expect);

        // [DB^i E^i]_m H_Gamma^T = 0 for every block.
        for (std::size_t i = 0; i < params.t; ++i) {
            const Mat e_flat = expand_flat(secrets.e_mats[i]);
            CHECK(mat_mul(e_flat, mat_transpose(suite.h_gamma)).is_zero());
        }
    }
}

TEST_CASE("lambda_check worked examples") {
    const CodeSuite suite = example41::suite();
    const Modulus mod = suite.c_in.modulus();

    const LambdaResult l1 = lambda_check(poly_terms(36, 5, {{0, 27}, {1, 27}}), suite.h_in, mod);
    CHECK(l1.z == std::vector<u64>{27, 27, 0, 0, 0});
    CHECK(l1.lambda == 4);
    CHECK_FALSE(l1.pass);

    const LambdaResult l2 = lambda_check(poly_terms(36, 5, {{0, 9}, {1, 9}}), suite.h_in, mod);
    CHECK(l2.z == std::vector<u64>{9, 9, 0, 0, 0});
    CHECK(l2.lambda == 4);
    CHECK_FALSE(l2.pass);

    // A unit coordinate in z means no annihilator below m.
    const SchemeParams params = make_params(36, 5, 3, 2, 3, 3);
    const CodeSuite dsuite = default_suite(params);
    const LambdaResult l3 = lambda_check(poly_terms(36, 5, {{0, 1}}), dsuite.h_in, mod);
    CHECK(l3.lambda == 36);
    CHECK(l3.pass);

    // Entries of C_IN give z = 0.
    CHECK_THROWS_AS(lambda_check(example41::inner_gen(), suite.h_in, mod), ZeroZ);
}

TEST_CASE("golden recovery ambiguity of the worked example") {
    const SchemeParams params = example41::params();
    const CodeSuite suite = example41::suite();
    const QuerySecrets secrets = example41::secrets();
    const Response resp = server_respond(example41::database(), example41::query(), params);
    const RecoverySystems sys = compute_final_systems(resp, suite, secrets, params);

    CHECK(sys.z[0] == std::vector<u64>{9, 9, 0, 0, 0});
    CHECK(sys.z[1] == std::vector<u64>{27, 27, 0, 0, 0});
    CHECK(sys.b[0].is_zero());
    CHECK(sys.b[1] == mat_from(36, {{18, 18, 0, 0, 0}, {27, 27, 0, 0, 0}, {27, 27, 0, 0, 0}}));

    const RecoveryOutcome out = solve_final_systems(sys, params);
    REQUIRE(out.status == RecoveryStatus::Ambiguous);
    bool found11 = false, found22 = false;
    for (const auto& amb : out.ambiguous) {
        if (amb.row == 1 && amb.col == 1) {
            found11 = true;
            CHECK(amb.candidates == std::vector<u64>{0, 4});
        }
        if (amb.row == 2 && amb.col == 2) {
            found22 = true;
            CHECK(amb.candidates == std::vector<u64>{1, 5});
        }
    }
    CHECK(found11);
    CHECK(found22);
}

TEST_CASE("repair makes recovery exact") {
    const SchemeParams params = make_params(36, 5, 3, 2, 5, 3);
    const CodeSuite suite = default_suite(params);
    QueryGenOptions opt;
    opt.repair = true;
    for (u64 seed = 1; seed <= 10; ++seed) {
        Rng rng(split_seed(777, seed));
        const Mat db = random_database(params, rng);
        const std::size_t d = 1 + rng.below(params.t);
        const auto [query, secrets] = query_gen(params, suite, d, rng, opt);
        for (const Poly& u : secrets.u_diag) CHECK(lambda_check(u, suite.h_in, params.mod).pass);
        const RecoveryOutcome out = recover(server_respond(db, query, params), suite, secrets, params);
        REQUIRE(out.status == RecoveryStatus::Recovered);
        for (std::size_t i = 0; i < params.L; ++i)
            for (std::size_t j = 0; j < params.r; ++j) CHECK(out.file.at(i, j) == db.at(i, (d - 1) * params.r + j));
    }
}

TEST_CASE("recovering the zero file") {
    const SchemeParams params = make_params(36, 5, 3, 2, 3, 2);
    const CodeSuite suite = default_suite(params);
    Rng rng(81);
    Mat db = random_database(params, rng);
    const std::size_t d = 2;
    for (std::size_t i = 0; i < params.L; ++i)
        for (std::size_t j = 0; j < params.r; ++j) db.at(i, (d - 1) * params.r + j) = 0;
    QueryGenOptions opt;
    opt.repair = true;
    const auto [query, secrets] = query_gen(params, suite, d, rng, opt);
    const RecoveryOutcome out = recover(server_respond(db, query, params), suite, secrets, params);
    REQUIRE(out.status == RecoveryStatus::Recovered);
    CHECK(out.file.is_zero());
}

TEST_CASE("inconsistent systems report NoSolution") {
    // b is not a multiple of z in any coordinate: a corrupted response.
    const SchemeParams params = example41::params();
    RecoverySystems sys;
    sys.z = {{9, 9, 0, 0, 0}, {27, 27, 0, 0, 0}};
    Mat bad = make_mat(36, params.L, params.n);
    bad.at(0, 0) = 1;
    sys.b = {bad, make_mat(36, params.L, params.n)};
    const RecoveryOutcome out = solve_final_systems(sys, params);
    CHECK(out.status == RecoveryStatus::NoSolution);
    REQUIRE_FALSE(out.inconsistent.empty());
    CHECK(out.inconsistent[0].row == 1);
    CHECK(out.inconsistent[0].col == 1);
}

TEST_CASE("repair resampling cannot succeed on the worked-example suite") {
    // Every element of C~_3 ^ (C_IN-perp \ C_IN) there has lambda < m', so
    // the repair loop must exhaust rather than loop forever or lie.
    const SchemeParams params = example41::params();
    const CodeSuite suite = example41::suite();
    Rng rng(91);
    QueryGenOptions opt;
    opt.repair = true;
    opt.repair_cap = 500;
    CHECK_THROWS_AS(query_gen(params, suite, 2, rng, opt), SamplerExhausted);
}

TEST_CASE("fixture query matches its directly assembled delta") {
    const SchemeParams params = example41::params();
    const CodeSuite suite = example41::suite();
    const QuerySecrets secrets = example41::secrets();
    const Query query = example41::query();

    // Left half is the expansion of the stacked A blocks.
    PolyMat a_all = make_polymat(36, 5, params.r * params.t, params.s);
    for (std::size_t i = 0; i < params.t; ++i)
        for (std::size_t row = 0; row < params.r; ++row)
            for (std::size_t col = 0; col < params.s; ++col)
                a_all.at(i * params.r + row, col) = secrets.a_mats[i].at(row, col);
    const Mat a_flat = expand_flat(a_all);
    for (std::size_t i = 0; i < a_flat.rows; ++i)
        for (std::size_t j = 0; j < a_flat.cols; ++j) CHECK(query.q.at(i, j) == a_flat.at(i, j));

    // Right half is W + E + U computed independently.
    for (std::size_t i = 0; i < params.t; ++i) {
        PolyMat delta = polymat_add(polymat_mul(secrets.a_mats[i], suite.g_out), secrets.e_mats[i]);
        if (i + 1 == secrets.d)
            for (std::size_t lam = 0; lam < params.r; ++lam)
                delta.at(lam, secrets.gamma - 1 + lam) =
                    poly_add(delta.at(lam, secrets.gamma - 1 + lam), secrets.u_diag[lam]);
        const Mat delta_flat = expand_flat(delta);
        for (std::size_t row = 0; row < params.r; ++row)
            for (std::size_t j = 0; j < delta_flat.cols; ++j)
                CHECK(query.q.at(i * params.r + row, params.n * params.s + j) == delta_flat.at(row, j));
    }

    // Fixture E entries really live in C_IN (so their blocks cancel).
    for (const PolyMat& e : secrets.e_mats)
        for (const Poly& p : e.e) CHECK(contains(suite.c_in, p.c));
}
