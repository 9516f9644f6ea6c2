#pragma once

#include "ringpir/pir.hpp"

namespace ringpir {

// Built-in worked example over Z_36, n = 5: the instance whose recovery is
// ambiguous and whose final systems are known in closed form.  All choices
// (database, codes, randomness) are fixed, so the whole pipeline is a golden
// test vector.
namespace example41 {

inline SchemeParams params() { return make_params(36, 5, 3, 2, 3, 3); }

inline Poly inner_gen() { return poly_terms(36, 5, {{0, 20}, {1, 28}}); }  // 28x + 20

inline std::vector<Poly> tilde_gens() {
    return {
        poly_terms(36, 5, {{0, 1}, {1, 9}}),    // 9x + 1
        poly_terms(36, 5, {{0, 17}, {1, 1}}),   // x + 17
        poly_terms(36, 5, {{0, 33}, {1, 21}}),  // 21x + 33
    };
}

inline Mat mixing_matrix() { return mat_from(36, {{1, 0, 2}, {0, 1, 0}, {1, 1, 0}}); }

inline CodeSuite suite() { return make_suite(params(), inner_gen(), tilde_gens(), mixing_matrix()); }

inline Mat database() {
    return mat_from(36, {{4, 1, 0, 2, 5, 1}, {1, 3, 4, 1, 3, 0}, {0, 5, 0, 1, 2, 3}});
}

inline Mat printed_h_in() {
    return mat_from(36, {{21, 12, 12, 12, 12}, {0, 9, 0, 0, 0}, {0, 0, 9, 0, 0}, {0, 0, 0, 9, 0}, {0, 0, 0, 0, 9}});
}

inline Mat printed_g_in() {
    return mat_from(36, {{28, 0, 0, 0, 20}, {0, 28, 0, 0, 32}, {0, 0, 28, 0, 8}, {0, 0, 0, 28, 20}, {0, 0, 0, 0, 24}});
}

// The fixed query randomness: A^1..A^3, E^1..E^3, the two retrieval entries
// 9x + 9 and 27x + 27, gamma = 2, d = 2.
inline QuerySecrets secrets() {
    const u64 m = 36;
    const std::size_t n = 5;
    auto pm = [&](std::initializer_list<std::initializer_list<std::initializer_list<u64>>> rows) {
        PolyMat out = make_polymat(m, n, 2, 3);
        std::size_t i = 0;
        for (const auto& row : rows) {
            std::size_t j = 0;
            for (const auto& coeffs : row) {
                std::vector<u64> c(coeffs);
                c.resize(n, 0);
                out.at(i, j) = make_poly(m, std::move(c));
                ++j;
            }
            ++i;
        }
        return out;
    };

    QuerySecrets sec;
    sec.d = 2;
    sec.gamma = 2;
    sec.a_mats = {
        pm({{{0, 0, 0, 6}, {6}, {0, 0, 12}},
            {{18, 12}, {6, 0, 24}, {0, 0, 0, 0, 6}}}),
        pm({{{0, 6, 18}, {0, 24}, {0, 6, 6}},
            {{30}, {6, 12}, {0, 12}}}),
        pm({{{0}, {0, 0, 18}, {12}},
            {{0, 6}, {0, 6, 0, 6}, {12, 6}}}),
    };
    sec.e_mats = {
        pm({{{20, 28, 20, 28}, {0}, {0, 20, 28}},
            {{0, 20, 28, 8, 4}, {0}, {0, 0, 32, 16}}}),
        pm({{{32, 0, 0, 0, 28}, {0, 0, 20, 28}, {16, 16, 4}},
            {{0}, {20, 28, 0, 28, 32}, {0, 12, 24}}}),
        pm({{{20, 20, 32}, {20, 28}, {12, 0, 0, 0, 24}},
            {{24, 28, 8}, {0}, {12, 24}}}),
    };
    sec.u_diag = {
        poly_terms(m, n, {{0, 9}, {1, 9}}),    // 9x + 9
        poly_terms(m, n, {{0, 27}, {1, 27}}),  // 27x + 27
    };
    return sec;
}

inline Query query() { return assemble_query(params(), suite(), secrets()); }

}  // namespace example41

// Default code suite for experiments: C_IN = <(m/m') (1 + x + ... +
// x^{n-1})> and C~_i = <(x - 1) + m/m'> for every i, mixed by the
// unit-upper-triangular all-ones matrix.  Every projection is non-free and
// no projection is a Hensel lift, conditions 1-3 hold, and the non-free part
// of C~_s intersect C_IN-perp contains entries with lambda >= m', so the
// repair condition is satisfiable.
inline CodeSuite default_suite(const SchemeParams& params) {
    const u64 m = params.mod.m;
    const u64 scale = m / params.mod.m_prime;
    std::vector<u64> all_ones(params.n, scale);
    const Poly g_in = make_poly(m, std::move(all_ones));

    Poly tilde = poly_zero(m, params.n);
    tilde.c[0] = (m - 1 + scale) % m;  // (x - 1) + m/m'
    tilde.c[1] = 1;

    Mat mixing = make_mat(m, params.s, params.s);
    for (std::size_t i = 0; i < params.s; ++i)
        for (std::size_t j = i; j < params.s; ++j) mixing.at(i, j) = 1;

    return make_suite(params, g_in, std::vector<Poly>(params.s, tilde), mixing);
}

inline Mat random_database(const SchemeParams& params, Rng& rng) {
    Mat db = make_mat(params.mod.m, params.L, params.r * params.t);
    for (u64& v : db.a) v = rng.below(params.mod.m_prime);
    return db;
}

}  // namespace ringpir
