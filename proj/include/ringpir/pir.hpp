#pragma once

#include <string>

#include "ringpir/cyclic_code.hpp"
#include "ringpir/zm_code.hpp"

namespace ringpir {

struct SchemeParams {
    Modulus mod;
    std::size_t n = 0;  // code length
    std::size_t s = 0;  // outer dimension
    std::size_t r = 0;  // file columns
    std::size_t t = 0;  // number of files
    std::size_t L = 0;  // file rows
};

inline SchemeParams make_params(u64 m, std::size_t n, std::size_t s, std::size_t r, std::size_t t, std::size_t L) {
    SchemeParams p{validate_modulus(m, n), n, s, r, t, L};
    if (r < 1 || s < r) throw std::invalid_argument("params: need s >= r >= 1");
    if (t < 1 || L < 1) throw std::invalid_argument("params: need t, L >= 1");
    return p;
}

// The user's key material: inner code, nested outer constituents with their
// generator polynomials, the mixing matrix and everything derived from them.
struct CodeSuite {
    ZmCode c_in;
    Poly g_in;
    std::vector<ZmCode> tilde;
    std::vector<Poly> tilde_gens;
    Mat m_mat;       // s x s over Z_m
    PolyMat g_out;   // diag(tilde_gens) * M
    ZmCode gamma_in; // s-fold product of c_in, length s n
    Mat h_gamma;     // block diagonal of h_in, (s n) x (s n)
    Mat h_in;        // n x n parity check of c_in over Z_m
};

// G_OUT := diag(g_1, ..., g_s) * M, making every row a visible member of the
// matrix-product code.
inline PolyMat build_gout(const std::vector<Poly>& tilde_gens, const Mat& m_mat) {
    const std::size_t s = tilde_gens.size();
    if (m_mat.rows != s || m_mat.cols != s) throw ShapeMismatch("build_gout: M must be s x s");
    const std::size_t n = tilde_gens.front().n();
    PolyMat g = make_polymat(m_mat.mod, n, s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) g.at(i, j) = poly_scale(m_mat.at(i, j), tilde_gens[i]);
    return g;
}

inline CodeSuite make_suite(const SchemeParams& params, const Poly& g_in, const std::vector<Poly>& tilde_gens,
                            const Mat& m_mat) {
    if (tilde_gens.size() != params.s) throw ShapeMismatch("make_suite: need s outer generator polynomials");
    if (g_in.mod != params.mod.m || g_in.n() != params.n) throw ShapeMismatch("make_suite: inner generator ring");
    CodeSuite suite;
    suite.g_in = g_in;
    suite.c_in = zm_from_generator(params.mod, circulant_expand(g_in));
    suite.tilde_gens = tilde_gens;
    for (const Poly& g : tilde_gens) {
        if (g.mod != params.mod.m || g.n() != params.n) throw ShapeMismatch("make_suite: outer generator ring");
        suite.tilde.push_back(zm_from_generator(params.mod, circulant_expand(g)));
    }
    suite.m_mat = m_mat;
    suite.g_out = build_gout(tilde_gens, m_mat);
    suite.h_in = parity_check_zm(suite.c_in);

    const std::size_t n = params.n, s = params.s;
    Mat gamma_gen = make_mat(params.mod.m, s * suite.c_in.generator().rows, s * n);
    for (std::size_t b = 0; b < s; ++b)
        for (std::size_t i = 0; i < suite.c_in.generator().rows; ++i)
            for (std::size_t j = 0; j < n; ++j)
                gamma_gen.at(b * suite.c_in.generator().rows + i, b * n + j) = suite.c_in.generator().at(i, j);
    suite.gamma_in = zm_from_generator(params.mod, gamma_gen);

    suite.h_gamma = make_mat(params.mod.m, s * n, s * n);
    for (std::size_t b = 0; b < s; ++b)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) suite.h_gamma.at(b * n + i, b * n + j) = suite.h_in.at(i, j);
    return suite;
}

struct ValidationReport {
    bool nested = false;             // condition 1
    bool meets_inner = false;        // condition 2, first half
    bool meets_dual_minus_inner = false;  // condition 2, second half
    bool no_hensel_lifts = false;    // condition 3 (advisory for recovery)
    bool m_invertible = false;       // warning only; recovery never inverts M
    std::vector<std::string> notes;

    bool recovery_conditions_ok() const { return nested && meets_inner && meets_dual_minus_inner; }
};

namespace detail {

inline u64 det_mod(const Mat& m) {
    // Fraction-free Gaussian elimination via Bareiss would be overkill for
    // s x s with tiny s; expand by minors instead.
    if (m.rows != m.cols) throw ShapeMismatch("det: not square");
    const std::size_t n = m.rows;
    if (n == 0) return 1 % m.mod;
    if (n == 1) return m.at(0, 0);
    u64 det = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (m.at(0, j) == 0) continue;
        Mat minor = make_mat(m.mod, n - 1, n - 1);
        for (std::size_t a = 1; a < n; ++a) {
            std::size_t cc = 0;
            for (std::size_t b = 0; b < n; ++b) {
                if (b == j) continue;
                minor.at(a - 1, cc++) = m.at(a, b);
            }
        }
        const u64 term = modarith::mul(m.at(0, j), det_mod(minor), m.mod);
        det = (j % 2 == 0) ? modarith::add(det, term, m.mod) : modarith::sub(det, term, m.mod);
    }
    return det;
}

inline bool code_subset(const ZmCode& a, const ZmCode& b) { return contains_all_rows(b, a.generator()); }

}  // namespace detail

// Checks the scheme's three query-generation conditions.  Condition 3 only
// matters for query privacy; the report flags it without failing recovery.
inline ValidationReport validate_suite(const SchemeParams& params, const CodeSuite& suite) {
    ValidationReport report;

    report.nested = true;
    for (std::size_t i = 0; i + 1 < suite.tilde.size(); ++i)
        if (!detail::code_subset(suite.tilde[i + 1], suite.tilde[i])) {
            report.nested = false;
            report.notes.push_back("condition 1: C~_" + std::to_string(i + 2) + " is not contained in C~_" +
                                   std::to_string(i + 1));
        }

    const ZmCode inner_meet = intersect(suite.tilde.back(), suite.c_in);
    report.meets_inner = !inner_meet.generator().is_zero();
    if (!report.meets_inner) report.notes.push_back("condition 2: C~_s meets C_IN trivially");

    const ZmCode dual_meet = intersect(suite.tilde.back(), dual(suite.c_in));
    report.meets_dual_minus_inner = !detail::code_subset(dual_meet, suite.c_in);
    if (!report.meets_dual_minus_inner)
        report.notes.push_back("condition 2: C~_s meets C_IN-perp only inside C_IN");

    report.no_hensel_lifts = true;
    for (std::size_t j = 0; j < suite.tilde_gens.size(); ++j)
        for (std::size_t i = 0; i < params.mod.ell(); ++i) {
            const PrimePower& f = params.mod.factors[i];
            const CyclicCode proj = cyclic_from_poly(f.p, f.e, poly_reduce(suite.tilde_gens[j], f.pe));
            if (is_hensel_lift_code(proj)) {
                report.no_hensel_lifts = false;
                report.notes.push_back("condition 3: projection of C~_" + std::to_string(j + 1) + " mod " +
                                       std::to_string(f.pe) + " is a Hensel lift");
            }
        }

    const u64 det = detail::det_mod(suite.m_mat);
    report.m_invertible = det != 0 && std::gcd(det, params.mod.m) == 1;
    if (!report.m_invertible)
        report.notes.push_back("warning: det(M) = " + std::to_string(det) + " is not a unit mod " +
                               std::to_string(params.mod.m));
    return report;
}

// Q = [A | Delta] expanded to residues, rt x 2ns.
struct Query {
    Mat q;
};

struct QuerySecrets {
    std::size_t d = 0;      // desired file index, 1-based
    std::size_t gamma = 0;  // column position, 1-based
    std::vector<PolyMat> a_mats;  // t matrices, r x s over R
    std::vector<PolyMat> e_mats;  // t matrices, r x s over R
    std::vector<Poly> u_diag;     // the r nonzero entries of U^d
};

struct Response {
    Mat s_mat;  // L x 2ns
};

// Minimal nonzero annihilator of z = [u]_m * H_in^T, scanned over 1..m-1;
// lambda = m when z contains a unit.  The repair condition is lambda >= m'.
struct LambdaResult {
    u64 lambda = 0;
    bool pass = false;
    std::vector<u64> z;
};

inline LambdaResult lambda_check(const Poly& u_entry, const Mat& h_in, const Modulus& mod) {
    if (u_entry.mod != mod.m) throw ShapeMismatch("lambda_check: entry not over Z_m");
    const Mat z_mat = mat_mul(expand_flat_row(u_entry), mat_transpose(h_in));
    const std::vector<u64> z = mat_row(z_mat, 0);
    bool zero = true;
    for (u64 v : z) zero = zero && v == 0;
    if (zero) throw ZeroZ("lambda_check: z vanishes (entry lies in C_IN)");
    u64 lambda = mod.m;
    for (u64 cand = 1; cand < mod.m; ++cand) {
        bool kills = true;
        for (u64 v : z)
            if (modarith::mul(cand, v, mod.m) != 0) {
                kills = false;
                break;
            }
        if (kills) {
            lambda = cand;
            break;
        }
    }
    return {lambda, lambda >= mod.m_prime, z};
}

struct QueryGenOptions {
    NfOptions nf;
    bool repair = false;
    u64 repair_cap = 10000;
    u64 not_in_cin_cap = 1000000;
};

// Assembles Q = [A | Delta] from explicitly given parts; query_gen samples
// the parts and defers here, and fixtures inject their fixed choices.
inline Query assemble_query(const SchemeParams& params, const CodeSuite& suite, const QuerySecrets& secrets) {
    const std::size_t n = params.n, s = params.s, r = params.r, t = params.t;
    PolyMat a_all = make_polymat(params.mod.m, n, r * t, s);
    PolyMat delta_all = make_polymat(params.mod.m, n, r * t, s);
    for (std::size_t i = 0; i < t; ++i) {
        const PolyMat& a = secrets.a_mats[i];
        const PolyMat w = polymat_mul(a, suite.g_out);
        PolyMat delta = polymat_add(w, secrets.e_mats[i]);
        if (i + 1 == secrets.d) {
            for (std::size_t lam = 0; lam < r; ++lam) {
                Poly& slot = delta.at(lam, secrets.gamma - 1 + lam);
                slot = poly_add(slot, secrets.u_diag[lam]);
            }
        }
        for (std::size_t row = 0; row < r; ++row)
            for (std::size_t col = 0; col < s; ++col) {
                a_all.at(i * r + row, col) = a.at(row, col);
                delta_all.at(i * r + row, col) = delta.at(row, col);
            }
    }
    const Mat a_flat = expand_flat(a_all);
    const Mat delta_flat = expand_flat(delta_all);
    Mat q = make_mat(params.mod.m, r * t, 2 * n * s);
    for (std::size_t i = 0; i < q.rows; ++i) {
        for (std::size_t j = 0; j < n * s; ++j) {
            q.at(i, j) = a_flat.at(i, j);
            q.at(i, n * s + j) = delta_flat.at(i, j);
        }
    }
    return Query{std::move(q)};
}

// Query generation: A^i uniform over m'R, E^i from nf(C_IN), U^d diagonal
// entries from nf(C~_s intersect C_IN-perp) with an explicit not-in-C_IN
// rejection; with repair set, entries are resampled until every
// lambda_i >= m'.  Callers are expected to have run validate_suite;
// conditions 1-2 must hold for the samplers to terminate, condition 3 is
// advisory.
inline std::pair<Query, QuerySecrets> query_gen(const SchemeParams& params, const CodeSuite& suite, std::size_t d,
                                                Rng& rng, const QueryGenOptions& opt = {}) {
    if (d < 1 || d > params.t) throw InvalidIndex("query_gen: d out of range");
    const std::size_t n = params.n, s = params.s, r = params.r, t = params.t;
    const u64 m = params.mod.m, mp = params.mod.m_prime;

    QuerySecrets secrets;
    secrets.d = d;
    secrets.gamma = 1 + rng.below(s - r + 1);

    for (std::size_t i = 0; i < t; ++i) {
        PolyMat a = make_polymat(m, n, r, s);
        for (Poly& p : a.e) {
            for (u64& coeff : p.c) coeff = mp * rng.below(m / mp);
        }
        secrets.a_mats.push_back(std::move(a));

        PolyMat e = make_polymat(m, n, r, s);
        for (Poly& p : e.e) p = make_poly(m, sample_nonfree(suite.c_in, rng, opt.nf));
        secrets.e_mats.push_back(std::move(e));
    }

    const ZmCode u_code = intersect(suite.tilde.back(), dual(suite.c_in));
    for (std::size_t lam = 0; lam < r; ++lam) {
        Poly u = poly_zero(m, n);
        bool found = false;
        const u64 cap = opt.repair ? opt.repair_cap : opt.not_in_cin_cap;
        for (u64 attempt = 0; attempt < cap; ++attempt) {
            const std::vector<u64> w = sample_nonfree(u_code, rng, opt.nf);
            if (contains(suite.c_in, w)) continue;  // the set difference C_IN-perp \ C_IN
            u = make_poly(m, w);
            if (opt.repair && !lambda_check(u, suite.h_in, params.mod).pass) continue;
            found = true;
            break;
        }
        if (!found)
            throw SamplerExhausted(opt.repair ? "query_gen: repair resampling cap reached"
                                              : "query_gen: no usable retrieval entry found");
        secrets.u_diag.push_back(std::move(u));
    }

    Query q = assemble_query(params, suite, secrets);
    return {std::move(q), std::move(secrets)};
}

// S := DB * Q over Z_m.  Database entries must come from the data alphabet
// Z_{m'}.
inline Response server_respond(const Mat& db, const Query& query, const SchemeParams& params) {
    if (db.rows != params.L || db.cols != params.r * params.t) throw ShapeMismatch("server_respond: DB shape");
    if (db.mod != params.mod.m) throw ShapeMismatch("server_respond: DB must be embedded in Z_m");
    for (u64 v : db.a)
        if (v >= params.mod.m_prime) throw std::invalid_argument("server_respond: DB entry not in Z_{m'}");
    if (query.q.rows != params.r * params.t || query.q.cols != 2 * params.n * params.s)
        throw ShapeMismatch("server_respond: query shape");
    return Response{mat_mul(db, query.q)};
}

// The r final linear systems b^{gamma+i} = x * z_i of the recovering stage.
struct RecoverySystems {
    std::vector<std::vector<u64>> z;  // r rows of length n
    std::vector<Mat> b;               // r blocks, L x n
    Mat b_full;                       // L x sn, all blocks
};

inline RecoverySystems compute_final_systems(const Response& resp, const CodeSuite& suite,
                                             const QuerySecrets& secrets, const SchemeParams& params) {
    const std::size_t n = params.n, s = params.s, r = params.r;
    if (resp.s_mat.cols != 2 * n * s || resp.s_mat.rows != params.L) throw ShapeMismatch("recover: response shape");

    Mat s1 = make_mat(params.mod.m, params.L, n * s);
    Mat s2 = make_mat(params.mod.m, params.L, n * s);
    for (std::size_t i = 0; i < params.L; ++i)
        for (std::size_t j = 0; j < n * s; ++j) {
            s1.at(i, j) = resp.s_mat.at(i, j);
            s2.at(i, j) = resp.s_mat.at(i, n * s + j);
        }
    const PolyMat s1r = unexpand(s1, n);
    const PolyMat s2r = unexpand(s2, n);
    const PolyMat diff = polymat_sub(s2r, polymat_mul(s1r, suite.g_out));
    const Mat b_full = mat_mul(expand_flat(diff), mat_transpose(suite.h_gamma));

    RecoverySystems sys;
    sys.b_full = b_full;
    for (std::size_t i = 0; i < r; ++i) {
        const Mat z_mat = mat_mul(expand_flat_row(secrets.u_diag[i]), mat_transpose(suite.h_in));
        sys.z.push_back(mat_row(z_mat, 0));
        Mat blk = make_mat(params.mod.m, params.L, n);
        const std::size_t offset = (secrets.gamma - 1 + i) * n;
        for (std::size_t a = 0; a < params.L; ++a)
            for (std::size_t c = 0; c < n; ++c) blk.at(a, c) = b_full.at(a, offset + c);
        sys.b.push_back(std::move(blk));
    }
    return sys;
}

enum class RecoveryStatus { Recovered, Ambiguous, NoSolution };

struct CoordinateCandidates {
    std::size_t row = 0;  // 1-based
    std::size_t col = 0;  // 1-based, within the file
    std::vector<u64> candidates;
};

struct RecoveryOutcome {
    RecoveryStatus status = RecoveryStatus::Recovered;
    Mat file;  // L x r over Z_{m'}; valid when status == Recovered
    std::vector<CoordinateCandidates> ambiguous;    // coordinates with > 1 candidate
    std::vector<CoordinateCandidates> inconsistent; // coordinates with no candidate
};

// Solves each coordinate by exhaustive scan of x in {0, ..., m'-1}; reports
// the full candidate set on ambiguity instead of guessing.
inline RecoveryOutcome solve_final_systems(const RecoverySystems& sys, const SchemeParams& params) {
    RecoveryOutcome out;
    out.file = make_mat(params.mod.m_prime, params.L, params.r);
    for (std::size_t i = 0; i < params.r; ++i) {
        const std::vector<u64>& z = sys.z[i];
        for (std::size_t row = 0; row < params.L; ++row) {
            std::vector<u64> candidates;
            for (u64 x = 0; x < params.mod.m_prime; ++x) {
                bool ok = true;
                for (std::size_t c = 0; c < z.size(); ++c)
                    if (modarith::mul(x, z[c], params.mod.m) != sys.b[i].at(row, c)) {
                        ok = false;
                        break;
                    }
                if (ok) candidates.push_back(x);
            }
            if (candidates.empty()) {
                out.inconsistent.push_back({row + 1, i + 1, {}});
            } else if (candidates.size() > 1) {
                out.ambiguous.push_back({row + 1, i + 1, candidates});
            } else {
                out.file.at(row, i) = candidates[0];
            }
        }
    }
    if (!out.inconsistent.empty())
        out.status = RecoveryStatus::NoSolution;
    else if (!out.ambiguous.empty())
        out.status = RecoveryStatus::Ambiguous;
    return out;
}

inline RecoveryOutcome recover(const Response& resp, const CodeSuite& suite, const QuerySecrets& secrets,
                               const SchemeParams& params) {
    return solve_final_systems(compute_final_systems(resp, suite, secrets, params), params);
}

}  // namespace ringpir
