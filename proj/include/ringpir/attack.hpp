#pragma once

#include <atomic>
#include <thread>

#include "ringpir/pir.hpp"

namespace ringpir {

// Left and right halves of the public query matrix.
inline std::pair<Mat, Mat> split_query(const Query& query, const SchemeParams& params) {
    const std::size_t half = params.n * params.s;
    if (query.q.cols != 2 * half || query.q.rows != params.r * params.t)
        throw ShapeMismatch("split_query: query is not rt x 2ns");
    Mat a = make_mat(query.q.mod, query.q.rows, half);
    Mat delta = make_mat(query.q.mod, query.q.rows, half);
    for (std::size_t i = 0; i < query.q.rows; ++i)
        for (std::size_t j = 0; j < half; ++j) {
            a.at(i, j) = query.q.at(i, j);
            delta.at(i, j) = query.q.at(i, half + j);
        }
    return {std::move(a), std::move(delta)};
}

// Removes the r rows belonging to file block j (1-based), order preserved.
inline Mat delete_block(const Mat& x, std::size_t j, std::size_t r) {
    if (j < 1 || j * r > x.rows) throw IndexOutOfRange("delete_block: block index out of range");
    Mat out = make_mat(x.mod, x.rows - r, x.cols);
    std::size_t row = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        if (i >= (j - 1) * r && i < j * r) continue;
        for (std::size_t c = 0; c < x.cols; ++c) out.at(row, c) = x.at(i, c);
        ++row;
    }
    return out;
}

struct AttackOptions {
    NfConvention convention = NfConvention::Alternative;
    unsigned threads = 1;
};

struct PrimeAttack {
    std::vector<u32> dims;           // dim_i(Z[j]) for j = 1..t
    std::vector<std::size_t> argmin; // 1-based indices attaining the minimum
};

enum class AttackVerdict { Unique, Ambiguous, Empty };

struct AttackResult {
    std::vector<PrimeAttack> per_prime;
    std::vector<std::size_t> intersection;  // 1-based candidate indices
    AttackVerdict verdict = AttackVerdict::Ambiguous;
    std::size_t d_hat = 0;  // valid when verdict == Unique
};

namespace detail {

// dim_i of Z[j] = H[j] * Delta[j] where H[j] is the standard-form parity
// check of the code generated by A[j]^T.  Under the Standard convention the
// deleted blocks need not be multiples of p_i, and only the free rows of
// H[j] carry the comparison.
inline u32 attack_dim(const Mat& a_proj, const Mat& delta_proj, std::size_t j, const SchemeParams& params,
                      std::size_t prime_idx, NfConvention conv) {
    const PrimePower& f = params.mod.factors[prime_idx];
    const Mat a_del = delete_block(a_proj, j, params.r);
    const Mat delta_del = delete_block(delta_proj, j, params.r);
    const Mat h = parity_check(standard_form(mat_transpose(a_del), f.p, f.e));
    Mat h_used = h;
    if (conv == NfConvention::Standard) {
        std::size_t free_rows = 0;
        while (free_rows < h.rows) {
            bool unit_row = false;
            for (std::size_t c = 0; c < h.cols && !unit_row; ++c)
                unit_row = h.at(free_rows, c) % f.p != 0;
            if (!unit_row) break;  // rows are grouped by valuation, free first
            ++free_rows;
        }
        h_used = make_mat(h.mod, free_rows, h.cols);
        for (std::size_t i = 0; i < free_rows; ++i)
            for (std::size_t c = 0; c < h.cols; ++c) h_used.at(i, c) = h.at(i, c);
    }
    const Mat z = mat_mul(h_used, delta_del);
    return zp_dimension(standard_form(z, f.p, f.e));
}

template <typename Fn>
inline void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (std::thread& th : pool) th.join();
}

}  // namespace detail

// Z_{p_i}-dimension profile of the block-deleted queries for one prime, plus
// the argmin index set S_i.
inline PrimeAttack attack_prime(const Query& query, const SchemeParams& params, std::size_t prime_idx,
                                const AttackOptions& opt = {}) {
    if (prime_idx >= params.mod.ell()) throw IndexOutOfRange("attack_prime: prime index out of range");
    const auto [a, delta] = split_query(query, params);
    const PrimePower& f = params.mod.factors[prime_idx];
    const Mat a_proj = mat_reduce(a, f.pe);
    const Mat delta_proj = mat_reduce(delta, f.pe);

    PrimeAttack result;
    result.dims.assign(params.t, 0);
    detail::parallel_for(params.t, opt.threads, [&](std::size_t idx) {
        result.dims[idx] = detail::attack_dim(a_proj, delta_proj, idx + 1, params, prime_idx, opt.convention);
    });
    u32 min_dim = result.dims[0];
    for (u32 d : result.dims) min_dim = std::min(min_dim, d);
    for (std::size_t j = 0; j < params.t; ++j)
        if (result.dims[j] == min_dim) result.argmin.push_back(j + 1);
    return result;
}

// Full attack: argmin sets per prime, intersected.  Deterministic in Q; the
// (prime, block) work items are independent and run on the requested number
// of threads with index-ordered aggregation.
inline AttackResult attack(const Query& query, const SchemeParams& params, const AttackOptions& opt = {}) {
    const auto [a, delta] = split_query(query, params);
    const std::size_t ell = params.mod.ell();

    AttackResult result;
    result.per_prime.resize(ell);
    for (auto& pa : result.per_prime) pa.dims.assign(params.t, 0);

    std::vector<Mat> a_proj, delta_proj;
    for (std::size_t i = 0; i < ell; ++i) {
        a_proj.push_back(mat_reduce(a, params.mod.factors[i].pe));
        delta_proj.push_back(mat_reduce(delta, params.mod.factors[i].pe));
    }
    detail::parallel_for(ell * params.t, opt.threads, [&](std::size_t idx) {
        const std::size_t i = idx / params.t;
        const std::size_t j = idx % params.t;
        result.per_prime[i].dims[j] = detail::attack_dim(a_proj[i], delta_proj[i], j + 1, params, i, opt.convention);
    });

    for (std::size_t i = 0; i < ell; ++i) {
        PrimeAttack& pa = result.per_prime[i];
        u32 min_dim = pa.dims[0];
        for (u32 d : pa.dims) min_dim = std::min(min_dim, d);
        for (std::size_t j = 0; j < params.t; ++j)
            if (pa.dims[j] == min_dim) pa.argmin.push_back(j + 1);
    }

    result.intersection.clear();
    for (std::size_t j = 1; j <= params.t; ++j) {
        bool in_all = true;
        for (const PrimeAttack& pa : result.per_prime) {
            bool found = false;
            for (std::size_t v : pa.argmin) found = found || v == j;
            if (!found) {
                in_all = false;
                break;
            }
        }
        if (in_all) result.intersection.push_back(j);
    }
    if (result.intersection.empty())
        result.verdict = AttackVerdict::Empty;
    else if (result.intersection.size() == 1) {
        result.verdict = AttackVerdict::Unique;
        result.d_hat = result.intersection[0];
    } else {
        result.verdict = AttackVerdict::Ambiguous;
    }
    return result;
}

// Smallest t satisfying each of the three attack inequalities: the
// Z[j] != 0 bound t > 2ns/r + 1, the dimension-gap bound
// t >= (K + ns)/r + 2 (K = rank of nf(Gamma_IN)), and the K-free general
// bound t >= 2ns/r + 2.
struct AttackBounds {
    u64 t_zj = 0;
    std::optional<u64> t_dim;
    u64 t_general = 0;
};

inline AttackBounds bounds(u64 n, u64 s, u64 r, std::optional<u64> k_nf = std::nullopt) {
    if (n < 1 || s < 1 || r < 1) throw std::invalid_argument("bounds: parameters must be positive");
    AttackBounds b;
    b.t_zj = (2 * n * s + r) / r + 1;  // strict inequality: floor + 1
    b.t_general = (2 * n * s + 2 * r + r - 1) / r;
    if (k_nf) b.t_dim = (*k_nf + n * s + 2 * r + r - 1) / r;
    return b;
}

// Empirical frequency of positive-rank free codes among uniformly random
// rows x length generator matrices over Z_{p^e}.
inline double empirical_free_density(u64 p, u32 e, std::size_t length, std::size_t rows, std::size_t trials,
                                     Rng& rng) {
    const u64 pe = modarith::checked_pow(p, e);
    if (pe == 0) throw std::invalid_argument("empirical_free_density: p^e overflows");
    std::size_t free_count = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Mat g = make_mat(pe, rows, length);
        for (u64& v : g.a) v = rng.below(pe);
        const ChainCode c = standard_form(g, p, e);
        if (is_free(c) && c.rank() > 0) ++free_count;
    }
    return trials == 0 ? 0.0 : static_cast<double>(free_count) / static_cast<double>(trials);
}

}  // namespace ringpir
