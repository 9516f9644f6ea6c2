#pragma once

#include <optional>
#include <span>

#include "ringpir/matrix.hpp"

namespace ringpir {

// Subtype (k_0, ..., k_{e-1}): number of standard-form generator rows whose
// pivot has p-adic valuation i.  Determines |C| = p^k with the Z_p-dimension
// k = sum k_i (e - i).
struct Subtype {
    std::vector<u32> counts;

    u32 rank() const {
        u32 k = 0;
        for (u32 c : counts) k += c;
        return k;
    }

    u32 zp_dimension() const {
        const u32 e = static_cast<u32>(counts.size());
        u32 k = 0;
        for (u32 i = 0; i < e; ++i) k += counts[i] * (e - i);
        return k;
    }

    bool is_free() const {
        for (std::size_t i = 1; i < counts.size(); ++i)
            if (counts[i] != 0) return false;
        return true;
    }

    bool operator==(const Subtype&) const = default;
};

// Linear code over the chain ring Z_{p^e} held as a standard-form generator.
// gen_std is in standard (permuted) column order with zero rows dropped;
// col_perm[j] is the original position of standard column j.  Pivot i sits on
// the diagonal and equals p^{v_i} exactly, with v_0 <= v_1 <= ... recorded in
// pivot_val.
struct ChainCode {
    u64 p = 0;
    u32 e = 0;
    u64 pe = 0;
    std::size_t n = 0;
    Mat gen_std;
    std::vector<std::size_t> col_perm;
    std::vector<u32> pivot_val;
    Subtype subtype;

    u32 rank() const { return static_cast<u32>(gen_std.rows); }

    // Generator rows with the column permutation undone.
    Mat generator_rows() const {
        Mat g = make_mat(pe, gen_std.rows, n);
        for (std::size_t i = 0; i < gen_std.rows; ++i)
            for (std::size_t j = 0; j < n; ++j) g.at(i, col_perm[j]) = gen_std.at(i, j);
        return g;
    }
};

// Gaussian elimination over Z_{p^e} tracking p-adic valuations: repeatedly
// pick the remaining entry of minimal valuation (leftmost column, then
// topmost row), move it to the diagonal, normalize its unit part and clear
// the column.  Entries below a pivot p^v all have valuation >= v and vanish;
// entries above are reduced into [0, p^v).
inline ChainCode standard_form(const Mat& g, u64 p, u32 e) {
    const u64 pe = modarith::checked_pow(p, e);
    if (pe == 0 || pe != g.mod) throw ShapeMismatch("standard_form: matrix modulus is not p^e");
    ChainCode code;
    code.p = p;
    code.e = e;
    code.pe = pe;
    code.n = g.cols;
    code.col_perm.resize(g.cols);
    for (std::size_t j = 0; j < g.cols; ++j) code.col_perm[j] = j;
    code.subtype.counts.assign(e, 0);

    Mat m = g;
    std::vector<u64> pow(e + 1, 1);
    for (u32 i = 1; i <= e; ++i) pow[i] = pow[i - 1] * p;

    std::size_t pos = 0;
    while (pos < m.rows && pos < m.cols) {
        u32 best_v = e;
        std::size_t best_r = 0, best_c = 0;
        for (std::size_t c = pos; c < m.cols; ++c)
            for (std::size_t r = pos; r < m.rows; ++r) {
                const u32 v = modarith::valuation(m.at(r, c), p, e);
                if (v < best_v) {
                    best_v = v;
                    best_r = r;
                    best_c = c;
                }
            }
        if (best_v == e) break;  // residual block is zero

        if (best_r != pos)
            for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(pos, j), m.at(best_r, j));
        if (best_c != pos) {
            for (std::size_t i = 0; i < m.rows; ++i) std::swap(m.at(i, pos), m.at(i, best_c));
            std::swap(code.col_perm[pos], code.col_perm[best_c]);
        }

        const u64 unit = m.at(pos, pos) / pow[best_v];
        const u64 unit_inv = modarith::inv(unit, pe);
        for (std::size_t j = pos; j < m.cols; ++j) m.at(pos, j) = modarith::mul(m.at(pos, j), unit_inv, pe);

        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == pos) continue;
            const u64 x = m.at(i, pos);
            const u64 coeff = x / pow[best_v];  // exact below the pivot, floored above
            if (coeff == 0) continue;
            for (std::size_t j = pos; j < m.cols; ++j)
                m.at(i, j) = modarith::sub(m.at(i, j), modarith::mul(coeff, m.at(pos, j), pe), pe);
        }

        code.pivot_val.push_back(best_v);
        code.subtype.counts[best_v] += 1;
        ++pos;
    }

    code.gen_std = make_mat(pe, pos, m.cols);
    for (std::size_t i = 0; i < pos; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) code.gen_std.at(i, j) = m.at(i, j);
    return code;
}

inline u32 zp_dimension(const ChainCode& c) { return c.subtype.zp_dimension(); }

// |C| = p^k; nullopt when p^k overflows 64 bits (the exponent is always
// available through zp_dimension).
inline std::optional<u64> cardinality(const ChainCode& c) {
    const u64 card = modarith::checked_pow(c.p, zp_dimension(c));
    if (card == 0) return std::nullopt;
    return card;
}

inline bool is_free(const ChainCode& c) { return c.subtype.is_free(); }

// Membership by valuation-stratified back-substitution against the pivots;
// avoids any division by zero divisors.
inline bool contains(const ChainCode& c, std::span<const u64> w) {
    if (w.size() != c.n) throw ShapeMismatch("contains: length mismatch");
    std::vector<u64> v(c.n);
    for (std::size_t j = 0; j < c.n; ++j) v[j] = w[c.col_perm[j]] % c.pe;
    std::vector<u64> pow(c.e + 1, 1);
    for (u32 i = 1; i <= c.e; ++i) pow[i] = pow[i - 1] * c.p;
    for (std::size_t i = 0; i < c.gen_std.rows; ++i) {
        const u64 x = v[i];
        if (x == 0) continue;
        const u32 pv = c.pivot_val[i];
        if (x % pow[pv] != 0) return false;  // pivot cannot produce this residue
        const u64 coeff = x / pow[pv];
        for (std::size_t j = i; j < c.n; ++j)
            v[j] = modarith::sub(v[j], modarith::mul(coeff, c.gen_std.at(i, j), c.pe), c.pe);
    }
    for (u64 x : v)
        if (x != 0) return false;
    return true;
}

inline bool contains_all_rows(const ChainCode& c, const Mat& rows) {
    for (std::size_t i = 0; i < rows.rows; ++i) {
        const std::vector<u64> r = mat_row(rows, i);
        if (!contains(c, r)) return false;
    }
    return true;
}

inline bool row_span_equal(const ChainCode& a, const ChainCode& b) {
    if (a.p != b.p || a.e != b.e || a.n != b.n) throw ShapeMismatch("row_span_equal: ring mismatch");
    return contains_all_rows(a, b.generator_rows()) && contains_all_rows(b, a.generator_rows());
}

// Span of the positive-valuation standard-form rows; the zero code when C is
// free.
inline ChainCode non_free_part(const ChainCode& c) {
    const u32 k0 = c.subtype.counts.empty() ? 0 : c.subtype.counts[0];
    const Mat gen = c.generator_rows();
    Mat nf = make_mat(c.pe, gen.rows - k0, c.n);
    for (std::size_t i = k0; i < gen.rows; ++i)
        for (std::size_t j = 0; j < c.n; ++j) nf.at(i - k0, j) = gen.at(i, j);
    return standard_form(nf, c.p, c.e);
}

// Parity-check matrix in standard form via the block recursion
//   B_{i,j} = -sum_{k=i+1}^{j-1} B_{i,k} A_{e-j,e-k}^T - A_{e-j,e-i}^T,
// assembled with Id_{n-K} over the non-pivot columns and p^i Id_{k_{e-i}}
// blocks on the anti-diagonal.  Returned in original column order; rows are
// grouped by valuation, free rows first.  H c^T = 0 exactly characterizes C,
// and the row span of H is the dual code with subtype
// (n - K, k_{e-1}, ..., k_1).
inline Mat parity_check(const ChainCode& c) {
    const u32 e = c.e;
    const std::size_t n = c.n;
    const u64 pe = c.pe;
    const u32 K = c.rank();

    std::vector<u64> pow(e + 1, 1);
    for (u32 i = 1; i <= e; ++i) pow[i] = pow[i - 1] * c.p;

    // Column groups 0..e: groups 0..e-1 are the pivot columns by valuation,
    // group e is the n-K non-pivot columns.  group_size[e] doubles as k_e.
    std::vector<std::size_t> group_size(e + 1, 0);
    for (u32 i = 0; i < e; ++i) group_size[i] = c.subtype.counts[i];
    group_size[e] = n - K;
    std::vector<std::size_t> col_start(e + 2, 0);
    for (u32 i = 0; i <= e; ++i) col_start[i + 1] = col_start[i] + group_size[i];
    std::vector<std::size_t> row_start(e + 1, 0);  // row blocks of gen_std by valuation
    for (u32 i = 0; i < e; ++i) row_start[i + 1] = row_start[i] + c.subtype.counts[i];

    // A_{a,b}: unit parts of row block a under column group b.
    auto a_block = [&](u32 a, u32 b) {
        Mat blk = make_mat(pe, group_size[a], group_size[b]);
        for (std::size_t i = 0; i < blk.rows; ++i)
            for (std::size_t j = 0; j < blk.cols; ++j)
                blk.at(i, j) = c.gen_std.at(row_start[a] + i, col_start[b] + j) / pow[a];
        return blk;
    };

    // H row block i has k_{e-i} rows (k_e = n-K for i = 0).
    auto h_rows = [&](u32 i) { return group_size[e - i]; };

    std::vector<std::vector<Mat>> B(e);  // B[i][j], 0 <= i < j <= e
    for (u32 i = 0; i < e; ++i) {
        B[i].resize(e + 1);
        for (u32 j = i + 1; j <= e; ++j) {
            Mat blk = make_mat(pe, h_rows(i), group_size[e - j]);
            for (u32 k = i + 1; k < j; ++k) {
                const Mat prod = mat_mul(B[i][k], mat_transpose(a_block(e - j, e - k)));
                blk = mat_sub(blk, prod);
            }
            blk = mat_sub(blk, mat_transpose(a_block(e - j, e - i)));
            B[i][j] = blk;
        }
    }

    std::size_t h_row_count = 0;
    for (u32 i = 0; i < e; ++i) h_row_count += h_rows(i);
    Mat h_std = make_mat(pe, h_row_count, n);
    std::size_t r0 = 0;
    for (u32 i = 0; i < e; ++i) {
        // Identity block at column group e-i, scaled by p^i.
        for (std::size_t d = 0; d < h_rows(i); ++d) h_std.at(r0 + d, col_start[e - i] + d) = pow[i] % pe;
        for (u32 j = i + 1; j <= e; ++j) {
            const Mat& blk = B[i][j];
            for (std::size_t a = 0; a < blk.rows; ++a)
                for (std::size_t b = 0; b < blk.cols; ++b)
                    h_std.at(r0 + a, col_start[e - j] + b) = modarith::mul(pow[i] % pe, blk.at(a, b), pe);
        }
        r0 += h_rows(i);
    }

    Mat h = make_mat(pe, h_row_count, n);
    for (std::size_t i = 0; i < h_row_count; ++i)
        for (std::size_t j = 0; j < n; ++j) h.at(i, c.col_perm[j]) = h_std.at(i, j);
    return h;
}

// Code cut out by M x^T = 0, i.e. the dual of the row span of M.
inline ChainCode kernel_code(const Mat& m, u64 p, u32 e) {
    return standard_form(parity_check(standard_form(m, p, e)), p, e);
}

}  // namespace ringpir
