#pragma once

#include <deque>
#include <memory>
#include <mutex>

#include "ringpir/chain_code.hpp"
#include "ringpir/rng.hpp"

namespace ringpir {

// Which reading of the non-free part applies over Z_m: Standard keeps a
// codeword whose projection is non-free for at least one prime, Alternative
// requires it for all primes (and hence forces divisibility by m').
enum class NfConvention { Standard, Alternative };

inline const char* to_string(NfConvention c) {
    return c == NfConvention::Standard ? "standard" : "alternative";
}

struct NfOptions {
    NfConvention convention = NfConvention::Alternative;
    // nf({0}) := {0} when set; otherwise the zero code contributes an empty
    // non-free part and can never certify membership.
    bool zero_code_nf_is_zero = true;
    u64 rejection_cap = 1000000;
};

// Linear code over Z_m as a CRT bundle of chain-ring codes.  Carries a Z_m
// generator matrix; per-prime components are materialized lazily and shared
// between copies (first access is synchronized and idempotent).
class ZmCode {
  public:
    ZmCode() = default;

    ZmCode(Modulus mod, Mat generator) : mod_(std::move(mod)), gen_(std::move(generator)) {
        if (gen_.mod != mod_.m) throw ShapeMismatch("ZmCode: generator not over Z_m");
        cache_ = std::make_shared<Cache>(mod_.ell());
    }

    const Modulus& modulus() const { return mod_; }
    std::size_t length() const { return gen_.cols; }
    const Mat& generator() const { return gen_; }

    const ChainCode& component(std::size_t i) const {
        if (i >= mod_.ell()) throw IndexOutOfRange("ZmCode: prime index out of range");
        std::call_once(cache_->flags[i], [&] {
            const PrimePower& f = mod_.factors[i];
            cache_->comp[i] = standard_form(mat_reduce(gen_, f.pe), f.p, f.e);
        });
        return *cache_->comp[i];
    }

  private:
    struct Cache {
        explicit Cache(std::size_t ell) : flags(ell), comp(ell) {}
        std::deque<std::once_flag> flags;
        std::vector<std::optional<ChainCode>> comp;
    };

    Modulus mod_;
    Mat gen_;
    std::shared_ptr<Cache> cache_;
};

inline ZmCode zm_from_generator(const Modulus& mod, Mat generator) { return ZmCode(mod, std::move(generator)); }

inline ZmCode zm_zero(const Modulus& mod, std::size_t n) { return ZmCode(mod, make_mat(mod.m, 0, n)); }

inline ZmCode zm_full(const Modulus& mod, std::size_t n) { return ZmCode(mod, mat_identity(mod.m, n)); }

inline const ChainCode& project(const ZmCode& c, std::size_t i) { return c.component(i); }

// Free over Z_m: every projection free of one common rank.
inline bool is_free(const ZmCode& c) {
    u32 rank0 = 0;
    for (std::size_t i = 0; i < c.modulus().ell(); ++i) {
        const ChainCode& comp = c.component(i);
        if (!is_free(comp)) return false;
        if (i == 0)
            rank0 = comp.rank();
        else if (comp.rank() != rank0)
            return false;
    }
    return true;
}

inline bool contains(const ZmCode& c, std::span<const u64> w) {
    if (w.size() != c.length()) throw ShapeMismatch("contains: length mismatch");
    for (std::size_t i = 0; i < c.modulus().ell(); ++i) {
        std::vector<u64> wi(w.begin(), w.end());
        for (u64& v : wi) v %= c.modulus().factors[i].pe;
        if (!contains(c.component(i), wi)) return false;
    }
    return true;
}

inline bool contains_all_rows(const ZmCode& c, const Mat& rows) {
    for (std::size_t i = 0; i < rows.rows; ++i) {
        const std::vector<u64> r = mat_row(rows, i);
        if (!contains(c, r)) return false;
    }
    return true;
}

inline bool row_span_equal(const ZmCode& a, const ZmCode& b) {
    if (a.modulus().m != b.modulus().m || a.length() != b.length())
        throw ShapeMismatch("row_span_equal: ring mismatch");
    return contains_all_rows(a, b.generator()) && contains_all_rows(b, a.generator());
}

inline bool row_span_equal_zm(const Modulus& mod, const Mat& a, const Mat& b) {
    return row_span_equal(zm_from_generator(mod, a), zm_from_generator(mod, b));
}

namespace detail {

// CRT-combines per-prime generator matrices (padded with zero rows to a
// common height) into a Z_m generator of the product module.
inline ZmCode zm_from_prime_generators(const Modulus& mod, std::vector<Mat> gens) {
    std::size_t rows = 0;
    for (const Mat& g : gens) rows = std::max(rows, g.rows);
    std::vector<Mat> padded;
    padded.reserve(gens.size());
    for (Mat& g : gens) padded.push_back(mat_pad_rows(g, rows));
    return zm_from_generator(mod, crt_combine(padded, mod));
}

}  // namespace detail

// Square n x n parity-check matrix over Z_m: per-prime parity checks padded
// to n rows and CRT-combined, so the scheme's row constant is a = n.
inline Mat parity_check_zm(const ZmCode& c) {
    std::vector<Mat> per_prime;
    per_prime.reserve(c.modulus().ell());
    for (std::size_t i = 0; i < c.modulus().ell(); ++i)
        per_prime.push_back(mat_pad_rows(parity_check(c.component(i)), c.length()));
    return crt_combine(per_prime, c.modulus());
}

inline ZmCode dual(const ZmCode& c) {
    std::vector<Mat> gens;
    gens.reserve(c.modulus().ell());
    for (std::size_t i = 0; i < c.modulus().ell(); ++i) gens.push_back(parity_check(c.component(i)));
    return detail::zm_from_prime_generators(c.modulus(), std::move(gens));
}

// Exact module intersection: per prime the kernel of the stacked parity
// checks of both operands.
inline ZmCode intersect(const ZmCode& a, const ZmCode& b) {
    if (a.modulus().m != b.modulus().m || a.length() != b.length()) throw ShapeMismatch("intersect: ring mismatch");
    std::vector<Mat> gens;
    for (std::size_t i = 0; i < a.modulus().ell(); ++i) {
        const PrimePower& f = a.modulus().factors[i];
        const Mat stacked = mat_vstack(parity_check(a.component(i)), parity_check(b.component(i)));
        gens.push_back(kernel_code(stacked, f.p, f.e).generator_rows());
    }
    return detail::zm_from_prime_generators(a.modulus(), std::move(gens));
}

namespace detail {

inline bool nf_component_member(const ChainCode& comp, std::span<const u64> wi, const NfOptions& opt) {
    if (comp.rank() == 0) {
        // Projection of the code is {0}; wi is 0 here because w is a codeword.
        return opt.zero_code_nf_is_zero;
    }
    return contains(non_free_part(comp), wi);
}

// Uniform over the row span: coefficients c_j uniform in [0, p^{e-v_j}).
inline std::vector<u64> sample_uniform(const ChainCode& c, Rng& rng) {
    std::vector<u64> w(c.n, 0);
    const Mat gen = c.generator_rows();
    for (std::size_t i = 0; i < gen.rows; ++i) {
        const u64 range = modarith::checked_pow(c.p, c.e - c.pivot_val[i]);
        const u64 coeff = rng.below(range);
        if (coeff == 0) continue;
        for (std::size_t j = 0; j < c.n; ++j)
            w[j] = modarith::add(w[j], modarith::mul(coeff, gen.at(i, j), c.pe), c.pe);
    }
    return w;
}

}  // namespace detail

// Precondition: w is a codeword (else NotInCode).  Standard: the projection
// lies in the component non-free part for at least one prime; Alternative:
// for all primes.
inline bool nf_membership(const ZmCode& c, std::span<const u64> w, const NfOptions& opt = {}) {
    if (!contains(c, w)) throw NotInCode("nf_membership: vector is not a codeword");
    bool any = false, all = true;
    for (std::size_t i = 0; i < c.modulus().ell(); ++i) {
        std::vector<u64> wi(w.begin(), w.end());
        for (u64& v : wi) v %= c.modulus().factors[i].pe;
        const bool member = detail::nf_component_member(c.component(i), wi, opt);
        any = any || member;
        all = all && member;
    }
    return opt.convention == NfConvention::Standard ? any : all;
}

// Draws from the non-free part of C under the requested convention.
// Alternative: uniform over the CRT product of the component non-free parts.
// Standard: rejection sampling of uniform codewords until membership holds.
inline std::vector<u64> sample_nonfree(const ZmCode& c, Rng& rng, const NfOptions& opt = {}) {
    if (is_free(c)) throw EmptyNonFreePart("sample_nonfree: code is free");
    const Modulus& mod = c.modulus();
    if (opt.convention == NfConvention::Alternative) {
        std::vector<Mat> rows;
        rows.reserve(mod.ell());
        for (std::size_t i = 0; i < mod.ell(); ++i) {
            const ChainCode& comp = c.component(i);
            const PrimePower& f = mod.factors[i];
            std::vector<u64> wi;
            if (comp.rank() == 0) {
                if (!opt.zero_code_nf_is_zero)
                    throw EmptyNonFreePart("sample_nonfree: zero-code component has empty non-free part");
                wi.assign(c.length(), 0);
            } else {
                wi = detail::sample_uniform(non_free_part(comp), rng);
            }
            Mat m = make_mat(f.pe, 1, c.length());
            for (std::size_t j = 0; j < c.length(); ++j) m.at(0, j) = wi[j];
            rows.push_back(std::move(m));
        }
        const Mat combined = crt_combine(rows, mod);
        return mat_row(combined, 0);
    }
    for (u64 attempt = 0; attempt < opt.rejection_cap; ++attempt) {
        std::vector<Mat> rows;
        rows.reserve(mod.ell());
        bool any = false;
        for (std::size_t i = 0; i < mod.ell(); ++i) {
            const ChainCode& comp = c.component(i);
            const PrimePower& f = mod.factors[i];
            const std::vector<u64> wi = detail::sample_uniform(comp, rng);
            any = any || detail::nf_component_member(comp, wi, opt);
            Mat m = make_mat(f.pe, 1, c.length());
            for (std::size_t j = 0; j < c.length(); ++j) m.at(0, j) = wi[j];
            rows.push_back(std::move(m));
        }
        if (!any) continue;
        const Mat combined = crt_combine(rows, mod);
        return mat_row(combined, 0);
    }
    throw SamplerExhausted("sample_nonfree: rejection cap reached");
}

}  // namespace ringpir
