#pragma once

#include <algorithm>
#include <memory>
#include <mutex>

#include "ringpir/chain_code.hpp"

namespace ringpir {

namespace upoly {

// Plain (non-quotient) polynomials over Z_mod as coefficient vectors in
// ascending degree, used for the division/gcd/lifting plumbing where degrees
// above n-1 matter.
using Vec = std::vector<u64>;

inline std::ptrdiff_t deg(const Vec& a) {
    for (std::size_t i = a.size(); i-- > 0;)
        if (a[i] != 0) return static_cast<std::ptrdiff_t>(i);
    return -1;
}

inline Vec trim(Vec a) {
    a.resize(static_cast<std::size_t>(deg(a) + 1));
    return a;
}

inline bool is_zero(const Vec& a) { return deg(a) < 0; }

inline Vec reduce(Vec a, u64 mod) {
    for (u64& v : a) v %= mod;
    return trim(std::move(a));
}

inline Vec xn_minus_1(std::size_t n, u64 mod) {
    Vec a(n + 1, 0);
    a[0] = mod - 1;
    a[n] = 1;
    return a;
}

inline Vec add(const Vec& a, const Vec& b, u64 mod) {
    Vec r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const u64 x = i < a.size() ? a[i] : 0;
        const u64 y = i < b.size() ? b[i] : 0;
        r[i] = modarith::add(x, y, mod);
    }
    return trim(std::move(r));
}

inline Vec sub(const Vec& a, const Vec& b, u64 mod) {
    Vec r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const u64 x = i < a.size() ? a[i] : 0;
        const u64 y = i < b.size() ? b[i] : 0;
        r[i] = modarith::sub(x, y, mod);
    }
    return trim(std::move(r));
}

inline Vec mul(const Vec& a, const Vec& b, u64 mod) {
    if (is_zero(a) || is_zero(b)) return {};
    Vec r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = modarith::add(r[i + j], modarith::mul(a[i], b[j], mod), mod);
    }
    return trim(std::move(r));
}

inline bool monic(const Vec& a) {
    const std::ptrdiff_t d = deg(a);
    return d >= 0 && a[static_cast<std::size_t>(d)] == 1;
}

// Long division by a divisor with unit leading coefficient; the only kind of
// division the algorithms here ever need, so zero divisors never show up in
// a denominator.
inline std::pair<Vec, Vec> divmod(const Vec& num, const Vec& den, u64 mod) {
    const std::ptrdiff_t dd = deg(den);
    if (dd < 0) throw std::invalid_argument("upoly::divmod: division by zero");
    const u64 lead_inv = modarith::inv(den[static_cast<std::size_t>(dd)], mod);
    Vec rem = trim(Vec(num));
    std::ptrdiff_t dn = deg(rem);
    if (dn < dd) return {{}, std::move(rem)};
    Vec quo(static_cast<std::size_t>(dn - dd + 1), 0);
    while ((dn = deg(rem)) >= dd) {
        const u64 coeff = modarith::mul(rem[static_cast<std::size_t>(dn)], lead_inv, mod);
        const std::size_t shift = static_cast<std::size_t>(dn - dd);
        quo[shift] = coeff;
        for (std::size_t i = 0; i <= static_cast<std::size_t>(dd); ++i)
            rem[shift + i] = modarith::sub(rem[shift + i], modarith::mul(coeff, den[i], mod), mod);
    }
    return {trim(std::move(quo)), trim(std::move(rem))};
}

inline bool divides(const Vec& den, const Vec& num, u64 mod) { return is_zero(divmod(num, den, mod).second); }

// Monic gcd over the field Z_p.
inline Vec gcd_mod_p(Vec a, Vec b, u64 p) {
    a = reduce(std::move(a), p);
    b = reduce(std::move(b), p);
    while (!is_zero(b)) {
        Vec r = divmod(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (is_zero(a)) return a;
    const u64 lead_inv = modarith::inv(a[static_cast<std::size_t>(deg(a))], p);
    for (u64& v : a) v = modarith::mul(v, lead_inv, p);
    return a;
}

// Extended gcd over Z_p for coprime inputs: s*a + t*b = 1.
inline std::pair<Vec, Vec> xgcd_coprime(const Vec& a, const Vec& b, u64 p) {
    Vec r0 = reduce(a, p), r1 = reduce(b, p);
    Vec s0{1}, s1{}, t0{}, t1{1};
    while (!is_zero(r1)) {
        auto [q, r2] = divmod(r0, r1, p);
        r0 = std::move(r1);
        r1 = std::move(r2);
        Vec s2 = sub(s0, mul(q, s1, p), p);
        s0 = std::move(s1);
        s1 = std::move(s2);
        Vec t2 = sub(t0, mul(q, t1, p), p);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (deg(r0) != 0) throw std::invalid_argument("xgcd_coprime: inputs are not coprime");
    const u64 c = modarith::inv(r0[0], p);
    for (u64& v : s0) v = modarith::mul(v, c, p);
    for (u64& v : t0) v = modarith::mul(v, c, p);
    return {std::move(s0), std::move(t0)};
}

inline Vec scale(u64 s, const Vec& a, u64 mod) {
    Vec r = a;
    for (u64& v : r) v = modarith::mul(s % mod, v, mod);
    return trim(std::move(r));
}

// Fold into the quotient ring: x^k -> x^{k mod n}.
inline Poly to_ring(const Vec& a, std::size_t n, u64 mod) {
    Poly r = poly_zero(mod, n);
    for (std::size_t i = 0; i < a.size(); ++i) r.c[i % n] = modarith::add(r.c[i % n], a[i] % mod, mod);
    return r;
}

inline Vec from_ring(const Poly& a) { return trim(Vec(a.c)); }

}  // namespace upoly

// n x n matrix whose row t holds the coefficients of x^t * g(x) mod x^n - 1;
// its row span over the coefficient ring is the ideal generated by g.
inline Mat circulant_expand(const Poly& g) {
    const std::size_t n = g.n();
    Mat m = make_mat(g.mod, n, n);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t k = 0; k < n; ++k) m.at(t, (k + t) % n) = g.c[k];
    return m;
}

// Unique monic lift of f with g = f (mod p) and g | x^n - 1 over Z_{p^e},
// computed by quadratic Hensel iteration on x^n - 1 = f * h with Bezout
// cofactors (coprimality holds because x^n - 1 is squarefree mod p).
inline upoly::Vec hensel_lift_plain(const upoly::Vec& f_in, u64 p, u32 target_e, std::size_t n) {
    if (std::gcd(p, static_cast<u64>(n)) != 1) throw GcdViolation("hensel_lift: gcd(p, n) != 1");
    upoly::Vec f = upoly::reduce(f_in, p);
    if (!upoly::monic(f)) throw std::invalid_argument("hensel_lift: polynomial must be monic mod p");
    if (!upoly::divides(f, upoly::xn_minus_1(n, p), p))
        throw NotADivisor("hensel_lift: f does not divide x^n - 1 mod p");
    if (target_e <= 1) return f;

    upoly::Vec h = upoly::divmod(upoly::xn_minus_1(n, p), f, p).first;
    auto [s, t] = upoly::xgcd_coprime(f, h, p);

    u32 k = 1;
    u64 mod_k = p;
    while (k < target_e) {
        const u32 k_next = std::min(2 * k, target_e);
        u64 mod_next = mod_k;
        for (u32 i = k; i < k_next; ++i) mod_next *= p;

        const upoly::Vec m = upoly::xn_minus_1(n, mod_next);
        const upoly::Vec err = upoly::sub(m, upoly::mul(f, h, mod_next), mod_next);
        // delta_f = (t * err) mod f keeps f monic of fixed degree; h is then
        // recomputed as the exact cofactor.
        const upoly::Vec delta_f = upoly::divmod(upoly::mul(t, err, mod_next), f, mod_next).second;
        f = upoly::add(f, delta_f, mod_next);
        auto [h_next, rem] = upoly::divmod(m, f, mod_next);
        if (!upoly::is_zero(rem)) throw ChainViolation("hensel_lift: lifted factor stopped dividing x^n - 1");
        h = std::move(h_next);

        if (k_next < target_e) {
            // Lift the Bezout pair to validity mod p^{k_next}.
            const upoly::Vec one{1};
            const upoly::Vec b = upoly::sub(
                upoly::add(upoly::mul(s, f, mod_next), upoly::mul(t, h, mod_next), mod_next), one, mod_next);
            const upoly::Vec delta_s = upoly::divmod(upoly::mul(s, b, mod_next), h, mod_next).second;
            const upoly::Vec num = upoly::sub(b, upoly::mul(f, delta_s, mod_next), mod_next);
            auto [delta_t, rem2] = upoly::divmod(num, h, mod_next);
            if (!upoly::is_zero(rem2)) throw ChainViolation("hensel_lift: Bezout lift failed");
            s = upoly::sub(s, delta_s, mod_next);
            t = upoly::sub(t, delta_t, mod_next);
        }
        k = k_next;
        mod_k = mod_next;
    }
    return f;
}

// Same lift returned as an element of R_i = Z_{p^e}[x]/(x^n - 1).  For
// f = x^n - 1 itself the reduced representative is the zero polynomial.
inline Poly hensel_lift_poly(const upoly::Vec& f, u64 p, u32 target_e, std::size_t n) {
    const u64 pe = modarith::checked_pow(p, target_e);
    if (pe == 0) throw std::invalid_argument("hensel_lift: p^e overflows");
    return upoly::to_ring(hensel_lift_plain(f, p, target_e, n), n, pe);
}

// Generating set in standard form for a cyclic code in R_i:
// {p^{a_0} g_{a_0}, ..., p^{a_s} g_{a_s}} with strictly increasing
// valuations, strictly decreasing degrees and the divisibility chain
// g_{a_s} | ... | g_{a_0} | x^n - 1.  An empty term list is the zero ideal.
struct GenSetTerm {
    u32 a = 0;
    Poly g;

    bool operator==(const GenSetTerm&) const = default;
};

struct CyclicGenSet {
    u64 p = 0;
    u32 e = 0;
    u64 pe = 0;
    std::size_t n = 0;
    std::vector<GenSetTerm> terms;
};

class CyclicCode {
  public:
    CyclicCode() = default;
    explicit CyclicCode(CyclicGenSet genset) : genset_(std::move(genset)), cache_(std::make_shared<Cache>()) {}

    const CyclicGenSet& genset() const { return genset_; }

    // Linear expansion: standard form of the stacked circulants of all terms.
    const ChainCode& expansion() const {
        std::call_once(cache_->flag, [&] {
            Mat stacked = make_mat(genset_.pe, 0, genset_.n);
            for (const GenSetTerm& t : genset_.terms) {
                const u64 pa = modarith::checked_pow(genset_.p, t.a);
                stacked = mat_vstack(stacked, circulant_expand(poly_scale(pa, t.g)));
            }
            cache_->code = standard_form(stacked, genset_.p, genset_.e);
        });
        return *cache_->code;
    }

  private:
    struct Cache {
        std::once_flag flag;
        std::optional<ChainCode> code;
    };

    CyclicGenSet genset_;
    std::shared_ptr<Cache> cache_;
};

// Builds the standard generating set of the ideal generated by `gens`.  The
// valuation ladder comes from the module standard form of the stacked
// circulants: the torsion code at level v is generated over Z_p by the unit
// parts of the standard-form rows of valuation <= v, and each level
// generator is the monic gcd of those with x^n - 1, lifted back to Z_{p^e}.
// Hensel lifting makes the divisibility chain exact by construction; the
// result is cross-checked against the module span (ChainViolation on any
// disagreement).
inline CyclicCode standard_genset(u64 p, u32 e, std::size_t n, const std::vector<Poly>& gens) {
    const u64 pe = modarith::checked_pow(p, e);
    if (pe == 0) throw std::invalid_argument("standard_genset: p^e overflows");
    if (std::gcd(p, static_cast<u64>(n)) != 1) throw GcdViolation("standard_genset: gcd(p, n) != 1");

    Mat stacked = make_mat(pe, 0, n);
    for (const Poly& g : gens) {
        if (g.mod != pe || g.n() != n) throw ShapeMismatch("standard_genset: generator in wrong ring");
        stacked = mat_vstack(stacked, circulant_expand(g));
    }
    const ChainCode module = standard_form(stacked, p, e);

    std::vector<u64> pow(e + 1, 1);
    for (u32 i = 1; i <= e; ++i) pow[i] = pow[i - 1] * p;

    CyclicGenSet set{p, e, pe, n, {}};
    upoly::Vec level_gcd = upoly::xn_minus_1(n, p);  // generator of the level torsion code
    const Mat rows = module.generator_rows();
    std::size_t row = 0;
    for (u32 v = 0; v < e; ++v) {
        for (; row < module.rank() && module.pivot_val[row] == v; ++row) {
            upoly::Vec unit_part(n);
            for (std::size_t j = 0; j < n; ++j) unit_part[j] = (rows.at(row, j) / pow[v]) % p;
            level_gcd = upoly::gcd_mod_p(level_gcd, unit_part, p);
        }
        const bool changed = set.terms.empty()
                                 ? upoly::deg(level_gcd) < static_cast<std::ptrdiff_t>(n)
                                 : !(level_gcd == upoly::reduce(upoly::from_ring(set.terms.back().g), p));
        if (changed) {
            const upoly::Vec lifted = hensel_lift_plain(level_gcd, p, e, n);
            set.terms.push_back({v, upoly::to_ring(lifted, n, pe)});
        }
    }

    // Internal consistency: Definition-shape checks plus span equality.
    for (std::size_t i = 0; i < set.terms.size(); ++i) {
        const upoly::Vec gi = upoly::from_ring(set.terms[i].g);
        if (!upoly::monic(gi)) throw ChainViolation("standard_genset: non-monic term");
        if (i > 0) {
            const upoly::Vec prev = upoly::from_ring(set.terms[i - 1].g);
            if (set.terms[i].a <= set.terms[i - 1].a) throw ChainViolation("standard_genset: valuations not increasing");
            if (upoly::deg(gi) >= upoly::deg(prev)) throw ChainViolation("standard_genset: degrees not decreasing");
            if (!upoly::divides(gi, prev, pe)) throw ChainViolation("standard_genset: divisibility chain broken");
        }
        if (!upoly::divides(gi, upoly::xn_minus_1(n, pe), pe))
            throw ChainViolation("standard_genset: term does not divide x^n - 1");
    }
    CyclicCode code(std::move(set));
    if (!row_span_equal(code.expansion(), module)) throw ChainViolation("standard_genset: span mismatch");
    return code;
}

inline CyclicCode cyclic_from_poly(u64 p, u32 e, const Poly& g) {
    return standard_genset(p, e, g.n(), {g});
}

// Generator polynomial sum p^{a_j} g_{a_j}(x); generates the same ideal.
inline Poly generator_polynomial(const CyclicGenSet& s) {
    Poly g = poly_zero(s.pe, s.n);
    for (const GenSetTerm& t : s.terms) g = poly_add(g, poly_scale(modarith::checked_pow(s.p, t.a), t.g));
    return g;
}

// Ideal generated by the positive-valuation terms.  When a_0 > 0 that is the
// whole ideal; when the code is free it is the zero ideal.
inline CyclicCode nf_cyclic(const CyclicGenSet& s) {
    CyclicGenSet nf{s.p, s.e, s.pe, s.n, {}};
    for (const GenSetTerm& t : s.terms)
        if (t.a > 0) nf.terms.push_back(t);
    return CyclicCode(std::move(nf));
}

// Free <=> the generating set is a single monic term of valuation 0 (the
// zero ideal counts as free: it is generated by x^n - 1).
inline bool is_free_cyclic(const CyclicCode& c) {
    const auto& terms = c.genset().terms;
    return terms.empty() || (terms.size() == 1 && terms[0].a == 0);
}

// A cyclic code is a Hensel lift of a cyclic code exactly when it is free;
// exposed separately because the scheme's condition 3 is stated in terms of
// Hensel lifts.
inline bool is_hensel_lift_code(const CyclicCode& c) { return is_free_cyclic(c); }

}  // namespace ringpir
