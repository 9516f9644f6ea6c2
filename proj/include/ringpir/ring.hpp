#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "ringpir/errors.hpp"

namespace ringpir {

using u64 = std::uint64_t;
using u32 = std::uint32_t;

namespace modarith {

inline u64 add(u64 a, u64 b, u64 mod) {
    u64 s = a + b;
    if (s >= mod || s < a) s -= mod;
    return s;
}

inline u64 sub(u64 a, u64 b, u64 mod) { return a >= b ? a - b : a + (mod - b); }

inline u64 mul(u64 a, u64 b, u64 mod) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % mod);
}

inline u64 neg(u64 a, u64 mod) { return a == 0 ? 0 : mod - a; }

// p^e with overflow detection; returns 0 on overflow.
inline u64 checked_pow(u64 p, u64 e) {
    u64 r = 1;
    while (e--) {
        unsigned __int128 t = static_cast<unsigned __int128>(r) * p;
        if (t > UINT64_MAX) return 0;
        r = static_cast<u64>(t);
    }
    return r;
}

// Inverse of a unit; throws if gcd(a, mod) != 1.
inline u64 inv(u64 a, u64 mod) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(mod), new_r = static_cast<std::int64_t>(a % mod);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw std::invalid_argument("inv: not a unit");
    return t < 0 ? static_cast<u64>(t + static_cast<std::int64_t>(mod)) : static_cast<u64>(t);
}

// p-adic valuation of x in Z_{p^e}; val(0) := e.
inline u32 valuation(u64 x, u64 p, u32 e) {
    if (x == 0) return e;
    u32 v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

}  // namespace modarith

struct PrimePower {
    u64 p = 0;
    u32 e = 0;
    u64 pe = 0;         // p^e
    u64 crt_basis = 0;  // (m/pe) * ((m/pe)^-1 mod pe), reduced mod m
};

// m = prod p_i^{e_i} with pairwise distinct primes and every e_i >= 2,
// together with the data alphabet m' = prod p_i.
struct Modulus {
    u64 m = 0;
    std::vector<PrimePower> factors;
    u64 m_prime = 0;

    std::size_t ell() const { return factors.size(); }
};

// Factorizes m by trial division and checks the standing assumptions of the
// scheme: every prime exponent at least 2 (non-free codes need it) and
// gcd(m, n) = 1 (so Z_m[x]/(x^n - 1) is a principal ideal ring).
inline Modulus validate_modulus(u64 m, u64 n) {
    if (m < 2) throw NotComposite("modulus must be at least 2");
    if (n < 1) throw std::invalid_argument("length must be positive");
    Modulus mod;
    mod.m = m;
    mod.m_prime = 1;
    u64 rest = m;
    for (u64 d = 2; d * d <= rest; ++d) {
        if (rest % d != 0) continue;
        u32 e = 0;
        while (rest % d == 0) {
            rest /= d;
            ++e;
        }
        mod.factors.push_back({d, e, modarith::checked_pow(d, e), 0});
        mod.m_prime *= d;
    }
    if (rest > 1) {
        mod.factors.push_back({rest, 1, rest, 0});
        mod.m_prime *= rest;
    }
    for (const PrimePower& f : mod.factors) {
        if (f.e < 2)
            throw NotComposite("every prime exponent must be >= 2 (prime " + std::to_string(f.p) +
                               " has exponent " + std::to_string(f.e) + ")");
    }
    if (std::gcd(m, n) != 1)
        throw GcdViolation("gcd(m, n) = " + std::to_string(std::gcd(m, n)) + " != 1");
    for (PrimePower& f : mod.factors) {
        const u64 rest_m = m / f.pe;
        f.crt_basis = modarith::mul(rest_m % m, modarith::inv(rest_m % f.pe, f.pe), m);
    }
    return mod;
}

inline u64 crt_scalar_combine(const std::vector<u64>& images, const Modulus& mod) {
    if (images.size() != mod.ell()) throw ShapeMismatch("crt_combine: wrong number of images");
    u64 x = 0;
    for (std::size_t i = 0; i < images.size(); ++i)
        x = modarith::add(x, modarith::mul(images[i] % mod.factors[i].pe, mod.factors[i].crt_basis, mod.m), mod.m);
    return x;
}

inline std::vector<u64> crt_scalar_split(u64 x, const Modulus& mod) {
    std::vector<u64> images;
    images.reserve(mod.ell());
    for (const PrimePower& f : mod.factors) images.push_back((x % mod.m) % f.pe);
    return images;
}

// Element of Z_mod[x]/(x^n - 1), coefficients in ascending degree.
struct Poly {
    u64 mod = 0;
    std::vector<u64> c;

    std::size_t n() const { return c.size(); }

    bool is_zero() const {
        for (u64 v : c)
            if (v != 0) return false;
        return true;
    }

    bool operator==(const Poly&) const = default;
};

inline Poly make_poly(u64 mod, std::vector<u64> coeffs) {
    if (mod < 2) throw std::invalid_argument("poly: modulus must be >= 2");
    if (coeffs.empty()) throw std::invalid_argument("poly: length must be positive");
    if (std::gcd(mod, static_cast<u64>(coeffs.size())) != 1)
        throw GcdViolation("poly: gcd(modulus, n) != 1");
    for (u64& v : coeffs) v %= mod;
    return Poly{mod, std::move(coeffs)};
}

inline Poly poly_zero(u64 mod, std::size_t n) { return make_poly(mod, std::vector<u64>(n, 0)); }

// Convenience for sparse literals: {{degree, coefficient}, ...}.
inline Poly poly_terms(u64 mod, std::size_t n, std::initializer_list<std::pair<std::size_t, u64>> terms) {
    std::vector<u64> c(n, 0);
    for (const auto& [deg, coeff] : terms) {
        if (deg >= n) throw IndexOutOfRange("poly_terms: degree out of range");
        c[deg] = coeff % mod;
    }
    return make_poly(mod, std::move(c));
}

inline void check_same_ring(const Poly& a, const Poly& b) {
    if (a.mod != b.mod || a.n() != b.n()) throw ShapeMismatch("polynomials live in different rings");
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    check_same_ring(a, b);
    Poly r = a;
    for (std::size_t i = 0; i < r.n(); ++i) r.c[i] = modarith::add(r.c[i], b.c[i], r.mod);
    return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) {
    check_same_ring(a, b);
    Poly r = a;
    for (std::size_t i = 0; i < r.n(); ++i) r.c[i] = modarith::sub(r.c[i], b.c[i], r.mod);
    return r;
}

inline Poly poly_scale(u64 s, const Poly& a) {
    Poly r = a;
    for (u64& v : r.c) v = modarith::mul(s % a.mod, v, a.mod);
    return r;
}

// Cyclic convolution: multiplication in Z_mod[x]/(x^n - 1).
inline Poly poly_mul(const Poly& a, const Poly& b) {
    check_same_ring(a, b);
    const std::size_t n = a.n();
    Poly r = poly_zero(a.mod, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a.c[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (b.c[j] == 0) continue;
            std::size_t k = i + j;
            if (k >= n) k -= n;
            r.c[k] = modarith::add(r.c[k], modarith::mul(a.c[i], b.c[j], a.mod), a.mod);
        }
    }
    return r;
}

inline Poly poly_reduce(const Poly& a, u64 new_mod) {
    std::vector<u64> c = a.c;
    for (u64& v : c) v %= new_mod;
    return make_poly(new_mod, std::move(c));
}

inline std::vector<Poly> crt_split(const Poly& a, const Modulus& mod) {
    if (a.mod != mod.m) throw ShapeMismatch("crt_split: polynomial not over Z_m");
    std::vector<Poly> images;
    images.reserve(mod.ell());
    for (const PrimePower& f : mod.factors) images.push_back(poly_reduce(a, f.pe));
    return images;
}

inline Poly crt_combine(const std::vector<Poly>& images, const Modulus& mod) {
    if (images.size() != mod.ell()) throw ShapeMismatch("crt_combine: wrong number of images");
    const std::size_t n = images.front().n();
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].n() != n) throw ShapeMismatch("crt_combine: image lengths differ");
        if (images[i].mod != mod.factors[i].pe) throw ShapeMismatch("crt_combine: image modulus mismatch");
    }
    Poly r = poly_zero(mod.m, n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<u64> residues(images.size());
        for (std::size_t i = 0; i < images.size(); ++i) residues[i] = images[i].c[k];
        r.c[k] = crt_scalar_combine(residues, mod);
    }
    return r;
}

}  // namespace ringpir
