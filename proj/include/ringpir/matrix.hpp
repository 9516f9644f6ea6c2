#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "ringpir/ring.hpp"

namespace ringpir {

// Dense matrix of residues, row major.  Carries its coefficient modulus so
// mixed-ring operations fail loudly instead of silently wrapping.
struct Mat {
    u64 mod = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<u64> a;

    u64& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    u64 at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    bool is_zero() const {
        for (u64 v : a)
            if (v != 0) return false;
        return true;
    }

    bool operator==(const Mat&) const = default;
};

inline Mat make_mat(u64 mod, std::size_t rows, std::size_t cols) {
    return Mat{mod, rows, cols, std::vector<u64>(rows * cols, 0)};
}

inline Mat mat_from(u64 mod, std::initializer_list<std::initializer_list<u64>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Mat m = make_mat(mod, r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeMismatch("mat_from: ragged rows");
        std::size_t j = 0;
        for (u64 v : row) m.at(i, j++) = v % mod;
        ++i;
    }
    return m;
}

inline Mat mat_identity(u64 mod, std::size_t n) {
    Mat m = make_mat(mod, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1 % mod;
    return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    if (a.mod != b.mod) throw ShapeMismatch("mat_mul: modulus mismatch");
    if (a.cols != b.rows) throw ShapeMismatch("mat_mul: inner dimensions differ");
    Mat r = make_mat(a.mod, a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const u64 aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j)
                r.at(i, j) = modarith::add(r.at(i, j), modarith::mul(aik, b.at(k, j), a.mod), a.mod);
        }
    return r;
}

inline Mat mat_add(const Mat& a, const Mat& b) {
    if (a.mod != b.mod || a.rows != b.rows || a.cols != b.cols) throw ShapeMismatch("mat_add: shape mismatch");
    Mat r = a;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = modarith::add(r.a[i], b.a[i], r.mod);
    return r;
}

inline Mat mat_sub(const Mat& a, const Mat& b) {
    if (a.mod != b.mod || a.rows != b.rows || a.cols != b.cols) throw ShapeMismatch("mat_sub: shape mismatch");
    Mat r = a;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = modarith::sub(r.a[i], b.a[i], r.mod);
    return r;
}

inline Mat mat_transpose(const Mat& a) {
    Mat r = make_mat(a.mod, a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) r.at(j, i) = a.at(i, j);
    return r;
}

inline Mat mat_reduce(const Mat& a, u64 new_mod) {
    Mat r = a;
    r.mod = new_mod;
    for (u64& v : r.a) v %= new_mod;
    return r;
}

inline std::vector<u64> mat_row(const Mat& a, std::size_t i) {
    return std::vector<u64>(a.a.begin() + static_cast<std::ptrdiff_t>(i * a.cols),
                            a.a.begin() + static_cast<std::ptrdiff_t>((i + 1) * a.cols));
}

inline Mat mat_vstack(const Mat& a, const Mat& b) {
    if (a.mod != b.mod || a.cols != b.cols) throw ShapeMismatch("mat_vstack: shape mismatch");
    Mat r = make_mat(a.mod, a.rows + b.rows, a.cols);
    std::copy(a.a.begin(), a.a.end(), r.a.begin());
    std::copy(b.a.begin(), b.a.end(), r.a.begin() + static_cast<std::ptrdiff_t>(a.a.size()));
    return r;
}

// Pads with zero rows at the bottom up to `rows`.
inline Mat mat_pad_rows(const Mat& a, std::size_t rows) {
    if (rows < a.rows) throw ShapeMismatch("mat_pad_rows: target smaller than matrix");
    Mat r = make_mat(a.mod, rows, a.cols);
    std::copy(a.a.begin(), a.a.end(), r.a.begin());
    return r;
}

inline std::vector<Mat> crt_split(const Mat& a, const Modulus& mod) {
    if (a.mod != mod.m) throw ShapeMismatch("crt_split: matrix not over Z_m");
    std::vector<Mat> images;
    images.reserve(mod.ell());
    for (const PrimePower& f : mod.factors) images.push_back(mat_reduce(a, f.pe));
    return images;
}

inline Mat crt_combine(const std::vector<Mat>& images, const Modulus& mod) {
    if (images.size() != mod.ell()) throw ShapeMismatch("crt_combine: wrong number of images");
    const std::size_t rows = images.front().rows, cols = images.front().cols;
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].rows != rows || images[i].cols != cols) throw ShapeMismatch("crt_combine: shapes differ");
        if (images[i].mod != mod.factors[i].pe) throw ShapeMismatch("crt_combine: image modulus mismatch");
    }
    Mat r = make_mat(mod.m, rows, cols);
    std::vector<u64> residues(images.size());
    for (std::size_t k = 0; k < rows * cols; ++k) {
        for (std::size_t i = 0; i < images.size(); ++i) residues[i] = images[i].a[k];
        r.a[k] = crt_scalar_combine(residues, mod);
    }
    return r;
}

// Matrix over the quotient ring R = Z_mod[x]/(x^n - 1).
struct PolyMat {
    u64 mod = 0;
    std::size_t n = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Poly> e;

    Poly& at(std::size_t r, std::size_t c) { return e[r * cols + c]; }
    const Poly& at(std::size_t r, std::size_t c) const { return e[r * cols + c]; }

    bool operator==(const PolyMat&) const = default;
};

inline PolyMat make_polymat(u64 mod, std::size_t n, std::size_t rows, std::size_t cols) {
    return PolyMat{mod, n, rows, cols, std::vector<Poly>(rows * cols, poly_zero(mod, n))};
}

inline PolyMat polymat_add(const PolyMat& a, const PolyMat& b) {
    if (a.mod != b.mod || a.n != b.n || a.rows != b.rows || a.cols != b.cols)
        throw ShapeMismatch("polymat_add: shape mismatch");
    PolyMat r = a;
    for (std::size_t i = 0; i < r.e.size(); ++i) r.e[i] = poly_add(r.e[i], b.e[i]);
    return r;
}

inline PolyMat polymat_sub(const PolyMat& a, const PolyMat& b) {
    if (a.mod != b.mod || a.n != b.n || a.rows != b.rows || a.cols != b.cols)
        throw ShapeMismatch("polymat_sub: shape mismatch");
    PolyMat r = a;
    for (std::size_t i = 0; i < r.e.size(); ++i) r.e[i] = poly_sub(r.e[i], b.e[i]);
    return r;
}

inline PolyMat polymat_mul(const PolyMat& a, const PolyMat& b) {
    if (a.mod != b.mod || a.n != b.n) throw ShapeMismatch("polymat_mul: ring mismatch");
    if (a.cols != b.rows) throw ShapeMismatch("polymat_mul: inner dimensions differ");
    PolyMat r = make_polymat(a.mod, a.n, a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const Poly& aik = a.at(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols; ++j)
                r.at(i, j) = poly_add(r.at(i, j), poly_mul(aik, b.at(k, j)));
        }
    return r;
}

// [.]_m: each R-entry becomes its n coefficients (ascending degree) laid out
// horizontally, so an r x s matrix over R turns into r x (s n) over Z_m.
inline Mat expand_flat(const PolyMat& a) {
    Mat r = make_mat(a.mod, a.rows, a.cols * a.n);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) {
            const Poly& p = a.at(i, j);
            for (std::size_t k = 0; k < a.n; ++k) r.at(i, j * a.n + k) = p.c[k];
        }
    return r;
}

inline Mat expand_flat_row(const Poly& p) {
    Mat r = make_mat(p.mod, 1, p.n());
    for (std::size_t k = 0; k < p.n(); ++k) r.at(0, k) = p.c[k];
    return r;
}

// Inverse of expand_flat for matrices whose width is a multiple of n.
inline PolyMat unexpand(const Mat& a, std::size_t n) {
    if (n == 0 || a.cols % n != 0) throw ShapeMismatch("unexpand: width not a multiple of n");
    PolyMat r = make_polymat(a.mod, n, a.rows, a.cols / n);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < r.cols; ++j) {
            std::vector<u64> c(n);
            for (std::size_t k = 0; k < n; ++k) c[k] = a.at(i, j * n + k);
            r.at(i, j) = make_poly(a.mod, std::move(c));
        }
    return r;
}

}  // namespace ringpir
