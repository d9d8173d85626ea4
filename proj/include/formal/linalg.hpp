#pragma once

#include <vector>

#include "scalar.hpp"

namespace formal {

// Dense matrix over the base field.
struct KMat {
    int rows = 0, cols = 0;
    std::vector<Scalar> a;

    KMat() = default;
    KMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    static KMat identity(int n) {
        KMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Scalar(1);
        return m;
    }
    static KMat diag(const std::vector<Scalar>& d) {
        KMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    Scalar& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Scalar& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool is_zero() const {
        for (auto& x : a)
            if (!x.is_zero()) return false;
        return true;
    }
    friend bool operator==(const KMat& x, const KMat& y) { return x.rows == y.rows && x.cols == y.cols && x.a == y.a; }

    friend KMat operator*(const KMat& x, const KMat& y) {
        KMat z(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                if (x(i, k).is_zero()) continue;
                for (int j = 0; j < y.cols; ++j)
                    if (!y(k, j).is_zero()) z(i, j) += x(i, k) * y(k, j);
            }
        return z;
    }
    friend KMat operator+(KMat x, const KMat& y) {
        for (size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
        return x;
    }
    friend KMat operator-(KMat x, const KMat& y) {
        for (size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
        return x;
    }
    friend KMat operator*(const Scalar& s, KMat x) {
        for (auto& v : x.a) v *= s;
        return x;
    }
    KMat transpose() const {
        KMat t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(KMat& m) {
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (!m(i, c).is_zero()) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m(p, j), m(r, j));
        Scalar inv = m(r, c).inv();
        for (int j = c; j < m.cols; ++j) m(r, j) *= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || m(i, c).is_zero()) continue;
            Scalar f = m(i, c);
            for (int j = c; j < m.cols; ++j)
                if (!m(r, j).is_zero()) m(i, j) -= f * m(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

inline int rank(KMat m) { return static_cast<int>(rref(m).size()); }

// Basis of the right kernel, as columns of the result.
inline KMat kernel(const KMat& m) {
    KMat r = m;
    auto piv = rref(r);
    std::vector<int> is_piv(m.cols, -1);
    for (size_t k = 0; k < piv.size(); ++k) is_piv[piv[k]] = static_cast<int>(k);
    int dim = m.cols - static_cast<int>(piv.size());
    KMat ker(m.cols, dim);
    int col = 0;
    for (int f = 0; f < m.cols; ++f) {
        if (is_piv[f] >= 0) continue;
        ker(f, col) = Scalar(1);
        for (size_t k = 0; k < piv.size(); ++k) ker(piv[k], col) = -r(static_cast<int>(k), f);
        ++col;
    }
    return ker;
}

// Solves m x = b; returns false if inconsistent. Free variables are set to zero.
inline bool solve(const KMat& m, const std::vector<Scalar>& b, std::vector<Scalar>& x) {
    KMat aug(m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
        aug(i, m.cols) = b[i];
    }
    auto piv = rref(aug);
    if (!piv.empty() && piv.back() == m.cols) return false;
    x.assign(m.cols, Scalar());
    for (size_t k = 0; k < piv.size(); ++k) x[piv[k]] = aug(static_cast<int>(k), m.cols);
    return true;
}

inline bool invert(const KMat& m, KMat& out) {
    int n = m.rows;
    KMat aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = Scalar(1);
    }
    auto piv = rref(aug);
    if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return false;
    out = KMat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
    return true;
}

// Characteristic polynomial det(X - m), coefficients from degree 0 upward.
// Faddeev-LeVerrier; fine in characteristic zero.
inline std::vector<Scalar> charpoly(const KMat& m) {
    int n = m.rows;
    std::vector<Scalar> c(n + 1);
    c[n] = Scalar(1);
    KMat am(n, n);
    for (int k = 1; k <= n; ++k) {
        KMat mk = am;
        for (int i = 0; i < n; ++i) mk(i, i) += c[n - k + 1];
        am = m * mk;
        Scalar tr;
        for (int i = 0; i < n; ++i) tr += am(i, i);
        c[n - k] = -(tr / Scalar(k));
    }
    return c;
}

} // namespace formal
