#pragma once

#include <vector>

#include "laurent.hpp"
#include "linalg.hpp"

namespace formal {

// Square matrix of truncated Laurent series.
struct LMat {
    int n = 0;
    std::vector<Laurent> a;

    LMat() = default;
    explicit LMat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_) {}

    static LMat identity(int n) {
        LMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = Laurent::constant(Scalar(1));
        return m;
    }
    // t^k K
    static LMat from_constant(const KMat& k, int shift = 0) {
        LMat m(k.rows);
        for (int i = 0; i < k.rows; ++i)
            for (int j = 0; j < k.cols; ++j)
                if (!k(i, j).is_zero()) m(i, j) = Laurent::monomial(k(i, j), shift);
        return m;
    }
    static LMat diag(const std::vector<Laurent>& d) {
        LMat m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n; ++i) m(i, i) = d[i];
        return m;
    }

    Laurent& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const Laurent& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    // Smallest absolute precision over the entries.
    int prec() const {
        int p = kExact;
        for (auto& x : a) p = std::min(p, x.prec());
        return p;
    }
    bool exact() const { return prec() >= kExact; }
    // Smallest entry order (kExact for an exact zero matrix).
    int order() const {
        int v = kExact;
        for (auto& x : a)
            if (!x.is_zero()) v = std::min(v, x.order());
        return v;
    }
    bool is_zero() const {
        for (auto& x : a)
            if (!x.is_zero()) return false;
        return true;
    }

    LMat truncated(int prec) const {
        LMat m = *this;
        for (auto& x : m.a) x = x.truncated(prec);
        return m;
    }
    // Coefficient matrix of t^k.
    KMat coeff(int k) const {
        KMat c(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c(i, j) = (*this)(i, j).coeff(k);
        return c;
    }

    friend LMat operator+(const LMat& x, const LMat& y) {
        LMat z(x.n);
        for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] + y.a[i];
        return z;
    }
    friend LMat operator-(const LMat& x, const LMat& y) {
        LMat z(x.n);
        for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
        return z;
    }
    LMat operator-() const {
        LMat z = *this;
        for (auto& v : z.a) v = -v;
        return z;
    }
    friend LMat operator*(const LMat& x, const LMat& y) {
        int n = x.n;
        LMat z(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Laurent acc;
                bool first = true;
                for (int k = 0; k < n; ++k) {
                    const Laurent& u = x(i, k);
                    const Laurent& v = y(k, j);
                    if (u.is_zero() && u.exact()) continue;
                    if (v.is_zero() && v.exact()) continue;
                    Laurent p = u * v;
                    acc = first ? p : acc + p;
                    first = false;
                }
                if (first) {
                    // all products exactly zero, unless a factor was only zero to precision
                    int p = kExact;
                    for (int k = 0; k < n; ++k)
                        p = std::min(p, std::min(prec_add(x(i, k).order(), y(k, j).prec()),
                                                 prec_add(y(k, j).order(), x(i, k).prec())));
                    acc = Laurent::zero(p);
                }
                z(i, j) = acc;
            }
        return z;
    }
    friend LMat operator*(const Scalar& s, const LMat& x) {
        LMat z = x;
        for (auto& v : z.a) v = s * v;
        return z;
    }
    friend LMat operator*(const Laurent& s, const LMat& x) {
        LMat z = x;
        for (auto& v : z.a) v = s * v;
        return z;
    }
    LMat shift(int k) const {
        LMat z = *this;
        for (auto& v : z.a) v = v.shift(k);
        return z;
    }
    LMat tau() const {
        LMat z = *this;
        for (auto& v : z.a) v = v.tau();
        return z;
    }
    LMat deriv() const {
        LMat z = *this;
        for (auto& v : z.a) v = v.deriv();
        return z;
    }
    Laurent trace() const {
        Laurent t;
        for (int i = 0; i < n; ++i) t += (*this)(i, i);
        return t;
    }
    LMat pow(int k) const {
        LMat out = identity(n), b = *this;
        while (k) {
            if (k & 1) out = out * b;
            k >>= 1;
            if (k) b = b * b;
        }
        return out;
    }

    bool same_to_precision(const LMat& o) const {
        for (size_t i = 0; i < a.size(); ++i)
            if (!a[i].same_to_precision(o.a[i])) return false;
        return true;
    }
    friend bool operator==(const LMat& x, const LMat& y) { return x.n == y.n && x.a == y.a; }

    // Restriction to the rows and columns in idx.
    LMat sub(const std::vector<int>& idx) const {
        LMat s(static_cast<int>(idx.size()));
        for (int i = 0; i < s.n; ++i)
            for (int j = 0; j < s.n; ++j) s(i, j) = (*this)(idx[i], idx[j]);
        return s;
    }
};

inline LMat commutator(const LMat& x, const LMat& y) { return x * y - y * x; }

// Trace-residue pairing <X, Y>_nu = Res Tr(X Y nu).
inline Scalar pairing(const LMat& x, const LMat& y, const OneForm& nu) {
    Laurent acc;
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            if (x(i, k).is_zero() && x(i, k).exact()) continue;
            if (y(k, i).is_zero() && y(k, i).exact()) continue;
            acc += x(i, k) * y(k, i);
        }
    return residue(acc, nu);
}

// Inverse by Gauss-Jordan over the Laurent field, pivoting on the entry of
// least order in each column. Exact inputs are expanded to `digits` digits.
inline LMat inverse(const LMat& m, int digits = kDefaultDigits) {
    int n = m.n;
    LMat a = m, b = LMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int i = c; i < n; ++i) {
            if (a(i, c).is_zero()) continue;
            if (p < 0 || a(i, c).order() < a(p, c).order()) p = i;
        }
        if (p < 0) {
            bool exact_zero = true;
            for (int i = c; i < n; ++i) exact_zero = exact_zero && a(i, c).exact();
            fail(exact_zero ? Errc::SingularGauge : Errc::InsufficientPrecision,
                 "matrix is singular to the available precision");
        }
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
                std::swap(b(p, j), b(c, j));
            }
        Laurent pi = a(c, c).inv(digits);
        for (int j = 0; j < n; ++j) {
            a(c, j) = pi * a(c, j);
            b(c, j) = pi * b(c, j);
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || a(i, c).is_zero()) continue;
            Laurent f = a(i, c);
            for (int j = 0; j < n; ++j) {
                if (!a(c, j).is_zero() || !a(c, j).exact()) a(i, j) = a(i, j) - f * a(c, j);
                if (!b(c, j).is_zero() || !b(c, j).exact()) b(i, j) = b(i, j) - f * b(c, j);
            }
        }
    }
    return b;
}

} // namespace formal
