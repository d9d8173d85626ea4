#pragma once

#include <numeric>

#include "strata.hpp"

namespace formal {

// m copies of the totally ramified degree-e extension E = F(t^{1/e}), embedded
// block-diagonally: in each e x e block the uniformizer varpi_E acts as the
// Iwahori uniformizer (1 on the superdiagonal, t in the corner).
struct Torus {
    int e = 1;
    int m = 1;
    int n() const { return e * m; }
    Parahoric chain() const { return Parahoric::toral(e, m); }
    friend bool operator==(const Torus& a, const Torus& b) { return a.e == b.e && a.m == b.m; }
};

// Element of the torus Lie algebra: one series in varpi_E per block. The
// Laurent exponent counts powers of varpi_E and the precision is in the same
// units.
struct ToralElement {
    Torus T;
    std::vector<Laurent> blocks;
};

inline int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
inline int ceil_div(int a, int b) { return -floor_div(-a, b); }

// Entry (i, i') of varpi^d inside a block, as (coefficient exponent of t).
// varpi^d has a 1 at (i, i') with i' = i + d mod e, times t^{(d - (i' - i)) / e}.
inline int varpi_power_exponent(int e, int i, int d, int& col) {
    col = ((i + d) % e + e) % e;
    return (d - (col - i)) / e;
}

inline LMat realize(const ToralElement& x) {
    int e = x.T.e;
    LMat out(x.T.n());
    for (int j = 0; j < x.T.m; ++j) {
        const Laurent& s = x.blocks[j];
        for (int i = 0; i < e; ++i)
            for (int i2 = 0; i2 < e; ++i2) {
                // entry (i, i2) collects c_d with d = k e + (i2 - i)
                int p = s.exact() ? kExact : ceil_div(s.prec() - (i2 - i), e);
                std::vector<Scalar> c;
                int kmin = kExact;
                if (!s.is_zero()) {
                    for (int d = s.order(); d <= s.top(); ++d) {
                        if ((((d - (i2 - i)) % e) + e) % e != 0) continue;
                        int k = (d - (i2 - i)) / e;
                        if (kmin == kExact) kmin = k;
                        c.resize(k - kmin + 1);
                        c[k - kmin] = s.coeff(d);
                    }
                }
                Laurent entry = c.empty() ? Laurent::zero(p) : Laurent(kmin, c, p);
                out(j * e + i, j * e + i2) = entry;
            }
    }
    return out;
}

inline ToralElement toral_monomial(const Torus& T, int block, const Scalar& c, int d) {
    ToralElement x{T, std::vector<Laurent>(T.m)};
    x.blocks[block] = Laurent::monomial(c, d);
    return x;
}

// Tame corestriction: projection of gl_n(F) onto the torus along its
// orthogonal complement for the trace pairing. In each diagonal block the
// coefficient of varpi^s is the average, over the e rows, of the entries on
// the s-th cyclic diagonal. The projection commutes with the torus action on
// both sides, hence does not depend on the choice of one-form.
inline ToralElement tame_corestriction(const LMat& x, const Torus& T) {
    int e = T.e;
    ToralElement out{T, {}};
    Scalar inv_e = Scalar(e).inv();
    for (int j = 0; j < T.m; ++j) {
        int prec = kExact, lo = kExact, hi = -kExact;
        for (int i = 0; i < e; ++i)
            for (int i2 = 0; i2 < e; ++i2) {
                const Laurent& s = x(j * e + i, j * e + i2);
                if (!s.exact()) prec = std::min(prec, s.prec() * e + (i2 - i));
                if (!s.is_zero()) {
                    lo = std::min(lo, s.order() * e + (i2 - i));
                    hi = std::max(hi, s.top() * e + (i2 - i));
                }
            }
        if (lo == kExact) {
            out.blocks.push_back(Laurent::zero(prec));
            continue;
        }
        if (prec < kExact) hi = std::min(hi, prec - 1);
        std::vector<Scalar> c(hi >= lo ? hi - lo + 1 : 0);
        for (int d = lo; d <= hi; ++d) {
            Scalar acc;
            for (int i = 0; i < e; ++i) {
                int col;
                int k = varpi_power_exponent(e, i, d, col);
                acc += x(j * e + i, j * e + col).coeff(k);
            }
            c[d - lo] = acc * inv_e;
        }
        out.blocks.push_back(Laurent(lo, c, prec));
    }
    return out;
}

// Degree-d graded part of block (j, k) in the toral chain: the diagonal D with
// X_{jk} = D varpi^d mod higher terms.
inline std::vector<Scalar> toral_graded_block(const LMat& x, const Torus& T, int j, int k, int d) {
    int e = T.e;
    std::vector<Scalar> z(e);
    for (int i = 0; i < e; ++i) {
        int col;
        int q = varpi_power_exponent(e, i, d, col);
        z[i] = x(j * e + i, k * e + col).coeff(q);
    }
    return z;
}

inline void add_toral_graded_block(LMat& x, const Torus& T, int j, int k, int d, const std::vector<Scalar>& z) {
    int e = T.e;
    for (int i = 0; i < e; ++i) {
        if (z[i].is_zero()) continue;
        int col;
        int q = varpi_power_exponent(e, i, d, col);
        x(j * e + i, k * e + col) = x(j * e + i, k * e + col) + Laurent::monomial(z[i], q);
    }
}

// Leading coefficients a_j of a toral element with leading degree -r.
inline std::vector<Scalar> toral_leading(const ToralElement& xi, int r) {
    std::vector<Scalar> a;
    for (auto& b : xi.blocks) a.push_back(b.coeff(-r));
    return a;
}

// Solves [X, xi] = Y - pi_t(Y) in the degree-(ell - r) graded piece, for X
// homogeneous of degree ell with pi_t(X) = 0. Here xi has leading term
// a_j varpi^{-r} in block j; gcd(r, e) = 1 and the a_j^e are distinct and
// nonzero. Block by block the equation reads
//   a_k x_i - a_j x_{i-r} = z_i   (indices mod e),
// which is invertible off the diagonal blocks exactly when a_j^e != a_k^e; on
// a diagonal block the kernel is the toral line, removed by sum x_i = 0.
inline LMat graded_ad_solve(const ToralElement& xi, int r, const LMat& y, int ell) {
    const Torus& T = xi.T;
    int e = T.e, m = T.m;
    if (r > 0 && std::gcd(r, e) != 1) fail(Errc::GcdViolation, "ad-solve requires gcd(r, e) = 1");
    if (r == 0 && e != 1) fail(Errc::GcdViolation, "depth zero requires e = 1");
    auto a = toral_leading(xi, r);
    for (int j = 0; j < m; ++j) {
        if (a[j].is_zero()) fail(Errc::NotRegular, "leading coefficient vanishes");
        for (int k = j + 1; k < m; ++k)
            if (a[j].pow(e) == a[k].pow(e)) fail(Errc::NotRegular, "leading coefficients are not distinct");
    }
    int d = ell - r;
    LMat out(T.n());
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            auto z = toral_graded_block(y, T, j, k, d);
            if (j == k) {
                Scalar mean;
                for (auto& v : z) mean += v;
                mean = mean / Scalar(e);
                for (auto& v : z) v -= mean;
            }
            bool any = false;
            for (auto& v : z) any = any || !v.is_zero();
            if (!any) continue;
            int rows = e + (j == k ? 1 : 0);
            KMat A(rows, e);
            std::vector<Scalar> rhs(rows);
            int rr = ((r % e) + e) % e;
            for (int i = 0; i < e; ++i) {
                A(i, i) += a[k];
                A(i, ((i - rr) % e + e) % e) -= a[j];
                rhs[i] = z[i];
            }
            if (j == k)
                for (int i = 0; i < e; ++i) A(e, i) = Scalar(1);
            std::vector<Scalar> x;
            if (!solve(A, rhs, x)) fail(Errc::NotRegular, "graded equation has no solution");
            add_toral_graded_block(out, T, j, k, ell, x);
        }
    return out;
}

} // namespace formal
