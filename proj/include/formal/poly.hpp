#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "linalg.hpp"

namespace formal {

// Univariate polynomial over the base field, coefficients from degree 0 upward.
using Poly = std::vector<Scalar>;

inline void trim(Poly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}
inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly pmul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    trim(c);
    return c;
}
inline Poly padd(Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size());
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    trim(a);
    return a;
}
inline Poly psub(Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size());
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}
inline Scalar peval(const Poly& p, const Scalar& x) {
    Scalar acc;
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

// a = q b + r
inline void pdivmod(Poly a, const Poly& b, Poly& q, Poly& r) {
    trim(a);
    q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Scalar());
    Scalar li = b.back().inv();
    while (!a.empty() && a.size() >= b.size()) {
        size_t sh = a.size() - b.size();
        Scalar f = a.back() * li;
        q[sh] = f;
        for (size_t i = 0; i < b.size(); ++i) a[sh + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    trim(q);
    r = a;
}
inline Poly pmod(const Poly& a, const Poly& b) {
    Poly q, r;
    pdivmod(a, b, q, r);
    return r;
}

// Extended gcd: returns monic g with s a + t b = g.
inline Poly pxgcd(const Poly& a, const Poly& b, Poly& s, Poly& t) {
    Poly r0 = a, r1 = b, s0{Scalar(1)}, s1{}, t0{}, t1{Scalar(1)};
    trim(r0);
    trim(r1);
    while (!r1.empty()) {
        Poly q, r;
        pdivmod(r0, r1, q, r);
        Poly s2 = psub(s0, pmul(q, s1)), t2 = psub(t0, pmul(q, t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    if (r0.empty()) {
        s = s0;
        t = t0;
        return r0;
    }
    Scalar li = r0.back().inv();
    for (auto& x : r0) x *= li;
    for (auto& x : s0) x *= li;
    for (auto& x : t0) x *= li;
    s = s0;
    t = t0;
    return r0;
}

inline Poly linear_factor(const Scalar& root) { return Poly{-root, Scalar(1)}; }

inline Poly ppow(const Poly& p, int k) {
    Poly out{Scalar(1)};
    for (int i = 0; i < k; ++i) out = pmul(out, p);
    return out;
}

namespace detail {

inline std::vector<mpz_class> divisors(mpz_class v) {
    if (v < 0) v = -v;
    std::vector<mpz_class> out;
    if (v == 0) return out;
    // trial factorisation; only called on small inputs
    std::vector<std::pair<mpz_class, int>> fac;
    mpz_class x = v;
    for (mpz_class p = 2; p * p <= x; ++p) {
        int e = 0;
        while (x % p == 0) {
            x /= p;
            ++e;
        }
        if (e) fac.push_back({p, e});
    }
    if (x > 1) fac.push_back({x, 1});
    out.push_back(1);
    for (auto& [p, e] : fac) {
        size_t cur = out.size();
        mpz_class pw = 1;
        for (int k = 1; k <= e; ++k) {
            pw *= p;
            for (size_t i = 0; i < cur; ++i) out.push_back(out[i] * pw);
        }
    }
    return out;
}

inline mpz_class isqrt_exact(const mpz_class& v, bool& ok) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
    ok = (r * r == v);
    return r;
}

} // namespace detail

namespace detail {

using cplx = std::complex<long double>;

inline cplx to_cplx(const Scalar& s) { return {static_cast<long double>(s.re().get_d()), static_cast<long double>(s.im().get_d())}; }

// Simultaneous approximation of all complex roots (Aberth-Ehrlich).
inline std::vector<cplx> approx_roots(const Poly& p) {
    int d = degree(p);
    std::vector<cplx> c(d + 1);
    for (int k = 0; k <= d; ++k) c[k] = to_cplx(p[k]) / to_cplx(p[d]);
    long double rho = 0;
    for (int k = 0; k < d; ++k) rho = std::max(rho, std::pow(std::abs(c[k]), 1.0L / (d - k)));
    if (rho == 0) rho = 1;
    std::vector<cplx> z(d);
    for (int i = 0; i < d; ++i) z[i] = std::polar(rho, 2 * 3.14159265358979323846L * i / d + 0.4L);
    for (int it = 0; it < 1000; ++it) {
        long double step = 0;
        for (int i = 0; i < d; ++i) {
            cplx f = c[d], df = 0;
            for (int k = d - 1; k >= 0; --k) {
                df = df * z[i] + f;
                f = f * z[i] + c[k];
            }
            if (f == cplx(0)) continue;
            cplx ratio = f / df, sum = 0;
            for (int j = 0; j < d; ++j)
                if (j != i) sum += 1.0L / (z[i] - z[j]);
            cplx w = ratio / (1.0L - ratio * sum);
            z[i] -= w;
            step = std::max(step, std::abs(w) / (1 + std::abs(z[i])));
        }
        if (step < 1e-18L) break;
    }
    return z;
}

// Gaussian-integer candidates dividing the constant term of a monic integral
// polynomial; only used when that constant is small.
inline std::vector<Scalar> divisor_candidates(const Scalar& c0, Field field) {
    std::vector<Scalar> cand;
    if (c0.is_real()) {
        for (auto& dv : divisors(c0.re().get_num())) {
            cand.push_back(Scalar(mpq_class(dv)));
            cand.push_back(Scalar(mpq_class(-dv)));
        }
    }
    if (field == Field::QI) {
        mpz_class N = c0.re().get_num() * c0.re().get_num() + c0.im().get_num() * c0.im().get_num();
        for (auto& nd : divisors(N)) {
            for (mpz_class a = 0; a * a <= nd; ++a) {
                bool ok;
                mpz_class b = isqrt_exact(nd - a * a, ok);
                if (!ok) continue;
                for (int sa : {1, -1})
                    for (int sb : {1, -1}) cand.push_back(Scalar(mpq_class(a * sa), mpq_class(b * sb)));
            }
        }
    }
    return cand;
}

} // namespace detail

// Roots of p lying in the field, with multiplicities. With q(y) = D^d p(y/D)
// monic over the Gaussian integers, every root in the field is y/D with y a
// Gaussian integer. Candidates y are the rounded numerical roots of the
// squarefree part (plus, for small constant terms, the divisors of q(0));
// each candidate is checked exactly.
inline std::map<Scalar, int> roots_in(const Poly& p0, Field field) {
    std::map<Scalar, int> out;
    Poly p = p0;
    trim(p);
    if (degree(p) < 1) return out;
    int zero_mult = 0;
    while (!p.empty() && p[0].is_zero()) {
        p.erase(p.begin());
        ++zero_mult;
    }
    if (zero_mult) out[Scalar()] = zero_mult;
    if (degree(p) < 1) return out;
    Scalar li = p.back().inv();
    for (auto& c : p) c *= li;
    mpz_class D = 1;
    for (auto& c : p) {
        mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.re().get_den().get_mpz_t());
        mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.im().get_den().get_mpz_t());
    }
    Poly dp;
    for (size_t k = 1; k < p.size(); ++k) dp.push_back(p[k] * Scalar(static_cast<long>(k)));
    Poly s, t, q, rem;
    Poly g = pxgcd(p, dp, s, t);
    pdivmod(p, g, q, rem);

    std::vector<Scalar> cand;
    long double Dl = static_cast<long double>(D.get_d());
    for (auto& z : detail::approx_roots(q)) {
        long double re = std::round(z.real() * Dl), im = field == Field::QI ? std::round(z.imag() * Dl) : 0;
        if (std::abs(re) > 1e15L || std::abs(im) > 1e15L) continue;
        Scalar y(mpq_class(static_cast<double>(re)), mpq_class(static_cast<double>(im)));
        cand.push_back(y / Scalar(mpq_class(D)));
    }
    Scalar c0 = p[0] * Scalar(mpq_class(D)).pow(degree(p));
    mpz_class size = abs(c0.re().get_num()) + abs(c0.im().get_num());
    if (size < 1000000)
        for (auto& y : detail::divisor_candidates(c0, field)) cand.push_back(y / Scalar(mpq_class(D)));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    Poly rest = p;
    for (auto& x : cand) {
        if (field == Field::Q && !x.is_real()) continue;
        int mult = 0;
        while (degree(rest) >= 1 && peval(rest, x).is_zero()) {
            Poly qq, rr;
            pdivmod(rest, linear_factor(x), qq, rr);
            rest = qq;
            ++mult;
        }
        if (mult) out[x] += mult;
    }
    return out;
}

// Solutions of x^k = c in the field (k >= 1).
inline std::vector<Scalar> kth_roots(const Scalar& c, int k, Field field) {
    Poly p(k + 1);
    p[0] = -c;
    p[k] = Scalar(1);
    std::vector<Scalar> out;
    for (auto& [x, m] : roots_in(p, field)) out.push_back(x);
    return out;
}

// Coprime factorisation of p into (X - a)^m pieces plus possibly one piece
// without roots in the field. The flag reports whether such a piece remained.
struct RootFactorization {
    std::vector<std::pair<Scalar, int>> roots;  // sorted by the fixed order on scalars
    Poly remainder;                             // monic, constant 1 when fully split
    bool split() const { return degree(remainder) <= 0; }
};

inline RootFactorization factor_roots(const Poly& p, Field field) {
    RootFactorization f;
    Poly rest = p;
    trim(rest);
    for (auto& [x, m] : roots_in(p, field)) {
        f.roots.push_back({x, m});
        for (int i = 0; i < m; ++i) {
            Poly q, r;
            pdivmod(rest, linear_factor(x), q, r);
            rest = q;
        }
    }
    Scalar li = rest.back().inv();
    for (auto& c : rest) c *= li;
    f.remainder = rest;
    return f;
}

inline std::string poly_str(const Poly& p, const std::string& var = "X") {
    if (p.empty()) return "0";
    std::string s;
    for (int k = degree(p); k >= 0; --k) {
        if (p[k].is_zero()) continue;
        std::string c = p[k].str();
        bool complex = !p[k].is_real();
        if (!s.empty()) s += " + ";
        if (k == 0)
            s += complex ? "(" + c + ")" : c;
        else {
            if (p[k] != Scalar(1)) s += (complex || c[0] == '-' ? "(" + c + ")" : c) + "*";
            s += var;
            if (k > 1) s += "^" + std::to_string(k);
        }
    }
    return s;
}

} // namespace formal
