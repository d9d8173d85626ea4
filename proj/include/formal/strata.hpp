#pragma once

#include <functional>
#include <numeric>

#include "parahoric.hpp"
#include "poly.hpp"

namespace formal {

// A stratum (P, r, beta): beta in P^{-r} represents a functional on P^r/P^{r+1}.
struct Stratum {
    Parahoric P;
    int r = 0;
    LMat beta;
    OneForm nu;
};

// Evaluate p(y), truncating every intermediate product at absolute precision w.
inline LMat eval_poly(const Poly& p, const LMat& y, int w) {
    int n = y.n;
    LMat acc(n);
    for (size_t i = p.size(); i-- > 0;) {
        acc = (acc * y).truncated(w);
        for (int j = 0; j < n; ++j) acc(j, j) = acc(j, j) + Laurent::constant(p[i]);
        acc = acc.truncated(w);
    }
    return acc;
}

inline KMat eval_poly(const Poly& p, const KMat& y) {
    int n = y.rows;
    KMat acc(n, n);
    for (size_t i = p.size(); i-- > 0;) {
        acc = acc * y;
        for (int j = 0; j < n; ++j) acc(j, j) += p[i];
    }
    return acc;
}

// y_beta = beta^{e/g} t^{r/g} with g = gcd(r, e); it lies in P.
inline LMat stratum_y(const Stratum& s) {
    int g = std::gcd(s.r, s.P.e);
    return s.beta.pow(s.P.e / g).shift(s.r / g);
}

inline KMat stratum_y_bar(const Stratum& s) { return graded_component(stratum_y(s), s.P, 0).coef; }

inline Poly stratum_char_poly(const Stratum& s) { return charpoly(stratum_y_bar(s)); }

inline bool is_fundamental(const Stratum& s) {
    Poly phi = stratum_char_poly(s);
    for (int k = 0; k < degree(phi); ++k)
        if (!phi[k].is_zero()) return true;
    return false;
}

// Same stratum on the coarser chain L'^j = L^{jg}, g = gcd(r, e).
inline Stratum reduce_stratum(const Stratum& s) {
    int g = std::gcd(s.r, s.P.e);
    if (g == 1) return s;
    std::vector<int> lv;
    for (int c : s.P.level) lv.push_back(c / g);
    Stratum out = s;
    out.P = Parahoric::from_levels(lv, s.P.e / g);
    out.r = s.r / g;
    return out;
}

// Chooses, for every basis index b, one of the graded projectors so that the
// vectors proj[f(b)] e_b are independent within each level. Returns the
// lexicographically first such choice, or an empty vector if none exists.
inline std::vector<int> assign_columns(const Parahoric& P, const std::vector<KMat>& proj) {
    int n = P.n;
    std::vector<int> f(n, -1);
    for (int c = 0; c < P.e; ++c) {
        auto idx = P.at_level(c);
        if (idx.empty()) continue;
        std::vector<int> choice(idx.size(), -1);
        std::function<bool(size_t, KMat)> dfs = [&](size_t k, KMat cur) -> bool {
            if (k == idx.size()) return true;
            for (size_t q = 0; q < proj.size(); ++q) {
                KMat next(static_cast<int>(k) + 1, n);
                for (size_t r = 0; r < k; ++r)
                    for (int j = 0; j < n; ++j) next(static_cast<int>(r), j) = cur(static_cast<int>(r), j);
                bool nonzero = false;
                for (int j = 0; j < n; ++j) {
                    next(static_cast<int>(k), j) = proj[q](j, idx[k]);
                    nonzero = nonzero || !proj[q](j, idx[k]).is_zero();
                }
                if (!nonzero || rank(next) != static_cast<int>(k) + 1) continue;
                choice[k] = static_cast<int>(q);
                if (dfs(k + 1, next)) return true;
            }
            return false;
        };
        if (!dfs(0, KMat(0, n))) return {};
        for (size_t k = 0; k < idx.size(); ++k) f[idx[k]] = choice[k];
    }
    return f;
}

// Graded spectral projectors of a semisimple-or-not constant matrix, one per
// root of its characteristic polynomial: E_i = p_i(Y) with p_i = 1 mod
// (X - l_i)^{m_i} and 0 mod the other factors.
inline std::vector<Poly> spectral_polys(const Poly& phi, const RootFactorization& f) {
    std::vector<Poly> out;
    for (auto& [lam, m] : f.roots) {
        Poly fi = ppow(linear_factor(lam), m), q, rem;
        pdivmod(phi, fi, q, rem);
        Poly s, t;
        pxgcd(q, fi, s, t);
        out.push_back(pmod(pmul(s, q), phi));
    }
    return out;
}

struct SplitResult {
    LMat gauge;      // h: Ad(h) beta is block diagonal along the parts
    LMat gauge_inv;  // h^{-1}, whose columns span the parts
    LMat beta;       // Ad(h) beta
    std::vector<std::vector<int>> parts;
    std::vector<Scalar> eigen;  // eigenvalue of y-bar on each part
    std::vector<int> mult;      // its multiplicity
    std::vector<Stratum> strata;
};

// Decomposes a fundamental stratum with gcd(r, e) = 1 along the factors of
// its characteristic polynomial. The lift of the spectral projectors to
// P-adic precision w (absolute, in t) is done by Newton iteration on
// idempotents, E <- 3E^2 - 2E^3, inside the commutative algebra generated by
// y_beta; the result commutes with beta, so the gauge splits beta exactly to
// precision.
inline SplitResult split_stratum(const Stratum& s, Field field, int w = -1) {
    const Parahoric& P = s.P;
    int n = P.n;
    if (std::gcd(s.r, P.e) != 1) fail(Errc::GcdViolation, "split requires gcd(r, e) = 1");
    if (w < 0) w = s.r * n + 8;
    LMat y = s.beta.pow(P.e).shift(s.r);
    if (y.prec() < kExact) w = std::min(w, y.prec());
    if (w < 1) fail(Errc::InsufficientPrecision, "not enough precision to split");
    y = y.truncated(w);
    KMat ybar = graded_component(y, P, 0).coef;
    Poly phi = charpoly(ybar);
    auto fac = factor_roots(phi, field);
    if (!fac.split()) fail(Errc::NonsplitField, "characteristic polynomial " + poly_str(phi) + " does not split over " + field_name(field));
    if (fac.roots.size() < 2) fail(Errc::Irreducible, "characteristic polynomial has a single root");
    auto polys = spectral_polys(phi, fac);
    std::vector<LMat> E;
    std::vector<KMat> Ebar;
    for (auto& p : polys) {
        LMat e = eval_poly(p, y, w);
        for (int it = 0; it < 64; ++it) {
            LMat e2 = (e * e).truncated(w);
            LMat e3 = (e2 * e).truncated(w);
            LMat next = (Scalar(3) * e2 - Scalar(2) * e3).truncated(w);
            bool done = next.same_to_precision(e);
            e = next;
            if (done) break;
        }
        Ebar.push_back(graded_component(e, P, 0).coef);
        E.push_back(e);
    }
    auto f = assign_columns(P, Ebar);
    if (f.empty()) fail(Errc::NotSplit, "graded projectors do not give a basis");
    LMat G(n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) G(a, b) = E[f[b]](a, b);

    SplitResult out;
    out.gauge_inv = G;
    out.gauge = inverse(G, w);
    out.beta = (out.gauge * s.beta * G).truncated(std::min(w, s.beta.prec()));
    // parts ordered by their smallest index
    std::vector<std::vector<int>> parts(E.size());
    for (int b = 0; b < n; ++b) parts[f[b]].push_back(b);
    std::vector<int> order;
    for (size_t i = 0; i < parts.size(); ++i)
        if (!parts[i].empty()) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int x, int y2) { return parts[x][0] < parts[y2][0]; });
    for (int i : order) {
        out.parts.push_back(parts[i]);
        out.eigen.push_back(fac.roots[i].first);
        out.mult.push_back(fac.roots[i].second);
        out.strata.push_back(Stratum{restrict_chain(P, parts[i]), s.r, out.beta.sub(parts[i]), s.nu});
    }
    return out;
}

struct Regularity {
    bool regular = false;
    std::string reason;
    int e = 1, m = 0, r = 0;
    std::vector<Scalar> eigen;  // eigenvalues of y-bar (for r = 0, of the residue)
};

inline bool differ_by_integer(const Scalar& a, const Scalar& b) {
    Scalar d = a - b;
    return d.is_real() && d.re().get_den() == 1;
}

// Regularity of a stratum: after reduction to gcd(r, e) = 1 it must be
// fundamental with semisimple y-bar whose eigenspaces are pure of dimension e
// (one vector per level), with nonzero eigenvalues; for r = 0 the residue
// must have distinct eigenvalues, pairwise not congruent mod Z.
inline Regularity is_regular(const Stratum& s0, Field field) {
    Stratum s = reduce_stratum(s0);
    Regularity out;
    out.r = s.r;
    out.e = s.P.e;
    int n = s.P.n;
    KMat ybar = stratum_y_bar(s);
    Poly phi = charpoly(ybar);
    auto fac = factor_roots(phi, field);
    if (!fac.split()) fail(Errc::NonsplitField, "characteristic polynomial " + poly_str(phi) + " does not split over " + field_name(field));
    for (auto& [lam, m] : fac.roots) out.eigen.push_back(lam);
    if (s.r == 0) {
        for (auto& [lam, m] : fac.roots)
            if (m > 1) {
                out.reason = "repeated residue eigenvalue " + lam.str();
                return out;
            }
        for (size_t i = 0; i < fac.roots.size(); ++i)
            for (size_t j = i + 1; j < fac.roots.size(); ++j)
                if (differ_by_integer(fac.roots[i].first, fac.roots[j].first)) {
                    out.reason = "residue eigenvalues differ by an integer";
                    return out;
                }
        out.regular = true;
        out.e = 1;
        out.m = n;
        return out;
    }
    for (auto& [lam, m] : fac.roots)
        if (lam.is_zero()) {
            out.reason = "leading term has a nilpotent part";
            return out;
        }
    KMat prod = KMat::identity(n);
    for (auto& [lam, m] : fac.roots) prod = prod * (ybar - KMat::diag(std::vector<Scalar>(n, lam)));
    if (!prod.is_zero()) {
        out.reason = "leading term is not semisimple";
        return out;
    }
    for (auto& [lam, m] : fac.roots) {
        if (m != s.P.e) {
            out.reason = "leading eigenvalue " + lam.str() + " has multiplicity " + std::to_string(m);
            return out;
        }
        KMat proj = KMat::identity(n);
        for (auto& [mu, m2] : fac.roots)
            if (mu != lam) proj = (lam - mu).inv() * (proj * (ybar - KMat::diag(std::vector<Scalar>(n, mu))));
        GradedEndo g{s.P, 0, proj};
        for (int c = 0; c < s.P.e; ++c)
            if (rank(g.piece(c)) != 1) {
                out.reason = "eigenspace of " + lam.str() + " is not pure";
                return out;
            }
    }
    out.regular = true;
    out.m = n / s.P.e;
    return out;
}

} // namespace formal
