#pragma once

#include <numeric>
#include <vector>

#include "matrix.hpp"

namespace formal {

// A lattice chain in standard position. Basis vector j sits at level
// level[j] in [0, e): it lies in L^{level[j]} but not in L^{level[j]+1}, and
// t^k e_j has level level[j] + k e. L^0 is always the standard lattice.
// Consequently X lies in P^r exactly when every nonzero entry satisfies
//   e * ord(X_ab) + level[a] - level[b] >= r.
struct Parahoric {
    int n = 0;
    int e = 1;
    std::vector<int> level;

    static Parahoric from_levels(std::vector<int> lv, int e) {
        if (lv.empty()) fail(Errc::EmptyComposition, "empty basis");
        Parahoric p;
        p.n = static_cast<int>(lv.size());
        p.e = e;
        p.level = std::move(lv);
        return p;
    }

    // Standard chain of a composition. Blocks are listed in basis order; the
    // j-th group of basis vectors sits at level e-1-j, so that the parahoric
    // is block upper triangular mod t and (1,...,1) gives the Iwahori
    // subalgebra of upper triangular matrices mod t.
    static Parahoric standard(const std::vector<int>& blocks) {
        if (blocks.empty()) fail(Errc::EmptyComposition, "composition has no parts");
        std::vector<int> lv;
        int e = static_cast<int>(blocks.size());
        for (int j = 0; j < e; ++j) {
            if (blocks[j] <= 0) fail(Errc::EmptyComposition, "composition parts must be positive");
            for (int k = 0; k < blocks[j]; ++k) lv.push_back(e - 1 - j);
        }
        return from_levels(lv, e);
    }
    static Parahoric maximal(int n) { return standard({n}); }
    static Parahoric iwahori(int n) { return standard(std::vector<int>(n, 1)); }

    // Chain adapted to the standard embedding of m copies of a degree-e
    // extension: e x e diagonal blocks, position i of each block at level e-1-i.
    static Parahoric toral(int e, int m) {
        std::vector<int> lv;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < e; ++i) lv.push_back(e - 1 - i);
        return from_levels(lv, e);
    }

    // dim of L^i / L^{i+1} for i = 0..e-1.
    std::vector<int> graded_dims() const {
        std::vector<int> d(e, 0);
        for (int c : level) ++d[c];
        return d;
    }
    bool uniform() const {
        auto d = graded_dims();
        for (int x : d)
            if (x != d[0]) return false;
        return true;
    }
    // Indices at a given level, in basis order.
    std::vector<int> at_level(int c) const {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if (level[j] == c) out.push_back(j);
        return out;
    }

    // Degree of the (a,b) entry t^k.
    int entry_degree(int a, int b, int k) const { return k * e + level[a] - level[b]; }
    // Exponent k with entry_degree(a,b,k) == d, if one exists.
    bool exponent_for(int a, int b, int d, int& k) const {
        int num = d - level[a] + level[b];
        if (((num % e) + e) % e != 0) return false;
        k = num / e;
        return true;
    }

    // Uniformizer: maps each level-c basis vector to a level-(c+1) one (with
    // a factor t when wrapping). Requires a uniform chain.
    LMat varpi() const {
        if (!uniform()) fail(Errc::ShapeMismatch, "uniformizer requires a uniform chain");
        LMat w(n);
        std::vector<std::vector<int>> by(e);
        for (int c = 0; c < e; ++c) by[c] = at_level(c);
        for (int c = 0; c < e; ++c)
            for (size_t k = 0; k < by[c].size(); ++k) {
                int col = by[c][k];
                if (c + 1 < e)
                    w(by[c + 1][k], col) = Laurent::constant(Scalar(1));
                else
                    w(by[0][k], col) = Laurent::monomial(Scalar(1), 1);
            }
        return w;
    }

    friend bool operator==(const Parahoric& x, const Parahoric& y) { return x.e == y.e && x.level == y.level; }
};

// Largest r with X in P^r as far as the precision window shows: nonzero
// entries give exact degrees, unknown tails give lower bounds.
struct FiltrationInfo {
    int known = kExact;    // min degree over entries with a known nonzero coefficient
    int horizon = kExact;  // min degree at which some coefficient becomes unknown
    bool determined() const { return known < horizon || (known >= kExact && horizon >= kExact); }
    int lower_bound() const { return std::min(known, horizon); }
};

inline FiltrationInfo filtration_info(const LMat& x, const Parahoric& p) {
    FiltrationInfo f;
    for (int a = 0; a < x.n; ++a)
        for (int b = 0; b < x.n; ++b) {
            const Laurent& s = x(a, b);
            if (!s.is_zero()) f.known = std::min(f.known, p.entry_degree(a, b, s.order()));
            if (!s.exact()) f.horizon = std::min(f.horizon, p.entry_degree(a, b, s.prec()));
        }
    return f;
}

// Exact filtration degree; kExact stands for the zero matrix.
inline int filtration_degree(const LMat& x, const Parahoric& p) {
    auto f = filtration_info(x, p);
    if (!f.determined()) {
        Error err(Errc::InsufficientPrecision, "filtration degree is not determined by the precision window");
        throw err;
    }
    return f.known;
}

// Lower bound that is always valid: X is known to lie in P^{bound}.
inline int filtration_lower_bound(const LMat& x, const Parahoric& p) { return filtration_info(x, p).lower_bound(); }

inline bool in_filtration(const LMat& x, const Parahoric& p, int r) {
    auto f = filtration_info(x, p);
    if (f.known < r) return false;
    if (f.horizon < r) fail(Errc::InsufficientPrecision, "membership in P^" + std::to_string(r) + " is undecided");
    return true;
}

// Image of X in P^r / P^{r+1}, as the constant matrix of degree-r
// coefficients in the standard basis. piece(i) is the map from L^i/L^{i+1}
// to L^{i+r}/L^{i+r+1}.
struct GradedEndo {
    Parahoric P;
    int r = 0;
    KMat coef;

    KMat piece(int i) const {
        int src = ((i % P.e) + P.e) % P.e, dst = (((i + r) % P.e) + P.e) % P.e;
        auto rows = P.at_level(dst), cols = P.at_level(src);
        KMat m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (size_t a = 0; a < rows.size(); ++a)
            for (size_t b = 0; b < cols.size(); ++b) m(static_cast<int>(a), static_cast<int>(b)) = coef(rows[a], cols[b]);
        return m;
    }
    bool is_zero() const { return coef.is_zero(); }
};

inline GradedEndo graded_component(const LMat& x, const Parahoric& p, int r) {
    auto f = filtration_info(x, p);
    if (f.known < r) fail(Errc::NotInFiltration, "element is not in P^" + std::to_string(r));
    if (f.horizon <= r) fail(Errc::InsufficientPrecision, "degree-" + std::to_string(r) + " part is not known");
    GradedEndo g{p, r, KMat(p.n, p.n)};
    for (int a = 0; a < p.n; ++a)
        for (int b = 0; b < p.n; ++b) {
            int k;
            if (p.exponent_for(a, b, r, k)) g.coef(a, b) = x(a, b).coeff(k);
        }
    return g;
}

// Homogeneous lift of a graded piece.
inline LMat realize(const GradedEndo& g) {
    LMat m(g.P.n);
    for (int a = 0; a < g.P.n; ++a)
        for (int b = 0; b < g.P.n; ++b) {
            int k;
            if (!g.coef(a, b).is_zero() && g.P.exponent_for(a, b, g.r, k)) m(a, b) = Laurent::monomial(g.coef(a, b), k);
        }
    return m;
}

// Positions (a, b, k) of the monomials t^k E_ab spanning P^r / P^{r+1}.
struct Monomial {
    int a, b, k;
};
inline std::vector<Monomial> graded_basis(const Parahoric& p, int r) {
    std::vector<Monomial> out;
    for (int a = 0; a < p.n; ++a)
        for (int b = 0; b < p.n; ++b) {
            int k;
            if (p.exponent_for(a, b, r, k)) out.push_back({a, b, k});
        }
    return out;
}
inline LMat monomial_matrix(int n, const Monomial& m, const Scalar& c = Scalar(1)) {
    LMat x(n);
    x(m.a, m.b) = Laurent::monomial(c, m.k);
    return x;
}

// Restriction of the chain to a subset of basis vectors (levels kept as they are).
inline Parahoric restrict_chain(const Parahoric& p, const std::vector<int>& idx) {
    std::vector<int> lv;
    for (int j : idx) lv.push_back(p.level[j]);
    return Parahoric::from_levels(lv, p.e);
}

} // namespace formal
