#pragma once

#include <optional>

#include "connection.hpp"

namespace formal {

// Point of P^1: an affine coordinate, or infinity when empty.
using Point = std::optional<Scalar>;

inline std::string point_str(const Point& p) { return p ? p->str() : "inf"; }

// Polar part of the dz (resp. dw = d(1/z)) coefficient in the local
// coordinate t = z - x (resp. t = 1/z): only negative exponents.
struct PrincipalPart {
    Point point;
    LMat part;
};

struct ConfigEntry {
    Point point;
    std::optional<LMat> part;        // polar dt-coefficient in the global trivialization
    std::optional<FormalType> type;  // alternatively a formal type ...
    std::optional<KMat> framing;     // ... and the framing g with g.nabla of that type
};

struct GlobalConfig {
    int n = 0;
    std::vector<ConfigEntry> entries;
};

// Polar part of the dt-coefficient of the connection g^{-1}.(d + A_tau dt/t).
inline LMat principal_part_of(const FormalType& A, const KMat& g) {
    KMat gi;
    if (!invert(g, gi)) fail(Errc::SingularGauge, "framing is not invertible");
    LMat m = LMat::from_constant(gi) * A.matrix() * LMat::from_constant(g);
    LMat out(m.n);
    for (size_t i = 0; i < m.a.size(); ++i) {
        const Laurent& s = m.a[i];
        std::vector<Scalar> c;
        for (int k = s.order(); k <= 0 && !s.is_zero(); ++k) c.push_back(s.coeff(k));
        out.a[i] = c.empty() ? Laurent() : Laurent(s.order(), c).shift(-1);
    }
    return out;
}

inline LMat entry_part(const ConfigEntry& en) {
    if (en.part) return *en.part;
    if (en.type) return principal_part_of(*en.type, en.framing ? *en.framing : KMat::identity(en.type->T.n()));
    fail(Errc::Parse, "entry at " + point_str(en.point) + " has neither a part nor a formal type");
}

// M(z) dz with M(z) = sum_i sum_k R_{i,k} (z - x_i)^{-k} + sum_j Q_j z^j.
struct GlobalMatrix {
    int n = 0;
    struct Pole {
        Scalar x;
        int k;
        KMat R;
    };
    std::vector<Pole> poles;
    std::vector<KMat> poly;
};

inline KMat polar_coeff(const LMat& part, int k) {
    KMat c(part.n, part.n);
    for (int a = 0; a < part.n; ++a)
        for (int b = 0; b < part.n; ++b) c(a, b) = part(a, b).coeff(k);
    return c;
}

inline int polar_order(const LMat& part) {
    int v = part.order();
    if (v >= kExact) return 0;
    for (auto& s : part.a)
        if (!s.is_zero() && s.top() >= 0) fail(Errc::ShapeMismatch, "principal part has terms of nonnegative order");
    return -v;
}

inline KMat residue_of(const LMat& part) { return polar_coeff(part, -1); }

// The unique rational matrix with the given principal parts and no other
// poles (the part at infinity, if present, fixes the polynomial part).
inline GlobalMatrix assemble_global(const GlobalConfig& cfg) {
    int n = cfg.n;
    GlobalMatrix G;
    G.n = n;
    KMat res(n, n);
    for (size_t i = 0; i < cfg.entries.size(); ++i)
        for (size_t j = i + 1; j < cfg.entries.size(); ++j)
            if (cfg.entries[i].point == cfg.entries[j].point)
                fail(Errc::DuplicatePoints, "point " + point_str(cfg.entries[i].point) + " appears twice");
    for (auto& en : cfg.entries) {
        LMat part = entry_part(en);
        if (part.n != n) fail(Errc::ShapeMismatch, "part at " + point_str(en.point) + " has the wrong size");
        int ord = polar_order(part);
        res = res + residue_of(part);
        if (en.point) {
            for (int k = 1; k <= ord; ++k) {
                KMat R = polar_coeff(part, -k);
                if (!R.is_zero()) G.poles.push_back({*en.point, k, R});
            }
        } else {
            // at infinity B_k w^{-k} dw; the polynomial part is -sum_{k>=2} B_k z^{k-2}
            for (int k = 2; k <= ord; ++k) {
                if (static_cast<int>(G.poly.size()) < k - 1) G.poly.resize(k - 1, KMat(n, n));
                G.poly[k - 2] = Scalar(-1) * polar_coeff(part, -k);
            }
        }
    }
    if (!res.is_zero()) {
        std::string s;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += (s.empty() ? "" : ",") + res(a, b).str();
        fail(Errc::ResidueNonzero, "sum of residues is [" + s + "]");
    }
    return G;
}

namespace detail {

// sum_m binom(-k, m) c^{-k-m} t^m: expansion of (t + c)^{-k}, c != 0
inline Laurent shifted_pole(const Scalar& c, int k, int prec) {
    std::vector<Scalar> out;
    Scalar ci = c.inv();
    Scalar pw = ci.pow(k), binom(1);
    for (int m = 0; m < prec; ++m) {
        out.push_back(binom * pw);
        binom = binom * Scalar(-k - m) / Scalar(m + 1);
        pw *= ci;
    }
    return Laurent(0, out, prec);
}

inline Scalar binomial(int a, int b) {
    Scalar r(1);
    for (int i = 0; i < b; ++i) r = r * Scalar(a - i) / Scalar(i + 1);
    return r;
}

} // namespace detail

// Expansion of M(z) dz at a point, as the dt-coefficient in the local
// coordinate, known below t^prec.
inline LMat local_expansion(const GlobalMatrix& G, const Point& x, int prec) {
    int n = G.n;
    LMat out(n);
    auto add = [&](const KMat& R, const Laurent& s) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (!R(a, b).is_zero()) out(a, b) = out(a, b) + R(a, b) * s;
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out(a, b) = Laurent::zero(prec);
    if (x) {
        for (auto& p : G.poles) {
            if (p.x == *x)
                add(p.R, Laurent::monomial(Scalar(1), -p.k, prec));
            else
                add(p.R, detail::shifted_pole(*x - p.x, p.k, prec));
        }
        // z^j = (x + t)^j
        for (size_t j = 0; j < G.poly.size(); ++j) {
            std::vector<Scalar> c;
            for (int m = 0; m <= static_cast<int>(j); ++m) c.push_back(detail::binomial(static_cast<int>(j), m) * x->pow(static_cast<long>(j) - m));
            add(G.poly[j], Laurent(0, c, prec));
        }
    } else {
        // z = 1/w, dz = -w^{-2} dw
        for (auto& p : G.poles) {
            // -(1/w - x)^{-k} w^{-2} = -w^{k-2} (1 - x w)^{-k}
            std::vector<Scalar> c;
            for (int m = 0; m < prec + 2; ++m) c.push_back(Scalar(-1) * detail::binomial(p.k + m - 1, m) * p.x.pow(m));
            add(p.R, Laurent(p.k - 2, c, prec));
        }
        for (size_t j = 0; j < G.poly.size(); ++j) add(G.poly[j], Laurent::monomial(Scalar(-1), -static_cast<int>(j) - 2, prec));
    }
    return out;
}

inline LMat polar_part(const LMat& m) {
    LMat out(m.n);
    for (size_t i = 0; i < m.a.size(); ++i) {
        const Laurent& s = m.a[i];
        std::vector<Scalar> c;
        for (int k = s.order(); k < 0 && !s.is_zero(); ++k) c.push_back(s.coeff(k));
        if (!c.empty()) out.a[i] = Laurent(s.order(), c);
    }
    return out;
}

// True when g.C contains the stratum induced by A: [g.nabla]_tau lies in
// P^{-r} for the toral chain of A with the same degree -r component as A.
inline bool check_framing(const KMat& g, const Connection& c, const FormalType& A) {
    if (g.rows != c.n() || A.T.n() != c.n()) fail(Errc::ShapeMismatch, "framing, connection and formal type sizes differ");
    Connection gc = gauge_transform(LMat::from_constant(g), c);
    LMat M = gc.tau_dt_over_t();
    Parahoric P = A.T.chain();
    if (!in_filtration(M, P, -A.r)) return false;
    return graded_component(M, P, -A.r).coef == graded_component(A.matrix(), P, -A.r).coef;
}

// Sum of the residues of all parts, in the global trivialization.
inline KMat moment_map(const GlobalConfig& cfg) {
    KMat mu(cfg.n, cfg.n);
    for (auto& en : cfg.entries) mu = mu + residue_of(entry_part(en));
    return mu;
}

// Coadjoint action test: does p fix the functional <A, .> on P^i / P^{r+1}?
// Pairing-based, against the monomial basis of each graded piece.
inline bool fixes_functional(const LMat& p, const LMat& A, const Parahoric& P, int r, int i, int digits = kDefaultDigits) {
    LMat pinv = inverse(p, digits);
    LMat diff = p * A * pinv - A;
    OneForm nu;
    for (int d = i; d <= r; ++d)
        for (auto& mono : graded_basis(P, d))
            if (!pairing(diff, monomial_matrix(P.n, mono), nu).is_zero()) return false;
    return true;
}

// Membership of p in T^i P^{r+1-i} (p in P^i, or a unit of P when i = 0):
// peel off graded components one degree at a time; each one below degree
// r+1-i has to be toral.
inline bool in_isotropy(const LMat& p, const Torus& T, int r, int i, int digits = kDefaultDigits) {
    Parahoric P = T.chain();
    int n = T.n();
    LMat one = LMat::identity(n);
    auto toral = [&](const LMat& g) { return realize(tame_corestriction(g, T)).same_to_precision(g); };
    LMat q = p;
    int top = r + 1 - i;
    if (i == 0) {
        LMat lv = realize(graded_component(q, P, 0));
        if (!toral(lv)) return false;
        q = inverse(lv, digits) * q;
    } else if (!in_filtration(q - one, P, i)) {
        return false;
    }
    for (int d = std::max(i, 1); d < top; ++d) {
        LMat g = realize(graded_component(q - one, P, d));
        if (g.is_zero()) continue;
        if (!toral(g)) return false;
        q = inverse(one + g, digits) * q;
    }
    return in_filtration(q - one, P, top);
}

struct OrbitDimensions {
    int ell = 0;
    int dim_P_mod = 0;     // dim P / P^{r+1}
    int dim_T_mod = 0;     // dim T(o) / T^{(r+1)}
    int dim_P1_mod = 0;    // dim P^1 / P^{r+1}
    int dim_stab1 = 0;     // dim T^1 P^r / P^{r+1}
    int dim_O = 0;
    int dim_O1 = 0;
    int dim_G_trunc = 0;   // dim G / G^ell
    int dim_P_trunc = 0;   // dim P / G^ell
    int dim_P1_trunc = 0;  // dim P^1 / G^ell
    int dim_M = 0;
    int dim_M_tilde = 0;
    int dim_T_flat = 0;
};

// Dimensions at truncation ell. The orbits are those of A under P and of its
// restriction to P^1 under P^1; stabilizers T P^{r+1} and T^1 P^r.
inline OrbitDimensions orbit_dimensions(const FormalType& A, int ell) {
    if (A.r == 0) fail(Errc::UnsupportedDepth, "depth zero is handled by the regular singular branch");
    if (ell < A.r + 1) fail(Errc::ShapeMismatch, "truncation must be at least r + 1");
    Parahoric P = A.T.chain();
    int n = P.n, m = A.T.m, r = A.r;
    OrbitDimensions d;
    d.ell = ell;
    for (int k = 0; k <= r; ++k) d.dim_P_mod += static_cast<int>(graded_basis(P, k).size());
    d.dim_P1_mod = d.dim_P_mod - static_cast<int>(graded_basis(P, 0).size());
    d.dim_T_mod = (r + 1) * m;
    d.dim_stab1 = static_cast<int>(graded_basis(P, r).size()) + (r - 1) * m;
    d.dim_O = d.dim_P_mod - d.dim_T_mod;
    d.dim_O1 = d.dim_P1_mod - d.dim_stab1;
    int levi = 0;
    for (int b : P.graded_dims()) levi += b * b;
    d.dim_G_trunc = ell * n * n;
    d.dim_P_trunc = d.dim_G_trunc - (n * n - levi) / 2;
    d.dim_P1_trunc = d.dim_P_trunc - levi;
    d.dim_M = 2 * (d.dim_G_trunc - d.dim_P_trunc) + d.dim_O;
    d.dim_M_tilde = 2 * (d.dim_G_trunc - d.dim_P1_trunc) + d.dim_O1;
    d.dim_T_flat = m;
    return d;
}

// Regular singular case: the orbit of a non-resonant semisimple residue.
inline int regular_singular_orbit_dimension(const std::vector<Scalar>& eigen) {
    for (size_t i = 0; i < eigen.size(); ++i)
        for (size_t j = i + 1; j < eigen.size(); ++j)
            if (eigen[i] != eigen[j] && differ_by_integer(eigen[i], eigen[j]))
                fail(Errc::NotRegular, "eigenvalues " + eigen[i].str() + " and " + eigen[j].str() + " are resonant");
    std::map<Scalar, int> mult;
    for (auto& x : eigen) ++mult[x];
    int n = static_cast<int>(eigen.size()), s = 0;
    for (auto& [x, k] : mult) s += k * k;
    return n * n - s;
}

} // namespace formal
