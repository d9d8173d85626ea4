#pragma once

#include <numeric>
#include <optional>

#include "formal_type.hpp"

namespace formal {

// nabla = d + A dt on F^n, together with the one-form nu used for strata.
struct Connection {
    LMat A;
    OneForm nu;

    int n() const { return A.n; }

    // Connection whose matrix for tau = t d/dt is M.
    static Connection from_tau(const LMat& M) { return Connection{M.shift(-1), OneForm()}; }

    // Matrix of nabla_{tau_nu} with tau_nu dual to nu = f dt, i.e. A / f.
    LMat tau_matrix(int digits = kDefaultDigits) const {
        if (nu.is_dt_over_t()) return A.shift(1);
        return nu.coefficient().inv(digits) * A;
    }
    // Matrix of nabla_{t d/dt}, whatever nu is.
    LMat tau_dt_over_t() const { return A.shift(1); }
};

// g.M = g M g^{-1} - tau(g) g^{-1} for tau = t d/dt.
inline LMat gauge_tau(const LMat& g, const LMat& ginv, const LMat& M) { return g * M * ginv - g.tau() * ginv; }
inline LMat gauge_tau(const LMat& g, const LMat& M, int digits = kDefaultDigits) { return gauge_tau(g, inverse(g, digits), M); }

// g.nabla: A' = g A g^{-1} - (dg/dt) g^{-1}.
inline Connection gauge_transform(const LMat& g, const Connection& c, int digits = kDefaultDigits) {
    LMat gi = inverse(g, digits);
    return Connection{g * c.A * gi - g.deriv() * gi, c.nu};
}

// Smallest r >= 0 with nabla_tau(L^i) in L^{i-r-(1+ord nu)e} for all i,
// and the stratum (P, r, [nabla_tau]) it determines.
inline Stratum contained_stratum(const Connection& c, const Parahoric& P, int digits = kDefaultDigits) {
    LMat M = c.tau_matrix(digits);
    int d = filtration_degree(M, P);
    int r = d >= kExact ? 0 : std::max(0, -d - (1 + c.nu.ord()) * P.e);
    return Stratum{P, r, M, c.nu};
}

// ---------------------------------------------------------------------------
// Slope

struct SlopeResult {
    mpq_class slope;      // r / e
    bool regular_singular = false;
    Stratum stratum;      // fundamental (or depth zero), gcd(r, e) = 1, in the gauged basis
    LMat gauge;           // g: stratum.beta = [g.nabla]_tau
    std::vector<std::string> trace;
};

namespace detail {

struct ValGraph {
    int n = 0;
    std::vector<std::vector<int>> v;     // valuation of M_ab, kExact if exactly zero or unknown
    std::vector<std::vector<int>> tail;  // precision of M_ab, kExact if exact
};

inline ValGraph valuations(const LMat& M) {
    ValGraph g{M.n, std::vector<std::vector<int>>(M.n, std::vector<int>(M.n, kExact)),
               std::vector<std::vector<int>>(M.n, std::vector<int>(M.n, kExact))};
    for (int a = 0; a < M.n; ++a)
        for (int b = 0; b < M.n; ++b) {
            if (!M(a, b).is_zero()) g.v[a][b] = M(a, b).order();
            g.tail[a][b] = M(a, b).prec();
        }
    return g;
}

// Maximum cycle mean of the weights -v_ab over edges (a, b) (Karp).
inline std::optional<mpq_class> max_cycle_mean(const ValGraph& g) {
    int n = g.n;
    const long NEG = std::numeric_limits<long>::min() / 4;
    std::vector<std::vector<long>> D(n + 1, std::vector<long>(n, NEG));
    for (int x = 0; x < n; ++x) D[0][x] = 0;
    for (int k = 1; k <= n; ++k)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (g.v[a][b] >= kExact || D[k - 1][a] == NEG) continue;
                D[k][b] = std::max(D[k][b], D[k - 1][a] - g.v[a][b]);
            }
    std::optional<mpq_class> best;
    for (int x = 0; x < n; ++x) {
        if (D[n][x] == NEG) continue;
        std::optional<mpq_class> worst;
        for (int k = 0; k < n; ++k) {
            if (D[k][x] == NEG) continue;
            mpq_class q(D[n][x] - D[k][x], n - k);
            q.canonicalize();
            if (!worst || q < *worst) worst = q;
        }
        if (worst && (!best || *worst > *best)) best = worst;
    }
    return best;
}

// Least w >= 0 with v_ab + w_a - w_b >= -lambda on every edge.
inline std::vector<mpq_class> potentials(const ValGraph& g, const mpq_class& lambda) {
    int n = g.n;
    std::vector<mpq_class> w(n, mpq_class(0));
    for (int it = 0; it <= n + 1; ++it) {
        bool changed = false;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (g.v[a][b] >= kExact) continue;
                mpq_class need = w[b] - g.v[a][b] - lambda;
                if (need > w[a]) {
                    w[a] = need;
                    changed = true;
                }
            }
        if (!changed) return w;
    }
    throw std::logic_error("potentials did not converge");
}

inline long floor_q(const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f.get_si();
}

// Constant basis change inside each level class, adapted to the flag
// ker N subset ker N^2 subset ... of the nilpotent graded part N.
inline KMat kernel_flag_basis(const KMat& N, const Parahoric& P) {
    int n = P.n;
    KMat B(n, n);
    std::vector<KMat> powers{N};
    for (int k = 1; k < n; ++k) powers.push_back(powers.back() * N);
    for (int c = 0; c < P.e; ++c) {
        auto idx = P.at_level(c);
        int s = static_cast<int>(idx.size());
        if (!s) continue;
        std::vector<std::vector<Scalar>> chosen;
        auto try_add = [&](const std::vector<Scalar>& v) {
            KMat m(static_cast<int>(chosen.size()) + 1, s);
            for (size_t r = 0; r < chosen.size(); ++r)
                for (int j = 0; j < s; ++j) m(static_cast<int>(r), j) = chosen[r][j];
            for (int j = 0; j < s; ++j) m(static_cast<int>(chosen.size()), j) = v[j];
            if (rank(m) == static_cast<int>(chosen.size()) + 1) chosen.push_back(v);
        };
        for (int k = 0; k < n && static_cast<int>(chosen.size()) < s; ++k) {
            // N^{k+1} restricted to the columns of this level
            KMat r(n, s);
            for (int a = 0; a < n; ++a)
                for (int j = 0; j < s; ++j) r(a, j) = powers[k](a, idx[j]);
            KMat ker = kernel(r);
            for (int col = 0; col < ker.cols; ++col) {
                std::vector<Scalar> v(s);
                for (int j = 0; j < s; ++j) v[j] = ker(j, col);
                try_add(v);
            }
        }
        for (int q = 0; q < s; ++q)
            for (int j = 0; j < s; ++j) B(idx[j], idx[q]) = chosen[q][j];
    }
    return B;
}

} // namespace detail

// Slope of a connection by a potential (weight) search: the optimal shear
// diag(t^w) with rational w puts [nabla_tau] into P^{-r} for the chain read
// off from the fractional parts of w, with r/e the maximal cycle mean of the
// valuation graph. If the stratum is not fundamental, a constant Levi change
// of basis adapted to the kernel flag of its nilpotent leading part strictly
// lowers the cycle mean, and the search is repeated. Exact inputs stay exact.
inline SlopeResult slope(const Connection& c) {
    LMat M = c.tau_dt_over_t();
    int n = M.n;
    LMat G = LMat::identity(n);
    SlopeResult out;
    std::optional<mpq_class> last;
    for (int iter = 0; iter < 4 * n * n + 8; ++iter) {
        auto g = detail::valuations(M);
        auto lam = detail::max_cycle_mean(g);
        bool rs = !lam || *lam <= 0;
        mpq_class L = rs ? mpq_class(0) : *lam;
        if (last && !rs && L >= *last) throw std::logic_error("slope search did not make progress");
        last = L;
        auto w = detail::potentials(g, L);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (g.tail[a][b] >= kExact) continue;
                if (g.tail[a][b] + w[a] - w[b] <= -L) {
                    Error err(Errc::InsufficientPrecision, "entry (" + std::to_string(a) + "," + std::to_string(b) +
                                                               ") is not known far enough to decide the slope");
                    mpq_class need = -L - w[a] + w[b] + 1;
                    err.needed = static_cast<int>(detail::floor_q(need)) + 1;
                    throw err;
                }
            }
        mpz_class E = L.get_den();
        for (auto& x : w) mpz_lcm(E.get_mpz_t(), E.get_mpz_t(), x.get_den_mpz_t());
        int e = static_cast<int>(E.get_si());
        std::vector<int> lv(n);
        std::vector<Laurent> shear(n);
        bool trivial = true;
        for (int a = 0; a < n; ++a) {
            long k = detail::floor_q(w[a]);
            mpq_class fr = (w[a] - k) * e;
            lv[a] = static_cast<int>(fr.get_num().get_si());
            shear[a] = Laurent::monomial(Scalar(1), static_cast<int>(k));
            trivial = trivial && k == 0;
        }
        if (!trivial) {
            LMat S = LMat::diag(shear);
            M = gauge_tau(S, M);
            G = S * G;
        }
        int r = static_cast<int>(mpz_class(L * e).get_si());
        Parahoric P = Parahoric::from_levels(lv, e);
        std::string step = "cycle mean " + L.get_str() + ", chain e=" + std::to_string(e);
        if (rs) {
            out.trace.push_back(step + ", regular singular");
            out.regular_singular = true;
            out.slope = 0;
            out.stratum = Stratum{Parahoric::maximal(n), 0, M, OneForm()};
            out.gauge = G;
            return out;
        }
        Stratum S{P, r, M, OneForm()};
        if (is_fundamental(S)) {
            out.trace.push_back(step + ", fundamental");
            out.slope = L;
            out.stratum = reduce_stratum(S);
            out.gauge = G;
            return out;
        }
        out.trace.push_back(step + ", nilpotent leading term");
        KMat N = graded_component(M, P, -r).coef;
        KMat B = detail::kernel_flag_basis(N, P), Binv;
        invert(B, Binv);
        M = LMat::from_constant(Binv) * M * LMat::from_constant(B);
        G = LMat::from_constant(Binv) * G;
    }
    throw std::logic_error("slope search did not terminate");
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitConnection {
    LMat gauge;  // p in P^1 (identity mod P^1)
    LMat M;      // [p.nabla]_tau, block diagonal along the parts through degree -r + digits
};

// Kills the off-part components of M degree by degree, from 1 - r up to
// -r + digits, by gauges 1 + X with X homogeneous of degree delta + r and
// [lead, X] (+ tau X when r = 0) equal to the off-part component. The
// leading part of M must already be block diagonal along the parts; when
// r = 0 the tau-term enters the graded equation.
inline SplitConnection split_connection(const LMat& M0, const Parahoric& P, int r,
                                        const std::vector<std::vector<int>>& parts, int digits,
                                        Field field = Field::Q) {
    int n = P.n;
    std::vector<int> part_of(n, -1);
    for (size_t i = 0; i < parts.size(); ++i)
        for (int a : parts[i]) part_of[a] = static_cast<int>(i);
    auto off = [&](int a, int b) { return part_of[a] != part_of[b]; };
    int lead_exp = floor_div(-r - (P.e - 1), P.e);
    int W = floor_div(digits - r, P.e) + 2;
    if (M0.prec() < W) fail(Errc::InsufficientPrecision, "connection matrix is not known to t^" + std::to_string(W));
    int inv_digits = W - lead_exp + 2;
    LMat M = M0.truncated(W);
    LMat p = LMat::identity(n);
    if (r == 0) {
        // split the residue first by a constant change of basis: each part
        // takes the spectral subspace of the roots of its diagonal block
        KMat R = graded_component(M, P, 0).coef;
        Poly phi = charpoly(R);
        auto fac = factor_roots(phi, field);
        if (!fac.split()) fail(Errc::NonsplitField, std::string("residue eigenvalues are not in ") + field_name(field));
        auto polys = spectral_polys(phi, fac);
        KMat G(n, n);
        for (auto& I : parts) {
            Poly blk = charpoly(LMat::from_constant(R).sub(I).coeff(0));
            KMat E(n, n);
            for (size_t q = 0; q < fac.roots.size(); ++q)
                if (peval(blk, fac.roots[q].first).is_zero()) E = E + eval_poly(polys[q], R);
            for (int b : I)
                for (int a = 0; a < n; ++a) G(a, b) = E(a, b);
        }
        KMat Gi;
        if (!invert(G, Gi)) fail(Errc::NotSplit, "residue does not split along the parts");
        M = LMat::from_constant(Gi) * M * LMat::from_constant(G);
        p = LMat::from_constant(Gi);
    }
    LMat lead = realize(graded_component(M, P, -r));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (off(a, b) && !(lead(a, b).is_zero())) fail(Errc::NotSplit, "leading term is not block diagonal along the parts");
    for (int delta = 1 - r; delta <= -r + digits; ++delta) {
        auto eqs = graded_basis(P, delta), unk = graded_basis(P, delta + r);
        std::vector<Monomial> E, U;
        for (auto& q : eqs)
            if (off(q.a, q.b)) E.push_back(q);
        for (auto& q : unk)
            if (off(q.a, q.b)) U.push_back(q);
        if (E.empty()) continue;
        std::vector<Scalar> rhs;
        bool any = false;
        for (auto& q : E) {
            rhs.push_back(M(q.a, q.b).coeff(q.k));
            any = any || !rhs.back().is_zero();
        }
        if (!any) continue;
        KMat L(static_cast<int>(E.size()), static_cast<int>(U.size()));
        for (size_t u = 0; u < U.size(); ++u) {
            LMat X = monomial_matrix(n, U[u]);
            LMat img = lead * X - X * lead;
            if (r == 0) img = img + X.tau();
            for (size_t q = 0; q < E.size(); ++q) L(static_cast<int>(q), static_cast<int>(u)) = img(E[q].a, E[q].b).coeff(E[q].k);
        }
        std::vector<Scalar> x;
        if (!solve(L, rhs, x)) fail(Errc::NotSplit, "off-diagonal part at degree " + std::to_string(delta) + " cannot be removed");
        LMat g = LMat::identity(n);
        for (size_t u = 0; u < U.size(); ++u)
            if (!x[u].is_zero()) g(U[u].a, U[u].b) = g(U[u].a, U[u].b) + Laurent::monomial(x[u], U[u].k);
        M = gauge_tau(g, M, inv_digits).truncated(W);
        p = (g * p).truncated(W);
    }
    return SplitConnection{p, M};
}

// ---------------------------------------------------------------------------
// Diagonalization

struct Diagonalization {
    FormalType type;
    LMat gauge;        // p with [p.nabla]_tau = type + O(higher), tau = t d/dt
    LMat normal_form;  // [p.nabla]_tau to the working precision
    int digits = 0;
    SlopeResult slope;
};

namespace detail {

// Constant change of basis diagonalizing a matrix whose eigenvalues are the
// given distinct roots; columns are eigenvectors picked as in assign_columns.
inline KMat eigenbasis(const KMat& R, const std::vector<Scalar>& roots) {
    int n = R.rows;
    std::vector<KMat> proj;
    for (auto& lam : roots) {
        KMat p = KMat::identity(n);
        for (auto& mu : roots)
            if (mu != lam) p = (lam - mu).inv() * (p * (R - KMat::diag(std::vector<Scalar>(n, mu))));
        proj.push_back(p);
    }
    auto f = assign_columns(Parahoric::maximal(n), proj);
    if (f.empty()) fail(Errc::NotRegular, "residue is not diagonalizable");
    KMat B(n, n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) B(a, b) = proj[f[b]](a, b);
    return B;
}

} // namespace detail

struct ToralNormalization {
    FormalType type;
    LMat gauge;
    LMat M;
};

// Brings M, in toral layout with leading term a_j varpi^{-r} in block j and
// no other degree -r component, to its formal type through degree `digits`.
// At each degree the non-toral part is removed by 1 - X with [X, xi] equal to
// it; for positive degrees the toral part is first absorbed by 1 + alpha
// varpi^delta, using pi_t(tau(varpi^delta) varpi^{-delta}) = delta / e.
inline ToralNormalization toral_normalize(const LMat& M0, const Torus& T, int r, int digits) {
    int n = T.n(), e = T.e;
    Parahoric P = T.chain();
    int lead_exp = floor_div(-r - (e - 1), e);
    int W = floor_div(digits, e) + 2;
    if (M0.prec() < W) fail(Errc::InsufficientPrecision, "connection matrix is not known to t^" + std::to_string(W));
    int inv_digits = W - lead_exp + 2;
    LMat M = M0.truncated(W);
    LMat p = LMat::identity(n);
    ToralElement xi{T, {}};
    for (int j = 0; j < T.m; ++j) {
        auto z = toral_graded_block(M, T, j, j, -r);
        xi.blocks.push_back(Laurent::monomial(z[0], -r));
    }
    auto apply = [&](const LMat& g) {
        M = gauge_tau(g, M, inv_digits).truncated(W);
        p = (g * p).truncated(W);
    };
    for (int delta = 1 - r; delta <= digits; ++delta) {
        if (delta > 0) {
            LMat u = LMat::identity(n);
            bool any = false;
            for (int j = 0; j < T.m; ++j) {
                auto z = toral_graded_block(M, T, j, j, delta);
                Scalar c;
                for (auto& v : z) c += v;
                c = c / Scalar(e);
                if (c.is_zero()) continue;
                any = true;
                std::vector<Scalar> alpha(e, c * Scalar(e) / Scalar(delta));
                add_toral_graded_block(u, T, j, j, delta, alpha);
            }
            if (any) apply(u);
        }
        LMat X = graded_ad_solve(xi, r, M, delta + r);
        if (!X.is_zero()) apply(LMat::identity(n) - X);
    }
    FormalType A = FormalType::zero(T, r);
    for (int j = 0; j < T.m; ++j)
        for (int d = -r; d <= 0; ++d) {
            auto z = toral_graded_block(M, T, j, j, d);
            Scalar c;
            for (auto& v : z) c += v;
            A.coeff(j, d) = c / Scalar(e);
        }
    LMat rest = M - A.matrix();
    if (filtration_lower_bound(rest, P) <= digits)
        fail(Errc::InsufficientPrecision, "normal form is not reached to degree " + std::to_string(digits));
    return ToralNormalization{A, p, M};
}

// Formal type of a connection with regular leading term. `digits` is the
// filtration degree (in units of the toral chain) through which the gauged
// matrix agrees with the formal type.
inline Diagonalization diagonalize(const Connection& c, Field field, int digits = 8) {
    int n = c.n();
    Diagonalization out;
    out.digits = digits;
    LMat M = c.tau_dt_over_t();
    if (M.exact() && M.is_zero()) {
        out.type = FormalType::zero(Torus{1, n}, 0);
        out.gauge = LMat::identity(n);
        out.normal_form = M;
        out.slope.regular_singular = true;
        out.slope.stratum = Stratum{Parahoric::maximal(n), 0, M, OneForm()};
        out.slope.gauge = out.gauge;
        return out;
    }
    out.slope = slope(c);
    const Stratum& S = out.slope.stratum;
    LMat p = out.slope.gauge;
    M = S.beta;
    auto reg = is_regular(S, field);
    if (!reg.regular) fail(Errc::NotRegular, reg.reason);

    if (S.r == 0) {
        // regular singular: diagonalize the residue, then remove t^k terms one by one
        int W = digits + 2;
        if (M.prec() < W) fail(Errc::InsufficientPrecision, "connection matrix is not known to t^" + std::to_string(W));
        M = M.truncated(W);
        KMat B = detail::eigenbasis(M.coeff(0), reg.eigen), Binv;
        invert(B, Binv);
        M = LMat::from_constant(Binv) * M * LMat::from_constant(B);
        p = LMat::from_constant(Binv) * p;
        KMat R = M.coeff(0);
        for (int k = 1; k <= digits; ++k) {
            KMat Mk = M.coeff(k);
            if (Mk.is_zero()) continue;
            LMat g = LMat::identity(n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (!Mk(a, b).is_zero())
                        g(a, b) = g(a, b) + Laurent::monomial(Mk(a, b) / (R(a, a) - R(b, b) + Scalar(k)), k);
            M = gauge_tau(g, M, W + 2).truncated(W);
            p = (g * p).truncated(W);
        }
        out.type = FormalType::zero(Torus{1, n}, 0);
        for (int j = 0; j < n; ++j) out.type.coeff(j, 0) = R(j, j);
        out.gauge = p;
        out.normal_form = M;
        return out;
    }

    int e = S.P.e, r = S.r, m = n / e;
    Torus T{e, m};
    int lead_exp = floor_div(-r - (e - 1), e);
    int W = floor_div(digits, e) + 2;
    int Wh = W - lead_exp + 2;
    std::vector<std::vector<int>> parts;
    if (m > 1) {
        auto sp = split_stratum(S, field, std::max(Wh, r * n + 8));
        M = gauge_tau(sp.gauge, sp.gauge_inv, M);
        p = sp.gauge * p;
        parts = sp.parts;
    } else {
        parts.push_back(std::vector<int>(n));
        std::iota(parts[0].begin(), parts[0].end(), 0);
    }
    // toral layout: part j becomes block j, ordered by decreasing level
    KMat perm(n, n);
    for (int j = 0; j < m; ++j) {
        auto& I = parts[j];
        if (static_cast<int>(I.size()) != e) fail(Errc::NotRegular, "part " + std::to_string(j) + " has the wrong size");
        std::vector<int> byl(e, -1);
        for (int a : I) {
            int pos = e - 1 - S.P.level[a];
            if (byl[pos] >= 0) fail(Errc::NotRegular, "part " + std::to_string(j) + " is not pure");
            byl[pos] = a;
        }
        for (int i = 0; i < e; ++i) perm(j * e + i, byl[i]) = Scalar(1);
    }
    LMat Pm = LMat::from_constant(perm);
    M = (Pm * M * LMat::from_constant(perm.transpose())).truncated(std::min(M.prec(), Wh));
    p = Pm * p;
    // normalize the leading diagonal D_j varpi^{-r} to a_j varpi^{-r}
    std::vector<Laurent> h(n);
    for (int j = 0; j < m; ++j) {
        auto d = toral_graded_block(M, T, j, j, -r);
        Scalar prod(1);
        for (auto& x : d) prod *= x;
        auto roots = kth_roots(prod, e, field);
        if (roots.empty()) fail(Errc::NonsplitField, "leading coefficient " + prod.str() + " has no " + std::to_string(e) + "-th root in " + field_name(field));
        Scalar a = std::find(roots.begin(), roots.end(), d[0]) != roots.end() ? d[0] : roots[0];
        std::vector<Scalar> hv(e);
        hv[0] = Scalar(1);
        int rr = ((r % e) + e) % e;
        for (int s = 1, i = rr; s < e; ++s, i = (i + rr) % e) hv[i] = a * hv[((i - rr) % e + e) % e] / d[i];
        for (int i = 0; i < e; ++i) h[j * e + i] = Laurent::constant(hv[i]);
    }
    LMat H = LMat::diag(h);
    M = gauge_tau(H, M);
    p = H * p;
    auto tn = toral_normalize(M, T, r, digits);
    out.type = tn.type;
    out.gauge = (tn.gauge * p).truncated(W);
    out.normal_form = tn.M;
    return out;
}

} // namespace formal
