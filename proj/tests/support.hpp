#pragma once

// Random generators and independent oracles shared by the unit tests and the
// acceptance binary. Everything is seeded, so runs are reproducible.

#include <random>

#include "formal/moduli.hpp"

namespace formal::testing {

using Rng = std::mt19937;

// Name of the error raised by f, or "none".
template <class F>
std::string error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return errc_name(e.code());
    }
    return "none";
}

inline int rand_int(Rng& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
inline bool coin(Rng& g, double p = 0.5) { return std::bernoulli_distribution(p)(g); }

// Small rational, occasionally with an i-part over Q(i).
inline Scalar rand_scalar(Rng& g, Field f = Field::Q, bool nonzero = false) {
    for (;;) {
        Scalar s = Scalar::frac(rand_int(g, -5, 5), rand_int(g, 1, 3));
        if (f == Field::QI && coin(g, 0.2)) s += Scalar::i() * Scalar(rand_int(g, -2, 2));
        if (!nonzero || !s.is_zero()) return s;
    }
}

inline Laurent rand_series(Rng& g, int lo, int hi, double density = 0.6) {
    Laurent s;
    for (int k = lo; k <= hi; ++k)
        if (coin(g, density)) s = s + Laurent::monomial(rand_scalar(g), k);
    return s;
}

// Chain with e levels, each level used at least once.
inline Parahoric rand_chain(Rng& g, int n) {
    int e = rand_int(g, 1, n);
    std::vector<int> lv(n);
    for (int j = 0; j < n; ++j) lv[j] = j < e ? j : rand_int(g, 0, e - 1);
    std::shuffle(lv.begin(), lv.end(), g);
    return Parahoric::from_levels(lv, e);
}

// Random element of P^lo with graded components of degrees lo..hi.
inline LMat rand_in_filtration(Rng& g, const Parahoric& P, int lo, int hi, double density = 0.5) {
    LMat x(P.n);
    for (int d = lo; d <= hi; ++d)
        for (auto& q : graded_basis(P, d))
            if (coin(g, density)) x(q.a, q.b) = x(q.a, q.b) + Laurent::monomial(rand_scalar(g), q.k);
    return x;
}

// p = 1 + X with X in P^1; components up to degree `hi`.
inline LMat rand_p1(Rng& g, const Parahoric& P, int hi = 4) {
    return LMat::identity(P.n) + rand_in_filtration(g, P, 1, hi, 0.4);
}

inline std::vector<int> divisors(int n) {
    std::vector<int> d;
    for (int k = 1; k <= n; ++k)
        if (n % k == 0) d.push_back(k);
    return d;
}

// Random formal type of rank n. For r > 0 the ramification e divides n with
// gcd(r, e) = 1; over Q the case e = 4 is kept unless Q(i) is allowed.
inline FormalType rand_formal_type(Rng& g, int n, int r, Field f = Field::Q) {
    if (r == 0) {
        FormalType A = FormalType::zero(Torus{1, n}, 0);
        for (;;) {
            for (int j = 0; j < n; ++j) A.coeff(j, 0) = rand_scalar(g, f);
            if (validate(A).ok) return A;
        }
    }
    std::vector<int> es;
    for (int e : divisors(n))
        if (std::gcd(e, r) == 1) es.push_back(e);
    int e = es[rand_int(g, 0, static_cast<int>(es.size()) - 1)];
    FormalType A = FormalType::zero(Torus{e, n / e}, r);
    for (;;) {
        for (int j = 0; j < A.T.m; ++j) {
            A.coeff(j, -r) = rand_scalar(g, f, true);
            for (int d = 1 - r; d <= 0; ++d) A.coeff(j, d) = coin(g, 0.6) ? rand_scalar(g, f) : Scalar();
        }
        if (validate(A).ok) return A;
    }
}

inline WeylElement rand_weyl(Rng& g, const Torus& T, Field f) {
    WeylElement w = WeylElement::identity(T.m);
    std::shuffle(w.perm.begin(), w.perm.end(), g);
    bool twists = root_of_unity(T.e, f).has_value();
    for (int j = 0; j < T.m; ++j) {
        w.galois[j] = twists ? rand_int(g, 0, T.e - 1) : 0;
        w.translation[j] = rand_int(g, -3, 3);
    }
    return w;
}

// The tau-matrix of A gauged by p, known to absolute precision prec.
inline LMat gauged(const LMat& p, const LMat& M, int prec) {
    int inv = prec - std::min(0, M.order()) + 4;
    return gauge_tau(p, inverse(p, inv), M).truncated(prec);
}

// Katz growth oracle. u_i = -min ord of nabla_tau^i applied to the standard
// basis; the slope s is the unique rational with u_i - s i bounded. The
// sequence is eventually periodic up to the linear term, with period the lcm
// of the ramification indices of the pieces, hence at most Landau's g(n). A
// candidate s = p/q from (1/n!)Z passes when for some period Q (a multiple of
// q, Q <= g(n)) u_{i+Q} - u_i = s Q for all i in [tail, steps - Q]. Only the
// sequence is used. The slope is reported when exactly one candidate passes.
struct KatzResult {
    std::optional<mpq_class> slope;
    std::vector<int> growth;
    int candidates_passing = 0;
};

// Largest lcm of a partition of n.
inline int landau(int n, int max_part = -1) {
    if (max_part < 0) max_part = n;
    int best = 1;
    for (int k = 1; k <= std::min(n, max_part); ++k) best = std::max(best, std::lcm(k, landau(n - k, k)));
    return best;
}

inline KatzResult katz_slope(const LMat& Mtau, int steps = 20, int tail = 4) {
    int n = Mtau.n;
    KatzResult out;
    LMat V = LMat::identity(n);
    for (int i = 0; i <= steps; ++i) {
        int v = V.order();
        out.growth.push_back(v >= kExact ? 0 : -v);
        V = V.tau() + Mtau * V;
    }
    int fact = 1;
    for (int k = 2; k <= n; ++k) fact *= k;
    int maxpole = std::max(0, -Mtau.order()), g = landau(n);
    for (int num = 0; num <= maxpole * fact; ++num) {
        mpq_class s(num, fact);
        s.canonicalize();
        int q = static_cast<int>(s.get_den().get_si());
        bool pass = false;
        for (int Q = q; Q <= g && !pass; Q += q) {
            int rise = static_cast<int>(mpz_class(s * Q).get_si());
            bool ok = tail + Q <= steps;
            for (int i = tail; i + Q <= steps && ok; ++i) ok = out.growth[i + Q] - out.growth[i] == rise;
            pass = ok;
        }
        if (pass) {
            ++out.candidates_passing;
            out.slope = s;
        }
    }
    if (out.candidates_passing != 1) out.slope.reset();
    return out;
}

// Exact gauge with exact inverse: constant K, a shear diag(t^k), and a
// unipotent upper triangular polynomial factor.
inline std::pair<LMat, LMat> rand_exact_gauge(Rng& g, int n, int shear = 2) {
    KMat K, Ki;
    do {
        K = KMat(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) K(a, b) = Scalar(rand_int(g, -2, 2));
    } while (!invert(K, Ki));
    std::vector<Laurent> s(n), si(n);
    for (int a = 0; a < n; ++a) {
        int k = rand_int(g, -shear, shear);
        s[a] = Laurent::monomial(Scalar(1), k);
        si[a] = Laurent::monomial(Scalar(1), -k);
    }
    LMat N(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coin(g, 0.5)) N(a, b) = rand_series(g, -1, 1, 0.5);
    LMat U = LMat::identity(n) + N, Ui = LMat::identity(n), pw = LMat::identity(n);
    for (int k = 1; k < n; ++k) {
        pw = pw * N;
        Ui = (k % 2) ? Ui - pw : Ui + pw;
    }
    LMat p = LMat::from_constant(K) * LMat::diag(s) * U;
    LMat pi = Ui * LMat::diag(si) * LMat::from_constant(Ki);
    return {p, pi};
}

inline LMat direct_sum(const LMat& x, const LMat& y) {
    LMat z(x.n + y.n);
    for (int a = 0; a < x.n; ++a)
        for (int b = 0; b < x.n; ++b) z(a, b) = x(a, b);
    for (int a = 0; a < y.n; ++a)
        for (int b = 0; b < y.n; ++b) z(x.n + a, x.n + b) = y(a, b);
    return z;
}

struct CorpusEntry {
    std::string name;
    Connection conn;
};

// Connections of rank <= 4 with dt-coefficients of order >= -6: the Witten
// example, regular singular ones, companion systems, gauged formal types,
// dense random matrices and direct sums of different slopes.
inline std::vector<CorpusEntry> slope_corpus(unsigned seed = 7) {
    Rng g(seed);
    std::vector<CorpusEntry> out;
    auto add = [&](std::string name, const LMat& A) {
        if (A.order() < -6) return false;
        out.push_back({std::move(name), Connection{A, OneForm()}});
        return true;
    };
    LMat W(2);
    W(0, 1) = Laurent::monomial(Scalar(1), -3);
    W(1, 0) = Laurent::monomial(Scalar(1), -2);
    add("witten", W);
    LMat nil(2);
    nil(0, 1) = Laurent::monomial(Scalar(1), -5);
    add("nilpotent_pole", nil);
    for (int n = 2; n <= 4; ++n) {
        LMat R(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) R(a, b) = Laurent::monomial(Scalar(rand_int(g, -2, 2)), -1);
        add("residue_" + std::to_string(n), R);
    }
    // y^(n) = t^{-k} y as a first-order system
    for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}, {4, 6}, {3, 2}, {4, 3}}) {
        LMat C(n);
        for (int a = 0; a + 1 < n; ++a) C(a, a + 1) = Laurent::constant(Scalar(1));
        C(n - 1, 0) = Laurent::monomial(Scalar(1), -k);
        add("companion_" + std::to_string(n) + "_" + std::to_string(k), C);
    }
    for (int tries = 0, made = 0; made < 14 && tries < 200; ++tries) {
        int n = rand_int(g, 2, 4), r = rand_int(g, 1, 5);
        FormalType A = rand_formal_type(g, n, r);
        auto [p, pi] = rand_exact_gauge(g, n, 1);
        LMat M = A.matrix();
        LMat G = p * M * pi - p.tau() * pi;
        if (add("type_" + std::to_string(made), G.shift(-1))) ++made;
    }
    for (int made = 0; made < 8;) {
        int n = rand_int(g, 2, 4);
        LMat A(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) A(a, b) = rand_series(g, rand_int(g, -5, -1), 1, 0.5);
        if (add("dense_" + std::to_string(made), A)) ++made;
    }
    for (int made = 0; made < 4;) {
        FormalType A = rand_formal_type(g, 2, rand_int(g, 1, 3));
        FormalType B = rand_formal_type(g, 2, rand_int(g, 1, 3));
        auto [p, pi] = rand_exact_gauge(g, 4, 1);
        LMat M = direct_sum(A.matrix(), B.matrix());
        if (add("sum_" + std::to_string(made), (p * M * pi - p.tau() * pi).shift(-1))) ++made;
    }
    return out;
}

// Brute-force fundamental test: the stratum is non-fundamental exactly when
// some power beta^m (m <= n) drops into P^{1 - r m}.
inline bool brute_fundamental(const Stratum& s) {
    LMat pw = LMat::identity(s.P.n);
    for (int m = 1; m <= s.P.n; ++m) {
        pw = pw * s.beta;
        if (in_filtration(pw, s.P, 1 - s.r * m)) return false;
    }
    return true;
}

// Rank of the form (X, Y) -> <A, [X, Y]> on P^lo / P^{r+1}: the dimension of
// the coadjoint orbit of the functional A restricted to P^lo.
inline int kirillov_rank(const LMat& A, const Parahoric& P, int lo, int r) {
    std::vector<LMat> basis;
    for (int d = lo; d <= r; ++d)
        for (auto& q : graded_basis(P, d)) basis.push_back(monomial_matrix(P.n, q));
    int N = static_cast<int>(basis.size());
    KMat B(N, N);
    OneForm nu;
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) {
            Scalar v = pairing(A, commutator(basis[a], basis[b]), nu);
            B(a, b) = v;
            B(b, a) = -v;
        }
    return rank(B);
}

} // namespace formal::testing
