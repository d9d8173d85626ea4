#pragma once

#include <algorithm>
#include <numeric>
#include <optional>

#include "toral.hpp"

namespace formal {

// A formal type of depth r: a toral element sum_{d=-r}^{0} a_{j,d} varpi^d
// in each of the m blocks of a torus of ramification e, read as the matrix of
// nabla_tau for tau = t d/dt.
struct FormalType {
    Torus T;
    int r = 0;
    std::vector<std::vector<Scalar>> a;  // a[j][d + r]

    Scalar coeff(int j, int d) const { return a[j][d + r]; }
    Scalar& coeff(int j, int d) { return a[j][d + r]; }
    std::vector<Scalar> leading() const {
        std::vector<Scalar> l;
        for (auto& b : a) l.push_back(b[0]);
        return l;
    }

    static FormalType zero(const Torus& T, int r) {
        return FormalType{T, r, std::vector<std::vector<Scalar>>(T.m, std::vector<Scalar>(r + 1))};
    }

    ToralElement element() const {
        ToralElement x{T, {}};
        for (auto& b : a) x.blocks.push_back(Laurent(-r, b));
        return x;
    }
    LMat matrix() const { return realize(element()); }

    friend bool operator==(const FormalType& x, const FormalType& y) { return x.T == y.T && x.r == y.r && x.a == y.a; }
};

struct Validation {
    bool ok = true;
    std::string reason;
};

// Checks the invariants of a formal type: e = 1 and residues distinct mod Z
// at depth 0; otherwise gcd(r, e) = 1 and nonzero leading coefficients with
// pairwise distinct e-th powers.
inline Validation validate(const FormalType& A) {
    int e = A.T.e, m = A.T.m;
    auto bad = [](std::string why) { return Validation{false, std::move(why)}; };
    if (static_cast<int>(A.a.size()) != m) return bad("expected " + std::to_string(m) + " blocks");
    for (auto& b : A.a)
        if (static_cast<int>(b.size()) != A.r + 1) return bad("each block needs r + 1 coefficients");
    if (A.r == 0) {
        if (e != 1) return bad("depth zero requires e = 1");
        for (int j = 0; j < m; ++j)
            for (int k = j + 1; k < m; ++k)
                if (differ_by_integer(A.a[j][0], A.a[k][0])) return bad("residues differ by an integer");
        return {};
    }
    if (std::gcd(A.r, e) != 1) return bad("gcd(r, e) must be 1");
    for (int j = 0; j < m; ++j) {
        if (A.a[j][0].is_zero()) return bad("leading coefficient of block " + std::to_string(j) + " vanishes");
        for (int k = j + 1; k < m; ++k)
            if (A.a[j][0].pow(e) == A.a[k][0].pow(e)) return bad("leading coefficients are not distinct");
    }
    return {};
}

// Primitive e-th root of unity in the field, if there is one.
inline std::optional<Scalar> root_of_unity(int e, Field field) {
    if (e == 1) return Scalar(1);
    if (e == 2) return Scalar(-1);
    if (e == 4 && field == Field::QI) return Scalar::i();
    return std::nullopt;
}

// Element of the relative Weyl group: block j goes to block perm[j] after
// the Galois twist varpi -> zeta^{galois[j]} varpi; then translation[i]/e is
// subtracted from the residue of target block i.
struct WeylElement {
    std::vector<int> perm;
    std::vector<int> galois;
    std::vector<long> translation;

    static WeylElement identity(int m) {
        WeylElement w{std::vector<int>(m), std::vector<int>(m, 0), std::vector<long>(m, 0)};
        std::iota(w.perm.begin(), w.perm.end(), 0);
        return w;
    }
    friend bool operator==(const WeylElement& x, const WeylElement& y) {
        return x.perm == y.perm && x.galois == y.galois && x.translation == y.translation;
    }
};

inline FormalType weyl_act(const WeylElement& w, const FormalType& A, Field field) {
    int e = A.T.e, m = A.T.m;
    if (static_cast<int>(w.perm.size()) != m) fail(Errc::ShapeMismatch, "Weyl element has the wrong rank");
    FormalType B = FormalType::zero(A.T, A.r);
    for (int j = 0; j < m; ++j) {
        int g = ((w.galois[j] % e) + e) % e;
        Scalar z(1);
        if (g != 0) {
            auto zeta = root_of_unity(e, field);
            if (!zeta) fail(Errc::NonsplitField, "no primitive " + std::to_string(e) + "-th root of unity in " + field_name(field));
            z = zeta->pow(g);
        }
        for (int d = -A.r; d <= 0; ++d) B.coeff(w.perm[j], d) = A.coeff(j, d) * z.pow(((d % e) + e) % e);
    }
    for (int i = 0; i < m; ++i) B.coeff(i, 0) -= Scalar::frac(w.translation[i], e);
    return B;
}

// x after y.
inline WeylElement compose(const WeylElement& x, const WeylElement& y, int e) {
    int m = static_cast<int>(x.perm.size());
    WeylElement z{std::vector<int>(m), std::vector<int>(m), std::vector<long>(m)};
    std::vector<int> xinv(m);
    for (int j = 0; j < m; ++j) xinv[x.perm[j]] = j;
    for (int j = 0; j < m; ++j) {
        z.perm[j] = x.perm[y.perm[j]];
        z.galois[j] = (((y.galois[j] + x.galois[y.perm[j]]) % e) + e) % e;
    }
    for (int i = 0; i < m; ++i) z.translation[i] = x.translation[i] + y.translation[xinv[i]];
    return z;
}

struct OrbitMatch {
    std::optional<WeylElement> w;  // weyl_act(w, A) == B
    std::string warning;           // set when the search had to skip Galois twists
};

// Searches the relative Weyl group for w with w.A = B. Formal types of
// different shape are never equivalent.
inline OrbitMatch orbit_equivalent(const FormalType& A, const FormalType& B, Field field) {
    OrbitMatch out;
    if (!(A.T == B.T) || A.r != B.r) return out;
    int e = A.T.e, m = A.T.m;
    auto zeta = root_of_unity(e, field);
    int twists = zeta ? e : 1;
    if (!zeta)
        out.warning = "no primitive " + std::to_string(e) + "-th root of unity in " + std::string(field_name(field)) +
                      "; Galois twists were not searched";
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        // the twist of each block is chosen independently
        WeylElement w{perm, std::vector<int>(m, 0), std::vector<long>(m, 0)};
        bool all = true;
        for (int j = 0; j < m && all; ++j) {
            int i = perm[j];
            bool found = false;
            for (int g = 0; g < twists && !found; ++g) {
                Scalar z = g ? zeta->pow(g) : Scalar(1);
                bool same = true;
                for (int d = -A.r; d < 0 && same; ++d) same = A.coeff(j, d) * z.pow(((d % e) + e) % e) == B.coeff(i, d);
                if (!same) continue;
                Scalar diff = (A.coeff(j, 0) - B.coeff(i, 0)) * Scalar(e);
                if (!diff.is_real() || diff.re().get_den() != 1) continue;
                w.galois[j] = g;
                w.translation[i] = diff.re().get_num().get_si();
                found = true;
            }
            all = found;
        }
        if (all) {
            out.w = w;
            return out;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

inline std::string formal_type_str(const FormalType& A) {
    std::string s = "e=" + std::to_string(A.T.e) + " m=" + std::to_string(A.T.m) + " r=" + std::to_string(A.r);
    for (int j = 0; j < A.T.m; ++j) {
        s += "\n  block " + std::to_string(j) + ":";
        for (int d = -A.r; d <= 0; ++d) s += " [" + std::to_string(d) + "] " + A.coeff(j, d).str();
    }
    return s;
}

} // namespace formal
