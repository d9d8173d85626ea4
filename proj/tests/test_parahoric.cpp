#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace formal;
using namespace formal::testing;

namespace {

LMat mono(int n, int a, int b, int k, const Scalar& c = Scalar(1)) {
    LMat x(n);
    x(a, b) = Laurent::monomial(c, k);
    return x;
}

} // namespace

TEST_CASE("standard chains and their uniformizers", "[parahoric]") {
    auto P = Parahoric::maximal(3);
    CHECK(P.e == 1);
    CHECK(P.varpi() == Scalar(1) * LMat::identity(3).shift(1));

    auto I = Parahoric::iwahori(3);
    CHECK(I.e == 3);
    // varpi^n = t and its characteristic polynomial is X^n - t
    CHECK(I.varpi().pow(3) == LMat::identity(3).shift(1));
    CHECK(filtration_degree(I.varpi(), I) == 1);

    auto B = Parahoric::standard({2, 2});
    CHECK(B.uniform());
    LMat w = B.varpi();
    CHECK(w.pow(2) == LMat::identity(4).shift(1));
    // level 0 (basis 2, 3) maps up to level 1; level 1 wraps with a factor t
    CHECK(w(0, 2) == Laurent::constant(Scalar(1)));
    CHECK(w(1, 3) == Laurent::constant(Scalar(1)));
    CHECK(w(2, 0) == Laurent::monomial(Scalar(1), 1));
    CHECK(w(3, 1) == Laurent::monomial(Scalar(1), 1));

    CHECK_THROWS_AS(Parahoric::standard({}), Error);
    CHECK_THROWS_AS(Parahoric::standard({2, 0}), Error);
    CHECK_THROWS_AS(Parahoric::standard({1, 2}).varpi(), Error);
}

TEST_CASE("filtration degrees", "[parahoric]") {
    auto I = Parahoric::iwahori(2);
    CHECK(filtration_degree(LMat::identity(2).shift(1), I) == 2);
    LMat w = I.varpi();
    CHECK(filtration_degree(w.pow(1).shift(-2), I) == -3);  // varpi^{-3} = varpi t^{-2}
    // the upper corner entry t^{-1} sits in degree 2(-1) + 1 - 0
    CHECK(filtration_degree(mono(2, 0, 1, -1), I) == -1);
    CHECK(filtration_degree(mono(2, 1, 0, -1), I) == -3);
    CHECK(filtration_degree(LMat(2), I) >= kExact);

    LMat unknown(2);
    unknown(0, 0) = Laurent::zero(3);
    CHECK(filtration_lower_bound(unknown, I) == 6);
    CHECK_THROWS_AS(filtration_degree(unknown, I), Error);
    CHECK(in_filtration(unknown, I, 5));
    CHECK_THROWS_AS(in_filtration(unknown, I, 7), Error);
}

TEST_CASE("filtration matches the lattice definition", "[parahoric]") {
    // L^i is spanned by t^{c_b(i)} e_b with c_b(i) = ceil((i - level[b]) / e);
    // X is in P^r iff X L^i lies in L^{i+r} for i = 0..e-1.
    auto ceil_div = [](int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); };
    Rng g(11);
    for (int it = 0; it < 100; ++it) {
        int n = rand_int(g, 1, 4);
        Parahoric P = rand_chain(g, n);
        LMat X(n);
        for (auto& s : X.a) s = rand_series(g, -2, 2, 0.3);
        if (X.is_zero()) continue;
        auto maps_into = [&](int r) {
            for (int i = 0; i < P.e; ++i)
                for (int b = 0; b < n; ++b)
                    for (int a = 0; a < n; ++a) {
                        if (X(a, b).is_zero()) continue;
                        int have = X(a, b).order() + ceil_div(i - P.level[b], P.e);
                        if (have < ceil_div(i + r - P.level[a], P.e)) return false;
                    }
            return true;
        };
        int r = filtration_degree(X, P);
        CHECK(maps_into(r));
        CHECK_FALSE(maps_into(r + 1));
    }
}

TEST_CASE("graded components", "[parahoric]") {
    auto I = Parahoric::iwahori(2);
    LMat D(2);
    D(0, 0) = Laurent::constant(Scalar(3));
    D(1, 1) = Laurent::constant(Scalar(5));
    auto gc = graded_component(D, I, 0);
    CHECK(gc.coef(0, 0) == Scalar(3));
    CHECK(gc.coef(1, 1) == Scalar(5));
    CHECK(gc.piece(0)(0, 0) == Scalar(5));  // level-0 line is e_1
    CHECK(gc.piece(1)(0, 0) == Scalar(3));

    auto gw = graded_component(I.varpi(), I, 1);
    CHECK(gw.piece(0)(0, 0) == Scalar(1));
    CHECK(gw.piece(1)(0, 0) == Scalar(1));
    CHECK(graded_component(I.varpi().shift(1), I, 1).is_zero());
    CHECK_THROWS_AS(graded_component(I.varpi(), I, 2), Error);
    CHECK(realize(gw) == I.varpi());
}

TEST_CASE("graded basis counts and multiplicativity", "[parahoric]") {
    Rng g(12);
    for (int it = 0; it < 40; ++it) {
        int n = rand_int(g, 1, 4);
        Parahoric P = rand_chain(g, n);
        // e consecutive graded pieces have total dimension n^2
        int total = 0;
        for (int d = 0; d < P.e; ++d) total += static_cast<int>(graded_basis(P, d).size());
        CHECK(total == n * n);
        int r = rand_int(g, -3, 3), s = rand_int(g, -3, 3);
        LMat X = rand_in_filtration(g, P, r, r + 2), Y = rand_in_filtration(g, P, s, s + 2);
        KMat lhs = graded_component(X * Y, P, r + s).coef;
        KMat rhs = graded_component(realize(graded_component(X, P, r)) * realize(graded_component(Y, P, s)), P, r + s).coef;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("the uniformizer shifts the filtration by one", "[parahoric]") {
    Rng g(13);
    for (int it = 0; it < 40; ++it) {
        int n = rand_int(g, 1, 4);
        auto d = divisors(n);
        int e = d[rand_int(g, 0, static_cast<int>(d.size()) - 1)];
        Parahoric P = Parahoric::standard(std::vector<int>(e, n / e));
        int r = rand_int(g, -4, 4);
        LMat X = rand_in_filtration(g, P, r, r + 3);
        if (X.is_zero()) continue;
        int k = filtration_degree(X, P);
        CHECK(filtration_degree(P.varpi() * X, P) == k + 1);
        CHECK(filtration_degree(X * P.varpi(), P) == k + 1);
    }
}

TEST_CASE("tau preserves the filtration and tau(p) p^-1 lies in P^1", "[parahoric]") {
    Rng g(14);
    for (int it = 0; it < 40; ++it) {
        int n = rand_int(g, 1, 4);
        Parahoric P = rand_chain(g, n);
        int r = rand_int(g, -3, 3);
        LMat X = rand_in_filtration(g, P, r, r + 3);
        CHECK(filtration_lower_bound(X.tau(), P) >= r);
        // a unit of P: invertible graded degree-0 part plus higher terms
        LMat p = LMat::identity(n) + rand_in_filtration(g, P, 0, 3, 0.3);
        KMat p0 = graded_component(p, P, 0).coef, inv;
        if (!invert(p0, inv)) continue;
        LMat q = p.tau() * inverse(p, 12);
        CHECK(filtration_lower_bound(q, P) >= 1);
    }
}

TEST_CASE("restricting a chain keeps the levels", "[parahoric]") {
    auto P = Parahoric::toral(2, 2);
    auto Q = restrict_chain(P, {2, 3});
    CHECK(Q.level == std::vector<int>{1, 0});
    CHECK(Q == Parahoric::iwahori(2));
}
