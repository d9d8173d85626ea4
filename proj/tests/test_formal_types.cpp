#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace formal;
using namespace formal::testing;

namespace {

FormalType split2(long a, long b) {
    FormalType A = FormalType::zero(Torus{1, 2}, 1);
    A.coeff(0, -1) = Scalar(a), A.coeff(1, -1) = Scalar(b);
    return A;
}

} // namespace

TEST_CASE("validation", "[formal_types]") {
    CHECK(validate(split2(1, 2)).ok);
    CHECK_FALSE(validate(split2(1, 1)).ok);
    CHECK_FALSE(validate(split2(0, 1)).ok);

    // e = 2, r = 3: q(varpi^{-1}) of degree 3
    FormalType W = FormalType::zero(Torus{2, 1}, 3);
    W.coeff(0, -3) = Scalar(1), W.coeff(0, -1) = Scalar(2), W.coeff(0, 0) = Scalar::parse("-1/4");
    CHECK(validate(W).ok);
    FormalType G = W;
    G.r = 2;
    G.a[0].erase(G.a[0].begin());
    CHECK_FALSE(validate(G).ok);  // gcd(2, 2) != 1

    FormalType R = FormalType::zero(Torus{1, 2}, 0);
    R.coeff(0, 0) = Scalar(0), R.coeff(1, 0) = Scalar(1);
    auto v = validate(R);
    CHECK_FALSE(v.ok);
    CHECK_FALSE(v.reason.empty());
    R.coeff(1, 0) = Scalar::parse("1/2");
    CHECK(validate(R).ok);

    // e = 2 needs distinct squares: a and -a collide
    FormalType S = FormalType::zero(Torus{2, 2}, 1);
    S.coeff(0, -1) = Scalar(3), S.coeff(1, -1) = Scalar(-3);
    CHECK_FALSE(validate(S).ok);
}

TEST_CASE("validation matches regularity of the realized stratum", "[formal_types]") {
    Rng g(51);
    for (int it = 0; it < 60; ++it) {
        int n = rand_int(g, 1, 4), r = rand_int(g, 0, 3);
        FormalType A = rand_formal_type(g, n, r);
        // perturb the leading data to hit invalid ones too
        if (coin(g, 0.4) && A.T.m > 1) A.a[1][0] = coin(g) ? A.a[0][0] : Scalar(0);
        auto P = Parahoric::toral(A.T.e, A.T.m);
        Stratum s{P, A.r, A.matrix(), OneForm()};
        bool leading_nonzero = true;
        for (auto& x : A.leading()) leading_nonzero = leading_nonzero && !x.is_zero();
        if (A.r > 0 && !leading_nonzero) {
            CHECK_FALSE(validate(A).ok);
            continue;
        }
        CHECK(validate(A).ok == is_regular(s, Field::Q).regular);
    }
}

TEST_CASE("Weyl action examples", "[formal_types]") {
    Rng g(52);
    FormalType A = rand_formal_type(g, 3, 2);
    CHECK(weyl_act(WeylElement::identity(A.T.m), A, Field::Q) == A);

    // pure e = 2: the Galois generator negates odd degrees
    FormalType P = FormalType::zero(Torus{2, 1}, 3);
    P.coeff(0, -3) = Scalar(5), P.coeff(0, -2) = Scalar(1), P.coeff(0, -1) = Scalar(7), P.coeff(0, 0) = Scalar(2);
    WeylElement s{{0}, {1}, {0}};
    FormalType Q = weyl_act(s, P, Field::Q);
    CHECK(Q.coeff(0, -3) == Scalar(-5));
    CHECK(Q.coeff(0, -2) == Scalar(1));
    CHECK(Q.coeff(0, -1) == Scalar(-7));
    CHECK(Q.coeff(0, 0) == Scalar(2));

    // the conjugation realizing it: diag(1, -1) varpi diag(1, -1) = -varpi
    LMat D = LMat::from_constant(KMat::diag({Scalar(1), Scalar(-1)}));
    CHECK(D * P.matrix() * D == Q.matrix());

    FormalType P3 = FormalType::zero(Torus{3, 1}, 1);
    P3.coeff(0, -1) = Scalar(1);
    CHECK(error_of([&] { weyl_act(WeylElement{{0}, {1}, {0}}, P3, Field::Q); }) == "NONSPLIT_FIELD");

    // translation by e on one block lowers its residue by one
    FormalType T = split2(1, 2);
    T.coeff(1, 0) = Scalar::parse("1/3");
    FormalType T2 = weyl_act(WeylElement{{0, 1}, {0, 0}, {0, 1}}, T, Field::Q);
    CHECK(T2.coeff(1, 0) == Scalar::parse("-2/3"));
    CHECK(T2.coeff(0, 0) == Scalar(0));

    CHECK(error_of([&] { weyl_act(WeylElement::identity(3), T, Field::Q); }) == "SHAPE_MISMATCH");
}

TEST_CASE("Weyl action is a group action and preserves validity", "[formal_types]") {
    Rng g(53);
    for (int it = 0; it < 100; ++it) {
        Field f = coin(g) ? Field::Q : Field::QI;
        int n = rand_int(g, 1, 4);
        FormalType A = rand_formal_type(g, n, rand_int(g, 0, 3), f);
        auto x = rand_weyl(g, A.T, f), y = rand_weyl(g, A.T, f);
        if (A.r == 0)
            for (auto& gal : x.galois) gal = 0;
        CHECK(weyl_act(compose(x, y, A.T.e), A, f) == weyl_act(x, weyl_act(y, A, f), f));
        CHECK(validate(weyl_act(x, A, f)).ok);
    }
}

TEST_CASE("orbit equivalence", "[formal_types]") {
    FormalType A = split2(1, 2);
    auto self = orbit_equivalent(A, A, Field::Q);
    REQUIRE(self.w);
    CHECK(*self.w == WeylElement::identity(2));

    FormalType B = split2(2, 1);
    auto sw = orbit_equivalent(A, B, Field::Q);
    REQUIRE(sw.w);
    CHECK(sw.w->perm == std::vector<int>{1, 0});

    FormalType C = split2(1, 3);
    CHECK_FALSE(orbit_equivalent(A, C, Field::Q).w);
    FormalType D = A;
    D.coeff(0, 0) = Scalar::parse("1/2");
    CHECK_FALSE(orbit_equivalent(A, D, Field::Q).w);

    // e = 3 over Q: twists are skipped and reported
    FormalType P3 = FormalType::zero(Torus{3, 1}, 1);
    P3.coeff(0, -1) = Scalar(1);
    auto o3 = orbit_equivalent(P3, P3, Field::Q);
    CHECK(o3.w);
    CHECK_FALSE(o3.warning.empty());

    Rng g(54);
    for (int it = 0; it < 100; ++it) {
        Field f = coin(g) ? Field::Q : Field::QI;
        FormalType X = rand_formal_type(g, rand_int(g, 1, 4), rand_int(g, 0, 3), f);
        auto w = rand_weyl(g, X.T, f);
        if (X.r == 0)
            for (auto& gal : w.galois) gal = 0;
        FormalType Y = weyl_act(w, X, f);
        auto m = orbit_equivalent(X, Y, f);
        REQUIRE(m.w);
        CHECK(weyl_act(*m.w, X, f) == Y);
        if (X.r > 0) CHECK(*m.w == w);  // the witness is unique
    }
}

TEST_CASE("torus rigidity", "[formal_types]") {
    // gauging by c varpi^k in each block shifts the residue by k / e: exactly
    // when e = 1, and after the P^1 normalization otherwise
    Rng g(55);
    for (int it = 0; it < 30; ++it) {
        FormalType A = rand_formal_type(g, rand_int(g, 1, 4), rand_int(g, 1, 3));
        ToralElement u{A.T, {}}, ui{A.T, {}};
        std::vector<long> k(A.T.m);
        for (int j = 0; j < A.T.m; ++j) {
            k[j] = rand_int(g, -2, 2);
            Scalar c = rand_scalar(g, Field::Q, true);
            u.blocks.push_back(Laurent::monomial(c, static_cast<int>(k[j])));
            ui.blocks.push_back(Laurent::monomial(c.inv(), static_cast<int>(-k[j])));
        }
        LMat M = gauge_tau(realize(u), realize(ui), A.matrix());
        FormalType B = A;
        for (int j = 0; j < A.T.m; ++j) B.coeff(j, 0) -= Scalar::frac(k[j], A.T.e);
        if (A.T.e == 1) CHECK(M == B.matrix());
        auto d = diagonalize(Connection::from_tau(M), Field::Q, 4);
        auto w = orbit_equivalent(B, d.type, Field::Q).w;
        REQUIRE(w);
        CHECK(std::all_of(w->translation.begin(), w->translation.end(), [](long x) { return x == 0; }));
        CHECK(orbit_equivalent(A, B, Field::Q).w);
    }
}
