#include <catch_amalgamated.hpp>

#include "formal/matrix.hpp"
#include "formal/poly.hpp"

using namespace formal;

namespace {

Laurent poly_series(std::vector<long> c, int start = 0, int prec = kExact) {
    std::vector<Scalar> s;
    for (long x : c) s.push_back(Scalar(x));
    return Laurent(start, s, prec);
}

// det(X - m) at X = x by cofactor expansion, as an oracle for charpoly.
Scalar det(const KMat& m) {
    int n = m.rows;
    if (n == 1) return m(0, 0);
    Scalar acc;
    for (int j = 0; j < n; ++j) {
        KMat minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r)
            for (int c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(r - 1, cc++) = m(r, c);
        Scalar term = m(0, j) * det(minor);
        acc = (j % 2) ? acc - term : acc + term;
    }
    return acc;
}

} // namespace

TEST_CASE("scalar arithmetic over Q(i)", "[scalar]") {
    Scalar a = Scalar::parse("3/4+2*i"), b = Scalar::parse("-1/2-i");
    REQUIRE((a * b / b) == a);
    REQUIRE((a * a.inv()) == Scalar(1));
    REQUIRE(Scalar::i() * Scalar::i() == Scalar(-1));
    REQUIRE(a.conj() * a == Scalar(a.norm()));
    REQUIRE(Scalar::parse("i").str() == Scalar::i().str());
    REQUIRE(Scalar::parse("-5/10") == Scalar::frac(-1, 2));
    REQUIRE(!Scalar::i().in(Field::Q));
    REQUIRE_THROWS_AS(Scalar::parse("1/x"), Error);
}

TEST_CASE("series precision follows the product rule", "[laurent]") {
    Laurent a = poly_series({1, 2, 3}, -1, 4);  // known below t^4
    Laurent b = poly_series({5, 1}, 2, 6);
    Laurent c = a * b;
    REQUIRE(c.prec() == std::min(-1 + 6, 2 + 4));
    REQUIRE(c.order() == 1);
    REQUIRE(c.coeff(1) == Scalar(5));
    REQUIRE(c.coeff(2) == Scalar(11));
    REQUIRE_THROWS_AS(c.coeff(5), Error);
    try {
        c.coeff(7);
    } catch (const Error& e) {
        REQUIRE(e.code() == Errc::InsufficientPrecision);
        REQUIRE(e.needed == 8);
    }
}

TEST_CASE("series inverse and derivations", "[laurent]") {
    Laurent a = poly_series({2, 1, 0, 7}, -2);
    Laurent ai = a.inv(12);
    Laurent one = a * ai;
    REQUIRE(one.order() == 0);
    REQUIRE(one.rel_prec() == 12);
    for (int k = 0; k < 12; ++k) REQUIRE(one.coeff(k) == Scalar(k == 0 ? 1 : 0));
    // monomials invert exactly
    REQUIRE(Laurent::monomial(Scalar(3), 2).inv().exact());
    // inversion refuses to go below the precision floor
    REQUIRE_THROWS_AS(poly_series({1, 1}, 0, 2).inv(), Error);
    REQUIRE_THROWS_AS(Laurent::zero(5).inv(), Error);
    // tau(t^k) = k t^k, and d/dt lowers the exponent
    Laurent t = poly_series({1, 1}, -3).tau();
    REQUIRE(t.coeff(-3) == Scalar(-3));
    REQUIRE(t.coeff(-2) == Scalar(-2));
    REQUIRE(poly_series({4}, 3).deriv().coeff(2) == Scalar(12));
}

TEST_CASE("one-form orders and residues", "[laurent]") {
    OneForm nu;
    REQUIRE(nu.ord() == -1);
    REQUIRE(nu.is_dt_over_t());
    REQUIRE(OneForm::dt_over_tl(3).ord() == -3);
    REQUIRE(residue(poly_series({7, 2}, 0), nu) == Scalar(7));
    REQUIRE(residue(poly_series({7, 2}, 0), OneForm::dt_over_tl(2)) == Scalar(2));
}

TEST_CASE("matrix inverse over the Laurent field", "[matrix]") {
    LMat m(2);
    m(0, 0) = poly_series({1, 1}, 0);
    m(0, 1) = poly_series({1}, -1);
    m(1, 0) = poly_series({3}, 0);
    m(1, 1) = poly_series({2, 0, 1}, 0);
    LMat mi = inverse(m, 16);
    LMat id = m * mi;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = id(i, j).order(); k < std::min(id(i, j).prec(), 8); ++k)
                REQUIRE(id(i, j).coeff(k) == Scalar(i == j && k == 0 ? 1 : 0));
    REQUIRE(id.prec() >= 8);
    LMat sing(2);
    sing(0, 0) = Laurent::constant(Scalar(1));
    sing(1, 0) = Laurent::constant(Scalar(2));
    REQUIRE_THROWS_AS(inverse(sing), Error);
}

TEST_CASE("trace pairing", "[matrix]") {
    LMat x(2), y(2);
    x(0, 1) = poly_series({1}, -1);
    y(1, 0) = poly_series({5, 3}, 0);
    REQUIRE(pairing(x, y, OneForm()) == Scalar(3));
    REQUIRE(pairing(x, y, OneForm::dt_over_tl(0)) == Scalar(5));
}

TEST_CASE("characteristic polynomial and rational roots", "[linalg]") {
    KMat m(3, 3);
    long vals[9] = {2, -1, 0, 4, 3, 1, -2, 5, 1};
    for (int i = 0; i < 9; ++i) m.a[i] = Scalar(vals[i]);
    Poly cp = charpoly(m);
    for (long x : {-3L, 0L, 1L, 2L, 7L}) {
        KMat xm = m;
        for (auto& v : xm.a) v = -v;
        for (int i = 0; i < 3; ++i) xm(i, i) += Scalar(x);
        REQUIRE(peval(cp, Scalar(x)) == det(xm));
    }
    // (X - 1/2)^2 (X + 3)(X^2 + 1)
    Poly p = pmul(pmul(ppow(linear_factor(Scalar::frac(1, 2)), 2), linear_factor(Scalar(-3))),
                  Poly{Scalar(1), Scalar(0), Scalar(1)});
    auto fq = factor_roots(p, Field::Q);
    REQUIRE(fq.roots.size() == 2);
    REQUIRE(!fq.split());
    auto fi = factor_roots(p, Field::QI);
    REQUIRE(fi.split());
    REQUIRE(fi.roots.size() == 4);
    REQUIRE(kth_roots(Scalar(-4), 2, Field::QI).size() == 2);
    REQUIRE(kth_roots(Scalar(-4), 2, Field::Q).empty());
    REQUIRE(kth_roots(Scalar(16), 4, Field::QI).size() == 4);
}

TEST_CASE("kernels and solves", "[linalg]") {
    KMat m(2, 3);
    m(0, 0) = Scalar(1);
    m(0, 1) = Scalar(2);
    m(1, 2) = Scalar(1);
    KMat k = kernel(m);
    REQUIRE(k.cols == 1);
    REQUIRE((m * k).is_zero());
    std::vector<Scalar> x;
    REQUIRE(solve(m, {Scalar(3), Scalar(4)}, x));
    REQUIRE(x[0] + Scalar(2) * x[1] == Scalar(3));
    REQUIRE(rank(m) == 2);
}
