#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhol/scalar.hpp"

using namespace qhol;

namespace {

RingPtr qring() { return PolyRing::make({"q"}); }
RingPtr qxring() { return PolyRing::make({"q", "x"}); }

/// Independent oracle: (a; q)_n as an explicit product of scalars.
Scalar poch_product(const Scalar& a, const Scalar& q, int n) {
    Scalar acc = Scalar::one(a.ring());
    Scalar qp = Scalar::one(a.ring());
    for (int j = 0; j < n; ++j) {
        acc *= Scalar::one(a.ring()) - a * qp;
        qp *= q;
    }
    return acc;
}

}  // namespace

TEST_CASE("polynomial arithmetic basics") {
    auto R = qring();
    Poly q = Poly::variable(R, 0);
    Poly one = Poly::constant(R, 1);
    Poly prod = (q + one) * (q - one);
    CHECK(prod == q * q - one);
    CHECK(prod.str() == "q^2 - 1");
    CHECK(prod.degree_in(0) == 2);
    CHECK((q - q).is_zero());
    CHECK(Poly::constant(R, 0).str() == "0");
    CHECK((-(q + one)).str() == "-q - 1");
}

TEST_CASE("polynomial gcd and exact division") {
    auto R = qring();
    Poly q = Poly::variable(R, 0);
    Poly one = Poly::constant(R, 1);
    Poly a = (q * q - one);                      // (q-1)(q+1)
    Poly b = (q - one) * (q - one);              // (q-1)^2
    CHECK(Poly::gcd(a, b) == q - one);
    Poly c = (q + one).mul_int(2);               // 2q+2
    Poly d = a.mul_int(4);                       // 4q^2-4
    CHECK(Poly::gcd(c, d) == c);
    CHECK(Poly::div_exact(a, q - one) == q + one);
    CHECK_THROWS_AS(Poly::div_exact(q + one, q - one), Error);
    CHECK(Poly::gcd(Poly(R), a) == a);  // gcd with zero, sign-normalized
}

TEST_CASE("bivariate gcd") {
    auto R = qxring();
    Poly q = Poly::variable(R, 0);
    Poly x = Poly::variable(R, 1);
    Poly one = Poly::constant(R, 1);
    Poly f = (q * x - one) * (x + q);
    Poly g = (q * x - one) * (x - q);
    CHECK(Poly::gcd(f, g) == q * x - one);
    // gcd must be sign-normalized even when inputs are negated
    CHECK(Poly::gcd(-f, -g) == q * x - one);
}

TEST_CASE("scalar canonical form") {
    auto R = qring();
    Poly q = Poly::variable(R, 0);
    Poly one = Poly::constant(R, 1);
    CHECK(Scalar::fraction(q * q - one, q - one) == Scalar::from_poly(q + one));
    CHECK(Scalar::fraction(q - one, one - q) == Scalar::integer(R, -1));
    CHECK(Scalar::fraction(Poly::constant(R, 2), Poly::constant(R, 4)).str() == "(1)/(2)");
    CHECK_THROWS_AS(Scalar::fraction(one, Poly(R)), DivisionByZeroError);
    // denominator sign normalization: 1/(1-q) stores den q-1
    Scalar s = Scalar::one(R) / (Scalar::one(R) - Scalar::variable(R, "q"));
    CHECK(s.str() == "(-1)/(q - 1)");
}

TEST_CASE("scalar field operations") {
    auto R = qring();
    Scalar q = Scalar::variable(R, "q");
    Scalar one = Scalar::one(R);
    Scalar a = one / (one - q);
    Scalar b = one / (one + q);
    // 1/(1-q) + 1/(1+q) = 2/(1-q^2)
    CHECK(a + b == Scalar::integer(R, 2) / (one - q * q));
    CHECK(a * b == one / (one - q * q));
    CHECK(a - a == Scalar::zero(R));
    CHECK(q.pow(-2) * q.pow(5) == q.pow(3));
    CHECK((one - q).pow(-1) * (one - q) == one);
    CHECK_THROWS_AS(Scalar::zero(R).inverse(), DivisionByZeroError);
    CHECK(Scalar::q_power(R, -2).str() == "(1)/(q^2)");
}

TEST_CASE("scalar parse/print round trip") {
    auto R = qxring();
    for (const char* text : {
             "q^2 - 1",
             "(q^2 + 1)/(q^3)",
             "(-1)/(q - 1)",
             "q*x - 3",
             "(q*x - x)/(q^3 - q^2 + q)",
             "0",
             "(5)/(7)",
         }) {
        Scalar s = Scalar::parse(R, text);
        CHECK(s.str() == text);
        CHECK(Scalar::parse(R, s.str()) == s);
    }
    // non-canonical input parses to canonical output
    CHECK(Scalar::parse(R, "(q^2-1)/(q-1)").str() == "q + 1");
    CHECK(Scalar::parse(R, "q^-2").str() == "(1)/(q^2)");
    CHECK(Scalar::parse(R, "2/4").str() == "(1)/(2)");
    CHECK(Scalar::parse(R, "-(1-q)^2") == -(Scalar::one(R) - Scalar::variable(R, "q")).pow(2));
    CHECK(Scalar::parse(R, "q^(-1)*x") == Scalar::variable(R, "x") / Scalar::variable(R, "q"));
}

TEST_CASE("scalar parse errors") {
    auto R = qring();
    CHECK_THROWS_AS(Scalar::parse(R, "y + 1"), ParseError);
    CHECK_THROWS_AS(Scalar::parse(R, "q^"), ParseError);
    CHECK_THROWS_AS(Scalar::parse(R, "(q"), ParseError);
    CHECK_THROWS_AS(Scalar::parse(R, "q )"), ParseError);
    CHECK_THROWS_AS(Scalar::parse(R, ""), ParseError);
    CHECK_THROWS_AS(Scalar::parse(R, "1/0"), DivisionByZeroError);
}

TEST_CASE("scalar evaluation") {
    auto R = qring();
    Scalar q = Scalar::variable(R, "q");
    Scalar one = Scalar::one(R);
    Scalar s = (one - q.pow(3)) / (one - q);  // = 1 + q + q^2
    auto pt = QEvaluationPoint::make(R, BigRat(2));
    CHECK(s.evaluate(pt) == BigRat(7));
    Scalar pole = one / (q - Scalar::integer(R, 2));
    CHECK(pole.has_pole_at(pt));
    CHECK_THROWS_AS(pole.evaluate(pt), DivisionByZeroError);
    CHECK_THROWS_AS(QEvaluationPoint::make(R, BigRat(1)), UsageError);
    CHECK_THROWS_AS(QEvaluationPoint::make(R, BigRat(0)), UsageError);
    CHECK_THROWS_AS(QEvaluationPoint::make(R, BigRat(-1)), UsageError);

    auto Rx = qxring();
    auto ptx = QEvaluationPoint::make(Rx, BigRat(2), {{"x", BigRat(5)}});
    Scalar sx = Scalar::parse(Rx, "x*q - x^2/(1+q)");
    CHECK(sx.evaluate(ptx) == BigRat(5, 3));  // 10 - 25/3
    CHECK_THROWS_AS(QEvaluationPoint::make(Rx, BigRat(2)), UsageError);
}

TEST_CASE("pochhammer product oracle at a rational point") {
    auto R = qring();
    Scalar q = Scalar::variable(R, "q");
    Scalar s = poch_product(q, q, 3);  // (q;q)_3 = (1-q)(1-q^2)(1-q^3)
    auto pt = QEvaluationPoint::make(R, BigRat(3));
    CHECK(s.evaluate(pt) == BigRat(-416));  // (1-3)(1-9)(1-27)
}

TEST_CASE("rescale q substitution") {
    auto R = qring();
    Scalar q = Scalar::variable(R, "q");
    Scalar s = q * q + q;
    CHECK(s.rescale_q(2) == q.pow(4) + q.pow(2));
    CHECK(s.rescale_q(-1).str() == "(q + 1)/(q^2)");
    // (1-q^2)/(1-q) rescaled by 3 equals (1-q^6)/(1-q^3)
    Scalar t = (Scalar::one(R) - q.pow(2)) / (Scalar::one(R) - q);
    CHECK(t.rescale_q(3) == (Scalar::one(R) - q.pow(6)) / (Scalar::one(R) - q.pow(3)));
    CHECK_THROWS_AS(s.rescale_q(0), UsageError);
}

TEST_CASE("ring promotion on mixed arithmetic") {
    auto R = qring();
    auto Rx = qxring();
    Scalar a = Scalar::variable(R, "q");
    Scalar b = Scalar::variable(Rx, "x");
    Scalar sum = a + b;
    CHECK(sum.ring()->names() == std::vector<std::string>{"q", "x"});
    CHECK(sum == Scalar::parse(Rx, "q + x"));
}

TEST_CASE("window parsing and iteration") {
    Window w = Window::parse("-2..1,0..2", 2);
    CHECK(w.rank() == 2);
    CHECK(w.point_count() == 12);
    CHECK(w.str() == "-2..1,0..2");
    Window broadcast = Window::parse("-1..1", 3);
    CHECK(broadcast.point_count() == 27);
    std::vector<Point> pts;
    Window::parse("0..1", 2).for_each_point([&](const Point& p) { pts.push_back(p); });
    CHECK(pts == std::vector<Point>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK_THROWS_AS(Window::parse("0..2,1..3", 3), UsageError);
    CHECK_THROWS_AS(Window::parse("0..", 1), ParseError);
    CHECK(Window::cube(1, 5, 3).point_count() == 0);
}
