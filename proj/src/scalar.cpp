#include "qhol/scalar.hpp"

#include <cctype>
#include <sstream>

namespace qhol {

QEvaluationPoint QEvaluationPoint::make(RingPtr ring, const BigRat& q,
                                        const std::map<std::string, BigRat>& params) {
    if (q == 0 || q == 1 || q == -1)
        throw UsageError("evaluation point needs q outside {0, 1, -1}");
    QEvaluationPoint pt;
    pt.values.assign(static_cast<std::size_t>(ring->size()), BigRat(0));
    for (int i = 0; i < ring->size(); ++i) {
        const std::string& name = ring->name(i);
        if (i == 0 && name == "q") {
            pt.values[0] = q;
            continue;
        }
        auto it = params.find(name);
        if (it == params.end())
            throw UsageError("evaluation point missing a value for parameter " + name);
        pt.values[static_cast<std::size_t>(i)] = it->second;
    }
    pt.ring = std::move(ring);
    return pt;
}

void Scalar::canonicalize() {
    if (den_.is_zero()) throw DivisionByZeroError("scalar with zero denominator");
    if (num_.is_zero()) {
        den_ = Poly::constant(num_.ring(), 1);
        return;
    }
    Poly g = Poly::gcd(num_, den_);
    if (!g.is_one()) {
        num_ = Poly::div_exact(num_, g);
        den_ = Poly::div_exact(den_, g);
    }
    if (den_.leading_coeff_lex() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

Scalar Scalar::zero(const RingPtr& ring) {
    return Scalar(Poly(ring), Poly::constant(ring, 1));
}

Scalar Scalar::one(const RingPtr& ring) {
    return Scalar(Poly::constant(ring, 1), Poly::constant(ring, 1));
}

Scalar Scalar::integer(const RingPtr& ring, BigInt v) {
    return Scalar(Poly::constant(ring, std::move(v)), Poly::constant(ring, 1));
}

Scalar Scalar::rational(const RingPtr& ring, const BigRat& v) {
    return Scalar(Poly::constant(ring, boost::multiprecision::numerator(v)),
                  Poly::constant(ring, boost::multiprecision::denominator(v)));
}

Scalar Scalar::from_poly(Poly p) {
    Poly one = Poly::constant(p.ring(), 1);
    return Scalar(std::move(p), std::move(one));
}

Scalar Scalar::fraction(Poly num, Poly den) {
    Scalar s(std::move(num), std::move(den));
    s.canonicalize();
    return s;
}

Scalar Scalar::q_power(const RingPtr& ring, std::int64_t e) {
    if (e >= 0) return from_poly(Poly::variable(ring, 0, e));
    return Scalar(Poly::constant(ring, 1), Poly::variable(ring, 0, -e));
}

Scalar Scalar::variable(const RingPtr& ring, std::string_view name) {
    auto idx = ring->index_of(name);
    if (!idx) throw UsageError("unknown scalar variable: " + std::string(name));
    return from_poly(Poly::variable(ring, *idx));
}

BigRat Scalar::rational_value() const {
    if (!is_rational_constant()) throw Error("rational_value on non-constant scalar");
    return BigRat(num_.constant_value(), den_.constant_value());
}

Scalar Scalar::operator-() const { return Scalar(-num_, den_); }

Scalar Scalar::operator+(const Scalar& o) const {
    if (!same_ring(ring(), o.ring())) {
        RingPtr u = ring_union(ring(), o.ring());
        return promoted(u) + o.promoted(u);
    }
    Poly g = Poly::gcd(den_, o.den_);
    Poly db = g.is_one() ? o.den_ : Poly::div_exact(o.den_, g);
    Poly dd = g.is_one() ? den_ : Poly::div_exact(den_, g);
    Scalar s(num_ * db + o.num_ * dd, den_ * db);
    s.canonicalize();
    return s;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
    if (!same_ring(ring(), o.ring())) {
        RingPtr u = ring_union(ring(), o.ring());
        return promoted(u) * o.promoted(u);
    }
    if (is_zero() || o.is_zero()) return zero(ring());
    Poly g1 = Poly::gcd(num_, o.den_);
    Poly g2 = Poly::gcd(o.num_, den_);
    Poly n1 = g1.is_one() ? num_ : Poly::div_exact(num_, g1);
    Poly d2 = g1.is_one() ? o.den_ : Poly::div_exact(o.den_, g1);
    Poly n2 = g2.is_one() ? o.num_ : Poly::div_exact(o.num_, g2);
    Poly d1 = g2.is_one() ? den_ : Poly::div_exact(den_, g2);
    Scalar s(n1 * n2, d1 * d2);
    s.canonicalize();
    return s;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::inverse() const {
    if (is_zero()) throw DivisionByZeroError("inverse of zero scalar");
    Scalar s(den_, num_);
    if (s.den_.leading_coeff_lex() < 0) {
        s.num_ = -s.num_;
        s.den_ = -s.den_;
    }
    return s;
}

Scalar Scalar::pow(std::int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar r = one(ring());
    Scalar base = *this;
    auto u = static_cast<std::uint64_t>(e);
    while (u) {
        if (u & 1) r *= base;
        base = base * base;
        u >>= 1;
    }
    return r;
}

BigRat Scalar::evaluate(const QEvaluationPoint& at) const {
    if (!same_ring(ring(), at.ring))
        throw UsageError("evaluation point ring mismatch");
    BigRat d = den_.evaluate(at.values);
    if (d == 0)
        throw DivisionByZeroError("scalar denominator vanishes at the evaluation point");
    return num_.evaluate(at.values) / d;
}

bool Scalar::has_pole_at(const QEvaluationPoint& at) const {
    return den_.evaluate(at.values) == 0;
}

Scalar Scalar::rescale_q(std::int64_t c) const {
    if (c == 0) throw UsageError("rescale_q: exponent must be nonzero");
    auto [n, sn] = num_.substitute_power(0, c);
    auto [d, sd] = den_.substitute_power(0, c);
    // (n / q^sn) / (d / q^sd) = n * q^sd / (d * q^sn)
    Scalar s(n * Poly::variable(ring(), 0, sd), d * Poly::variable(ring(), 0, sn));
    s.canonicalize();
    return s;
}

Scalar Scalar::promoted(const RingPtr& target) const {
    return Scalar(num_.promoted(target), den_.promoted(target));
}

std::string Scalar::str() const {
    if (den_.is_one()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

namespace {

/// Minimal recursive-descent parser for scalar expressions.
class ScalarParser {
public:
    ScalarParser(const RingPtr& ring, std::string_view text) : ring_(ring), text_(text) {}

    Scalar parse() {
        Scalar v = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing input in scalar expression", pos_);
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    Scalar expr() {
        Scalar v = term();
        while (true) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    Scalar term() {
        Scalar v = factor();
        while (true) {
            if (eat('*')) v *= factor();
            else if (eat('/')) v /= factor();
            else return v;
        }
    }

    Scalar factor() {
        bool neg = false;
        while (true) {
            if (eat('-')) neg = !neg;
            else if (eat('+')) continue;
            else break;
        }
        Scalar v = atom();
        if (eat('^')) {
            std::int64_t e = exponent();
            v = v.pow(e);
        }
        return neg ? -v : v;
    }

    std::int64_t exponent() {
        skip_ws();
        bool paren = eat('(');
        bool neg = eat('-');
        std::int64_t n = integer_literal();
        std::int64_t e = neg ? -n : n;
        if (paren && !eat(')')) throw ParseError("expected ')' after exponent", pos_);
        return e;
    }

    std::int64_t integer_literal() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) throw ParseError("expected integer", pos_);
        return std::stoll(std::string(text_.substr(start, pos_ - start)));
    }

    Scalar atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of scalar expression", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Scalar v = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return Scalar::integer(ring_, BigInt(integer_literal()));
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (!ring_->index_of(name))
                throw ParseError("unknown variable '" + name + "' in scalar expression", start);
            return Scalar::variable(ring_, name);
        }
        throw ParseError(std::string("unexpected character '") + c + "' in scalar expression",
                         pos_);
    }

    RingPtr ring_;
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Scalar Scalar::parse(const RingPtr& ring, std::string_view text) {
    return ScalarParser(ring, text).parse();
}

}  // namespace qhol
