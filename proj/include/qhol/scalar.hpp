#pragma once

/**
 * @file scalar.hpp
 * @brief Exact rational-function arithmetic: the coefficient field k(q) or
 *        k(q, x, ...) used throughout the library.
 *
 * A Scalar is a reduced fraction num/den of integer-coefficient polynomials
 * over a shared ring whose variable 0 is q.  Canonical form: gcd(num, den)
 * is 1, and the lexicographically leading coefficient of den is positive.
 * Equality is structural, so canonical form makes == a true field equality.
 */

#include "qhol/polynomial.hpp"

#include <map>
#include <string>

namespace qhol {

/// A rational substitution point: one value per scalar-ring variable.
/// The q value must avoid 0 and +/-1 so that q-power denominators like
/// (1 - q^j) stay invertible generically.
struct QEvaluationPoint {
    RingPtr ring;
    std::vector<BigRat> values;

    static QEvaluationPoint make(RingPtr ring, const BigRat& q,
                                 const std::map<std::string, BigRat>& params = {});
};

class Scalar {
public:
    Scalar() = default;  ///< Invalid placeholder; assert on use.

    static Scalar zero(const RingPtr& ring);
    static Scalar one(const RingPtr& ring);
    static Scalar integer(const RingPtr& ring, BigInt v);
    static Scalar rational(const RingPtr& ring, const BigRat& v);
    static Scalar from_poly(Poly p);
    static Scalar fraction(Poly num, Poly den);  ///< Canonicalizes; throws on zero den.
    /// q^e for any integer e (negative exponents produce a denominator).
    static Scalar q_power(const RingPtr& ring, std::int64_t e);
    /// A ring variable by name (throws UsageError if absent).
    static Scalar variable(const RingPtr& ring, std::string_view name);

    const RingPtr& ring() const { return num_.ring(); }
    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    /// True when the fraction is a plain rational number.
    bool is_rational_constant() const { return num_.is_constant() && den_.is_constant(); }
    BigRat rational_value() const;

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;  ///< Throws DivisionByZeroError on zero divisor.
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }
    Scalar pow(std::int64_t e) const;
    Scalar inverse() const;
    bool operator==(const Scalar& o) const { return num_ == o.num_ && den_ == o.den_; }

    /// Exact evaluation; throws DivisionByZeroError when den vanishes there.
    BigRat evaluate(const QEvaluationPoint& at) const;
    /// Whether den vanishes at the point (safe pole test).
    bool has_pole_at(const QEvaluationPoint& at) const;

    /// Substitute q -> q^c for a nonzero integer c.
    Scalar rescale_q(std::int64_t c) const;

    /// Rebuild over a ring extending this one.
    Scalar promoted(const RingPtr& target) const;

    /// Canonical text: "num" or "(num)/(den)".  parse(str()) == *this.
    std::string str() const;
    /// Parse +,-,*,/,^ with integer (possibly negative) exponents, integers,
    /// ring variables, and parentheses.
    static Scalar parse(const RingPtr& ring, std::string_view text);

private:
    Scalar(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {}
    void canonicalize();

    Poly num_, den_;
};

}  // namespace qhol
