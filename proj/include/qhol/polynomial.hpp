#pragma once

/**
 * @file polynomial.hpp
 * @brief Sparse multivariate polynomials with big-integer coefficients.
 *
 * Polynomials live in a shared ring object that fixes the variable list and
 * its order.  Variable 0 is conventionally the deformation parameter q; any
 * further variables are symbolic parameters (x, ...) or auxiliary unknowns.
 * Terms are kept in a std::map keyed by exponent vectors, so iteration order
 * (and therefore printing, pivoting, and every downstream computation) is
 * deterministic.
 */

#include "qhol/common.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qhol {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

class PolyRing;
using RingPtr = std::shared_ptr<const PolyRing>;

/// Immutable list of variable names defining a polynomial ring Z[vars].
class PolyRing {
public:
    static RingPtr make(std::vector<std::string> vars);

    int size() const { return static_cast<int>(vars_.size()); }
    const std::string& name(int i) const { return vars_.at(static_cast<std::size_t>(i)); }
    const std::vector<std::string>& names() const { return vars_; }
    std::optional<int> index_of(std::string_view name) const;

private:
    explicit PolyRing(std::vector<std::string> vars) : vars_(std::move(vars)) {}
    std::vector<std::string> vars_;
};

/// True when both pointers denote rings with identical variable lists.
bool same_ring(const RingPtr& a, const RingPtr& b);

/// Smallest common extension: variables of `a` in order, then the variables of
/// `b` not already present.
RingPtr ring_union(const RingPtr& a, const RingPtr& b);

/// Exponent vector; entry i is the exponent of ring variable i (always >= 0).
using Exps = std::vector<std::int64_t>;

class Poly {
public:
    Poly() = default;  ///< Invalid placeholder; assert on use.
    explicit Poly(RingPtr ring) : ring_(std::move(ring)) {}

    static Poly constant(RingPtr ring, BigInt value);
    static Poly variable(RingPtr ring, int var, std::int64_t exp = 1);
    static Poly monomial(RingPtr ring, Exps exps, BigInt coeff);

    const RingPtr& ring() const { return ring_; }
    const std::map<Exps, BigInt>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Value when is_constant(); 0 for the zero polynomial.
    BigInt constant_value() const;
    bool is_one() const { return is_constant() && constant_value() == 1; }

    std::int64_t degree_in(int var) const;       ///< -1 for the zero polynomial.
    std::int64_t lowest_degree_in(int var) const;  ///< 0 for the zero polynomial.
    std::size_t term_count() const { return terms_.size(); }

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    Poly mul_int(const BigInt& c) const;
    Poly pow(std::uint64_t e) const;
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }

    /// Positive gcd of all integer coefficients (0 for the zero polynomial).
    BigInt content() const;
    /// Coefficient of the lexicographically greatest exponent vector.
    BigInt leading_coeff_lex() const;
    /// this / content, with the leading lex coefficient made positive.
    Poly primitive_part() const;

    /// Exact division; throws Error if the division leaves a remainder.
    static Poly div_exact(const Poly& a, const Poly& b);
    /// Gcd, normalized so its leading lex coefficient is positive.
    static Poly gcd(const Poly& a, const Poly& b);

    /// Substitute rational values for all variables (values follow ring order).
    BigRat evaluate(std::span<const BigRat> values) const;

    /// Substitute var -> var^c for c != 0.  Negative c may create negative
    /// exponents, so the result is returned as a pair (p, s) meaning
    /// p / var^s with p having nonnegative exponents and s >= 0.
    std::pair<Poly, std::int64_t> substitute_power(int var, std::int64_t c) const;

    /// Coefficient map with respect to one variable: exponent-of-var ->
    /// polynomial in the remaining variables (var exponent zeroed out).
    std::map<std::int64_t, Poly> coefficients_in(int var) const;
    /// Inverse of coefficients_in.
    static Poly from_coefficients_in(const RingPtr& ring, int var,
                                     const std::map<std::int64_t, Poly>& coeffs);

    /// Rebuild this polynomial over a ring containing all its variables.
    Poly promoted(const RingPtr& target) const;

    /// Human/machine-readable form, terms in descending lex order:
    /// "q^2*x - 3*q + 1".  Round-trips through scalar parsing.
    std::string str() const;

private:
    void add_term(const Exps& e, const BigInt& c);

    RingPtr ring_;
    std::map<Exps, BigInt> terms_;
};

}  // namespace qhol
