#pragma once

/**
 * @file dsl.hpp
 * @brief Expression surface for sequences: a small language whose forms map
 *        one-to-one onto the sequence combinators.
 *
 * Grammar (whitespace-insensitive, one expression per string):
 *
 *   expr    :=  term (('+' | '-') term)*
 *   term    :=  factor (('*' | '/') factor)*
 *   factor  :=  atom ('^' (INT | VAR))?
 *   atom    :=  INT | 'q' | 'x' | '(' expr ')'
 *            |  NAME '(' affine (',' affine)* ')'            builtin call
 *            |  'subst'   '(' expr ';' VAR '->' affine (',' VAR '->' affine)* ')'
 *            |  'sum'     '(' VAR '=' affine '..' affine ',' expr ')'
 *            |  'sumZ'    '(' VAR ',' expr ')'
 *            |  'conv'    '(' expr ',' expr ')'
 *            |  'rescale' '(' INT ',' expr ')'
 *            |  'patch'   '(' expr ';' point '->' expr (',' point '->' expr)* ')'
 *   affine  :=  ['+'|'-'] aterm (('+'|'-') aterm)*           integer-affine in variables
 *   aterm   :=  INT ('*' VAR)? | VAR
 *   point   :=  INT | '(' INT (',' INT)* ')'
 *
 * Scalar-valued subexpressions (integers, q, x, and their +,-,*,/,^ combos)
 * fold to constants at parse time; `c ^ VAR` with a constant c is the
 * exponential sequence n |-> c^{n_VAR}.  A '^' with an integer exponent
 * means repeated pointwise product for sequence operands.  Division is
 * available only by scalar constants.  `qbinom` is accepted as an alias of
 * the Gseq builtin.  Variable order is declaration order and fixes which
 * axis each M_i/L_i refers to.
 */

#include "qhol/sequence.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qhol {

/// A reference to an undeclared variable (strict parsing mode only).
struct UndeclaredVariableError : UsageError {
    explicit UndeclaredVariableError(const std::string& var)
        : UsageError("undeclared variable '" + var + "'"), variable(var) {}
    std::string variable;
};

/// A builtin call with the wrong number of arguments.
struct ArityError : UsageError {
    ArityError(const std::string& name, int expected_, int given_)
        : UsageError("builtin '" + name + "' takes " + std::to_string(expected_) +
                     " argument(s), got " + std::to_string(given_)),
          builtin(name),
          expected(expected_),
          given(given_) {}
    std::string builtin;
    int expected;
    int given;
};

/// An integer-affine combination of named variables plus a constant.
struct AffineForm {
    std::vector<std::pair<std::string, std::int64_t>> terms;  ///< (variable, coefficient)
    std::int64_t offset = 0;

    bool operator==(const AffineForm& o) const = default;
    std::string str() const;
    /// True when the form is exactly the single variable `var`.
    bool is_variable(const std::string& var) const;
};

struct DslNode;
using DslNodePtr = std::shared_ptr<const DslNode>;

struct DslNode {
    enum class Kind {
        ScalarConst,  ///< value
        ScalarExp,    ///< value ^ var (an exponential sequence)
        Builtin,      ///< name(args...)
        Add,          ///< kids[0] + kids[1]
        Sub,          ///< kids[0] - kids[1]
        Mul,          ///< kids[0] * kids[1]
        Pow,          ///< kids[0] ^ power (power >= 0)
        Subst,        ///< subst(kids[0]; maps)
        SumBounded,   ///< sum(var = lo..hi, kids[0])
        SumLine,      ///< sumZ(var, kids[0])
        Conv,         ///< conv(kids[0], kids[1])
        Rescale,      ///< rescale(power, kids[0])
        Patch,        ///< patch(kids[0]; patches)
    };

    Kind kind;
    std::optional<Scalar> value;                              ///< ScalarConst, ScalarExp.
    std::string var;                                          ///< ScalarExp, SumBounded, SumLine.
    std::string name;                                         ///< Builtin.
    std::vector<AffineForm> args;                             ///< Builtin.
    std::vector<DslNodePtr> kids;
    std::int64_t power = 0;                                   ///< Pow exponent, Rescale factor.
    std::vector<std::pair<std::string, AffineForm>> maps;     ///< Subst.
    AffineForm lo, hi;                                        ///< SumBounded.
    std::vector<std::pair<Point, Scalar>> patches;            ///< Patch.

    bool operator==(const DslNode& o) const;
};

/// A parsed expression together with its declared variables; the variable
/// order fixes the rank and the axis numbering.
struct DslExpression {
    std::vector<std::string> vars;
    DslNodePtr root;

    bool operator==(const DslExpression& o) const;
    /// Canonical text; dsl_parse(str(), vars) reproduces the expression.
    std::string str() const;
};

/**
 * Strict parse: every variable must come from `vars`.  Throws ParseError
 * (with position) on malformed text, UndeclaredVariableError, ArityError,
 * or UsageError for other misuses (e.g. a sum binder shadowing a variable).
 */
DslExpression dsl_parse(const std::string& text, std::vector<std::string> vars);

/// Permissive parse: unknown identifiers in variable positions are declared
/// automatically, ordered by first appearance in the text.
DslExpression dsl_parse(const std::string& text);

/// Parses one integer-affine form (e.g. "n - k + 3") over `vars` (strict).
AffineForm dsl_parse_affine(const std::string& text, const std::vector<std::string>& vars);

/// The scalar ring the expression needs: k(q, x) when any part uses the
/// parameter x (builtin or literal), else k(q).
RingPtr dsl_ring_for(const DslExpression& e);

/**
 * Compiles to a Sequence of rank vars.size() over `sring` (default:
 * dsl_ring_for).  Builtin calls with identity bindings keep their attached
 * recurrence systems; every other form maps to the documented combinator
 * (seq_affine, seq_add/seq_mul/seq_scale, seq_multisum_bounded/line,
 * seq_convolve, seq_rescale_q, seq_patch_finite).
 */
Sequence dsl_compile(const DslExpression& e, RingPtr sring = nullptr);

}  // namespace qhol
