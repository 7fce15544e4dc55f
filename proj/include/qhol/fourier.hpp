#pragma once

/**
 * @file fourier.hpp
 * @brief Formal power-series side of sequences: truncated coefficient
 *        tables sum_n f(n) z^n on a box, the transported shift/scaling
 *        operator action, and the Hadamard and convolution products.
 */

#include "qhol/sequence.hpp"
#include "qhol/weyl.hpp"

#include <map>
#include <string>

namespace qhol {

/**
 * A truncated formal series sum_{n in box} c_n z^n over Z^r with exact
 * coefficient arithmetic.  Coefficients not stored are zero; points outside
 * `box` carry no information unless `exact_support` is set, which asserts
 * that the underlying series vanishes off the box (then the truncation is
 * the whole series and convolution becomes exact).
 */
struct FormalSeries {
    RingPtr ring;
    Window box;
    bool exact_support = false;
    std::map<Point, Scalar> coeff;  ///< Sparse: absent points in box are zero.

    int rank() const { return box.rank(); }
    /// Coefficient at p: zero when absent inside the box or when
    /// exact_support covers the outside; UsageError outside a plain box.
    Scalar at(std::span<const std::int64_t> p) const;
    Scalar at(std::initializer_list<std::int64_t> p) const;
    void set(Point p, Scalar c);  ///< Drops exact zeros; UsageError off-box.

    bool operator==(const FormalSeries& o) const;
    /// Multi-line "z^(p) * coeff" table in box order (zeros skipped).
    std::string str() const;
};

/// Truncation of the series of f to `box`; exact_support is set when f has
/// known finite support contained in `box`.
FormalSeries fourier_truncate(const Sequence& f, const Window& box);

/**
 * Transported operator action: the coefficient of (P s) at n is
 * sum_terms c * q^<alpha,n> * s(n + beta), matching the sequence-level
 * action through the series correspondence.  The box shrinks so that every
 * retained coefficient only uses stored ones: axis i keeps
 * [lo_i - min_beta_i, hi_i - max_beta_i] over the betas of P (no shrink for
 * an exactly supported operand, where off-box reads are exact zeros).
 */
FormalSeries series_op(const WeylOperator& P, const FormalSeries& s);

/// Coefficientwise scaling c * s.
FormalSeries series_scale(const Scalar& c, const FormalSeries& s);

/// Coefficientwise sum.  When both operands assert exact_support the result
/// lives on the bounding box of the union and stays exact (off-box reads
/// are exact zeros); otherwise only the box intersection is trustworthy.
FormalSeries series_add(const FormalSeries& s, const FormalSeries& t);

/// Hadamard (coefficientwise) product on the box intersection; this is the
/// series image of the pointwise product of sequences.
FormalSeries hadamard(const FormalSeries& s, const FormalSeries& t);

/**
 * Power-series product (the series image of sequence convolution).  Both
 * operands must assert exact_support — otherwise missing coefficients just
 * off the boxes would contaminate every output coefficient, and the call
 * throws UsageError demanding truncation boxes that contain the full
 * support.  The result box is the Minkowski sum and is itself exact.
 */
FormalSeries series_mul(const FormalSeries& s, const FormalSeries& t);

}  // namespace qhol
