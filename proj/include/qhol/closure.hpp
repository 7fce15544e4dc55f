#pragma once

/**
 * @file closure.hpp
 * @brief Constructive recurrence production: given sequences carrying
 *        recurrence systems, build window-verified recurrences for their
 *        sums, products, and affine reindexings n |-> f(A n + b).
 *
 * The engine reduces shift powers L^delta modulo the input systems over the
 * field of rational functions in q (and parameters) and the M variables,
 * then finds the first linear dependence among the reduced powers.  Every
 * division is logged; when window verification of a candidate fails at a
 * point, the candidate is left-multiplied by a logged divisor vanishing
 * there, which repairs the finitely many strata lost to division.
 */

#include "qhol/sequence.hpp"

#include <optional>

namespace qhol {

/// Rational-function reduction needed a pivot that vanishes identically on
/// the relevant stratum.  The guessing module has no such precondition.
struct DegenerateInputError : Error {
    using Error::Error;
};

/// Default verification window for closure outputs: [-6,10]^rank.
Window closure_default_window(int rank);

/**
 * Operator of L_axis-degree <= d_f + d_g annihilating f+g, window-verified.
 * Both sequences must carry systems with a direction-axis operator.
 */
WeylOperator closure_sum(const Sequence& f, const Sequence& g, int axis,
                         const std::optional<Window>& window = {});

/// Operator of L_axis-degree <= d_f * d_g annihilating f*g, window-verified.
WeylOperator closure_mul(const Sequence& f, const Sequence& g, int axis,
                         const std::optional<Window>& window = {});

/// Per-direction closure operators for every axis present in both systems,
/// re-verified as a system on the window.
AnnihilatorSystem closure_sum_system(const Sequence& f, const Sequence& g,
                                     const std::optional<Window>& window = {});
AnnihilatorSystem closure_mul_system(const Sequence& f, const Sequence& g,
                                     const std::optional<Window>& window = {});

/**
 * Annihilator system for g(m) = f(A m + b), m in Z^s (A is r x s, b in Z^r).
 * Requires a rectangular system on f; reduces powers of the vector shift
 * L^{A e_j} for each new direction j, finds a dependence, and rewrites the
 * coefficients through M_i |-> q^{b_i} * prod_j M'_j^{A_ij}.  Throws
 * DegenerateInputError when every usable pivot dies under that substitution
 * (e.g. restricting to a stratum the system cannot see).
 */
AnnihilatorSystem closure_affine(const Sequence& f,
                                 const std::vector<std::vector<std::int64_t>>& A,
                                 const std::vector<std::int64_t>& b,
                                 const std::optional<Window>& window = {});

}  // namespace qhol
