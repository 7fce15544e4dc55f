#pragma once

/**
 * @file analysis.hpp
 * @brief Filtration-rank estimation, growth-degree fitting with honest
 *        verdicts, finiteness classification, and equality certification
 *        relative to a verified annihilator system.
 */

#include "qhol/guess.hpp"
#include "qhol/sequence.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qhol {

/**
 * How filtration ranks are computed.
 *
 *  - Probabilistic: the symbolic matrix is specialized at random rational
 *    values for q and the parameters (numerators and denominators bounded by
 *    10^6; draws hitting a pole of any matrix entry are recorded and
 *    redrawn), and the rank of each specialization is computed modulo a
 *    fixed word-size prime.  The reported rank is the maximum over trials;
 *    specialization can only lose rank, so it is a lower bound on the exact
 *    rank and equals it with overwhelming probability.  Deterministic for a
 *    fixed seed.
 *  - Exact: fraction-free elimination over the coefficient field
 *    k(q, params).  No randomness.
 */
enum class RankMode { Probabilistic, Exact };

/// Number of shift monomials M^alpha L^beta with alpha, beta >= 0 and
/// |alpha| + |beta| <= k in rank r, i.e. binomial(k + 2r, 2r).
std::uint64_t filtration_basis_size(int rank, int k);

/**
 * Rank of the evaluation matrix whose rows are the functions
 * M^alpha L^beta f (alpha, beta >= 0, |alpha| + |beta| <= k) and whose
 * columns are the points of `window`.  Requires
 * window.point_count() >= filtration_basis_size(rank, k) so that the rank is
 * not artificially capped by the number of columns; throws UsageError
 * otherwise.  `seed`/`trials` are used by the probabilistic mode only.
 */
std::size_t filtration_rank(const Sequence& f, int k, const Window& window, RankMode mode,
                            std::uint64_t seed = 0, int trials = 3);

/// Outcome of the growth-degree fit.  Wrong verdicts are never produced:
/// ExceedsHolonomicBound is emitted only when the observed ranks rule out
/// every polynomial of degree <= rank on the fitted tail, a conclusion that
/// holds unconditionally for the tested window.
enum class DimensionVerdict { ConsistentWithQHolonomic, ExceedsHolonomicBound, Inconclusive };
std::string to_string(DimensionVerdict v);

struct DimensionReport {
    std::vector<std::size_t> ranks;  ///< ranks[k] for k = 0..K.
    /// First difference order at which the fitted tail becomes constant;
    /// when `stabilized` is false the constancy was seen on a single entry
    /// only and the value is a lower bound for the growth degree.
    int fitted_degree = -1;
    bool stabilized = false;
    DimensionVerdict verdict = DimensionVerdict::Inconclusive;
    std::string note;  ///< Human-readable reason for an Inconclusive verdict.

    int K = 0;
    Window window;
    RankMode mode = RankMode::Probabilistic;
    std::uint64_t seed = 0;
    int trials = 0;

    std::string to_json() const;
};

/// Calibrated default truncation level for dimension_estimate: deep enough
/// that the top-half tail can distinguish degree r from degree r + 1.
int dimension_default_K(int rank);

/**
 * Computes ranks[k] for k = 0..K on `window` and fits the growth degree by
 * finite differences on the last ceil(K/2) + 1 ranks (enough tail entries to
 * exhibit a degree above the holonomic bound; shorter tails could miss it).
 * Verdicts:
 *  - ConsistentWithQHolonomic: fitted degree <= rank and the constant
 *    difference row was confirmed on at least two entries;
 *  - ExceedsHolonomicBound: every difference row of order 0..rank is
 *    non-constant on the tail (no polynomial of degree <= rank fits);
 *  - Inconclusive: anything else, including a saturated window (top rank
 *    equal to the number of points).
 */
DimensionReport dimension_estimate(const Sequence& f, int K, const Window& window,
                                   RankMode mode = RankMode::Probabilistic,
                                   std::uint64_t seed = 0, int trials = 3);

// ---------------------------------------------------------------------------
// Finiteness classification
// ---------------------------------------------------------------------------

/// Evidence found for one axis direction: an annihilating operator whose
/// L-part uses only L_axis (its coefficients may use every M).
struct DirectionEvidence {
    int axis = 0;
    bool found = false;
    /// Operator whose leading L_axis-coefficient is a unit of k(q, params)
    /// (free of every M), witnessing the integral property in this direction.
    bool unit_leading = false;
    std::string source;  ///< "attached", "guessed", or "zero".
    std::optional<WeylOperator> op;        ///< Witness for `found`.
    std::optional<WeylOperator> unit_op;   ///< Witness for `unit_leading`.
};

/// Evidence search for one (r+1)-element generator subset of
/// {M_1..M_r, L_1..L_r}: whether a nonzero annihilator using only those
/// generators was found within the configured bounds.
struct SubsetEvidence {
    GeneratorSet gens;
    std::string gens_text;
    bool found = false;
    std::optional<WeylOperator> op;
};

/**
 * Bounded-search classification.  All three properties are reported as
 * evidence: "true" means a witness operator was found and window-verified,
 * "false" means not-found-within-bounds, never a disproof.  By construction
 * the direction searches coincide with the subset searches for the subsets
 * {M_1..M_r, L_i}, so the reported flags can never violate the implication
 * chain integral => (q-holonomic) => strong => finite.
 */
struct FinitenessReport {
    bool zero_sequence = false;  ///< Identically zero on the probe window.
    std::vector<DirectionEvidence> directions;
    std::vector<SubsetEvidence> subsets;
    bool integrally_finite = false;         ///< Every direction has unit_leading.
    bool finite = false;                    ///< Every direction has found.
    bool strongly_finite_evidence = false;  ///< Every subset has found.

    std::string to_json(const std::vector<std::string>& vars) const;
};

/**
 * Classifies f by direction searches (attached system first, then guessing
 * with generators {M_1..M_r, L_i} under `bounds`) and by one guessing run
 * per (r+1)-element generator subset.  A sequence that vanishes on the
 * probe window is reported with all properties trivially witnessed by the
 * unit operator.
 */
FinitenessReport classify_finiteness(const Sequence& f, const GuessConfig& bounds);

// ---------------------------------------------------------------------------
// Equality relative to a verified annihilator system
// ---------------------------------------------------------------------------

struct EqualityReport {
    bool equal = false;
    /// Set on a mismatch: a point of S where the two values differ.  This
    /// direction is unconditional.
    std::optional<Point> witness;
    /// "mismatch" or "equal-modulo-annihilator-claim".  The latter is
    /// honest about its hypothesis: equality on `range` follows from the
    /// agreement on S provided the system annihilates both sequences
    /// everywhere; the system was re-verified on its window here, which
    /// supports but does not certify that hypothesis.
    std::string status;
    std::string message;

    std::string to_json(const std::vector<std::string>& vars) const;
};

/**
 * Compares f and g on the base points S; any difference is returned as an
 * unconditional witness.  Otherwise re-verifies that `sys` annihilates both
 * sequences on its verification window (UsageError if not), then checks by
 * worklist propagation that the values on S determine every point of
 * `range` (default: the system's verification window) through the system's
 * relations, solving a relation for its one unknown value whenever the
 * matching coefficient is nonzero at the base point.  If some point stays
 * undetermined, throws UsageError naming it (S must be enlarged).
 */
EqualityReport prove_equal(const Sequence& f, const Sequence& g, const AnnihilatorSystem& sys,
                           const std::vector<Point>& S,
                           const std::optional<Window>& range = {});

}  // namespace qhol
