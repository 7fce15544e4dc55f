#pragma once

/**
 * @file guess.hpp
 * @brief Recurrence discovery from sequence data: an ansatz over operator
 *        monomials q^c M^alpha L^beta with bounded exponents, an exact
 *        rational nullspace over window evaluations, and verification on a
 *        strictly larger window.  Deterministic throughout.
 */

#include "qhol/linalg.hpp"
#include "qhol/sequence.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qhol {

/// Which generators the ansatz may use, per axis.
struct GeneratorSet {
    std::vector<bool> allow_M;
    std::vector<bool> allow_L;

    static GeneratorSet all(int rank);
    static GeneratorSet none(int rank);
    GeneratorSet& with_M(int axis);
    GeneratorSet& with_L(int axis);
    int rank() const { return static_cast<int>(allow_M.size()); }
    std::size_t count() const;
    std::string str(const std::vector<std::string>& vars) const;

    /// Parse comma-separated generator names ("L", "M", "Ln", "M2", ...).
    static GeneratorSet parse(const std::string& text, int rank,
                              const std::vector<std::string>& vars);
};

struct GuessConfig {
    /// Max L-exponent per axis (single entry broadcasts; default 2).
    std::vector<std::int64_t> order = {2};
    std::int64_t mdeg = 2;  ///< Max total M-degree.
    std::int64_t qdeg = 4;  ///< Max q-degree of the unknown coefficients.
    std::int64_t pdeg = 1;  ///< Max degree per extra parameter.
    std::optional<GeneratorSet> gens;
    std::optional<Window> eval_window;
    std::optional<Window> verify_window;

    std::int64_t order_for(int axis) const;
};

/// The windows guessing would use for this sequence and config (defaults:
/// evaluation [0, 2u+4]^r with u the ansatz monomial count; verification
/// extends every axis by 4 upward and, on FullLine axes, down to -4).
std::pair<Window, Window> guess_windows(const Sequence& f, const GuessConfig& cfg);

/**
 * Basis of all operators within the configured bounds that annihilate f on
 * the evaluation window and survive exact verification on the verification
 * window.  Canonical content-reduced form; ordered by (L-order, total
 * degree, text).  Empty when nothing survives.
 */
std::vector<WeylOperator> guess_annihilator(const Sequence& f, const GuessConfig& cfg);

/**
 * Runs guess_annihilator once per direction with generators {L_i, M_1..M_r}
 * and assembles a window-verified AnnihilatorSystem; throws Error naming the
 * failing directions and bounds when any direction finds nothing.
 */
AnnihilatorSystem guess_system(const Sequence& f, const GuessConfig& cfg);

/// Canonical form shared by guessing and closure output: content-reduced,
/// denominator-free coefficients, leading monomial's leading q-coefficient
/// positive.  The leading monomial maximizes (|alpha|+|beta|, lexicographic).
WeylOperator canonical_operator_form(const WeylOperator& op);

}  // namespace qhol
