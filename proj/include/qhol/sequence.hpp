#pragma once

/**
 * @file sequence.hpp
 * @brief Multivariate sequences Z^r -> k(q, params) with exact memoized
 *        evaluation, optional support information, attached recurrence
 *        systems, the shift/scaling operator action, and closure combinators
 *        that build new sequences from old ones.
 */

#include "qhol/annihilator.hpp"
#include "qhol/scalar.hpp"
#include "qhol/weyl.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qhol {

/**
 * Support information, split-index style: the first `split` coordinates are
 * the "prefix", the remaining ones the "tail".
 *
 *  - StrictBox: the sequence vanishes whenever the prefix lies outside
 *    `prefix_box` (tail unconstrained). With split == rank this is a plain
 *    finite support box.
 *  - PerPrefix: for each fixed prefix, the tail support is finite and
 *    contained in `tail_bounds(prefix)`.
 */
struct SupportSpec {
    enum class Kind { StrictBox, PerPrefix };
    Kind kind = Kind::StrictBox;
    int split = 0;
    Window prefix_box;  ///< StrictBox: rank == split.
    std::function<Window(std::span<const std::int64_t>)> tail_bounds;

    static SupportSpec strict_box(int split, Window box);
    static SupportSpec finite_box(Window box);  ///< StrictBox with split == rank.
    static SupportSpec per_prefix(int split,
                                  std::function<Window(std::span<const std::int64_t>)> bounds);
};

/**
 * Per-axis domain flavor.  FullLine axes have meaningful values on all of Z;
 * NonNegative axes belong to sequences that are zero-extensions of
 * one-sided objects, whose characteristic recurrences hold on the natural
 * side only.  The marker controls default verification windows (negative
 * probes are added only on FullLine axes).
 */
enum class AxisDomain { FullLine, NonNegative };

class Sequence {
 public:
    using Evaluator = std::function<Scalar(std::span<const std::int64_t>)>;

    Sequence() = default;

    static Sequence make(int rank, RingPtr sring, std::vector<std::string> vars,
                         std::string name, Evaluator eval);

    bool valid() const { return impl_ != nullptr; }
    int rank() const;
    const RingPtr& sring() const;
    const std::vector<std::string>& vars() const;
    const std::string& name() const;

    /// Exact value at a lattice point (memoized).
    Scalar at(std::span<const std::int64_t> p) const;
    Scalar at(std::initializer_list<std::int64_t> p) const;

    const std::vector<SupportSpec>& supports() const { return supports_; }
    const std::shared_ptr<const AnnihilatorSystem>& system() const { return system_; }
    /// Per-axis domain flavor; defaults to FullLine everywhere.
    const std::vector<AxisDomain>& domains() const { return domains_; }

    /// Copies sharing the evaluator and memo but with extra metadata.
    Sequence with_support(SupportSpec s) const;
    Sequence with_system(AnnihilatorSystem sys) const;
    Sequence with_domains(std::vector<AxisDomain> d) const;
    Sequence renamed(std::string name) const;
    Sequence with_vars(std::vector<std::string> vars) const;

    /// Absolute bounds for axis `axis` given the current point's earlier
    /// coordinates, from any usable support spec; nullopt when unsupported.
    std::optional<std::pair<std::int64_t, std::int64_t>> axis_bounds(
        int axis, std::span<const std::int64_t> point) const;

    /// Finds a StrictBox spec with the given split (derived from a full
    /// finite box when necessary).
    std::optional<SupportSpec> find_strict(int split) const;
    /// Finds a PerPrefix spec with the given split (derived likewise).
    std::optional<SupportSpec> find_per_prefix(int split) const;

    /// Default variable names: n | n,k | n,k,l | n1..nr.
    static std::vector<std::string> default_vars(int rank);

 private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    std::shared_ptr<const AnnihilatorSystem> system_;
    std::vector<SupportSpec> supports_;
    std::vector<AxisDomain> domains_;
};

/// (P f)(n) = sum over terms c * q^<alpha,n> * f(n + beta).
Scalar weyl_apply(const WeylOperator& P, const Sequence& f, std::span<const std::int64_t> n);
Scalar weyl_apply(const WeylOperator& P, const Sequence& f, std::initializer_list<std::int64_t> n);

/// First window point where (P f) != 0, or nullopt if P annihilates f there.
std::optional<Point> verify_operator(const WeylOperator& P, const Sequence& f,
                                     const Window& window);

/// First failure of any member of the system, or nullopt. On success the
/// returned copy of the system has status WindowVerified with the window.
std::optional<Point> verify_system(AnnihilatorSystem& sys, const Sequence& f,
                                   const Window& window);

/// Attaches sys to f after window-verifying it; throws Error on failure.
Sequence attach_verified(const Sequence& f, AnnihilatorSystem sys, const Window& window);

// ---------------------------------------------------------------------------
// Combinators
// ---------------------------------------------------------------------------

Sequence seq_add(const Sequence& f, const Sequence& g);
Sequence seq_mul(const Sequence& f, const Sequence& g);
Sequence seq_scale(const Scalar& c, const Sequence& f);

/// g(n) = f(A n + b) for n in Z^s; A is r x s, b in Z^r, f of rank r.
Sequence seq_affine(const Sequence& f, const std::vector<std::vector<std::int64_t>>& A,
                    const std::vector<std::int64_t>& b,
                    std::vector<std::string> vars = {});

/// Restriction f(n, c) of the last coordinates to constants c (rank drops).
Sequence seq_restrict(const Sequence& f, const std::vector<std::int64_t>& fixed_tail);

/// Extension to rank+extra ignoring the new trailing coordinates.
Sequence seq_extend(const Sequence& f, int extra);

/// Pointwise product with the indicator of `box` (attaches finite support).
Sequence seq_truncate(const Sequence& f, const Window& box);

/// (f * g)(n) = sum_m g(m) f(n-m). Needs g strict in the first `split`
/// coordinates and f per-prefix finite in the rest (or fully finite boxes).
Sequence seq_convolve(const Sequence& f, const Sequence& g, int split);

/// h(n, a, b) = sum_{t=a}^{b} f(n, t): bounded sum over the last axis,
/// rank r+1 with the two bounds as new trailing variables.
Sequence seq_multisum_bounded(const Sequence& f);

/// g(n) = sum over t in Z of f(n, t): full-line sum over the last axis;
/// requires support information bounding that axis.
Sequence seq_multisum_line(const Sequence& f);

/// g(n) = f(c n) at the q -> q^c level: value rescaling q |-> q^c.
Sequence seq_rescale_q(const Sequence& f, std::int64_t c);

/// Finitely many pointwise modifications.
Sequence seq_patch_finite(const Sequence& f,
                          const std::vector<std::pair<Point, Scalar>>& changes);

/// Replace values on the hyperplane {n_axis == value} by those of g
/// (g has rank r-1: the remaining coordinates in order).
Sequence seq_patch_hyperplane(const Sequence& f, int axis, std::int64_t value,
                              const Sequence& g);

/**
 * Orthant decomposition/reassembly: pieces[mask] gives the sequence used on
 * the (closed) orthant with sign pattern mask (bit i set = coordinate i < 0;
 * bit clear = coordinate i >= 0, so boundaries belong to the all-clear side:
 * the piece at a point is selected by the sign pattern with ties going to
 * the nonnegative side).
 */
Sequence seq_patch_orthants(const std::vector<Sequence>& pieces);

/// Checks that candidate orthant pieces agree with f on overlap boundaries
/// within `window`; returns first disagreement.
std::optional<Point> orthant_overlap_mismatch(const Sequence& f,
                                              const std::vector<Sequence>& pieces,
                                              const Window& window);

/**
 * Rank-1 sequence from a recurrence: op in the L-subalgebra with initial
 * values covering a contiguous segment of length >= order. Solves forward
 * using the leading coefficient and backward using the trailing one; throws
 * Error naming the point when a needed pivot vanishes and no initial value
 * covers it.
 */
Sequence seq_from_recurrence(const WeylOperator& op,
                             const std::map<std::int64_t, Scalar>& initial,
                             std::string name = "rec");

}  // namespace qhol
