#pragma once

/**
 * @file linalg.hpp
 * @brief Exact linear algebra used by guessing, closure, and rank estimation:
 *        a streaming common-nullspace tracker over Q, deterministic exact
 *        rank computations over Q and over the scalar field, and a streaming
 *        first-linear-dependence finder over the scalar field.
 */

#include "qhol/scalar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qhol {

/// A sparse row: (column, value) pairs with strictly increasing columns.
using SparseRow = std::vector<std::pair<std::size_t, BigRat>>;

/**
 * Maintains a basis of the common nullspace of all rows seen so far,
 * starting from the full space Q^dim.  Each consumed row either leaves the
 * space unchanged or cuts its dimension by one; processing can stop early
 * once the dimension reaches zero.  Fully deterministic.
 */
class NullspaceTracker {
 public:
    explicit NullspaceTracker(std::size_t dim);

    /// Returns true when the row cut the dimension.
    bool process_row(const SparseRow& row);

    std::size_t dimension() const { return basis_.size(); }
    std::size_t ambient_dimension() const { return dim_; }
    bool empty() const { return basis_.empty(); }

    /// Canonical basis: reduced row-echelon form, pivots 1, entries scaled to
    /// integers with positive leading entry and content 1.
    std::vector<std::vector<BigRat>> reduced_basis() const;

 private:
    std::size_t dim_;
    std::vector<std::vector<BigRat>> basis_;
};

/**
 * Streaming rank tracker modulo the Mersenne prime 2^61 - 1, used as a fast
 * one-sided filter in front of exact elimination: a row that increases the
 * modular rank is certainly independent over Q of all previously accepted
 * rows, so full modular rank certifies an empty exact nullspace.  Rows whose
 * denominators vanish modulo the prime are rejected conservatively.
 */
class ModularRankTracker {
 public:
    explicit ModularRankTracker(std::size_t dim);

    /// Returns true when the row increased the modular rank.
    bool process_row(const SparseRow& row);

    std::size_t rank() const { return rows_.size(); }
    std::size_t ambient_dimension() const { return dim_; }
    bool full() const { return rows_.size() == dim_; }

 private:
    std::size_t dim_;
    std::vector<std::vector<std::uint64_t>> rows_;  ///< Echelon rows, pivot = 1.
    std::vector<std::size_t> pivots_;               ///< Pivot column per row.
};

/**
 * Splits the constraint sum_m u_m * vals[m] = 0 (rational unknowns u_m) into
 * sparse rational rows, one per monomial of the shared numerator: the values
 * are brought over a common denominator (the product of the distinct ones;
 * overshooting the true lcm only rescales the form, leaving its solution set
 * unchanged), after which each monomial's coefficient must vanish separately.
 * At most max_rows rows are returned, lowest monomials first; dropping rows
 * only relaxes the system.
 */
std::vector<SparseRow> linear_form_rows(std::span<const Scalar> vals, std::size_t max_rows);

/// In-place reduced row-echelon form over Q; returns the rank. Deterministic
/// (first nonzero column, topmost row as pivot).
std::size_t rref_rows(std::vector<std::vector<BigRat>>& rows);

/// Exact rank of a rational matrix (fraction-free with content reduction).
std::size_t rational_rank(const std::vector<std::vector<BigRat>>& rows);

/// Exact rank over the scalar field k(q, ...).  When column_scaling is set,
/// each column is first divided by its first nonzero entry, which keeps
/// degrees small for matrices whose columns share large common factors.
std::size_t scalar_rank(std::vector<std::vector<Scalar>> rows, bool column_scaling);

/**
 * Streaming first-linear-dependence finder over the scalar field: offer
 * vectors v_0, v_1, ...; the first offer that is linearly dependent on the
 * previous ones returns coefficients c_0..c_s (with c_s == 1) such that
 * sum_t c_t v_t = 0.  Independent offers are stored and return nullopt.
 */
class ScalarDependenceFinder {
 public:
    ScalarDependenceFinder(std::size_t dim, RingPtr ring);

    std::optional<std::vector<Scalar>> offer(std::vector<Scalar> v);

    std::size_t offered() const { return count_; }
    std::size_t rank() const { return rows_.size(); }

 private:
    struct Row {
        std::vector<Scalar> v;
        std::vector<Scalar> coords;  ///< v as a combination of the offers.
        std::size_t pivot;
    };
    std::size_t dim_;
    RingPtr ring_;
    std::size_t count_ = 0;
    std::vector<Row> rows_;
};

}  // namespace qhol
