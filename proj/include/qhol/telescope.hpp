#pragma once

/**
 * @file telescope.hpp
 * @brief Creative telescoping for double sequences: find operators T (in the
 *        surviving variable only) and R with (T - (L_k - 1) R) f = 0, so that
 *        T annihilates g(n) = sum_k f(n,k) up to explicit boundary terms.
 */

#include "qhol/sequence.hpp"

#include <optional>
#include <string>

namespace qhol {

/// Search failed within the requested ansatz bounds.  Distinct from a
/// nonexistence statement: larger bounds may still succeed.
struct NotFoundError : Error {
    using Error::Error;
};

/// Ansatz caps for telescoping: max L_n-order of T (and L-orders of R),
/// max M-degree and q-degree of every coefficient.  The search climbs a
/// ladder of sub-bounds and, with double_once, retries once at twice the
/// caps before giving up.
struct TelescopeBounds {
    int J = 3;
    int degM = 4;
    int degQ = 6;
    bool double_once = true;
};

struct TelescopingCertificate {
    int axis = 1;     ///< Summation axis (the last one).
    WeylOperator T;   ///< Telescoper: uses only M_n, L_n.
    WeylOperator R;   ///< Certificate operator (any generators).
    Window window;    ///< Where the defining identity was verified.
    VerifyStatus status = VerifyStatus::Claimed;

    /// {"axis":..,"T":..,"R":..,"window":..,"status":..} with canonical
    /// operator printing; byte-stable.
    std::string to_json(const std::vector<std::string>& names = {}) const;
};

/**
 * Finds a certificate for the rank-2 sequence f (summing over axis 1).
 * eval_window overrides the point set the linear system is built from; the
 * verification window always extends it.  Throws NotFoundError when no
 * certificate with a nonzero T exists within the bounds.
 */
TelescopingCertificate telescope_search(const Sequence& f,
                                        const TelescopeBounds& bounds = {},
                                        const std::optional<Window>& eval_window = {});

struct TelescopeReport {
    VerifyStatus status = VerifyStatus::Claimed;
    /// First window point where (T - (L_k-1)R) f != 0, if any.
    std::optional<Point> residual_witness;
    /// First point where the summed identity or a boundary term failed.
    std::optional<Point> boundary_witness;
    std::string message;
    /// T restricted to the surviving variable (rank-1 operator) -- the
    /// recurrence satisfied by the sum when the checks pass.
    WeylOperator induced;
};

/**
 * Re-verifies a certificate: (1) the defining identity at every point of
 * `window` (rank 2); (2) the induced recurrence on the sum.  With sum_range
 * = {a,b}, uses the bounded sum g(n) = sum_{k=a}^{b} f(n,k) and checks
 * T g = boundary corrections exactly; without it, sums over the full line
 * (f needs finite k-support), checks the boundary terms vanish, and checks
 * T g = 0 on the projection of `window`.
 */
TelescopeReport telescope_check(const Sequence& f, const TelescopingCertificate& cert,
                                const Window& window,
                                const std::optional<std::pair<std::int64_t, std::int64_t>>&
                                    sum_range = {});

}  // namespace qhol
