#pragma once

/**
 * @file builtins.hpp
 * @brief The builtin sequence catalog.  Every builtin comes with an attached
 *        recurrence system that is re-verified on a small window at
 *        construction time, so downstream algorithms can rely on it.
 *
 * Catalog (q in the scalar ring is always required; x where noted):
 *   alt        (-1)^n                       rank 1
 *   qpow       q^n                          rank 1
 *   qpow2      q^(n^2)                      rank 1
 *   qtri       q^(n(n-1)/2)                 rank 1
 *   delta      [n == 0]                     rank 1
 *   heaviside  [n >= 0]                     rank 1
 *   qpoch      (q;q)_n for n>=0, else 0     rank 1
 *   qpochinv   1/(q;q)_n for n>=0, else 0   rank 1
 *   xqpoch     (x;q)_n extended to all of Z rank 1, needs x
 *   delta2     [n == k]                     rank 2
 *   Fseq       prod_{j=0}^{k-1}(1-q^(n-j)) for k>=0, else 0      rank 2
 *   Gseq       q-binomial [n,k]_q, zero unless 0<=k<=n           rank 2
 *   Hbin       prod_{j=1}^{k}(x q^(n-j+1)-x^{-1}q^(-n+j-1))
 *                      /(q^j-q^{-j}) for k>=0, else 0            rank 2, needs x
 *   Kbin       Hbin with x = q^l                                 rank 3
 *   cex        1/(q^n + q^k + 1)            rank 2
 */

#include "qhol/sequence.hpp"

#include <string>
#include <vector>

namespace qhol {

/// All catalog names in fixed order.
const std::vector<std::string>& builtin_names();

bool is_builtin(const std::string& name);

/// Rank of a builtin (throws UsageError for unknown names).
int builtin_rank(const std::string& name);

/// Parameters (beyond q) the builtin needs in the scalar ring.
std::vector<std::string> builtin_params(const std::string& name);

/**
 * Constructs a builtin over the given scalar ring (variable 0 must be q;
 * required parameters must be present).  The returned sequence carries its
 * recurrence system, window-verified on [-4,4]^rank during construction,
 * plus support information where the support is finite per row.
 */
Sequence builtin_sequence(const std::string& name, const RingPtr& sring);

/// Scalar ring k(q) without parameters.
RingPtr q_ring();
/// Scalar ring k(q, x).
RingPtr qx_ring();

}  // namespace qhol
