#pragma once

/**
 * @file annihilator.hpp
 * @brief Systems of recurrence operators attached to a sequence: one operator
 *        per shift direction (living in the subalgebra generated by that L_i
 *        and all M's) plus optional extra operators, with a verification
 *        status that records how much checking the system has survived.
 */

#include "qhol/weyl.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qhol {

enum class VerifyStatus {
    Claimed,         ///< Stated but not checked here.
    WindowVerified,  ///< Every member vanishes at every point of the window.
    Certified        ///< Symbolically certified (not produced by this library).
};

std::string to_string(VerifyStatus s);

struct AnnihilatorSystem {
    int rank = 0;
    /// axis -> operator using only L_axis among the L's (any M's allowed).
    std::map<int, WeylOperator> direction;
    /// Additional annihilating operators of any shape.
    std::vector<WeylOperator> extras;
    VerifyStatus status = VerifyStatus::Claimed;
    Window window;  ///< Meaningful when status >= WindowVerified.
    std::string provenance;

    /// L_axis-degree of the direction operator (throws if absent).
    std::int64_t order(int axis) const;
    const WeylOperator& dir(int axis) const;
    bool has_direction(int axis) const { return direction.count(axis) > 0; }
    bool rectangular() const { return static_cast<int>(direction.size()) == rank; }
    std::vector<WeylOperator> all_operators() const;

    /// Checks shape invariants: direction ops use only their own L, have
    /// nonnegative M-exponents and a nonzero L-leading coefficient.
    void validate() const;
};

/// Coefficient of L_axis^j in a direction operator, as an operator containing
/// only M's (the polynomial a_j(M_1..M_r)).
WeylOperator l_coefficient(const WeylOperator& op, int axis, std::int64_t j);

}  // namespace qhol
