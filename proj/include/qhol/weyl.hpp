#pragma once

/**
 * @file weyl.hpp
 * @brief Normal-ordered operator arithmetic in the rank-r quantum Weyl
 *        algebra: generators M_1..M_r (multiplication by q^{n_i}) and
 *        L_1..L_r (unit shifts), subject to L_i M_j = q^{δij} M_j L_i,
 *        with all exponents allowed to be negative.
 *
 * Every operator is stored normal-ordered as a sparse sum of terms
 * coefficient * M^alpha * L^beta, keyed by the concatenated exponent
 * vector (alpha|beta).  Products use the single commutation rule
 * (M^a L^b)(M^c L^d) = q^{<b,c>} M^{a+c} L^{b+d}.
 */

#include "qhol/scalar.hpp"

#include <map>

namespace qhol {

/// Integer square matrix helpers used by the symplectic layer.
using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// A 2r x 2r integer matrix preserving the standard symplectic form,
/// stored as blocks [[A, B], [C, D]].
class SymplecticMatrix {
public:
    static SymplecticMatrix from_blocks(const IntMatrix& A, const IntMatrix& B,
                                        const IntMatrix& C, const IntMatrix& D);
    static SymplecticMatrix from_matrix(IntMatrix X);  ///< Validates X^T J X = J.
    static SymplecticMatrix identity(int r);
    /// The exchange matrix [[0, I], [-I, 0]]: M_i -> L_i^{-1}, L_i -> M_i.
    static SymplecticMatrix exchange(int r);

    int rank() const { return r_; }
    const IntMatrix& matrix() const { return x_; }
    /// Image of a joint exponent vector (alpha|beta) of length 2r.
    std::vector<std::int64_t> apply(std::span<const std::int64_t> exps) const;
    SymplecticMatrix operator*(const SymplecticMatrix& o) const;
    bool operator==(const SymplecticMatrix& o) const { return x_ == o.x_; }

    static bool is_symplectic(const IntMatrix& X);

private:
    SymplecticMatrix(int r, IntMatrix x) : r_(r), x_(std::move(x)) {}
    int r_;
    IntMatrix x_;
};

class WeylOperator {
public:
    WeylOperator() = default;  ///< Invalid placeholder; assert on use.
    WeylOperator(int rank, RingPtr sring);

    static WeylOperator zero(int rank, RingPtr sring) { return WeylOperator(rank, std::move(sring)); }
    static WeylOperator identity(int rank, RingPtr sring);
    static WeylOperator monomial(int rank, RingPtr sring, Exps alpha, Exps beta, Scalar coeff);
    /// Generator helpers: M_axis^e and L_axis^e (axis is 0-based).
    static WeylOperator gen_M(int rank, RingPtr sring, int axis, std::int64_t e = 1);
    static WeylOperator gen_L(int rank, RingPtr sring, int axis, std::int64_t e = 1);
    /// Embed a scalar as a degree-zero operator.
    static WeylOperator from_scalar(int rank, Scalar s);

    int rank() const { return rank_; }
    const RingPtr& sring() const { return sring_; }
    /// Term map keyed by (alpha|beta), both halves of length rank.
    const std::map<std::vector<std::int64_t>, Scalar>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_identity() const;
    std::size_t term_count() const { return terms_.size(); }
    /// All exponents nonnegative (membership in T_{r,+}).
    bool is_plus() const;
    /// Max over terms of sum of |exponents| (equals |alpha|+|beta| on T_{r,+}).
    std::int64_t total_degree() const;
    std::int64_t degree_L(int axis) const;         ///< Max L_axis exponent (0 if zero op).
    std::int64_t lowest_degree_L(int axis) const;  ///< Min L_axis exponent (0 if zero op).
    std::int64_t degree_M(int axis) const;
    /// True when no term uses L_j for j != axis (membership in W_{r,L_axis}).
    bool single_L_direction(int axis) const;

    Scalar coeff(const Exps& alpha, const Exps& beta) const;
    void add_term(const Exps& alpha, const Exps& beta, const Scalar& c);

    WeylOperator operator-() const;
    WeylOperator operator+(const WeylOperator& o) const;
    WeylOperator operator-(const WeylOperator& o) const;
    WeylOperator operator*(const WeylOperator& o) const;  ///< Normal-ordered product.
    WeylOperator& operator+=(const WeylOperator& o) { return *this = *this + o; }
    WeylOperator& operator-=(const WeylOperator& o) { return *this = *this - o; }
    WeylOperator& operator*=(const WeylOperator& o) { return *this = *this * o; }
    WeylOperator scale(const Scalar& c) const;
    /// Integer power; negative exponents require a single invertible monomial.
    WeylOperator pow(std::int64_t e) const;
    bool operator==(const WeylOperator& o) const;

    /// Termwise exponent map (alpha,beta) -> (A alpha + B beta, C alpha + D beta).
    WeylOperator symplectic(const SymplecticMatrix& X) const;

    /// Rebuild with coefficients over a larger scalar ring.
    WeylOperator promoted(const RingPtr& target) const;

    /// Canonical text.  Variable names, when given, select the M<name>/L<name>
    /// spelling; otherwise M/L (rank 1) or M1../L1.. (rank > 1) are used.
    std::string str(const std::vector<std::string>& names = {}) const;
    static WeylOperator parse(int rank, const RingPtr& sring, std::string_view text,
                              const std::vector<std::string>& names = {});

private:
    int rank_ = 0;
    RingPtr sring_;
    std::map<std::vector<std::int64_t>, Scalar> terms_;
};

/// Left-multiplies P (a plus-operator) by prod_{j=1..d}(1 - q^j M_axis) where
/// d is P's L_axis-degree; the result annihilates the extension-by-zero of any
/// N-sequence annihilated by P.
WeylOperator weyl_zero_extension_multiplier(const WeylOperator& P, int axis = 0);

}  // namespace qhol
