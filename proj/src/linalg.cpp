#include "qhol/linalg.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cassert>

namespace qhol {

namespace {

BigInt big_gcd(const BigInt& a, const BigInt& b) {
    return boost::multiprecision::gcd(a, b);
}

BigInt big_lcm(const BigInt& a, const BigInt& b) {
    if (a == 0 || b == 0) return 0;
    return a / big_gcd(a, b) * b;
}

}  // namespace

// ---------------------------------------------------------------------------
// NullspaceTracker
// ---------------------------------------------------------------------------

NullspaceTracker::NullspaceTracker(std::size_t dim) : dim_(dim) {
    basis_.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<BigRat> e(dim, BigRat(0));
        e[i] = 1;
        basis_.push_back(std::move(e));
    }
}

bool NullspaceTracker::process_row(const SparseRow& row) {
    if (basis_.empty()) return false;
    std::vector<BigRat> dots(basis_.size(), BigRat(0));
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        BigRat acc = 0;
        for (auto& [col, val] : row) {
            assert(col < dim_);
            if (!basis_[i][col].is_zero()) acc += val * basis_[i][col];
        }
        dots[i] = acc;
    }
    std::size_t pivot = basis_.size();
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (dots[i] != 0) {
            pivot = i;
            break;
        }
    }
    if (pivot == basis_.size()) return false;
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        if (j == pivot || dots[j] == 0) continue;
        BigRat f = dots[j] / dots[pivot];
        for (std::size_t c = 0; c < dim_; ++c)
            if (!basis_[pivot][c].is_zero()) basis_[j][c] -= f * basis_[pivot][c];
    }
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(pivot));
    return true;
}

std::vector<std::vector<BigRat>> NullspaceTracker::reduced_basis() const {
    std::vector<std::vector<BigRat>> rows = basis_;
    rref_rows(rows);
    // Scale every row to coprime integers with positive leading entry.
    for (auto& r : rows) {
        BigInt lcm = 1;
        for (auto& v : r)
            if (v != 0) lcm = big_lcm(lcm, denominator(v));
        BigInt gcd = 0;
        for (auto& v : r)
            if (v != 0) gcd = big_gcd(gcd, numerator(v) * (lcm / denominator(v)));
        if (gcd == 0) continue;
        BigRat scale(lcm, gcd);
        if (scale < 0) scale = -scale;
        bool negate = false;
        for (auto& v : r) {
            if (v != 0) {
                negate = v < 0;
                break;
            }
        }
        for (auto& v : r) {
            v *= scale;
            if (negate) v = -v;
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// ModularRankTracker
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kModulus = 2305843009213693951ULL;  // 2^61 - 1, prime

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kModulus);
}

std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t out = 1;
    while (e != 0) {
        if (e & 1) out = mod_mul(out, a);
        a = mod_mul(a, a);
        e >>= 1;
    }
    return out;
}

std::uint64_t mod_of_bigint(const BigInt& v) {
    BigInt m = v % kModulus;
    if (m < 0) m += kModulus;
    return m.convert_to<std::uint64_t>();
}

}  // namespace

ModularRankTracker::ModularRankTracker(std::size_t dim) : dim_(dim) {}

bool ModularRankTracker::process_row(const SparseRow& row) {
    if (full()) return false;
    std::vector<std::uint64_t> dense(dim_, 0);
    for (auto& [col, val] : row) {
        assert(col < dim_);
        std::uint64_t den = mod_of_bigint(denominator(val));
        if (den == 0) return false;  // cannot reduce this entry; reject conservatively
        dense[col] = mod_mul(mod_of_bigint(numerator(val)), mod_pow(den, kModulus - 2));
    }
    // Each stored row is zero at the pivots of the rows stored before it, so a
    // single pass in insertion order reduces against the whole span.
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::uint64_t f = dense[pivots_[i]];
        if (f == 0) continue;
        const std::vector<std::uint64_t>& er = rows_[i];
        const std::uint64_t neg = kModulus - f;
        for (std::size_t c = pivots_[i]; c < dim_; ++c)
            if (er[c] != 0) dense[c] = (dense[c] + mod_mul(neg, er[c])) % kModulus;
    }
    std::size_t pc = dim_;
    for (std::size_t c = 0; c < dim_; ++c) {
        if (dense[c] != 0) {
            pc = c;
            break;
        }
    }
    if (pc == dim_) return false;
    std::uint64_t inv = mod_pow(dense[pc], kModulus - 2);
    for (std::size_t c = pc; c < dim_; ++c)
        if (dense[c] != 0) dense[c] = mod_mul(dense[c], inv);
    rows_.push_back(std::move(dense));
    pivots_.push_back(pc);
    return true;
}

// ---------------------------------------------------------------------------
// Rational elimination
// ---------------------------------------------------------------------------

std::size_t rref_rows(std::vector<std::vector<BigRat>>& rows) {
    if (rows.empty()) return 0;
    const std::size_t ncols = rows.front().size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        BigRat p = rows[rank][col];
        for (std::size_t c = col; c < ncols; ++c) rows[rank][c] /= p;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            BigRat f = rows[r][col];
            for (std::size_t c = col; c < ncols; ++c) rows[r][c] -= f * rows[rank][c];
        }
        ++rank;
    }
    rows.resize(rank);  // drop the zero rows
    return rank;
}

std::size_t rational_rank(const std::vector<std::vector<BigRat>>& input) {
    if (input.empty()) return 0;
    const std::size_t ncols = input.front().size();
    // Clear each row to coprime integers (row scaling preserves rank).
    std::vector<std::vector<BigInt>> rows;
    rows.reserve(input.size());
    for (auto& r : input) {
        BigInt lcm = 1;
        for (auto& v : r)
            if (v != 0) lcm = big_lcm(lcm, denominator(v));
        std::vector<BigInt> out(ncols);
        BigInt gcd = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (r[c] == 0) continue;
            out[c] = numerator(r[c]) * (lcm / denominator(r[c]));
            gcd = big_gcd(gcd, out[c]);
        }
        if (gcd > 1)
            for (auto& v : out) v /= gcd;
        rows.push_back(std::move(out));
    }
    // Fraction-free elimination with per-row content reduction.
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        const std::vector<BigInt>& pr = rows[rank];
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][col] == 0) continue;
            BigInt f = rows[r][col], p = pr[col];
            BigInt g = big_gcd(f, p);
            f /= g;
            p /= g;
            BigInt content = 0;
            for (std::size_t c = col; c < ncols; ++c) {
                rows[r][c] = rows[r][c] * p - pr[c] * f;
                if (rows[r][c] != 0) content = big_gcd(content, rows[r][c]);
            }
            if (content > 1)
                for (std::size_t c = col; c < ncols; ++c) rows[r][c] /= content;
        }
        ++rank;
    }
    return rank;
}

// ---------------------------------------------------------------------------
// Scalar-field elimination
// ---------------------------------------------------------------------------

std::size_t scalar_rank(std::vector<std::vector<Scalar>> rows, bool column_scaling) {
    if (rows.empty()) return 0;
    const std::size_t ncols = rows.front().size();
    if (column_scaling) {
        for (std::size_t c = 0; c < ncols; ++c) {
            std::size_t first = rows.size();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (!rows[r][c].is_zero()) {
                    first = r;
                    break;
                }
            }
            if (first == rows.size()) continue;
            Scalar inv = rows[first][c].inverse();
            for (std::size_t r = first; r < rows.size(); ++r)
                if (!rows[r][c].is_zero()) rows[r][c] *= inv;
        }
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        Scalar pinv = rows[rank][col].inverse();
        for (std::size_t c = col; c < ncols; ++c)
            if (!rows[rank][c].is_zero()) rows[rank][c] *= pinv;
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][col].is_zero()) continue;
            Scalar f = rows[r][col];
            for (std::size_t c = col; c < ncols; ++c) {
                if (rows[rank][c].is_zero()) continue;
                rows[r][c] -= f * rows[rank][c];
            }
        }
        ++rank;
    }
    return rank;
}

// ---------------------------------------------------------------------------
// ScalarDependenceFinder
// ---------------------------------------------------------------------------

ScalarDependenceFinder::ScalarDependenceFinder(std::size_t dim, RingPtr ring)
    : dim_(dim), ring_(std::move(ring)) {}

std::optional<std::vector<Scalar>> ScalarDependenceFinder::offer(std::vector<Scalar> v) {
    if (v.size() != dim_) throw UsageError("dependence finder dimension mismatch");
    std::vector<Scalar> coords(count_ + 1, Scalar::zero(ring_));
    coords[count_] = Scalar::one(ring_);
    ++count_;
    for (auto& row : rows_) {
        if (v[row.pivot].is_zero()) continue;
        Scalar f = v[row.pivot];
        for (std::size_t c = 0; c < dim_; ++c)
            if (!row.v[c].is_zero()) v[c] -= f * row.v[c];
        for (std::size_t c = 0; c < row.coords.size(); ++c)
            if (!row.coords[c].is_zero()) coords[c] -= f * row.coords[c];
    }
    std::size_t pivot = dim_;
    for (std::size_t c = 0; c < dim_; ++c) {
        if (!v[c].is_zero()) {
            pivot = c;
            break;
        }
    }
    if (pivot == dim_) return coords;  // dependent: sum coords_t * v_t == 0
    Scalar inv = v[pivot].inverse();
    for (auto& e : v)
        if (!e.is_zero()) e *= inv;
    for (auto& e : coords)
        if (!e.is_zero()) e *= inv;
    rows_.push_back(Row{std::move(v), std::move(coords), pivot});
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// linear_form_rows
// ---------------------------------------------------------------------------

std::vector<SparseRow> linear_form_rows(std::span<const Scalar> vals, std::size_t max_rows) {
    if (vals.empty() || max_rows == 0) return {};
    const RingPtr& ring = vals.front().num().ring();
    // A common multiple of the denominators: the product of the distinct ones.
    std::vector<const Poly*> distinct;
    Poly lcd = Poly::constant(ring, 1);
    for (const Scalar& v : vals) {
        if (v.den().is_one()) continue;
        bool seen = false;
        for (const Poly* d : distinct) seen = seen || *d == v.den();
        if (!seen) {
            distinct.push_back(&v.den());
            lcd *= v.den();
        }
    }
    std::map<Exps, std::map<std::size_t, BigInt>> sheet;
    for (std::size_t m = 0; m < vals.size(); ++m) {
        if (vals[m].is_zero()) continue;
        const Poly w = vals[m].num() * Poly::div_exact(lcd, vals[m].den());
        for (const auto& [exps, coeff] : w.terms()) sheet[exps][m] += coeff;
    }
    std::vector<SparseRow> rows;
    rows.reserve(std::min(sheet.size(), max_rows));
    for (const auto& [exps, cols] : sheet) {
        if (rows.size() >= max_rows) break;
        SparseRow row;
        row.reserve(cols.size());
        for (const auto& [c, v] : cols)
            if (v != 0) row.emplace_back(c, BigRat(v));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace qhol
