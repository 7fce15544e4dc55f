#include "qhol/weyl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qhol {

namespace {

IntMatrix int_identity(int n) {
    IntMatrix m(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    return m;
}

IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b) {
    std::size_t n = a.size(), m = b[0].size(), k = b.size();
    IntMatrix r(n, std::vector<std::int64_t>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][t] * b[t][j];
        }
    return r;
}

}  // namespace

bool SymplecticMatrix::is_symplectic(const IntMatrix& X) {
    std::size_t n = X.size();
    if (n == 0 || n % 2 != 0) return false;
    for (const auto& row : X)
        if (row.size() != n) return false;
    int r = static_cast<int>(n / 2);
    IntMatrix J(n, std::vector<std::int64_t>(n, 0));
    for (int i = 0; i < r; ++i) {
        J[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + r)] = 1;
        J[static_cast<std::size_t>(i + r)][static_cast<std::size_t>(i)] = -1;
    }
    IntMatrix Xt(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Xt[j][i] = X[i][j];
    return int_mul(int_mul(Xt, J), X) == J;
}

SymplecticMatrix SymplecticMatrix::from_matrix(IntMatrix X) {
    if (!is_symplectic(X)) throw UsageError("matrix is not symplectic over the integers");
    int r = static_cast<int>(X.size() / 2);
    return SymplecticMatrix(r, std::move(X));
}

SymplecticMatrix SymplecticMatrix::from_blocks(const IntMatrix& A, const IntMatrix& B,
                                               const IntMatrix& C, const IntMatrix& D) {
    std::size_t r = A.size();
    if (B.size() != r || C.size() != r || D.size() != r)
        throw UsageError("symplectic blocks must share one size");
    IntMatrix X(2 * r, std::vector<std::int64_t>(2 * r, 0));
    for (std::size_t i = 0; i < r; ++i) {
        if (A[i].size() != r || B[i].size() != r || C[i].size() != r || D[i].size() != r)
            throw UsageError("symplectic blocks must be square");
        for (std::size_t j = 0; j < r; ++j) {
            X[i][j] = A[i][j];
            X[i][j + r] = B[i][j];
            X[i + r][j] = C[i][j];
            X[i + r][j + r] = D[i][j];
        }
    }
    return from_matrix(std::move(X));
}

SymplecticMatrix SymplecticMatrix::identity(int r) {
    return SymplecticMatrix(r, int_identity(2 * r));
}

SymplecticMatrix SymplecticMatrix::exchange(int r) {
    IntMatrix X(static_cast<std::size_t>(2 * r),
                std::vector<std::int64_t>(static_cast<std::size_t>(2 * r), 0));
    for (int i = 0; i < r; ++i) {
        X[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + r)] = 1;
        X[static_cast<std::size_t>(i + r)][static_cast<std::size_t>(i)] = -1;
    }
    return SymplecticMatrix(r, std::move(X));
}

std::vector<std::int64_t> SymplecticMatrix::apply(std::span<const std::int64_t> exps) const {
    std::size_t n = x_.size();
    if (exps.size() != n) throw UsageError("symplectic apply: exponent length mismatch");
    std::vector<std::int64_t> out(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += x_[i][j] * exps[j];
    return out;
}

SymplecticMatrix SymplecticMatrix::operator*(const SymplecticMatrix& o) const {
    if (r_ != o.r_) throw UsageError("symplectic product: rank mismatch");
    return SymplecticMatrix(r_, int_mul(x_, o.x_));
}

WeylOperator::WeylOperator(int rank, RingPtr sring) : rank_(rank), sring_(std::move(sring)) {
    if (rank < 1) throw UsageError("operator rank must be >= 1");
}

WeylOperator WeylOperator::identity(int rank, RingPtr sring) {
    WeylOperator p(rank, sring);
    p.terms_.emplace(std::vector<std::int64_t>(static_cast<std::size_t>(2 * rank), 0),
                     Scalar::one(sring));
    return p;
}

WeylOperator WeylOperator::monomial(int rank, RingPtr sring, Exps alpha, Exps beta, Scalar coeff) {
    if (static_cast<int>(alpha.size()) != rank || static_cast<int>(beta.size()) != rank)
        throw UsageError("monomial exponent arity mismatch");
    WeylOperator p(rank, std::move(sring));
    if (!coeff.is_zero()) {
        std::vector<std::int64_t> key = alpha;
        key.insert(key.end(), beta.begin(), beta.end());
        p.terms_.emplace(std::move(key), std::move(coeff));
    }
    return p;
}

WeylOperator WeylOperator::gen_M(int rank, RingPtr sring, int axis, std::int64_t e) {
    Exps a(static_cast<std::size_t>(rank), 0), b(static_cast<std::size_t>(rank), 0);
    a.at(static_cast<std::size_t>(axis)) = e;
    Scalar one = Scalar::one(sring);
    return monomial(rank, std::move(sring), std::move(a), std::move(b), std::move(one));
}

WeylOperator WeylOperator::gen_L(int rank, RingPtr sring, int axis, std::int64_t e) {
    Exps a(static_cast<std::size_t>(rank), 0), b(static_cast<std::size_t>(rank), 0);
    b.at(static_cast<std::size_t>(axis)) = e;
    Scalar one = Scalar::one(sring);
    return monomial(rank, std::move(sring), std::move(a), std::move(b), std::move(one));
}

WeylOperator WeylOperator::from_scalar(int rank, Scalar s) {
    WeylOperator p(rank, s.ring());
    if (!s.is_zero())
        p.terms_.emplace(std::vector<std::int64_t>(static_cast<std::size_t>(2 * rank), 0),
                         std::move(s));
    return p;
}

bool WeylOperator::is_identity() const {
    return terms_.size() == 1 && terms_.begin()->second.is_one() &&
           std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                       [](std::int64_t e) { return e == 0; });
}

bool WeylOperator::is_plus() const {
    for (const auto& [e, c] : terms_)
        for (auto x : e)
            if (x < 0) return false;
    return true;
}

std::int64_t WeylOperator::total_degree() const {
    std::int64_t d = 0;
    for (const auto& [e, c] : terms_) {
        std::int64_t s = 0;
        for (auto x : e) s += x < 0 ? -x : x;
        d = std::max(d, s);
    }
    return d;
}

std::int64_t WeylOperator::degree_L(int axis) const {
    std::int64_t d = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::int64_t v = e[static_cast<std::size_t>(rank_ + axis)];
        d = first ? v : std::max(d, v);
        first = false;
    }
    return d;
}

std::int64_t WeylOperator::lowest_degree_L(int axis) const {
    std::int64_t d = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::int64_t v = e[static_cast<std::size_t>(rank_ + axis)];
        d = first ? v : std::min(d, v);
        first = false;
    }
    return d;
}

std::int64_t WeylOperator::degree_M(int axis) const {
    std::int64_t d = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::int64_t v = e[static_cast<std::size_t>(axis)];
        d = first ? v : std::max(d, v);
        first = false;
    }
    return d;
}

bool WeylOperator::single_L_direction(int axis) const {
    for (const auto& [e, c] : terms_)
        for (int i = 0; i < rank_; ++i)
            if (i != axis && e[static_cast<std::size_t>(rank_ + i)] != 0) return false;
    return true;
}

Scalar WeylOperator::coeff(const Exps& alpha, const Exps& beta) const {
    std::vector<std::int64_t> key = alpha;
    key.insert(key.end(), beta.begin(), beta.end());
    auto it = terms_.find(key);
    return it == terms_.end() ? Scalar::zero(sring_) : it->second;
}

void WeylOperator::add_term(const Exps& alpha, const Exps& beta, const Scalar& c) {
    if (c.is_zero()) return;
    std::vector<std::int64_t> key = alpha;
    key.insert(key.end(), beta.begin(), beta.end());
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

WeylOperator WeylOperator::operator-() const {
    WeylOperator r(rank_, sring_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

WeylOperator WeylOperator::operator+(const WeylOperator& o) const {
    if (rank_ != o.rank_) throw UsageError("operator addition: rank mismatch");
    if (!same_ring(sring_, o.sring_)) {
        RingPtr u = ring_union(sring_, o.sring_);
        return promoted(u) + o.promoted(u);
    }
    WeylOperator r = *this;
    for (const auto& [e, c] : o.terms_) {
        auto it = r.terms_.find(e);
        if (it == r.terms_.end()) {
            r.terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) r.terms_.erase(it);
        }
    }
    return r;
}

WeylOperator WeylOperator::operator-(const WeylOperator& o) const { return *this + (-o); }

WeylOperator WeylOperator::operator*(const WeylOperator& o) const {
    if (rank_ != o.rank_) throw UsageError("operator product: rank mismatch");
    if (!same_ring(sring_, o.sring_)) {
        RingPtr u = ring_union(sring_, o.sring_);
        return promoted(u) * o.promoted(u);
    }
    WeylOperator r(rank_, sring_);
    const std::size_t n = static_cast<std::size_t>(rank_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            // (M^a L^b)(M^c L^d) = q^{<b,c>} M^{a+c} L^{b+d}
            std::int64_t cross = 0;
            for (std::size_t i = 0; i < n; ++i) cross += ea[n + i] * eb[i];
            std::vector<std::int64_t> key(2 * n);
            for (std::size_t i = 0; i < 2 * n; ++i) key[i] = ea[i] + eb[i];
            Scalar c = ca * cb;
            if (cross != 0) c *= Scalar::q_power(sring_, cross);
            if (c.is_zero()) continue;
            auto it = r.terms_.find(key);
            if (it == r.terms_.end()) {
                r.terms_.emplace(std::move(key), std::move(c));
            } else {
                it->second += c;
                if (it->second.is_zero()) r.terms_.erase(it);
            }
        }
    }
    return r;
}

WeylOperator WeylOperator::scale(const Scalar& c) const {
    WeylOperator r(rank_, sring_);
    if (c.is_zero()) return r;
    if (!same_ring(sring_, c.ring())) {
        RingPtr u = ring_union(sring_, c.ring());
        return promoted(u).scale(c.promoted(u));
    }
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

WeylOperator WeylOperator::pow(std::int64_t e) const {
    if (e < 0) {
        if (terms_.size() != 1)
            throw UsageError("negative operator power requires a single monomial");
        const auto& [exps, c] = *terms_.begin();
        const std::size_t n = static_cast<std::size_t>(rank_);
        // (c M^a L^b)^{-1} = c^{-1} q^{<a,b>} M^{-a} L^{-b}
        std::int64_t cross = 0;
        for (std::size_t i = 0; i < n; ++i) cross += exps[i] * exps[n + i];
        Exps alpha(n), beta(n);
        for (std::size_t i = 0; i < n; ++i) {
            alpha[i] = -exps[i];
            beta[i] = -exps[n + i];
        }
        Scalar ic = c.inverse() * Scalar::q_power(sring_, cross);
        return monomial(rank_, sring_, std::move(alpha), std::move(beta), std::move(ic)).pow(-e);
    }
    WeylOperator r = identity(rank_, sring_);
    WeylOperator base = *this;
    auto u = static_cast<std::uint64_t>(e);
    while (u) {
        if (u & 1) r *= base;
        base = base * base;
        u >>= 1;
    }
    return r;
}

bool WeylOperator::operator==(const WeylOperator& o) const {
    return rank_ == o.rank_ && terms_ == o.terms_;
}

WeylOperator WeylOperator::symplectic(const SymplecticMatrix& X) const {
    if (X.rank() != rank_) throw UsageError("symplectic transform: rank mismatch");
    WeylOperator r(rank_, sring_);
    for (const auto& [e, c] : terms_) {
        std::vector<std::int64_t> img = X.apply(e);
        auto it = r.terms_.find(img);
        if (it == r.terms_.end()) {
            r.terms_.emplace(std::move(img), c);
        } else {
            it->second += c;
            if (it->second.is_zero()) r.terms_.erase(it);
        }
    }
    return r;
}

WeylOperator WeylOperator::promoted(const RingPtr& target) const {
    WeylOperator r(rank_, target);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c.promoted(target));
    return r;
}

WeylOperator weyl_zero_extension_multiplier(const WeylOperator& P, int axis) {
    if (!P.is_plus())
        throw UsageError("zero-extension multiplier needs a plus-operator");
    std::int64_t d = P.degree_L(axis);
    WeylOperator out = P;
    for (std::int64_t j = 1; j <= d; ++j) {
        WeylOperator factor =
            WeylOperator::identity(P.rank(), P.sring()) -
            WeylOperator::gen_M(P.rank(), P.sring(), axis).scale(Scalar::q_power(P.sring(), j));
        out = factor * out;
    }
    return out;
}

// ---------------------------------------------------------------------------
// printing

namespace {

/// True if the scalar prints as a bare product term (no +, -, or fraction),
/// so it can be glued to a monomial without parentheses.
bool is_simple_positive(const Scalar& s) {
    return s.den().is_one() && s.num().term_count() == 1 && s.num().leading_coeff_lex() > 0;
}

std::string generator_name(char kind, int axis, int rank, const std::vector<std::string>& names) {
    std::string base(1, kind);
    if (static_cast<int>(names.size()) == rank && !names[static_cast<std::size_t>(axis)].empty())
        return base + names[static_cast<std::size_t>(axis)];
    if (rank == 1) return base;
    return base + std::to_string(axis + 1);
}

}  // namespace

std::string WeylOperator::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    // Print in descending L-major order: compare (beta|alpha) lexicographically,
    // so shift operators lead mixed terms of the same shift degree.
    std::vector<const std::pair<const std::vector<std::int64_t>, Scalar>*> ordered;
    ordered.reserve(terms_.size());
    for (const auto& t : terms_) ordered.push_back(&t);
    const std::size_t r = static_cast<std::size_t>(rank_);
    auto lmajor = [r](const std::vector<std::int64_t>& e) {
        std::vector<std::int64_t> k(e.begin() + static_cast<std::ptrdiff_t>(r), e.end());
        k.insert(k.end(), e.begin(), e.begin() + static_cast<std::ptrdiff_t>(r));
        return k;
    };
    std::sort(ordered.begin(), ordered.end(),
              [&](const auto* a, const auto* b) { return lmajor(a->first) > lmajor(b->first); });
    std::ostringstream os;
    bool first = true;
    for (const auto* tp : ordered) {
        const auto& [e, c] = *tp;
        bool negative = c.num().leading_coeff_lex() < 0;
        Scalar mag = negative ? -c : c;
        if (first) {
            if (negative) os << '-';
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;

        std::string monos;
        for (int half = 0; half < 2; ++half) {
            for (int i = 0; i < rank_; ++i) {
                std::int64_t exp = e[static_cast<std::size_t>(half * rank_ + i)];
                if (exp == 0) continue;
                if (!monos.empty()) monos += '*';
                monos += generator_name(half == 0 ? 'M' : 'L', i, rank_, names);
                if (exp != 1) monos += '^' + std::to_string(exp);
            }
        }
        if (monos.empty()) {
            if (mag.is_rational_constant() || is_simple_positive(mag)) os << mag.str();
            else os << '(' << mag.str() << ')';
        } else if (mag.is_one()) {
            os << monos;
        } else if (is_simple_positive(mag)) {
            os << mag.str() << '*' << monos;
        } else {
            os << '(' << mag.str() << ")*" << monos;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class WeylParser {
public:
    WeylParser(int rank, const RingPtr& sring, std::string_view text,
               const std::vector<std::string>& names)
        : rank_(rank), sring_(sring), text_(text), names_(names) {}

    WeylOperator parse() {
        WeylOperator v = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing input in operator expression", pos_);
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    WeylOperator expr() {
        WeylOperator v = term();
        while (true) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    WeylOperator term() {
        WeylOperator v = factor();
        while (true) {
            if (eat('*')) v *= factor();
            else if (eat('/')) {
                WeylOperator d = factor();
                v = divide(v, d);
            } else {
                return v;
            }
        }
    }

    WeylOperator divide(const WeylOperator& a, const WeylOperator& b) {
        // Division is only defined by scalars (degree-zero operators).
        for (const auto& [e, c] : b.terms())
            for (auto x : e)
                if (x != 0)
                    throw ParseError("cannot divide by an operator containing M or L", pos_);
        Scalar s =
            b.is_zero() ? Scalar::zero(sring_) : b.terms().begin()->second;
        if (s.is_zero()) throw DivisionByZeroError("operator division by zero scalar");
        return a.scale(s.inverse());
    }

    WeylOperator factor() {
        bool neg = false;
        while (true) {
            if (eat('-')) neg = !neg;
            else if (eat('+')) continue;
            else break;
        }
        WeylOperator v = atom();
        if (eat('^')) v = v.pow(exponent());
        return neg ? -v : v;
    }

    std::int64_t exponent() {
        skip_ws();
        bool paren = eat('(');
        bool neg = eat('-');
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) throw ParseError("expected integer exponent", start);
        std::int64_t n = std::stoll(std::string(text_.substr(start, pos_ - start)));
        if (paren && !eat(')')) throw ParseError("expected ')' after exponent", pos_);
        return neg ? -n : n;
    }

    WeylOperator atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of operator expression", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            WeylOperator v = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            BigInt n(std::string(text_.substr(start, pos_ - start)));
            return WeylOperator::from_scalar(rank_, Scalar::integer(sring_, n));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            return named_atom(name, start);
        }
        throw ParseError(std::string("unexpected character '") + c + "' in operator expression",
                         pos_);
    }

    WeylOperator named_atom(const std::string& name, std::size_t at) {
        if ((name[0] == 'M' || name[0] == 'L') && resolve_axis(name.substr(1)) >= 0) {
            int axis = resolve_axis(name.substr(1));
            return name[0] == 'M' ? WeylOperator::gen_M(rank_, sring_, axis)
                                  : WeylOperator::gen_L(rank_, sring_, axis);
        }
        if (sring_->index_of(name))
            return WeylOperator::from_scalar(rank_, Scalar::variable(sring_, name));
        throw ParseError("unknown symbol '" + name + "' in operator expression", at);
    }

    /// Axis from a generator suffix: "" (rank 1), "3" (1-based index), or a
    /// declared variable name.  Returns -1 when the suffix resolves to nothing.
    int resolve_axis(const std::string& suffix) const {
        if (suffix.empty()) return rank_ == 1 ? 0 : -1;
        if (std::all_of(suffix.begin(), suffix.end(),
                        [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            int idx = std::stoi(suffix);
            return (idx >= 1 && idx <= rank_) ? idx - 1 : -1;
        }
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == suffix) return static_cast<int>(i);
        return -1;
    }

    int rank_;
    RingPtr sring_;
    std::string_view text_;
    std::vector<std::string> names_;
    std::size_t pos_ = 0;
};

}  // namespace

WeylOperator WeylOperator::parse(int rank, const RingPtr& sring, std::string_view text,
                                 const std::vector<std::string>& names) {
    return WeylParser(rank, sring, text, names).parse();
}

}  // namespace qhol
