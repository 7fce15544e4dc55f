#include "qhol/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace qhol {

std::string point_to_string(std::span<const std::int64_t> p) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ',';
        os << p[i];
    }
    os << ')';
    return os.str();
}

Window Window::cube(int rank, std::int64_t lo, std::int64_t hi) {
    Window w;
    w.axes.assign(static_cast<std::size_t>(rank), {lo, hi});
    return w;
}

bool Window::contains(std::span<const std::int64_t> p) const {
    if (p.size() != axes.size()) return false;
    for (std::size_t i = 0; i < axes.size(); ++i)
        if (p[i] < axes[i].first || p[i] > axes[i].second) return false;
    return true;
}

std::uint64_t Window::point_count() const {
    std::uint64_t n = 1;
    for (auto& [lo, hi] : axes) {
        if (lo > hi) return 0;
        n *= static_cast<std::uint64_t>(hi - lo + 1);
    }
    return n;
}

Window Window::parse(std::string_view text, int rank) {
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    std::size_t pos = 0;
    auto parse_int = [&](std::size_t& i) -> std::int64_t {
        std::size_t start = i;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
        std::size_t digits = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == digits) throw ParseError("expected integer in window", start);
        return std::stoll(std::string(text.substr(start, i - start)));
    };
    while (true) {
        std::int64_t lo = parse_int(pos);
        if (pos + 1 >= text.size() || text[pos] != '.' || text[pos + 1] != '.')
            throw ParseError("expected '..' in window range", pos);
        pos += 2;
        std::int64_t hi = parse_int(pos);
        ranges.push_back({lo, hi});
        if (pos == text.size()) break;
        if (text[pos] != ',') throw ParseError("expected ',' between window ranges", pos);
        ++pos;
    }
    if (static_cast<int>(ranges.size()) == 1 && rank > 1)
        ranges.assign(static_cast<std::size_t>(rank), ranges[0]);
    if (static_cast<int>(ranges.size()) != rank)
        throw UsageError("window has " + std::to_string(ranges.size()) + " ranges but rank is " +
                         std::to_string(rank));
    return Window(std::move(ranges));
}

std::string Window::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (i) os << ',';
        os << axes[i].first << ".." << axes[i].second;
    }
    return os.str();
}

RingPtr PolyRing::make(std::vector<std::string> vars) {
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j]) throw UsageError("duplicate ring variable: " + vars[i]);
    return RingPtr(new PolyRing(std::move(vars)));
}

std::optional<int> PolyRing::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

bool same_ring(const RingPtr& a, const RingPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->names() == b->names();
}

RingPtr ring_union(const RingPtr& a, const RingPtr& b) {
    if (same_ring(a, b)) return a;
    std::vector<std::string> vars = a->names();
    for (const auto& v : b->names())
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    return PolyRing::make(std::move(vars));
}

void Poly::add_term(const Exps& e, const BigInt& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::constant(RingPtr ring, BigInt value) {
    Poly p(std::move(ring));
    if (value != 0) p.terms_.emplace(Exps(static_cast<std::size_t>(p.ring_->size()), 0), std::move(value));
    return p;
}

Poly Poly::variable(RingPtr ring, int var, std::int64_t exp) {
    if (exp < 0) throw UsageError("Poly::variable needs exp >= 0");
    Poly p(std::move(ring));
    Exps e(static_cast<std::size_t>(p.ring_->size()), 0);
    e.at(static_cast<std::size_t>(var)) = exp;
    p.terms_.emplace(std::move(e), BigInt(1));
    return p;
}

Poly Poly::monomial(RingPtr ring, Exps exps, BigInt coeff) {
    Poly p(std::move(ring));
    if (static_cast<int>(exps.size()) != p.ring_->size())
        throw UsageError("monomial exponent arity mismatch");
    for (auto e : exps)
        if (e < 0) throw UsageError("monomial exponents must be >= 0");
    if (coeff != 0) p.terms_.emplace(std::move(exps), std::move(coeff));
    return p;
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](std::int64_t x) { return x == 0; });
}

BigInt Poly::constant_value() const {
    if (terms_.empty()) return 0;
    if (!is_constant()) throw Error("constant_value on non-constant polynomial");
    return terms_.begin()->second;
}

std::int64_t Poly::degree_in(int var) const {
    std::int64_t d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(var)]);
    return d;
}

std::int64_t Poly::lowest_degree_in(int var) const {
    if (terms_.empty()) return 0;
    std::int64_t d = INT64_MAX;
    for (const auto& [e, c] : terms_) d = std::min(d, e[static_cast<std::size_t>(var)]);
    return d;
}

Poly Poly::operator-() const {
    Poly r(ring_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r(ring_);
    Exps sum;
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            sum = ea;
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += eb[i];
            r.add_term(sum, ca * cb);
        }
    }
    return r;
}

Poly Poly::mul_int(const BigInt& c) const {
    Poly r(ring_);
    if (c == 0) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

Poly Poly::pow(std::uint64_t e) const {
    Poly r = Poly::constant(ring_, 1);
    Poly base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

BigInt Poly::content() const {
    BigInt g = 0;
    for (const auto& [e, c] : terms_) {
        g = boost::multiprecision::gcd(g, c);
        if (g == 1) break;
    }
    return g < 0 ? BigInt(-g) : g;
}

BigInt Poly::leading_coeff_lex() const {
    if (terms_.empty()) return 0;
    return terms_.rbegin()->second;
}

Poly Poly::primitive_part() const {
    if (terms_.empty()) return *this;
    BigInt c = content();
    if (leading_coeff_lex() < 0) c = -c;
    Poly r(ring_);
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v / c);
    return r;
}

Poly Poly::div_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw DivisionByZeroError("polynomial division by zero");
    if (!same_ring(a.ring(), b.ring())) throw UsageError("div_exact: ring mismatch");
    Poly rem = a;
    Poly quot(a.ring());
    const auto lead = *b.terms().rbegin();  // lex-leading term of b
    while (!rem.is_zero()) {
        const auto& [re, rc] = *rem.terms().rbegin();
        Exps qe = re;
        bool ok = true;
        for (std::size_t i = 0; i < qe.size(); ++i) {
            qe[i] -= lead.first[i];
            if (qe[i] < 0) { ok = false; break; }
        }
        if (!ok || rc % lead.second != 0)
            throw Error("div_exact: inexact polynomial division");
        Poly t = Poly::monomial(a.ring(), qe, rc / lead.second);
        quot += t;
        rem -= t * b;
    }
    return quot;
}

namespace {

/// Content of `a` seen as a univariate polynomial in `var` (gcd of its
/// polynomial coefficients).
Poly content_wrt(const Poly& a, int var) {
    Poly g(a.ring());
    for (const auto& [e, p] : a.coefficients_in(var)) {
        g = Poly::gcd(g, p);
        if (g.is_one()) break;
    }
    return g;
}

/// Pseudo-remainder of a by b with respect to `var` (deg_a >= deg_b >= 0).
Poly pseudo_rem(Poly a, const Poly& b, int var) {
    auto bc = b.coefficients_in(var);
    const std::int64_t db = bc.rbegin()->first;
    const Poly& lb = bc.rbegin()->second;
    while (true) {
        std::int64_t da = a.degree_in(var);
        if (a.is_zero() || da < db) return a;
        auto ac = a.coefficients_in(var);
        const Poly& la = ac.rbegin()->second;
        // a <- lb * a - la * var^(da-db) * b
        Poly shift = Poly::variable(a.ring(), var, da - db);
        a = a * lb - b * shift * la;
    }
}

}  // namespace

Poly Poly::gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.primitive_part().mul_int(b.content());
    if (b.is_zero()) return a.primitive_part().mul_int(a.content());
    if (!same_ring(a.ring(), b.ring())) throw UsageError("gcd: ring mismatch");
    if (a.is_constant() && b.is_constant()) {
        BigInt g = boost::multiprecision::gcd(a.constant_value(), b.constant_value());
        return Poly::constant(a.ring(), g < 0 ? BigInt(-g) : g);
    }
    // Main variable: highest index occurring in either operand.
    int var = -1;
    for (int i = a.ring()->size() - 1; i >= 0 && var < 0; --i)
        if (a.degree_in(i) > 0 || b.degree_in(i) > 0) var = i;
    Poly ca = content_wrt(a, var);
    Poly cb = content_wrt(b, var);
    Poly cg = gcd(ca, cb);
    Poly pa = div_exact(a, ca);
    Poly pb = div_exact(b, cb);
    if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);
    while (!pb.is_zero()) {
        Poly r = pseudo_rem(pa, pb, var);
        pa = pb;
        if (r.is_zero()) {
            pb = r;
        } else {
            Poly cr = content_wrt(r, var);
            pb = div_exact(r, cr);
        }
    }
    // pa is the primitive gcd in `var`; restore content and normalize sign.
    Poly g = cg * div_exact(pa, content_wrt(pa, var));
    if (g.leading_coeff_lex() < 0) g = -g;
    return g;
}

BigRat Poly::evaluate(std::span<const BigRat> values) const {
    if (static_cast<int>(values.size()) != ring_->size())
        throw UsageError("evaluate: wrong number of values");
    BigRat acc = 0;
    for (const auto& [e, c] : terms_) {
        BigRat term(c);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            BigRat base = values[i];
            std::int64_t k = e[i];
            BigRat p = 1;
            while (k) {
                if (k & 1) p *= base;
                base *= base;
                k >>= 1;
            }
            term *= p;
        }
        acc += term;
    }
    return acc;
}

std::pair<Poly, std::int64_t> Poly::substitute_power(int var, std::int64_t c) const {
    if (c == 0) throw UsageError("substitute_power: exponent scale must be nonzero");
    std::int64_t min_scaled = 0;
    if (c < 0) {
        std::int64_t maxdeg = degree_in(var);
        if (maxdeg > 0) min_scaled = maxdeg * c;  // negative
    }
    Poly r(ring_);
    for (const auto& [e, coeff] : terms_) {
        Exps ne = e;
        ne[static_cast<std::size_t>(var)] = e[static_cast<std::size_t>(var)] * c - min_scaled;
        r.add_term(ne, coeff);
    }
    return {r, -min_scaled};
}

std::map<std::int64_t, Poly> Poly::coefficients_in(int var) const {
    std::map<std::int64_t, Poly> out;
    for (const auto& [e, c] : terms_) {
        Exps rest = e;
        std::int64_t d = rest[static_cast<std::size_t>(var)];
        rest[static_cast<std::size_t>(var)] = 0;
        auto it = out.find(d);
        if (it == out.end()) it = out.emplace(d, Poly(ring_)).first;
        it->second.add_term(rest, c);
    }
    return out;
}

Poly Poly::from_coefficients_in(const RingPtr& ring, int var,
                                const std::map<std::int64_t, Poly>& coeffs) {
    Poly r(ring);
    for (const auto& [d, p] : coeffs) {
        Poly shift = Poly::variable(ring, var, d);
        r += p * shift;
    }
    return r;
}

Poly Poly::promoted(const RingPtr& target) const {
    if (same_ring(ring_, target)) {
        Poly r = *this;
        const_cast<RingPtr&>(r.ring_) = target;
        return r;
    }
    std::vector<int> map(static_cast<std::size_t>(ring_->size()));
    for (int i = 0; i < ring_->size(); ++i) {
        auto idx = target->index_of(ring_->name(i));
        if (!idx) throw UsageError("promoted: target ring lacks variable " + ring_->name(i));
        map[static_cast<std::size_t>(i)] = *idx;
    }
    Poly r(target);
    for (const auto& [e, c] : terms_) {
        Exps ne(static_cast<std::size_t>(target->size()), 0);
        for (std::size_t i = 0; i < e.size(); ++i) ne[static_cast<std::size_t>(map[i])] = e[i];
        r.add_term(ne, c);
    }
    return r;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Descending lex order: iterate the map backwards.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        BigInt coeff = c;
        if (first) {
            if (coeff < 0) {
                os << '-';
                coeff = -coeff;
            }
        } else {
            os << (coeff < 0 ? " - " : " + ");
            if (coeff < 0) coeff = -coeff;
        }
        first = false;
        bool all_zero = std::all_of(e.begin(), e.end(), [](std::int64_t x) { return x == 0; });
        bool coeff_shown = false;
        if (coeff != 1 || all_zero) {
            os << coeff;
            coeff_shown = true;
        }
        bool any_var = false;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (coeff_shown || any_var) os << '*';
            any_var = true;
            os << ring_->name(static_cast<int>(i));
            if (e[i] != 1) os << '^' << e[i];
        }
    }
    return os.str();
}

}  // namespace qhol
