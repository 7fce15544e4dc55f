#include "qhol/guess.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace qhol {

// ---------------------------------------------------------------------------
// GeneratorSet
// ---------------------------------------------------------------------------

GeneratorSet GeneratorSet::all(int rank) {
    GeneratorSet g;
    g.allow_M.assign(static_cast<std::size_t>(rank), true);
    g.allow_L.assign(static_cast<std::size_t>(rank), true);
    return g;
}

GeneratorSet GeneratorSet::none(int rank) {
    GeneratorSet g;
    g.allow_M.assign(static_cast<std::size_t>(rank), false);
    g.allow_L.assign(static_cast<std::size_t>(rank), false);
    return g;
}

GeneratorSet& GeneratorSet::with_M(int axis) {
    allow_M.at(static_cast<std::size_t>(axis)) = true;
    return *this;
}

GeneratorSet& GeneratorSet::with_L(int axis) {
    allow_L.at(static_cast<std::size_t>(axis)) = true;
    return *this;
}

std::size_t GeneratorSet::count() const {
    std::size_t n = 0;
    for (bool b : allow_M) n += b ? 1 : 0;
    for (bool b : allow_L) n += b ? 1 : 0;
    return n;
}

namespace {

std::string gen_name(char kind, int axis, int rank, const std::vector<std::string>& vars) {
    std::string out(1, kind);
    if (static_cast<int>(vars.size()) == rank && !vars[static_cast<std::size_t>(axis)].empty())
        return out + vars[static_cast<std::size_t>(axis)];
    if (rank == 1) return out;
    return out + std::to_string(axis + 1);
}

}  // namespace

std::string GeneratorSet::str(const std::vector<std::string>& vars) const {
    std::string out;
    const int r = rank();
    for (int i = 0; i < r; ++i)
        if (allow_M[static_cast<std::size_t>(i)]) {
            if (!out.empty()) out += ',';
            out += gen_name('M', i, r, vars);
        }
    for (int i = 0; i < r; ++i)
        if (allow_L[static_cast<std::size_t>(i)]) {
            if (!out.empty()) out += ',';
            out += gen_name('L', i, r, vars);
        }
    return out;
}

GeneratorSet GeneratorSet::parse(const std::string& text, int rank,
                                 const std::vector<std::string>& vars) {
    GeneratorSet g = GeneratorSet::none(rank);
    std::string token;
    auto flush = [&](const std::string& tok) {
        if (tok.empty()) return;
        const char kind = tok[0];
        if (kind != 'M' && kind != 'L')
            throw UsageError("generator '" + tok + "' must start with M or L");
        const std::string tail = tok.substr(1);
        std::vector<int> axes;
        if (tail.empty()) {
            for (int i = 0; i < rank; ++i) axes.push_back(i);  // bare M / L: every axis
        } else {
            int axis = -1;
            for (int i = 0; i < rank && static_cast<std::size_t>(i) < vars.size(); ++i)
                if (vars[static_cast<std::size_t>(i)] == tail) axis = i;
            if (axis < 0 && !tail.empty() && tail.find_first_not_of("0123456789") == std::string::npos) {
                const int idx = std::stoi(tail);
                if (idx >= 1 && idx <= rank) axis = idx - 1;
            }
            if (axis < 0)
                throw UsageError("generator '" + tok + "' names no sequence variable");
            axes.push_back(axis);
        }
        for (int a : axes) {
            if (kind == 'M')
                g.with_M(a);
            else
                g.with_L(a);
        }
    };
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            flush(token);
            token.clear();
        } else {
            token += ch;
        }
    }
    flush(token);
    return g;
}

// ---------------------------------------------------------------------------
// GuessConfig
// ---------------------------------------------------------------------------

std::int64_t GuessConfig::order_for(int axis) const {
    if (order.empty()) throw UsageError("guess config has no L-order bound");
    std::int64_t v = order.size() == 1 ? order.front() : order.at(static_cast<std::size_t>(axis));
    if (v < 0) throw UsageError("guess L-order bound must be >= 0");
    return v;
}

// ---------------------------------------------------------------------------
// Ansatz enumeration
// ---------------------------------------------------------------------------

namespace {

/// All exponent vectors over `axes` flagged true, with the per-axis caps (or a
/// shared total-degree cap when `total` >= 0), in ascending lexicographic order.
std::vector<Exps> exponent_vectors(const std::vector<bool>& allowed,
                                   const std::vector<std::int64_t>& caps, std::int64_t total) {
    const std::size_t r = allowed.size();
    std::vector<Exps> out;
    Exps cur(r, 0);
    auto rec = [&](auto&& self, std::size_t axis, std::int64_t budget) -> void {
        if (axis == r) {
            out.push_back(cur);
            return;
        }
        const std::int64_t cap = allowed[axis] ? (total >= 0 ? budget : caps[axis]) : 0;
        for (std::int64_t e = 0; e <= cap; ++e) {
            cur[axis] = e;
            self(self, axis + 1, total >= 0 ? budget - e : budget);
        }
        cur[axis] = 0;
    };
    rec(rec, 0, total);
    std::sort(out.begin(), out.end());
    return out;
}

struct Ansatz {
    int rank = 0;
    RingPtr ring;
    std::vector<std::pair<Exps, Exps>> monos;  ///< (alpha, beta) pairs.
    std::vector<int> param_vars;               ///< Ring indices of the symbolic parameters.
    std::vector<Exps> pexps;                   ///< Parameter exponent tuples.
    std::int64_t qdeg = 0;

    std::size_t unknowns() const { return monos.size() * static_cast<std::size_t>(qdeg + 1) * pexps.size(); }
    std::size_t index(std::size_t mono, std::int64_t qd, std::size_t pe) const {
        return (mono * static_cast<std::size_t>(qdeg + 1) + static_cast<std::size_t>(qd)) * pexps.size() + pe;
    }
};

Ansatz build_ansatz(const Sequence& f, const GuessConfig& cfg) {
    if (!f.valid()) throw UsageError("guess needs a valid sequence");
    if (cfg.mdeg < 0 || cfg.qdeg < 0 || cfg.pdeg < 0)
        throw UsageError("guess degree bounds must be >= 0");
    Ansatz a;
    a.rank = f.rank();
    a.ring = f.sring();
    a.qdeg = cfg.qdeg;
    GeneratorSet gens = cfg.gens.value_or(GeneratorSet::all(a.rank));
    if (gens.rank() != a.rank)
        throw UsageError("generator set rank does not match the sequence");
    std::vector<std::int64_t> orders;
    for (int i = 0; i < a.rank; ++i) orders.push_back(cfg.order_for(i));
    const std::vector<Exps> alphas =
        exponent_vectors(gens.allow_M, {}, cfg.mdeg);  // total M-degree bound
    const std::vector<Exps> betas = exponent_vectors(gens.allow_L, orders, -1);
    for (const Exps& al : alphas)
        for (const Exps& be : betas) a.monos.emplace_back(al, be);
    std::sort(a.monos.begin(), a.monos.end());
    for (int v = 1; v < a.ring->size(); ++v) a.param_vars.push_back(v);
    std::vector<bool> pallow(a.param_vars.size(), true);
    std::vector<std::int64_t> pcaps(a.param_vars.size(), cfg.pdeg);
    a.pexps = exponent_vectors(pallow, pcaps, -1);
    return a;
}

/// All homogeneous linear conditions imposed by the ansatz at one point, as
/// sparse rational rows over the unknown coefficients: clear a common
/// denominator of the evaluated monomials, then split by q/parameter exponent.
/// At most `max_rows` rows are kept (lowest exponents first); dropping rows
/// only relaxes the system, which the verification loop repairs exactly.
std::vector<SparseRow> rows_for_point(const Sequence& f, const Ansatz& a, const Point& p,
                                      std::size_t max_rows) {
    std::vector<Scalar> vals;
    vals.reserve(a.monos.size());
    for (const auto& [alpha, beta] : a.monos) {
        Point shifted(p);
        std::int64_t qe = 0;
        for (std::size_t i = 0; i < shifted.size(); ++i) {
            shifted[i] += beta[i];
            qe += alpha[i] * p[i];
        }
        vals.push_back(Scalar::q_power(a.ring, qe) * f.at(shifted));
    }
    // A common multiple of the denominators: the product of the distinct ones.
    // (Multiplying the whole linear form by a fixed polynomial leaves its
    // nullspace unchanged, so overshooting the true lcm is harmless and
    // avoids polynomial gcds entirely.)
    std::vector<const Poly*> distinct;
    Poly lcd = Poly::constant(a.ring, 1);
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
        for (const auto& [exps, coeff] : w.terms()) {
            for (std::int64_t qd = 0; qd <= a.qdeg; ++qd) {
                for (std::size_t pe = 0; pe < a.pexps.size(); ++pe) {
                    Exps key = exps;
                    key[0] += qd;
                    for (std::size_t j = 0; j < a.param_vars.size(); ++j)
                        key[static_cast<std::size_t>(a.param_vars[j])] += a.pexps[pe][j];
                    sheet[key][a.index(m, qd, pe)] += coeff;
                }
            }
        }
    }
    std::vector<SparseRow> rows;
    rows.reserve(std::min(sheet.size(), max_rows));
    for (const auto& [key, entries] : sheet) {
        if (rows.size() >= max_rows) break;
        SparseRow row;
        for (const auto& [col, c] : entries)
            if (c != 0) row.emplace_back(col, BigRat(c));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

/// Evaluation points ordered so that cheap ones (small coordinates, hence
/// small polynomials) come first and both axes vary early; falls back to
/// plain lexicographic streaming for windows too large to materialize.
std::vector<Point> ordered_points(const Window& w) {
    std::vector<Point> pts;
    if (w.point_count() > (1u << 20)) {
        w.for_each_point([&](const Point& p) { pts.push_back(p); });
        return pts;
    }
    w.for_each_point([&](const Point& p) { pts.push_back(p); });
    std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) {
        std::int64_t sx = 0, sy = 0;
        for (std::int64_t v : x) sx += v < 0 ? -v : v;
        for (std::int64_t v : y) sy += v < 0 ? -v : v;
        if (sx != sy) return sx < sy;
        return x < y;
    });
    return pts;
}

WeylOperator assemble_operator(const Ansatz& a, const std::vector<BigRat>& v) {
    std::map<std::pair<Exps, Exps>, Scalar> coeffs;
    for (std::size_t m = 0; m < a.monos.size(); ++m) {
        for (std::int64_t qd = 0; qd <= a.qdeg; ++qd) {
            for (std::size_t pe = 0; pe < a.pexps.size(); ++pe) {
                const BigRat& c = v[a.index(m, qd, pe)];
                if (c == 0) continue;
                Exps mono(static_cast<std::size_t>(a.ring->size()), 0);
                mono[0] = qd;
                for (std::size_t j = 0; j < a.param_vars.size(); ++j)
                    mono[static_cast<std::size_t>(a.param_vars[j])] = a.pexps[pe][j];
                Scalar term = Scalar::fraction(
                    Poly::monomial(a.ring, mono, numerator(c)),
                    Poly::constant(a.ring, denominator(c)));
                auto it = coeffs.find(a.monos[m]);
                if (it == coeffs.end())
                    coeffs.emplace(a.monos[m], term);
                else
                    it->second += term;
            }
        }
    }
    WeylOperator op(a.rank, a.ring);
    for (const auto& [mono, c] : coeffs)
        if (!c.is_zero()) op.add_term(mono.first, mono.second, c);
    return op;
}

/// L-major comparison key used for leading-term selection: (beta|alpha).
std::vector<std::int64_t> lmajor_key(const std::vector<std::int64_t>& e, int rank) {
    const auto r = static_cast<std::ptrdiff_t>(rank);
    std::vector<std::int64_t> k(e.begin() + r, e.end());
    k.insert(k.end(), e.begin(), e.begin() + r);
    return k;
}

std::int64_t l_order(const WeylOperator& op) {
    std::int64_t best = 0;
    for (const auto& [e, c] : op.terms()) {
        std::int64_t s = 0;
        for (int i = 0; i < op.rank(); ++i) s += e[static_cast<std::size_t>(op.rank() + i)];
        best = std::max(best, s);
    }
    return best;
}

/// Output order: lower L-order, then lower total degree, then text.
bool output_less(const WeylOperator& x, const WeylOperator& y) {
    const std::int64_t lx = l_order(x), ly = l_order(y);
    if (lx != ly) return lx < ly;
    const std::int64_t tx = x.total_degree(), ty = y.total_degree();
    if (tx != ty) return tx < ty;
    return x.str() < y.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

WeylOperator canonical_operator_form(const WeylOperator& op) {
    if (op.is_zero()) return op;
    const RingPtr& ring = op.sring();
    Poly lcd = Poly::constant(ring, 1);
    for (const auto& [e, c] : op.terms()) {
        Poly g = Poly::gcd(lcd, c.den());
        lcd = Poly::div_exact(lcd, g) * c.den();
    }
    std::vector<std::pair<std::vector<std::int64_t>, Poly>> nums;
    Poly content = Poly(ring);
    for (const auto& [e, c] : op.terms()) {
        Poly n = c.num() * Poly::div_exact(lcd, c.den());
        content = content.is_zero() ? Poly::gcd(n, n) : Poly::gcd(content, n);
        nums.emplace_back(e, std::move(n));
    }
    // Leading term under the L-major order decides the overall sign.
    const std::vector<std::int64_t>* lead = nullptr;
    std::vector<std::int64_t> lead_key;
    for (const auto& [e, n] : nums) {
        std::vector<std::int64_t> k = lmajor_key(e, op.rank());
        if (lead == nullptr || k > lead_key) {
            lead = &e;
            lead_key = std::move(k);
        }
    }
    bool negate = false;
    for (const auto& [e, n] : nums)
        if (&e == lead) negate = n.leading_coeff_lex() < 0;
    WeylOperator out(op.rank(), ring);
    const auto r = static_cast<std::size_t>(op.rank());
    for (const auto& [e, n] : nums) {
        Poly reduced = Poly::div_exact(n, content);
        if (negate) reduced = -reduced;
        out.add_term(Exps(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(r)),
                     Exps(e.begin() + static_cast<std::ptrdiff_t>(r), e.end()),
                     Scalar::from_poly(std::move(reduced)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

std::pair<Window, Window> guess_windows(const Sequence& f, const GuessConfig& cfg) {
    const Ansatz a = build_ansatz(f, cfg);
    const auto u = static_cast<std::int64_t>(a.monos.size());
    Window eval = cfg.eval_window.value_or(Window::cube(a.rank, 0, 2 * u + 4));
    if (eval.rank() != a.rank) throw UsageError("evaluation window rank mismatch");
    Window verify;
    if (cfg.verify_window) {
        verify = *cfg.verify_window;
        if (verify.rank() != a.rank) throw UsageError("verification window rank mismatch");
    } else {
        for (int i = 0; i < a.rank; ++i) {
            const auto [lo, hi] = eval.axes[static_cast<std::size_t>(i)];
            const bool full_line = f.domains()[static_cast<std::size_t>(i)] == AxisDomain::FullLine;
            verify.axes.emplace_back(full_line ? std::min<std::int64_t>(lo, 0) - 4 : lo, hi + 4);
        }
    }
    bool wider = false;
    for (int i = 0; i < a.rank; ++i) {
        const auto [elo, ehi] = eval.axes[static_cast<std::size_t>(i)];
        const auto [vlo, vhi] = verify.axes[static_cast<std::size_t>(i)];
        if (vlo > elo || vhi < ehi)
            throw UsageError("verification window must contain the evaluation window");
        wider = wider || vlo < elo || vhi > ehi;
    }
    if (!wider)
        throw UsageError("verification window must strictly contain the evaluation window");
    return {std::move(eval), std::move(verify)};
}

// ---------------------------------------------------------------------------
// Guessing
// ---------------------------------------------------------------------------

std::vector<WeylOperator> guess_annihilator(const Sequence& f, const GuessConfig& cfg) {
    const Ansatz a = build_ansatz(f, cfg);
    const auto [eval_w, verify_w] = guess_windows(f, cfg);
    const std::size_t u = a.monos.size();
    if (eval_w.point_count() < u)
        throw UsageError("evaluation window too small for the ansatz: " +
                         std::to_string(eval_w.point_count()) + " points < " +
                         std::to_string(u) + " operator monomials");
    const std::size_t U = a.unknowns();

    // Phase 1: stream window points through a modular rank filter.  Rows that
    // raise the modular rank are independent over Q and feed the exact
    // tracker; full modular rank certifies an empty result.  Scanning stops
    // early once several consecutive points stop contributing, which is safe
    // because phase 2 restores exactness regardless of where we stopped.
    ModularRankTracker filter(U);
    NullspaceTracker space(U);
    int stagnant = 0;
    for (const Point& p : ordered_points(eval_w)) {
        bool cut_here = false;
        for (const SparseRow& row : rows_for_point(f, a, p, U)) {
            if (filter.process_row(row)) {
                const bool cut = space.process_row(row);
                assert(cut);
                (void)cut;
                cut_here = true;
            }
        }
        stagnant = cut_here ? 0 : stagnant + 1;
        if (filter.full() || stagnant >= 3) break;
    }
    if (space.empty()) return {};

    // Phase 2: any candidate surviving exact verification on the wider window
    // annihilates every evaluation point, and any operator doing that lies in
    // the tracked space; failures feed their witness point back as new rows,
    // each of which provably cuts, so this loop terminates with exactly the
    // verified space.
    std::map<std::string, std::optional<Point>> verdicts;
    while (true) {
        std::vector<WeylOperator> candidates;
        for (const std::vector<BigRat>& v : space.reduced_basis()) {
            WeylOperator op = canonical_operator_form(assemble_operator(a, v));
            if (!op.is_zero()) candidates.push_back(std::move(op));
        }
        std::sort(candidates.begin(), candidates.end(), output_less);
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        std::set<Point> failures;
        for (const WeylOperator& op : candidates) {
            auto [it, fresh] = verdicts.try_emplace(op.str());
            if (fresh) it->second = verify_operator(op, f, verify_w);
            if (it->second) failures.insert(*it->second);
        }
        if (failures.empty()) return candidates;
        const std::size_t before = space.dimension();
        // No row cap here: a failing operator is guaranteed to hit a cutting
        // row somewhere in the full coefficient extraction, so keep all rows.
        for (const Point& p : failures)
            for (const SparseRow& row : rows_for_point(f, a, p, std::numeric_limits<std::size_t>::max()))
                space.process_row(row);
        if (space.empty()) return {};
        if (space.dimension() == before)
            throw Error("internal: verification failure did not reduce the candidate space");
    }
}

AnnihilatorSystem guess_system(const Sequence& f, const GuessConfig& cfg) {
    const int r = f.rank();
    std::vector<std::vector<WeylOperator>> found(static_cast<std::size_t>(r));
    std::vector<int> failed;
    for (int axis = 0; axis < r; ++axis) {
        GuessConfig dir = cfg;
        GeneratorSet g = GeneratorSet::none(r);
        for (int i = 0; i < r; ++i) g.with_M(i);
        g.with_L(axis);
        dir.gens = g;
        found[static_cast<std::size_t>(axis)] = guess_annihilator(f, dir);
        if (found[static_cast<std::size_t>(axis)].empty()) failed.push_back(axis);
    }
    if (!failed.empty()) {
        std::ostringstream os;
        os << "guessing found no operator in direction";
        if (failed.size() > 1) os << 's';
        for (std::size_t i = 0; i < failed.size(); ++i)
            os << (i ? ", " : " ") << f.vars()[static_cast<std::size_t>(failed[i])];
        os << " (bounds: order";
        for (int i = 0; i < r; ++i) os << (i ? "," : " ") << cfg.order_for(i);
        os << ", mdeg " << cfg.mdeg << ", qdeg " << cfg.qdeg << ")";
        throw Error(os.str());
    }
    AnnihilatorSystem sys;
    sys.rank = r;
    sys.provenance = "guessed";
    std::set<std::string> seen;
    for (int axis = 0; axis < r; ++axis) {
        const auto& ops = found[static_cast<std::size_t>(axis)];
        sys.direction[axis] = ops.front();
        seen.insert(ops.front().str());
    }
    for (int axis = 0; axis < r; ++axis)
        for (const WeylOperator& op : found[static_cast<std::size_t>(axis)])
            if (seen.insert(op.str()).second) sys.extras.push_back(op);
    sys.validate();
    // One shared verification window: the intersection of the per-direction
    // verification windows (they differ only when defaults depend on axis).
    Window shared;
    for (int axis = 0; axis < r; ++axis) {
        GuessConfig dir = cfg;
        GeneratorSet g = GeneratorSet::none(r);
        for (int i = 0; i < r; ++i) g.with_M(i);
        g.with_L(axis);
        dir.gens = g;
        Window w = guess_windows(f, dir).second;
        if (axis == 0) {
            shared = w;
        } else {
            for (int i = 0; i < r; ++i) {
                auto& ax = shared.axes[static_cast<std::size_t>(i)];
                ax.first = std::max(ax.first, w.axes[static_cast<std::size_t>(i)].first);
                ax.second = std::min(ax.second, w.axes[static_cast<std::size_t>(i)].second);
            }
        }
    }
    if (auto bad = verify_system(sys, f, shared))
        throw Error("guessed system failed re-verification at " + point_to_string(*bad));
    return sys;
}

}  // namespace qhol
