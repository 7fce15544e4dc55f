#include "qhol/analysis.hpp"

#include "qhol/linalg.hpp"

#include "json.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <utility>

namespace qhol {

namespace {

// ---------------------------------------------------------------------------
// Shift-monomial enumeration
// ---------------------------------------------------------------------------

// All (alpha|beta) in N^(2r) with |alpha| + |beta| == d, lex ascending.
void monomials_of_degree(int slots, std::int64_t d, std::vector<std::int64_t>& cur,
                         std::vector<std::vector<std::int64_t>>& out) {
    if (slots == 1) {
        cur.push_back(d);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::int64_t v = 0; v <= d; ++v) {
        cur.push_back(v);
        monomials_of_degree(slots - 1, d - v, cur, out);
        cur.pop_back();
    }
}

// Degree-ordered list of all shift monomials (alpha|beta), |alpha|+|beta| <= K.
std::vector<std::vector<std::int64_t>> shift_monomials(int rank, int K) {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> cur;
    for (std::int64_t d = 0; d <= K; ++d) monomials_of_degree(2 * rank, d, cur, out);
    return out;
}

std::int64_t alpha_dot(const std::vector<std::int64_t>& mono, std::span<const std::int64_t> p) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += mono[i] * p[i];
    return acc;
}

Point shifted_point(const std::vector<std::int64_t>& mono, std::span<const std::int64_t> p) {
    Point s(p.begin(), p.end());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += mono[p.size() + i];
    return s;
}

void check_window_capacity(const Sequence& f, int k, const Window& window) {
    if (!f.valid()) throw UsageError("filtration rank needs a valid sequence");
    if (k < 0) throw UsageError("filtration level must be nonnegative");
    if (window.rank() != f.rank())
        throw UsageError("window rank " + std::to_string(window.rank()) +
                         " does not match sequence rank " + std::to_string(f.rank()));
    std::uint64_t need = filtration_basis_size(f.rank(), k);
    if (window.point_count() < need)
        throw UsageError("window has " + std::to_string(window.point_count()) +
                         " points but level " + std::to_string(k) + " needs at least " +
                         std::to_string(need) +
                         " so the rank is not capped by the column count");
}

// ---------------------------------------------------------------------------
// Probabilistic ranks: specialize at a random rational point, rank mod prime
// ---------------------------------------------------------------------------

constexpr std::uint64_t kPrime = (1ull << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t acc = 1;
    while (e) {
        if (e & 1) acc = mulmod(acc, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return acc;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::uint64_t bigint_mod(const BigInt& v) {
    BigInt m = v % BigInt(kPrime);
    if (m < 0) m += kPrime;
    return m.convert_to<std::uint64_t>();
}

// Residue of a polynomial at per-variable residues.
std::uint64_t poly_residue(const Poly& poly, const std::vector<std::uint64_t>& vals) {
    std::uint64_t acc = 0;
    for (const auto& [exps, coeff] : poly.terms()) {
        std::uint64_t t = bigint_mod(coeff);
        for (std::size_t i = 0; i < exps.size(); ++i)
            if (exps[i] != 0)
                t = mulmod(t, powmod(vals[i], static_cast<std::uint64_t>(exps[i])));
        acc += t;
        if (acc >= kPrime) acc -= kPrime;
    }
    return acc;
}

// Residue of a scalar; nullopt when the denominator maps to zero (a genuine
// pole of the specialization, or an unlucky prime artifact — the caller
// redraws the trial point either way).
std::optional<std::uint64_t> scalar_residue(const Scalar& s,
                                            const std::vector<std::uint64_t>& vals) {
    std::uint64_t dn = poly_residue(s.den(), vals);
    if (dn == 0) return std::nullopt;
    return mulmod(poly_residue(s.num(), vals), invmod(dn));
}

struct TrialDraw {
    std::vector<BigRat> values;            ///< Exact rational value per ring var.
    std::vector<std::uint64_t> residues;   ///< The same values mod kPrime.
};

TrialDraw draw_point(const RingPtr& ring, std::mt19937_64& gen) {
    std::uniform_int_distribution<std::int64_t> num_dist(-1000000, 1000000);
    std::uniform_int_distribution<std::int64_t> den_dist(1, 1000000);
    TrialDraw d;
    for (int i = 0; i < ring->size(); ++i) {
        std::int64_t n = 0, m = 1;
        do {
            n = num_dist(gen);
            m = den_dist(gen);
        } while (n == 0 || n == m || n == -m);  // keep q (and params) off 0 and +/-1
        d.values.emplace_back(BigInt(n), BigInt(m));
        std::uint64_t nr = n >= 0 ? static_cast<std::uint64_t>(n)
                                  : kPrime - static_cast<std::uint64_t>(-n);
        d.residues.push_back(mulmod(nr, invmod(static_cast<std::uint64_t>(m))));
    }
    return d;
}

/// Ranks of the nested degree blocks 0..K in one pass per trial; max over
/// trials.  Deterministic for a fixed seed; per-trial generators are seeded
/// seed + trial so adding trials never changes earlier draws.
std::vector<std::size_t> ranks_probabilistic(const Sequence& f, int K, const Window& window,
                                             std::uint64_t seed, int trials) {
    if (trials < 1) throw UsageError("probabilistic rank needs at least one trial");
    const RingPtr& ring = f.sring();
    auto monos = shift_monomials(f.rank(), K);
    std::vector<Point> points;
    window.for_each_point([&](const Point& p) { points.push_back(p); });

    std::vector<std::size_t> best(static_cast<std::size_t>(K) + 1, 0);
    std::set<std::vector<BigRat>> denylist;  // draws that hit a pole
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 gen(seed + static_cast<std::uint64_t>(trial));
        bool done = false;
        for (int attempt = 0; attempt < 64 && !done; ++attempt) {
            TrialDraw draw = draw_point(ring, gen);
            if (denylist.count(draw.values)) continue;

            bool pole = false;
            std::map<Point, std::uint64_t> fcache;
            auto value_at = [&](const Point& p) -> std::uint64_t {
                auto it = fcache.find(p);
                if (it != fcache.end()) return it->second;
                auto rv = scalar_residue(f.at(p), draw.residues);
                if (!rv) {
                    pole = true;
                    return 0;
                }
                return fcache.emplace(p, *rv).first->second;
            };
            std::map<std::int64_t, std::uint64_t> qpow;
            auto q_to = [&](std::int64_t e) {
                auto it = qpow.find(e);
                if (it != qpow.end()) return it->second;
                std::uint64_t v = e >= 0
                                      ? powmod(draw.residues[0], static_cast<std::uint64_t>(e))
                                      : invmod(powmod(draw.residues[0],
                                                      static_cast<std::uint64_t>(-e)));
                return qpow.emplace(e, v).first->second;
            };

            ModularRankTracker tracker(points.size());
            std::vector<std::size_t> trial_ranks(static_cast<std::size_t>(K) + 1, 0);
            std::size_t mi = 0;
            for (int k = 0; k <= K && !pole; ++k) {
                std::uint64_t upto = filtration_basis_size(f.rank(), k);
                for (; mi < upto && !pole; ++mi) {
                    SparseRow row;
                    for (std::size_t j = 0; j < points.size(); ++j) {
                        std::uint64_t fv = value_at(shifted_point(monos[mi], points[j]));
                        if (pole) break;
                        std::uint64_t v = mulmod(q_to(alpha_dot(monos[mi], points[j])), fv);
                        if (v != 0) row.emplace_back(j, BigRat(v));
                    }
                    if (!pole) tracker.process_row(row);
                }
                trial_ranks[static_cast<std::size_t>(k)] = tracker.rank();
            }
            if (pole) {
                denylist.insert(draw.values);
                continue;
            }
            for (std::size_t k = 0; k < best.size(); ++k)
                best[k] = std::max(best[k], trial_ranks[k]);
            done = true;
        }
        if (!done)
            throw UsageError(
                "could not find a pole-free evaluation point for the probabilistic rank "
                "after 64 draws");
    }
    return best;
}

// ---------------------------------------------------------------------------
// Exact ranks over the scalar field
// ---------------------------------------------------------------------------

std::size_t exact_rank_at(const Sequence& f, int k, const Window& window) {
    const RingPtr& ring = f.sring();
    auto monos = shift_monomials(f.rank(), k);
    std::vector<Point> points;
    window.for_each_point([&](const Point& p) { points.push_back(p); });
    std::vector<std::vector<Scalar>> rows;
    rows.reserve(monos.size());
    for (const auto& mono : monos) {
        std::vector<Scalar> row;
        row.reserve(points.size());
        for (const auto& p : points)
            row.push_back(Scalar::q_power(ring, alpha_dot(mono, p)) * f.at(shifted_point(mono, p)));
        rows.push_back(std::move(row));
    }
    return scalar_rank(std::move(rows), /*column_scaling=*/true);
}

std::vector<std::size_t> ranks_exact(const Sequence& f, int K, const Window& window) {
    std::vector<std::size_t> out;
    for (int k = 0; k <= K; ++k) out.push_back(exact_rank_at(f, k, window));
    return out;
}

// ---------------------------------------------------------------------------
// Degree fitting by finite differences
// ---------------------------------------------------------------------------

struct TailFit {
    int degree = -1;
    bool stabilized = false;
};

// First difference order at which the tail becomes constant.  A single-entry
// row is vacuously constant, so the scan always terminates; `stabilized`
// records whether the constancy was confirmed on >= 2 entries.
TailFit fit_tail(const std::vector<std::size_t>& ranks, int K) {
    std::size_t tail_len = static_cast<std::size_t>((K + 1) / 2 + 1);
    tail_len = std::min(tail_len, ranks.size());
    std::vector<std::int64_t> row(ranks.end() - static_cast<std::ptrdiff_t>(tail_len),
                                  ranks.end());
    for (int d = 0;; ++d) {
        bool constant = true;
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i] != row[0]) constant = false;
        if (constant) return {d, row.size() >= 2};
        std::vector<std::int64_t> next;
        for (std::size_t i = 1; i < row.size(); ++i) next.push_back(row[i] - row[i - 1]);
        row = std::move(next);
    }
}

std::string mode_name(RankMode mode) {
    return mode == RankMode::Probabilistic ? "probabilistic" : "exact";
}

nlohmann::ordered_json window_json(const Window& w) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& [lo, hi] : w.axes) a.push_back({lo, hi});
    return a;
}

// ---------------------------------------------------------------------------
// Finiteness helpers
// ---------------------------------------------------------------------------

// True when op involves no L other than L_axis.
bool l_pure(const WeylOperator& op, int axis) {
    for (int j = 0; j < op.rank(); ++j)
        if (j != axis && (op.degree_L(j) != 0 || op.lowest_degree_L(j) != 0)) return false;
    return true;
}

// True when op is a direction-axis operator whose leading L_axis-coefficient
// is a unit of the coefficient field (a single M-free term).
bool unit_l_leading(const WeylOperator& op, int axis) {
    if (op.is_zero() || !l_pure(op, axis)) return false;
    WeylOperator lead = l_coefficient(op, axis, op.degree_L(axis));
    if (lead.terms().size() != 1) return false;
    const auto& key = lead.terms().begin()->first;
    return std::all_of(key.begin(), key.end(), [](std::int64_t e) { return e == 0; });
}

GeneratorSet direction_gens(int rank, int axis) {
    GeneratorSet gs = GeneratorSet::none(rank);
    for (int j = 0; j < rank; ++j) gs.with_M(j);
    gs.with_L(axis);
    return gs;
}

// Lexicographic (r+1)-subsets of the 2r generator symbols; symbol j < r is
// M_j, symbol r + i is L_i.
std::vector<std::vector<int>> generator_subsets(int rank) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int from) {
        if (static_cast<int>(cur.size()) == rank + 1) {
            out.push_back(cur);
            return;
        }
        for (int s = from; s < 2 * rank; ++s) {
            cur.push_back(s);
            rec(s + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

nlohmann::ordered_json op_json(const std::optional<WeylOperator>& op,
                               const std::vector<std::string>& vars) {
    if (!op) return nullptr;
    return op->str(vars);
}

}  // namespace

// ---------------------------------------------------------------------------
// Public: ranks and dimension
// ---------------------------------------------------------------------------

std::uint64_t filtration_basis_size(int rank, int k) {
    if (rank < 0 || k < 0) throw UsageError("filtration_basis_size needs rank, k >= 0");
    // binomial(k + 2 rank, 2 rank)
    std::uint64_t acc = 1;
    for (int i = 1; i <= 2 * rank; ++i)
        acc = acc * static_cast<std::uint64_t>(k + i) / static_cast<std::uint64_t>(i);
    return acc;
}

std::size_t filtration_rank(const Sequence& f, int k, const Window& window, RankMode mode,
                            std::uint64_t seed, int trials) {
    check_window_capacity(f, k, window);
    if (mode == RankMode::Exact) return exact_rank_at(f, k, window);
    return ranks_probabilistic(f, k, window, seed, trials).back();
}

std::string to_string(DimensionVerdict v) {
    switch (v) {
        case DimensionVerdict::ConsistentWithQHolonomic: return "consistent-with-q-holonomic";
        case DimensionVerdict::ExceedsHolonomicBound: return "exceeds-holonomic-bound";
        case DimensionVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

int dimension_default_K(int rank) { return 2 * rank + 6; }

DimensionReport dimension_estimate(const Sequence& f, int K, const Window& window, RankMode mode,
                                   std::uint64_t seed, int trials) {
    if (K < 1) throw UsageError("dimension_estimate needs K >= 1");
    check_window_capacity(f, K, window);

    DimensionReport rep;
    rep.K = K;
    rep.window = window;
    rep.mode = mode;
    rep.seed = seed;
    rep.trials = mode == RankMode::Probabilistic ? trials : 0;
    rep.ranks = mode == RankMode::Probabilistic
                    ? ranks_probabilistic(f, K, window, seed, trials)
                    : ranks_exact(f, K, window);

    TailFit fit = fit_tail(rep.ranks, K);
    rep.fitted_degree = fit.degree;
    rep.stabilized = fit.stabilized;

    int r = f.rank();
    if (rep.ranks.back() == window.point_count()) {
        // A capped top rank can distort the tail in either direction, so no
        // verdict survives saturation.
        rep.verdict = DimensionVerdict::Inconclusive;
        rep.note = "top rank equals the window point count; enlarge the window";
    } else if (fit.degree > r) {
        // Every difference row of order 0..r is non-constant on the tail, so
        // no polynomial of degree <= r fits the observed ranks.
        rep.verdict = DimensionVerdict::ExceedsHolonomicBound;
    } else if (fit.stabilized) {
        rep.verdict = DimensionVerdict::ConsistentWithQHolonomic;
    } else {
        rep.verdict = DimensionVerdict::Inconclusive;
        rep.note = "the constant difference row has a single entry; deepen K or the window";
    }
    return rep;
}

std::string DimensionReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "qhol/1";
    j["kind"] = "dimension-report";
    j["K"] = K;
    j["ranks"] = ranks;
    j["fitted_degree"] = fitted_degree;
    j["stabilized"] = stabilized;
    j["verdict"] = qhol::to_string(verdict);
    if (!note.empty()) j["note"] = note;
    j["window"] = window_json(window);
    j["mode"] = mode_name(mode);
    if (mode == RankMode::Probabilistic) {
        j["seed"] = seed;
        j["trials"] = trials;
    }
    return j.dump();
}

// ---------------------------------------------------------------------------
// Public: finiteness classification
// ---------------------------------------------------------------------------

FinitenessReport classify_finiteness(const Sequence& f, const GuessConfig& bounds) {
    if (!f.valid()) throw UsageError("classify_finiteness needs a valid sequence");
    const int r = f.rank();
    FinitenessReport rep;

    Window probe = Window::cube(r, -4, 8);
    bool all_zero = true;
    probe.for_each_point([&](const Point& p) {
        if (all_zero && !f.at(p).is_zero()) all_zero = false;
    });
    if (all_zero) {
        rep.zero_sequence = true;
        WeylOperator unit = WeylOperator::identity(r, f.sring());
        for (int i = 0; i < r; ++i)
            rep.directions.push_back({i, true, true, "zero", unit, unit});
        for (const auto& subset : generator_subsets(r)) {
            GeneratorSet gs = GeneratorSet::none(r);
            for (int s : subset) s < r ? gs.with_M(s) : gs.with_L(s - r);
            rep.subsets.push_back({gs, gs.str(f.vars()), true, unit});
        }
        rep.integrally_finite = rep.finite = rep.strongly_finite_evidence = true;
        return rep;
    }

    for (int i = 0; i < r; ++i) {
        DirectionEvidence ev;
        ev.axis = i;
        if (f.system() && f.system()->has_direction(i)) {
            const WeylOperator& op = f.system()->dir(i);
            ev.found = true;
            ev.source = "attached";
            ev.op = op;
            if (unit_l_leading(op, i)) {
                ev.unit_leading = true;
                ev.unit_op = op;
            }
        }
        if (!ev.found || !ev.unit_leading) {
            GuessConfig cfg = bounds;
            cfg.gens = direction_gens(r, i);
            for (const auto& op : guess_annihilator(f, cfg)) {
                if (!ev.found) {
                    ev.found = true;
                    ev.source = "guessed";
                    ev.op = op;
                }
                if (!ev.unit_leading && unit_l_leading(op, i)) {
                    ev.unit_leading = true;
                    ev.unit_op = op;
                }
            }
        }
        rep.directions.push_back(std::move(ev));
    }

    for (const auto& subset : generator_subsets(r)) {
        SubsetEvidence se;
        se.gens = GeneratorSet::none(r);
        int l_axis = -1, l_count = 0, m_count = 0;
        for (int s : subset) {
            if (s < r) {
                se.gens.with_M(s);
                ++m_count;
            } else {
                se.gens.with_L(s - r);
                l_axis = s - r;
                ++l_count;
            }
        }
        se.gens_text = se.gens.str(f.vars());
        if (m_count == r && l_count == 1 && rep.directions[l_axis].found) {
            // This subset is exactly the direction algebra already searched.
            se.found = true;
            se.op = rep.directions[l_axis].op;
        } else {
            GuessConfig cfg = bounds;
            cfg.gens = se.gens;
            auto ops = guess_annihilator(f, cfg);
            if (!ops.empty()) {
                se.found = true;
                se.op = ops.front();
            }
        }
        rep.subsets.push_back(std::move(se));
    }

    rep.finite = std::all_of(rep.directions.begin(), rep.directions.end(),
                             [](const DirectionEvidence& e) { return e.found; });
    rep.integrally_finite = std::all_of(rep.directions.begin(), rep.directions.end(),
                                        [](const DirectionEvidence& e) { return e.unit_leading; });
    rep.strongly_finite_evidence = std::all_of(rep.subsets.begin(), rep.subsets.end(),
                                               [](const SubsetEvidence& e) { return e.found; });
    return rep;
}

std::string FinitenessReport::to_json(const std::vector<std::string>& vars) const {
    nlohmann::ordered_json j;
    j["schema"] = "qhol/1";
    j["kind"] = "finiteness-report";
    j["zero_sequence"] = zero_sequence;
    j["integrally_finite"] = integrally_finite;
    j["finite"] = finite;
    j["strongly_finite_evidence"] = strongly_finite_evidence;
    nlohmann::ordered_json dirs = nlohmann::ordered_json::array();
    for (const auto& d : directions) {
        nlohmann::ordered_json e;
        e["axis"] = d.axis;
        if (d.axis < static_cast<int>(vars.size())) e["variable"] = vars[d.axis];
        e["found"] = d.found;
        e["unit_leading"] = d.unit_leading;
        e["source"] = d.source.empty() ? "not-found-within-bounds" : d.source;
        e["operator"] = op_json(d.op, vars);
        e["unit_operator"] = op_json(d.unit_op, vars);
        dirs.push_back(std::move(e));
    }
    j["directions"] = std::move(dirs);
    nlohmann::ordered_json subs = nlohmann::ordered_json::array();
    for (const auto& s : subsets) {
        nlohmann::ordered_json e;
        e["generators"] = s.gens_text;
        e["found"] = s.found;
        if (!s.found) e["result"] = "not-found-within-bounds";
        e["operator"] = op_json(s.op, vars);
        subs.push_back(std::move(e));
    }
    j["subsets"] = std::move(subs);
    return j.dump();
}

// ---------------------------------------------------------------------------
// Public: equality relative to a verified system
// ---------------------------------------------------------------------------

EqualityReport prove_equal(const Sequence& f, const Sequence& g, const AnnihilatorSystem& sys,
                           const std::vector<Point>& S, const std::optional<Window>& range) {
    if (!f.valid() || !g.valid()) throw UsageError("prove_equal needs valid sequences");
    if (f.rank() != g.rank() || f.rank() != sys.rank)
        throw UsageError("prove_equal needs sequences and system of one common rank");
    if (S.empty()) throw UsageError("prove_equal needs at least one base point");
    const int r = f.rank();
    for (const auto& p : S)
        if (static_cast<int>(p.size()) != r)
            throw UsageError("base point " + point_to_string(p) + " has the wrong rank");

    EqualityReport rep;
    for (const auto& p : S) {
        if (f.at(p) != g.at(p)) {
            rep.equal = false;
            rep.witness = p;
            rep.status = "mismatch";
            rep.message = "the sequences differ at " + point_to_string(p) + ": " +
                          f.at(p).str() + " vs " + g.at(p).str();
            return rep;
        }
    }

    Window wnd = sys.window.rank() == r ? sys.window : Window::cube(r, -4, 8);
    AnnihilatorSystem check = sys;
    if (auto bad = verify_system(check, f, wnd))
        throw UsageError("the system does not annihilate the first sequence at " +
                         point_to_string(*bad));
    check = sys;
    if (auto bad = verify_system(check, g, wnd))
        throw UsageError("the system does not annihilate the second sequence at " +
                         point_to_string(*bad));

    // Worklist propagation: a relation sum_beta c_beta(q, q^b) h(b + beta) = 0
    // determines one unknown value when its coefficient at the base point is
    // nonzero and every other involved point is known.
    Window target = range.value_or(wnd);
    if (target.rank() != r) throw UsageError("range rank does not match the sequences");
    std::set<Point> known(S.begin(), S.end());
    std::vector<Point> todo;
    target.for_each_point([&](const Point& p) {
        if (!known.count(p)) todo.push_back(p);
    });

    // Per operator: its beta-support with the M-part coefficient of each beta.
    struct Relation {
        std::vector<std::pair<Point, WeylOperator>> parts;  // (beta, coeff as M-only op)
    };
    std::vector<Relation> relations;
    for (const auto& op : sys.all_operators()) {
        std::map<Point, WeylOperator> by_beta;
        for (const auto& [key, coeff] : op.terms()) {
            Point alpha(key.begin(), key.begin() + r), beta(key.begin() + r, key.end());
            auto [it, fresh] = by_beta.try_emplace(
                beta, WeylOperator::monomial(r, op.sring(), alpha, Point(r, 0), coeff));
            if (!fresh)
                it->second = it->second +
                             WeylOperator::monomial(r, op.sring(), alpha, Point(r, 0), coeff);
        }
        Relation rel;
        for (auto& [beta, c] : by_beta) rel.parts.emplace_back(beta, std::move(c));
        // A single-beta relation c(b) h(b) = 0 still determines h(b) = 0
        // wherever c(b) != 0, so it is kept too.
        if (!rel.parts.empty()) relations.push_back(std::move(rel));
    }

    auto coeff_value = [&](const WeylOperator& c, const Point& b) {
        Scalar acc = Scalar::zero(c.sring());
        for (const auto& [key, coeff] : c.terms()) {
            std::int64_t e = 0;
            for (int i = 0; i < r; ++i) e += key[i] * b[i];
            acc += coeff * Scalar::q_power(c.sring(), e);
        }
        return acc;
    };

    bool progress = true;
    while (progress && !todo.empty()) {
        progress = false;
        for (std::size_t t = 0; t < todo.size();) {
            const Point& p = todo[t];
            bool determined = false;
            for (const auto& rel : relations) {
                for (const auto& [beta_star, c_star] : rel.parts) {
                    Point b(r);
                    for (int i = 0; i < r; ++i) b[i] = p[i] - beta_star[i];
                    bool others_known = true;
                    for (const auto& [beta, c] : rel.parts) {
                        if (beta == beta_star) continue;
                        Point u(r);
                        for (int i = 0; i < r; ++i) u[i] = b[i] + beta[i];
                        if (!known.count(u)) {
                            others_known = false;
                            break;
                        }
                    }
                    if (others_known && !coeff_value(c_star, b).is_zero()) {
                        determined = true;
                        break;
                    }
                }
                if (determined) break;
            }
            if (determined) {
                known.insert(p);
                todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(t));
                progress = true;
            } else {
                ++t;
            }
        }
    }
    if (!todo.empty())
        throw UsageError("the base points do not determine the value at " +
                         point_to_string(todo.front()) +
                         " through the system; enlarge the base set");

    rep.equal = true;
    rep.status = "equal-modulo-annihilator-claim";
    rep.message =
        "the sequences agree on the base points, and the system's relations determine every "
        "point of " +
        target.str() +
        " from them; equality there holds provided the system annihilates both sequences "
        "(re-verified on " +
        wnd.str() + ", which supports but does not certify that hypothesis)";
    return rep;
}

std::string EqualityReport::to_json(const std::vector<std::string>& vars) const {
    (void)vars;
    nlohmann::ordered_json j;
    j["schema"] = "qhol/1";
    j["kind"] = "equality-report";
    j["equal"] = equal;
    j["status"] = status;
    if (witness)
        j["witness"] = *witness;
    else
        j["witness"] = nullptr;
    j["message"] = message;
    return j.dump();
}

}  // namespace qhol
