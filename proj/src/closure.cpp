#include "qhol/closure.hpp"

#include "qhol/guess.hpp"
#include "qhol/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <iterator>
#include <map>
#include <span>
#include <utility>

namespace qhol {

namespace {

// ---------------------------------------------------------------------------
// The working field k(q, params)(M_1..M_r): scalars over the coefficient ring
// extended by one variable per axis, standing for M_i = q^{n_i}.
// ---------------------------------------------------------------------------

struct FieldCtx {
    int rank = 0;
    RingPtr sring;  ///< Operator coefficient ring (q, params).
    RingPtr ring;   ///< sring extended by the M variables.
    int base = 0;   ///< Ring index of the first M variable.
};

FieldCtx make_field(int rank, const RingPtr& sring, const std::vector<std::string>& vars) {
    FieldCtx F;
    F.rank = rank;
    F.sring = sring;
    std::vector<std::string> names = sring->names();
    F.base = static_cast<int>(names.size());
    for (int i = 0; i < rank; ++i) {
        std::string v = i < static_cast<int>(vars.size()) ? vars[static_cast<std::size_t>(i)]
                                                          : "t" + std::to_string(i + 1);
        while (std::find(names.begin(), names.end(), v) != names.end()) v += "_";
        names.push_back(v);
    }
    F.ring = PolyRing::make(std::move(names));
    return F;
}

/// M^alpha as a field element (negative exponents go to the denominator).
Scalar alpha_monomial(const FieldCtx& F, std::span<const std::int64_t> alpha) {
    Exps en(static_cast<std::size_t>(F.ring->size()), 0);
    Exps ed = en;
    bool denom = false;
    for (int i = 0; i < F.rank; ++i) {
        const std::int64_t e = alpha[static_cast<std::size_t>(i)];
        if (e >= 0) {
            en[static_cast<std::size_t>(F.base + i)] = e;
        } else {
            ed[static_cast<std::size_t>(F.base + i)] = -e;
            denom = true;
        }
    }
    Poly num = Poly::monomial(F.ring, en, 1);
    if (!denom) return Scalar::from_poly(num);
    return Scalar::fraction(num, Poly::monomial(F.ring, ed, 1));
}

/// An L-free operator (a Laurent polynomial in the M's with scalar
/// coefficients) as one field element.
Scalar to_field(const WeylOperator& op, const FieldCtx& F) {
    Scalar acc = Scalar::zero(F.ring);
    for (const auto& [key, c] : op.terms()) {
        for (int i = 0; i < F.rank; ++i)
            if (key[static_cast<std::size_t>(F.rank + i)] != 0)
                throw UsageError("coefficient operator is not L-free");
        acc += c.promoted(F.ring) *
               alpha_monomial(F, std::span(key.data(), static_cast<std::size_t>(F.rank)));
    }
    return acc;
}

/// p with every M_i scaled by q^{delta_i}; returned as (poly, s) meaning
/// q^s * poly with all exponents nonnegative (s <= 0).
std::pair<Poly, std::int64_t> shift_poly(const Poly& p, std::span<const std::int64_t> delta,
                                         const FieldCtx& F) {
    if (p.is_zero()) return {p, 0};
    std::vector<std::pair<Exps, BigInt>> terms;
    std::int64_t minq = 0;
    for (const auto& [e, c] : p.terms()) {
        std::int64_t add = 0;
        for (int i = 0; i < F.rank; ++i)
            add += delta[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(F.base + i)];
        Exps e2 = e;
        e2[0] += add;
        minq = std::min(minq, e2[0]);
        terms.emplace_back(std::move(e2), c);
    }
    Poly out(F.ring);
    for (auto& [e, c] : terms) {
        e[0] -= minq;
        out += Poly::monomial(F.ring, std::move(e), c);
    }
    return {out, minq};
}

/// The shift conjugation tau^delta: c(M_1,..,M_r) -> c(q^{d_1}M_1,..).
Scalar tau_shift(const Scalar& c, std::span<const std::int64_t> delta, const FieldCtx& F) {
    auto [n2, sn] = shift_poly(c.num(), delta, F);
    auto [d2, sd] = shift_poly(c.den(), delta, F);
    return Scalar::fraction(std::move(n2), std::move(d2)) * Scalar::q_power(F.ring, sn - sd);
}

/// Rewrites a field polynomial through M_i -> q^{b_i} * prod_j M'_j^{A_ij}
/// (the coefficient-side image of the reindexing m -> A m + b).
Scalar affine_subst_poly(const Poly& p, const FieldCtx& Fold, const FieldCtx& Fnew,
                         const std::vector<std::vector<std::int64_t>>& A,
                         const std::vector<std::int64_t>& b) {
    if (p.is_zero()) return Scalar::zero(Fnew.ring);
    const int r = Fold.rank, s = Fnew.rank;
    std::map<Exps, BigInt> terms;
    for (const auto& [e, c] : p.terms()) {
        Exps e2(static_cast<std::size_t>(Fnew.ring->size()), 0);
        for (int v = 0; v < Fold.base; ++v) e2[static_cast<std::size_t>(v)] = e[static_cast<std::size_t>(v)];
        for (int i = 0; i < r; ++i) {
            const std::int64_t ei = e[static_cast<std::size_t>(Fold.base + i)];
            if (ei == 0) continue;
            e2[0] += b[static_cast<std::size_t>(i)] * ei;
            for (int j = 0; j < s; ++j)
                e2[static_cast<std::size_t>(Fnew.base + j)] +=
                    A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * ei;
        }
        terms[e2] += c;
    }
    Exps mins(static_cast<std::size_t>(Fnew.ring->size()), 0);
    for (const auto& [e, c] : terms)
        for (std::size_t v = 0; v < e.size(); ++v) mins[v] = std::min(mins[v], e[v]);
    Poly num(Fnew.ring);
    for (const auto& [e, c] : terms) {
        if (c == 0) continue;
        Exps e2 = e;
        for (std::size_t v = 0; v < e2.size(); ++v) e2[v] -= mins[v];
        num += Poly::monomial(Fnew.ring, std::move(e2), c);
    }
    if (num.is_zero()) return Scalar::zero(Fnew.ring);
    Exps dexp(static_cast<std::size_t>(Fnew.ring->size()), 0);
    for (std::size_t v = 0; v < dexp.size(); ++v) dexp[v] = -mins[v];
    return Scalar::fraction(std::move(num), Poly::monomial(Fnew.ring, std::move(dexp), 1));
}

/// Whether the field polynomial vanishes identically once M_i -> q^{p_i}.
bool vanishes_at_point(const Poly& p, const FieldCtx& F, std::span<const std::int64_t> pt) {
    std::map<Exps, BigInt> acc;
    for (const auto& [e, c] : p.terms()) {
        Exps key(static_cast<std::size_t>(F.base), 0);
        for (int v = 0; v < F.base; ++v) key[static_cast<std::size_t>(v)] = e[static_cast<std::size_t>(v)];
        for (int i = 0; i < F.rank; ++i)
            key[0] += pt[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(F.base + i)];
        acc[key] += c;
    }
    for (const auto& [k, c] : acc)
        if (c != 0) return false;
    return true;
}

/// A field polynomial as an M-and-L operator with the given L part.
WeylOperator field_poly_to_operator(const Poly& p, const FieldCtx& F, const Exps& beta) {
    std::map<Exps, Poly> groups;  // alpha -> coefficient polynomial over sring
    for (const auto& [e, c] : p.terms()) {
        Exps alpha(static_cast<std::size_t>(F.rank), 0);
        Exps se(static_cast<std::size_t>(F.base), 0);
        for (int v = 0; v < F.base; ++v) se[static_cast<std::size_t>(v)] = e[static_cast<std::size_t>(v)];
        for (int i = 0; i < F.rank; ++i)
            alpha[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(F.base + i)];
        auto it = groups.find(alpha);
        Poly mono = Poly::monomial(F.sring, std::move(se), c);
        if (it == groups.end())
            groups.emplace(std::move(alpha), std::move(mono));
        else
            it->second += mono;
    }
    WeylOperator op(F.rank, F.sring);
    for (const auto& [alpha, poly] : groups)
        if (!poly.is_zero()) op.add_term(alpha, beta, Scalar::from_poly(poly));
    return op;
}

// ---------------------------------------------------------------------------
// Shift reduction modulo a system: expresses L^delta f over the finite basis
// {L^beta f : 0 <= beta_i < d_i}, dividing only by logged, accepted pivots.
// ---------------------------------------------------------------------------

using AcceptFn = std::function<bool(const Scalar&)>;

struct Rule2 {
    Exps g1;
    Scalar c1;
    Exps g2;
    Scalar c2;
};

struct Reducer {
    const FieldCtx& F;
    std::vector<std::int64_t> ord;       ///< Per axis L-degree; -1 when unloaded.
    std::vector<std::vector<Scalar>> a;  ///< a[axis][s] for loaded axes.
    std::vector<std::pair<Exps, Scalar>> rule0;  ///< c(M) L^g0 f = 0.
    std::vector<Rule2> rule2;                    ///< c1 L^g1 f + c2 L^g2 f = 0.
    AcceptFn accept;
    std::vector<Poly>* log = nullptr;
    bool zero_dim = false;
    std::size_t D = 1;

    explicit Reducer(const FieldCtx& f) : F(f) {}

    void log_divisor(const Scalar& div) const {
        const Poly& p = div.num();
        for (const Poly& seen : *log)
            if (seen == p) return;
        log->push_back(p);
    }

    std::int64_t dist_to_box(const Exps& delta) const {
        std::int64_t dd = 0;
        for (int i = 0; i < F.rank; ++i) {
            const std::int64_t di = delta[static_cast<std::size_t>(i)];
            if (ord[static_cast<std::size_t>(i)] < 1) {
                dd += di < 0 ? -di : di;  // unloaded axes must sit at zero
                continue;
            }
            if (di < 0)
                dd += -di;
            else if (di >= ord[static_cast<std::size_t>(i)])
                dd += di - ord[static_cast<std::size_t>(i)] + 1;
        }
        return dd;
    }

    std::size_t box_index(const Exps& beta) const {
        std::size_t idx = 0, stride = 1;
        for (int i = 0; i < F.rank; ++i) {
            if (ord[static_cast<std::size_t>(i)] < 1) continue;
            idx += static_cast<std::size_t>(beta[static_cast<std::size_t>(i)]) * stride;
            stride *= static_cast<std::size_t>(ord[static_cast<std::size_t>(i)]);
        }
        return idx;
    }

    std::optional<std::vector<Scalar>> reduce(const Exps& delta0) const;
};

void add_entry(std::map<Exps, Scalar>& cur, Exps key, const Scalar& val) {
    auto it = cur.find(key);
    if (it == cur.end())
        cur.emplace(std::move(key), val);
    else
        it->second += val;
}

std::optional<std::vector<Scalar>> Reducer::reduce(const Exps& delta0) const {
    if (zero_dim) {
        // The module is zero-dimensional: every shift of f is annihilated by
        // a shifted order-0 coefficient, which becomes the divisor.
        for (int i = 0; i < F.rank; ++i) {
            if (ord[static_cast<std::size_t>(i)] != 0) continue;
            Scalar div = tau_shift(a[static_cast<std::size_t>(i)][0], delta0, F);
            if (!accept(div)) continue;
            log_divisor(div);
            return std::vector<Scalar>{};
        }
        for (const auto& [g0, c0] : rule0) {
            Exps sh = delta0;
            for (std::size_t v = 0; v < sh.size(); ++v) sh[v] -= g0[v];
            Scalar div = tau_shift(c0, sh, F);
            if (!accept(div)) continue;
            log_divisor(div);
            return std::vector<Scalar>{};
        }
        return std::nullopt;
    }

    std::map<Exps, Scalar> cur;
    cur.emplace(delta0, Scalar::one(F.ring));
    std::vector<Scalar> out(D, Scalar::zero(F.ring));
    while (!cur.empty()) {
        auto top = std::prev(cur.end());
        const Exps delta = top->first;
        const Scalar coeff = top->second;
        cur.erase(top);
        if (coeff.is_zero()) continue;
        const std::int64_t dist = dist_to_box(delta);
        if (dist == 0) {
            out[box_index(delta)] += coeff;
            continue;
        }
        bool applied = false;
        // Rule 1: forward substitution of the direction recurrence.
        for (int i = 0; i < F.rank && !applied; ++i) {
            const std::int64_t d = ord[static_cast<std::size_t>(i)];
            if (d < 1 || delta[static_cast<std::size_t>(i)] < d) continue;
            Exps sh = delta;
            sh[static_cast<std::size_t>(i)] -= d;
            Scalar lead = tau_shift(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)], sh, F);
            if (!accept(lead)) continue;
            log_divisor(lead);
            for (std::int64_t s2 = 0; s2 < d; ++s2) {
                const Scalar& as = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(s2)];
                if (as.is_zero()) continue;
                Exps nd = delta;
                nd[static_cast<std::size_t>(i)] -= d - s2;
                add_entry(cur, std::move(nd), coeff * (-tau_shift(as, sh, F) / lead));
            }
            applied = true;
        }
        // Rule 2: backward substitution via the trailing coefficient.
        for (int i = 0; i < F.rank && !applied; ++i) {
            const std::int64_t d = ord[static_cast<std::size_t>(i)];
            if (d < 1 || delta[static_cast<std::size_t>(i)] >= 0) continue;
            const Scalar& a0 = a[static_cast<std::size_t>(i)][0];
            if (a0.is_zero()) continue;
            Scalar trail = tau_shift(a0, delta, F);
            if (!accept(trail)) continue;
            log_divisor(trail);
            for (std::int64_t s2 = 1; s2 <= d; ++s2) {
                const Scalar& as = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(s2)];
                if (as.is_zero()) continue;
                Exps nd = delta;
                nd[static_cast<std::size_t>(i)] += s2;
                add_entry(cur, std::move(nd), coeff * (-tau_shift(as, delta, F) / trail));
            }
            applied = true;
        }
        // Rule 3: order-0 extra relations kill the entry outright.
        for (std::size_t e = 0; e < rule0.size() && !applied; ++e) {
            Exps sh = delta;
            for (std::size_t v = 0; v < sh.size(); ++v) sh[v] -= rule0[e].first[v];
            Scalar div = tau_shift(rule0[e].second, sh, F);
            if (!accept(div)) continue;
            log_divisor(div);
            applied = true;
        }
        // Rule 4: two-term extra rewrites, only when they move toward the box.
        for (std::size_t e = 0; e < rule2.size() && !applied; ++e) {
            for (int orient = 0; orient < 2 && !applied; ++orient) {
                const Exps& gf = orient == 0 ? rule2[e].g1 : rule2[e].g2;
                const Exps& gt = orient == 0 ? rule2[e].g2 : rule2[e].g1;
                const Scalar& cf = orient == 0 ? rule2[e].c1 : rule2[e].c2;
                const Scalar& ct = orient == 0 ? rule2[e].c2 : rule2[e].c1;
                Exps nd = delta;
                for (std::size_t v = 0; v < nd.size(); ++v) nd[v] += gt[v] - gf[v];
                if (dist_to_box(nd) >= dist) continue;
                Exps sh = delta;
                for (std::size_t v = 0; v < sh.size(); ++v) sh[v] -= gf[v];
                Scalar div = tau_shift(cf, sh, F);
                if (!accept(div)) continue;
                log_divisor(div);
                add_entry(cur, std::move(nd), coeff * (-tau_shift(ct, sh, F) / div));
                applied = true;
            }
        }
        if (!applied) return std::nullopt;
    }
    return out;
}

Reducer make_reducer(const AnnihilatorSystem& sys, const FieldCtx& F,
                     const std::vector<int>& axes, AcceptFn accept, std::vector<Poly>* log,
                     bool with_extras) {
    Reducer R(F);
    R.ord.assign(static_cast<std::size_t>(F.rank), -1);
    R.a.resize(static_cast<std::size_t>(F.rank));
    R.accept = std::move(accept);
    R.log = log;
    for (int axis : axes) {
        const WeylOperator& op = sys.dir(axis);
        if (op.lowest_degree_L(axis) < 0)
            throw UsageError("direction operator has a negative L exponent");
        const std::int64_t d = op.degree_L(axis);
        R.ord[static_cast<std::size_t>(axis)] = d;
        for (std::int64_t s = 0; s <= d; ++s)
            R.a[static_cast<std::size_t>(axis)].push_back(
                to_field(l_coefficient(op, axis, s), F));
    }
    if (with_extras) {
        for (const WeylOperator& ex : sys.extras) {
            std::map<Exps, Scalar> by_beta;
            for (const auto& [key, c] : ex.terms()) {
                Exps beta(key.begin() + F.rank, key.end());
                Scalar part =
                    c.promoted(F.ring) *
                    alpha_monomial(F, std::span(key.data(), static_cast<std::size_t>(F.rank)));
                auto it = by_beta.find(beta);
                if (it == by_beta.end())
                    by_beta.emplace(std::move(beta), std::move(part));
                else
                    it->second += part;
            }
            for (auto it = by_beta.begin(); it != by_beta.end();)
                it = it->second.is_zero() ? by_beta.erase(it) : std::next(it);
            if (by_beta.size() == 1) {
                R.rule0.emplace_back(by_beta.begin()->first, by_beta.begin()->second);
            } else if (by_beta.size() == 2) {
                auto it = by_beta.begin();
                Rule2 rr;
                rr.g1 = it->first;
                rr.c1 = it->second;
                ++it;
                rr.g2 = it->first;
                rr.c2 = it->second;
                R.rule2.push_back(std::move(rr));
            }
        }
    }
    R.zero_dim = false;
    R.D = 1;
    for (int axis : axes) {
        const std::int64_t d = R.ord[static_cast<std::size_t>(axis)];
        if (d == 0)
            R.zero_dim = true;
        else
            R.D *= static_cast<std::size_t>(d);
    }
    if (R.zero_dim) R.D = 0;
    return R;
}

// ---------------------------------------------------------------------------
// Candidate assembly, verification, and divisor patching.
// ---------------------------------------------------------------------------

using SubstFn = std::function<Scalar(const Poly&)>;

/// Clears denominators of the dependence (product of the distinct ones) and
/// assembles a polynomial-coefficient operator sum_t coeff_t L_axis^t.
WeylOperator assemble_candidate(const std::vector<Scalar>& dep, int axis, const FieldCtx& F) {
    Poly lcd = Poly::constant(F.ring, 1);
    std::vector<const Poly*> seen;
    for (const Scalar& c : dep) {
        if (c.is_zero() || c.den().is_one()) continue;
        bool dup = false;
        for (const Poly* s : seen) dup = dup || *s == c.den();
        if (!dup) {
            seen.push_back(&c.den());
            lcd *= c.den();
        }
    }
    WeylOperator op(F.rank, F.sring);
    for (std::size_t t = 0; t < dep.size(); ++t) {
        if (dep[t].is_zero()) continue;
        Poly w = dep[t].num() * Poly::div_exact(lcd, dep[t].den());
        Exps beta(static_cast<std::size_t>(F.rank), 0);
        beta[static_cast<std::size_t>(axis)] = static_cast<std::int64_t>(t);
        op += field_poly_to_operator(w, F, beta);
    }
    return op;
}

/// Verifies and repairs a candidate: left-multiplies by the image of a logged
/// divisor vanishing at each failure point.  Every patch permanently fixes a
/// point and never unfixes one, so the loop terminates.
WeylOperator patch_verify(const WeylOperator& cand, const Sequence& h,
                          const std::vector<Poly>& log, const SubstFn& S, const FieldCtx& Fout,
                          const Window& w, const std::string& what) {
    WeylOperator op = canonical_operator_form(cand);
    if (op.is_zero()) throw Error("internal: " + what + " produced the zero operator");
    const std::uint64_t limit = w.point_count() + 8;
    for (std::uint64_t iter = 0; iter < limit; ++iter) {
        const auto p = verify_operator(op, h, w);
        if (!p) return op;
        bool patched = false;
        for (const Poly& d : log) {
            Scalar sd = S(d);
            if (sd.is_zero()) continue;
            if (!vanishes_at_point(sd.num(), Fout, *p)) continue;
            Exps zero(static_cast<std::size_t>(Fout.rank), 0);
            op = canonical_operator_form(field_poly_to_operator(sd.num(), Fout, zero) * op);
            patched = true;
            break;
        }
        if (!patched)
            throw Error("internal: " + what + " verification failed at " + point_to_string(*p) +
                        " with no applicable divisor");
    }
    throw Error("internal: " + what + " verification did not stabilize");
}

const AnnihilatorSystem& system_of(const Sequence& f, const std::string& what) {
    if (!f.valid()) throw UsageError(what + ": invalid sequence");
    const auto& sys = f.system();
    if (!sys)
        throw UsageError(what + ": '" + f.name() +
                         "' carries no recurrence system (attach a builtin or guessed one)");
    sys->validate();
    return *sys;
}

WeylOperator closure_pair(const Sequence& f, const Sequence& g, int axis, bool product,
                          const std::optional<Window>& window) {
    const std::string what = product ? "product closure" : "sum closure";
    const AnnihilatorSystem& fs = system_of(f, what);
    const AnnihilatorSystem& gs = system_of(g, what);
    const int r = f.rank();
    if (g.rank() != r) throw UsageError(what + ": rank mismatch");
    if (axis < 0 || axis >= r) throw UsageError(what + ": axis out of range");
    if (!fs.has_direction(axis) || !gs.has_direction(axis))
        throw UsageError(what + ": both inputs need a direction operator for axis " +
                         std::to_string(axis));
    RingPtr sring = ring_union(f.sring(), g.sring());
    FieldCtx F = make_field(r, sring, f.vars());
    std::vector<Poly> log;
    AcceptFn always = [](const Scalar&) { return true; };
    Reducer Rf = make_reducer(fs, F, {axis}, always, &log, false);
    Reducer Rg = make_reducer(gs, F, {axis}, always, &log, false);
    const std::size_t df = Rf.D, dg = Rg.D;
    const std::size_t D = product ? df * dg : df + dg;
    ScalarDependenceFinder finder(D, F.ring);
    std::vector<Scalar> dep;
    for (std::size_t t = 0; t <= D && dep.empty(); ++t) {
        Exps delta(static_cast<std::size_t>(r), 0);
        delta[static_cast<std::size_t>(axis)] = static_cast<std::int64_t>(t);
        auto vf = Rf.reduce(delta);
        auto vg = Rg.reduce(delta);
        if (!vf || !vg) throw Error("internal: " + what + " reduction failed");
        std::vector<Scalar> v;
        if (product) {
            v.reserve(df * dg);
            for (std::size_t ia = 0; ia < df; ++ia)
                for (std::size_t ib = 0; ib < dg; ++ib) v.push_back((*vf)[ia] * (*vg)[ib]);
        } else {
            v = std::move(*vf);
            v.insert(v.end(), vg->begin(), vg->end());
        }
        if (auto dd = finder.offer(std::move(v))) dep = std::move(*dd);
    }
    if (dep.empty()) throw Error("internal: " + what + " found no dependence within the bound");
    WeylOperator cand = assemble_candidate(dep, axis, F);
    Sequence h = product ? seq_mul(f, g) : seq_add(f, g);
    const Window w = window ? *window : closure_default_window(r);
    SubstFn identity = [](const Poly& p) { return Scalar::from_poly(p); };
    WeylOperator op = patch_verify(cand, h, log, identity, F, w, what);
    if (op.degree_L(axis) > static_cast<std::int64_t>(D))
        throw Error("internal: " + what + " exceeded its structural order bound");
    return op;
}

AnnihilatorSystem closure_pair_system(const Sequence& f, const Sequence& g, bool product,
                                      const std::optional<Window>& window) {
    const std::string what = product ? "product closure" : "sum closure";
    const AnnihilatorSystem& fs = system_of(f, what);
    const AnnihilatorSystem& gs = system_of(g, what);
    const int r = f.rank();
    if (g.rank() != r) throw UsageError(what + ": rank mismatch");
    AnnihilatorSystem out;
    out.rank = r;
    out.provenance = product ? "closure:mul" : "closure:sum";
    for (int axis = 0; axis < r; ++axis)
        if (fs.has_direction(axis) && gs.has_direction(axis))
            out.direction.emplace(axis, closure_pair(f, g, axis, product, window));
    if (out.direction.empty())
        throw UsageError(what + ": the input systems share no direction operators");
    Sequence h = product ? seq_mul(f, g) : seq_add(f, g);
    const Window w = window ? *window : closure_default_window(r);
    if (auto bad = verify_system(out, h, w))
        throw Error("internal: " + what + " system failed re-verification at " +
                    point_to_string(*bad));
    return out;
}

}  // namespace

Window closure_default_window(int rank) { return Window::cube(rank, -6, 10); }

WeylOperator closure_sum(const Sequence& f, const Sequence& g, int axis,
                         const std::optional<Window>& window) {
    return closure_pair(f, g, axis, false, window);
}

WeylOperator closure_mul(const Sequence& f, const Sequence& g, int axis,
                         const std::optional<Window>& window) {
    return closure_pair(f, g, axis, true, window);
}

AnnihilatorSystem closure_sum_system(const Sequence& f, const Sequence& g,
                                     const std::optional<Window>& window) {
    return closure_pair_system(f, g, false, window);
}

AnnihilatorSystem closure_mul_system(const Sequence& f, const Sequence& g,
                                     const std::optional<Window>& window) {
    return closure_pair_system(f, g, true, window);
}

AnnihilatorSystem closure_affine(const Sequence& f,
                                 const std::vector<std::vector<std::int64_t>>& A,
                                 const std::vector<std::int64_t>& b,
                                 const std::optional<Window>& window) {
    const std::string what = "affine closure";
    const AnnihilatorSystem& fs = system_of(f, what);
    const int r = f.rank();
    if (!fs.rectangular())
        throw UsageError(what +
                         ": the input system must cover every direction; the guessing module "
                         "can supply missing ones");
    if (static_cast<int>(A.size()) != r || static_cast<int>(b.size()) != r)
        throw UsageError(what + ": need one row of A and one entry of b per input axis");
    const int s = A.empty() ? 0 : static_cast<int>(A.front().size());
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != s) throw UsageError(what + ": ragged matrix");
    if (s < 1) throw UsageError(what + ": need at least one output variable");

    Sequence g = seq_affine(f, A, b);
    FieldCtx Fold = make_field(r, f.sring(), f.vars());
    FieldCtx Fnew = make_field(s, f.sring(), g.vars());
    SubstFn S = [&Fold, &Fnew, &A, &b](const Poly& p) {
        return affine_subst_poly(p, Fold, Fnew, A, b);
    };
    std::vector<Poly> log;
    AcceptFn accept = [&S](const Scalar& div) { return !S(div.num()).is_zero(); };
    std::vector<int> axes;
    for (int i = 0; i < r; ++i) axes.push_back(i);
    Reducer R = make_reducer(fs, Fold, axes, accept, &log, true);
    const Window w = window ? *window : closure_default_window(s);

    AnnihilatorSystem out;
    out.rank = s;
    out.provenance = "closure:affine";
    for (int j = 0; j < s; ++j) {
        ScalarDependenceFinder finder(R.D, Fold.ring);
        std::vector<Scalar> dep;
        for (std::size_t t = 0; t <= R.D && dep.empty(); ++t) {
            Exps delta(static_cast<std::size_t>(r), 0);
            for (int i = 0; i < r; ++i)
                delta[static_cast<std::size_t>(i)] =
                    static_cast<std::int64_t>(t) * A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            auto red = R.reduce(delta);
            if (!red)
                throw DegenerateInputError(
                    what + ": every reduction pivot for direction '" + g.vars()[static_cast<std::size_t>(j)] +
                    "' vanishes under the substitution, so the input system cannot see the "
                    "image stratum; use the guessing module instead");
            if (auto dd = finder.offer(std::move(*red))) dep = std::move(*dd);
        }
        if (dep.empty()) throw Error("internal: " + what + " found no dependence");
        // Clear denominators over the input field first (the dependence then
        // has polynomial coefficients), push the polynomials through the
        // substitution, and clear the monomial denominators that introduces.
        WeylOperator cleared = assemble_candidate(dep, 0, Fold);
        std::vector<std::pair<std::int64_t, Scalar>> images;
        for (std::int64_t t = 0; t <= cleared.degree_L(0); ++t) {
            Scalar img = to_field(l_coefficient(cleared, 0, t), Fold);
            // The cleared coefficients are polynomials; substitute them.
            Scalar sub = S(img.num());
            if (!img.den().is_one()) sub = sub / S(img.den());
            if (!sub.is_zero()) images.emplace_back(t, std::move(sub));
        }
        if (images.empty())
            throw DegenerateInputError(what + ": the candidate for direction '" +
                                       g.vars()[static_cast<std::size_t>(j)] +
                                       "' vanishes under the substitution; use the guessing "
                                       "module instead");
        std::vector<Scalar> dep2;
        dep2.assign(static_cast<std::size_t>(images.back().first) + 1, Scalar::zero(Fnew.ring));
        for (auto& [t, img] : images) dep2[static_cast<std::size_t>(t)] = std::move(img);
        WeylOperator cand = assemble_candidate(dep2, j, Fnew);
        WeylOperator op = patch_verify(cand, g, log, S, Fnew, w, what);
        if (op.degree_L(j) > static_cast<std::int64_t>(R.D))
            throw Error("internal: " + what + " exceeded its structural order bound");
        out.direction.emplace(j, std::move(op));
    }
    if (auto bad = verify_system(out, g, w))
        throw Error("internal: " + what + " system failed re-verification at " +
                    point_to_string(*bad));
    return out;
}

}  // namespace qhol
