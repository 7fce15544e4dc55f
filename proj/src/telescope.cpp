#include "qhol/telescope.hpp"

#include "qhol/linalg.hpp"

#include "json.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace qhol {

namespace {

/// Unknown-count budget: ladder rungs whose ansatz exceeds it are skipped
/// (exact elimination at that size would not finish in reasonable time).
constexpr std::size_t kUnknownBudget = 5000;

struct Rung {
    int J, degM, degQ;
    bool operator==(const Rung&) const = default;
};

/// Sub-bound ladder: cheap rungs first (a certificate found low is also a
/// certificate for the full bounds), then the requested bounds, then one
/// doubling when allowed.
std::vector<Rung> ladder(const TelescopeBounds& b) {
    std::vector<Rung> out;
    auto push = [&out](Rung r) {
        if (out.empty() || !(out.back() == r)) out.push_back(r);
    };
    for (Rung r : {Rung{1, 1, 2}, Rung{2, 2, 4}, Rung{3, 4, 6}}) {
        if (r.J <= b.J && r.degM <= b.degM && r.degQ <= b.degQ) push(r);
    }
    push(Rung{b.J, b.degM, b.degQ});
    if (b.double_once) push(Rung{2 * b.J, 2 * b.degM, 2 * b.degQ});
    return out;
}

/// The per-unknown operators: T monomials q^qd M_n^md L_n^j, then R
/// monomials wrapped as -(L_k - 1) q^qd M_n^m1 M_k^m2 L_n^a L_k^b.  Columns
/// are (is_T, op for the linear form, bare R monomial).
struct Column {
    bool in_T;
    WeylOperator form;  ///< Contribution to (T - (L_k-1)R) per unit of u.
    WeylOperator bare;  ///< The monomial itself (T term or R term).
};

std::vector<Column> build_columns(const Rung& r, const RingPtr& ring) {
    std::vector<Column> cols;
    WeylOperator lk(2, ring);
    lk.add_term({0, 0}, {0, 1}, Scalar::one(ring));
    WeylOperator one(2, ring);
    one.add_term({0, 0}, {0, 0}, Scalar::one(ring));
    for (int j = 0; j <= r.J; ++j) {
        for (int md = 0; md <= r.degM; ++md) {
            for (int qd = 0; qd <= r.degQ; ++qd) {
                WeylOperator m(2, ring);
                m.add_term({md, 0}, {j, 0}, Scalar::q_power(ring, qd));
                cols.push_back({true, m, m});
            }
        }
    }
    for (int a = 0; a <= r.J; ++a) {
        for (int b = 0; b <= r.J; ++b) {
            for (int m1 = 0; m1 <= r.degM; ++m1) {
                for (int m2 = 0; m2 <= r.degM; ++m2) {
                    for (int qd = 0; qd <= r.degQ; ++qd) {
                        WeylOperator m(2, ring);
                        m.add_term({m1, m2}, {a, b}, Scalar::q_power(ring, qd));
                        cols.push_back({false, one * m - lk * m, m});
                    }
                }
            }
        }
    }
    return cols;
}

/// Points ordered cheapest-first (small L1 norm, then lex).
std::vector<Point> ordered_points(const Window& w) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(w.point_count()));
    w.for_each_point([&pts](const Point& p) { pts.push_back(p); });
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        std::int64_t na = 0, nb = 0;
        for (std::int64_t v : a) na += v < 0 ? -v : v;
        for (std::int64_t v : b) nb += v < 0 ? -v : v;
        if (na != nb) return na < nb;
        return a < b;
    });
    return pts;
}

std::vector<Scalar> column_values(const std::vector<Column>& cols, const Sequence& f,
                                  const Point& p) {
    std::vector<Scalar> vals;
    vals.reserve(cols.size());
    for (const Column& c : cols) vals.push_back(weyl_apply(c.form, f, p));
    return vals;
}

/// Assembles (T, R) from an integer-scaled solution vector.
std::pair<WeylOperator, WeylOperator> assemble(const std::vector<Column>& cols,
                                               const std::vector<BigRat>& u,
                                               const RingPtr& ring) {
    WeylOperator T(2, ring), R(2, ring);
    for (std::size_t m = 0; m < cols.size(); ++m) {
        if (u[m] == 0) continue;
        const BigInt num = boost::multiprecision::numerator(u[m]);
        assert(boost::multiprecision::denominator(u[m]) == 1);
        WeylOperator scaled(2, ring);
        for (const auto& [key, c] : cols[m].bare.terms())
            scaled.add_term(Exps(key.begin(), key.begin() + 2), Exps(key.begin() + 2, key.end()),
                            c * Scalar::integer(ring, num));
        if (cols[m].in_T)
            T += scaled;
        else
            R += scaled;
    }
    return {std::move(T), std::move(R)};
}

Window default_eval_window(std::size_t unknowns) {
    const auto e = static_cast<std::int64_t>(
        std::max(8.0, std::ceil(std::sqrt(2.0 * static_cast<double>(unknowns)))));
    return Window::cube(2, 0, e);
}

Window expand_verify_window(const Window& eval_w, const Sequence& f) {
    Window w = eval_w;
    for (int i = 0; i < w.rank(); ++i) {
        auto& [lo, hi] = w.axes[static_cast<std::size_t>(i)];
        if (f.domains()[static_cast<std::size_t>(i)] == AxisDomain::FullLine)
            lo = std::min<std::int64_t>(lo, 0) - 4;
        hi += 4;
    }
    return w;
}

/// (T - (L_k - 1) R) as one rank-2 operator.
WeylOperator residual_operator(const WeylOperator& T, const WeylOperator& R,
                               const RingPtr& ring) {
    WeylOperator lk(2, ring);
    lk.add_term({0, 0}, {0, 1}, Scalar::one(ring));
    return T - (lk * R - R);
}

/// T with the summation axis removed (requires it to be unused there).
WeylOperator project_telescoper(const WeylOperator& T, const RingPtr& ring) {
    WeylOperator out(1, ring);
    for (const auto& [key, c] : T.terms()) {
        if (key[1] != 0 || key[3] != 0)
            throw UsageError("telescoper uses the summation axis");
        out.add_term({key[0]}, {key[2]}, c);
    }
    return out;
}

/// T acting on the first of three axes.
WeylOperator embed_telescoper_rank3(const WeylOperator& T, const RingPtr& ring) {
    WeylOperator out(3, ring);
    for (const auto& [key, c] : T.terms())
        out.add_term({key[0], 0, 0}, {key[2], 0, 0}, c);
    return out;
}

}  // namespace

TelescopingCertificate telescope_search(const Sequence& f, const TelescopeBounds& bounds,
                                        const std::optional<Window>& eval_window) {
    if (!f.valid()) throw UsageError("telescoping: invalid sequence");
    if (f.rank() != 2) throw UsageError("telescoping expects a rank-2 summand");
    if (bounds.J < 0 || bounds.degM < 0 || bounds.degQ < 0)
        throw UsageError("telescoping bounds must be nonnegative");
    const RingPtr& ring = f.sring();
    std::vector<Rung> skipped;
    for (const Rung& rung : ladder(bounds)) {
        std::vector<Column> cols = build_columns(rung, ring);
        const std::size_t U = cols.size();
        if (U > kUnknownBudget) {
            skipped.push_back(rung);
            continue;
        }
        const Window eval_w = eval_window ? *eval_window : default_eval_window(U);
        if (eval_w.rank() != 2) throw UsageError("telescoping eval window must have rank 2");
        const Window verify_w = expand_verify_window(eval_w, f);

        // Phase 1: modular-only scan.  Full modular rank proves the exact
        // solution space is empty, at a fraction of the exact cost; the
        // independent rows are kept for the exact phase.
        ModularRankTracker filter(U);
        std::vector<SparseRow> cutting;
        int stagnant = 0;
        for (const Point& p : ordered_points(eval_w)) {
            bool cut_here = false;
            std::vector<Scalar> vals = column_values(cols, f, p);
            for (SparseRow& row : linear_form_rows(vals, U)) {
                if (filter.process_row(row)) {
                    cutting.push_back(std::move(row));
                    cut_here = true;
                }
            }
            stagnant = cut_here ? 0 : stagnant + 1;
            if (filter.full() || stagnant >= 3) break;
        }
        if (filter.full()) continue;  // provably nothing at this rung

        // Phase 2: exact space from the independent rows, then verify
        // candidates and repair with the full row set of any failing point.
        NullspaceTracker space(U);
        for (const SparseRow& row : cutting) space.process_row(row);
        while (!space.empty()) {
            auto basis = space.reduced_basis();
            std::optional<std::pair<WeylOperator, WeylOperator>> picked;
            for (const auto& u : basis) {
                bool has_T = false;
                for (std::size_t m = 0; m < cols.size() && !has_T; ++m)
                    has_T = cols[m].in_T && u[m] != 0;
                if (!has_T) continue;
                picked = assemble(cols, u, ring);
                break;
            }
            if (!picked) break;  // only telescoper-free junk left
            const WeylOperator P = residual_operator(picked->first, picked->second, ring);
            std::optional<Point> bad;
            for (const Point& p : ordered_points(verify_w)) {
                if (!weyl_apply(P, f, p).is_zero()) {
                    bad = p;
                    break;
                }
            }
            if (!bad) {
                TelescopingCertificate cert;
                cert.axis = 1;
                cert.T = std::move(picked->first);
                cert.R = std::move(picked->second);
                cert.window = verify_w;
                cert.status = VerifyStatus::WindowVerified;
                return cert;
            }
            // No row cap: the failing candidate pairs nonzero with some row
            // of this point, so the space strictly shrinks.
            std::vector<Scalar> vals = column_values(cols, f, *bad);
            bool cut = false;
            for (const SparseRow& row :
                 linear_form_rows(vals, std::numeric_limits<std::size_t>::max()))
                cut = space.process_row(row) || cut;
            if (!cut)
                throw Error("internal: telescoping repair failed to cut at " +
                            point_to_string(*bad));
        }
    }
    std::string msg = "telescoping certificate not found within bounds (J=" +
                      std::to_string(bounds.J) + ", degM=" + std::to_string(bounds.degM) +
                      ", degQ=" + std::to_string(bounds.degQ) + ")";
    if (!skipped.empty()) {
        msg += "; rungs above the unknown budget were skipped:";
        for (const Rung& r : skipped)
            msg += " (J=" + std::to_string(r.J) + ", degM=" + std::to_string(r.degM) +
                   ", degQ=" + std::to_string(r.degQ) + ")";
    }
    throw NotFoundError(msg);
}

std::string TelescopingCertificate::to_json(const std::vector<std::string>& names) const {
    nlohmann::ordered_json j;
    j["axis"] = axis;
    j["T"] = T.str(names);
    j["R"] = R.str(names);
    nlohmann::ordered_json jw = nlohmann::ordered_json::array();
    for (const auto& [lo, hi] : window.axes) jw.push_back({lo, hi});
    j["window"] = std::move(jw);
    j["status"] = to_string(status);
    return j.dump();
}

TelescopeReport telescope_check(const Sequence& f, const TelescopingCertificate& cert,
                                const Window& window,
                                const std::optional<std::pair<std::int64_t, std::int64_t>>&
                                    sum_range) {
    if (!f.valid()) throw UsageError("telescoping check: invalid sequence");
    if (f.rank() != 2 || window.rank() != 2)
        throw UsageError("telescoping check expects a rank-2 summand and window");
    if (cert.axis != 1) throw UsageError("only summation over the last axis is supported");
    const RingPtr ring = ring_union(f.sring(), cert.T.sring());
    const WeylOperator T = cert.T.promoted(ring);
    const WeylOperator R = cert.R.promoted(ring);
    TelescopeReport rep;
    rep.induced = project_telescoper(T, ring);
    if (T.is_zero()) {
        rep.message = "telescoper is zero";
        return rep;
    }

    // (1) The defining identity, point by point.
    const WeylOperator P = residual_operator(T, R, ring);
    Window w2 = window;
    w2.for_each_point([&](const Point& p) {
        if (rep.residual_witness) return;
        if (!weyl_apply(P, f, p).is_zero()) rep.residual_witness = p;
    });
    if (rep.residual_witness) {
        rep.message = "defining identity fails at " + point_to_string(*rep.residual_witness);
        return rep;
    }

    const auto [nlo, nhi] = window.axes[0];
    if (sum_range) {
        // (2a) Bounded sums: T applied to g(n, a, b) = sum_{t=a}^{b} f(n, t)
        // must equal the boundary correction (Rf)(n, b+1) - (Rf)(n, a).
        Sequence g3 = seq_multisum_bounded(f);
        const WeylOperator T3 = embed_telescoper_rank3(T, ring);
        const auto [slo, shi] = *sum_range;
        for (std::int64_t n = nlo; n <= nhi && !rep.boundary_witness; ++n) {
            for (std::int64_t a = slo; a <= shi && !rep.boundary_witness; ++a) {
                for (std::int64_t b = a; b <= shi; ++b) {
                    Scalar lhs = weyl_apply(T3, g3, {n, a, b});
                    Scalar rhs =
                        weyl_apply(R, f, {n, b + 1}) - weyl_apply(R, f, {n, a});
                    if (!(lhs - rhs).is_zero()) {
                        rep.boundary_witness = Point{n, a, b};
                        rep.message = "summed identity fails at " +
                                      point_to_string(Point{n, a, b}) + ": T(sum) = " +
                                      lhs.str() + " but boundary correction = " + rhs.str();
                        break;
                    }
                }
            }
        }
        if (rep.boundary_witness) return rep;
    } else {
        // (2b) Full-line sums: pick per-n summation limits covering the
        // supports of every shifted row, check the two boundary terms of the
        // telescoped identity vanish there, and check T directly against the
        // independently summed sequence.
        Sequence g = seq_multisum_line(f);
        std::int64_t smin = std::min<std::int64_t>(0, std::min(T.lowest_degree_L(0),
                                                               R.lowest_degree_L(0)));
        std::int64_t smax = std::max<std::int64_t>(0, std::max(T.degree_L(0), R.degree_L(0)));
        const std::int64_t klo_margin = 1 - std::min<std::int64_t>(0, R.lowest_degree_L(1));
        const std::int64_t khi_margin = 1 + std::max<std::int64_t>(0, R.degree_L(1));
        for (std::int64_t n = nlo; n <= nhi; ++n) {
            std::int64_t A = 0, B = 0;
            bool first = true;
            for (std::int64_t s = smin; s <= smax; ++s) {
                const Point pre{n + s};
                auto kb = f.axis_bounds(1, pre);
                if (!kb)
                    throw UsageError(
                        "full-line telescoping check needs support bounds for the "
                        "summation axis");
                A = first ? kb->first : std::min(A, kb->first);
                B = first ? kb->second : std::max(B, kb->second);
                first = false;
            }
            A -= klo_margin;
            B += khi_margin;
            for (std::int64_t k : {A, B + 1}) {
                Scalar v = weyl_apply(R, f, {n, k});
                if (!v.is_zero()) {
                    rep.boundary_witness = Point{n, k};
                    rep.message = "boundary term (R f)(" + point_to_string(Point{n, k}) +
                                  ") = " + v.str() + " does not vanish";
                    return rep;
                }
            }
            Scalar tg = weyl_apply(rep.induced, g, {n});
            if (!tg.is_zero()) {
                rep.boundary_witness = Point{n};
                rep.message = "induced recurrence fails on the summed sequence at n=" +
                              std::to_string(n) + ": value " + tg.str();
                return rep;
            }
        }
    }
    rep.status = VerifyStatus::WindowVerified;
    rep.message = "ok";
    return rep;
}

}  // namespace qhol
