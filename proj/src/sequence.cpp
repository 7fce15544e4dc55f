#include "qhol/sequence.hpp"

#include <algorithm>
#include <cassert>
#include <list>
#include <mutex>
#include <utility>

namespace qhol {

namespace {

void check_rank_point(int rank, std::span<const std::int64_t> p) {
    if (static_cast<int>(p.size()) != rank)
        throw UsageError("point arity " + std::to_string(p.size()) +
                         " does not match sequence rank " + std::to_string(rank));
}

}  // namespace

// ---------------------------------------------------------------------------
// SupportSpec
// ---------------------------------------------------------------------------

SupportSpec SupportSpec::strict_box(int split, Window box) {
    if (box.rank() != split) throw UsageError("strict support box rank must equal split");
    SupportSpec s;
    s.kind = Kind::StrictBox;
    s.split = split;
    s.prefix_box = std::move(box);
    return s;
}

SupportSpec SupportSpec::finite_box(Window box) {
    const int r = box.rank();
    return strict_box(r, std::move(box));
}

SupportSpec SupportSpec::per_prefix(
    int split, std::function<Window(std::span<const std::int64_t>)> bounds) {
    SupportSpec s;
    s.kind = Kind::PerPrefix;
    s.split = split;
    s.tail_bounds = std::move(bounds);
    return s;
}

// ---------------------------------------------------------------------------
// Sequence core
// ---------------------------------------------------------------------------

struct Sequence::Impl {
    int rank = 0;
    RingPtr sring;
    std::vector<std::string> vars;
    std::string name;
    Evaluator eval;

    // LRU-bounded exact memo.
    static constexpr std::size_t kMemoCap = std::size_t{1} << 17;
    std::map<Point, std::pair<Scalar, std::list<Point>::iterator>> memo;
    std::list<Point> order;
    std::mutex mu;

    Scalar value(std::span<const std::int64_t> p) {
        Point key(p.begin(), p.end());
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = memo.find(key);
            if (it != memo.end()) {
                order.splice(order.begin(), order, it->second.second);
                return it->second.first;
            }
        }
        Scalar v = eval(p);
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second.first;
        order.push_front(key);
        memo.emplace(std::move(key), std::make_pair(v, order.begin()));
        if (memo.size() > kMemoCap) {
            memo.erase(order.back());
            order.pop_back();
        }
        return v;
    }
};

std::vector<std::string> Sequence::default_vars(int rank) {
    if (rank == 1) return {"n"};
    if (rank == 2) return {"n", "k"};
    if (rank == 3) return {"n", "k", "l"};
    std::vector<std::string> v;
    for (int i = 1; i <= rank; ++i) v.push_back("n" + std::to_string(i));
    return v;
}

Sequence Sequence::make(int rank, RingPtr sring, std::vector<std::string> vars,
                        std::string name, Evaluator eval) {
    if (rank < 0) throw UsageError("negative sequence rank");
    if (!sring) throw UsageError("sequence needs a scalar ring");
    if (vars.empty()) vars = default_vars(rank);
    if (static_cast<int>(vars.size()) != rank)
        throw UsageError("variable list length must equal rank");
    Sequence s;
    s.impl_ = std::make_shared<Impl>();
    s.impl_->rank = rank;
    s.impl_->sring = std::move(sring);
    s.impl_->vars = std::move(vars);
    s.impl_->name = std::move(name);
    s.impl_->eval = std::move(eval);
    s.domains_.assign(static_cast<std::size_t>(rank), AxisDomain::FullLine);
    return s;
}

int Sequence::rank() const {
    assert(impl_);
    return impl_->rank;
}

const RingPtr& Sequence::sring() const {
    assert(impl_);
    return impl_->sring;
}

const std::vector<std::string>& Sequence::vars() const {
    assert(impl_);
    return impl_->vars;
}

const std::string& Sequence::name() const {
    assert(impl_);
    return impl_->name;
}

Scalar Sequence::at(std::span<const std::int64_t> p) const {
    assert(impl_);
    check_rank_point(impl_->rank, p);
    return impl_->value(p);
}

Scalar Sequence::at(std::initializer_list<std::int64_t> p) const {
    return at(std::span<const std::int64_t>(p.begin(), p.size()));
}

Sequence Sequence::with_support(SupportSpec s) const {
    if (s.kind == SupportSpec::Kind::StrictBox && s.split > rank())
        throw UsageError("support split exceeds rank");
    Sequence out = *this;
    out.supports_.push_back(std::move(s));
    return out;
}

Sequence Sequence::with_system(AnnihilatorSystem sys) const {
    if (sys.rank != rank()) throw UsageError("system rank mismatch");
    sys.validate();
    Sequence out = *this;
    out.system_ = std::make_shared<const AnnihilatorSystem>(std::move(sys));
    return out;
}

Sequence Sequence::with_domains(std::vector<AxisDomain> d) const {
    if (static_cast<int>(d.size()) != rank())
        throw UsageError("domain list length must equal rank");
    Sequence out = *this;
    out.domains_ = std::move(d);
    return out;
}

Sequence Sequence::renamed(std::string name) const {
    Sequence out = *this;
    out.impl_ = std::make_shared<Impl>();
    out.impl_->rank = impl_->rank;
    out.impl_->sring = impl_->sring;
    out.impl_->vars = impl_->vars;
    out.impl_->name = std::move(name);
    auto base = impl_;
    out.impl_->eval = [base](std::span<const std::int64_t> p) { return base->value(p); };
    return out;
}

Sequence Sequence::with_vars(std::vector<std::string> vars) const {
    if (static_cast<int>(vars.size()) != rank())
        throw UsageError("variable list length must equal rank");
    Sequence out = renamed(impl_->name);
    out.impl_->vars = std::move(vars);
    return out;
}

std::optional<SupportSpec> Sequence::find_strict(int split) const {
    for (auto& s : supports_)
        if (s.kind == SupportSpec::Kind::StrictBox && s.split == split) return s;
    // Derive from a full finite box.
    for (auto& s : supports_) {
        if (s.kind == SupportSpec::Kind::StrictBox && s.split == rank() && split <= rank()) {
            Window box;
            box.axes.assign(s.prefix_box.axes.begin(), s.prefix_box.axes.begin() + split);
            return SupportSpec::strict_box(split, std::move(box));
        }
    }
    return std::nullopt;
}

std::optional<SupportSpec> Sequence::find_per_prefix(int split) const {
    for (auto& s : supports_)
        if (s.kind == SupportSpec::Kind::PerPrefix && s.split == split) return s;
    for (auto& s : supports_) {
        if (s.kind == SupportSpec::Kind::StrictBox && s.split == rank() && split <= rank()) {
            Window tail;
            tail.axes.assign(s.prefix_box.axes.begin() + split, s.prefix_box.axes.end());
            return SupportSpec::per_prefix(
                split, [tail](std::span<const std::int64_t>) { return tail; });
        }
    }
    return std::nullopt;
}

std::optional<std::pair<std::int64_t, std::int64_t>> Sequence::axis_bounds(
    int axis, std::span<const std::int64_t> point) const {
    if (axis < 0 || axis >= rank()) throw UsageError("axis out of range");
    for (auto& s : supports_) {
        if (s.kind == SupportSpec::Kind::StrictBox && axis < s.split)
            return s.prefix_box.axes[static_cast<std::size_t>(axis)];
        if (s.kind == SupportSpec::Kind::PerPrefix && axis >= s.split) {
            Window w = s.tail_bounds(point.subspan(0, static_cast<std::size_t>(s.split)));
            return w.axes.at(static_cast<std::size_t>(axis - s.split));
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Operator action and verification
// ---------------------------------------------------------------------------

Scalar weyl_apply(const WeylOperator& P, const Sequence& f, std::span<const std::int64_t> n) {
    if (P.rank() != f.rank()) throw UsageError("operator/sequence rank mismatch");
    check_rank_point(f.rank(), n);
    const int r = f.rank();
    RingPtr ring = ring_union(P.sring(), f.sring());
    Scalar acc = Scalar::zero(ring);
    Point shifted(static_cast<std::size_t>(r));
    for (auto& [key, c] : P.terms()) {
        std::int64_t dot = 0;
        for (int i = 0; i < r; ++i) {
            dot += key[static_cast<std::size_t>(i)] * n[static_cast<std::size_t>(i)];
            shifted[static_cast<std::size_t>(i)] =
                n[static_cast<std::size_t>(i)] + key[static_cast<std::size_t>(r + i)];
        }
        acc += c * Scalar::q_power(ring, dot) * f.at(shifted);
    }
    return acc;
}

Scalar weyl_apply(const WeylOperator& P, const Sequence& f,
                  std::initializer_list<std::int64_t> n) {
    return weyl_apply(P, f, std::span<const std::int64_t>(n.begin(), n.size()));
}

std::optional<Point> verify_operator(const WeylOperator& P, const Sequence& f,
                                     const Window& window) {
    if (window.rank() != f.rank()) throw UsageError("window rank mismatch");
    std::optional<Point> bad;
    window.for_each_point([&](const Point& p) {
        if (bad) return;
        if (!weyl_apply(P, f, p).is_zero()) bad = p;
    });
    return bad;
}

std::optional<Point> verify_system(AnnihilatorSystem& sys, const Sequence& f,
                                   const Window& window) {
    sys.validate();
    for (auto& op : sys.all_operators()) {
        if (auto bad = verify_operator(op, f, window)) return bad;
    }
    sys.status = VerifyStatus::WindowVerified;
    sys.window = window;
    return std::nullopt;
}

Sequence attach_verified(const Sequence& f, AnnihilatorSystem sys, const Window& window) {
    if (auto bad = verify_system(sys, f, window))
        throw Error("system verification failed for " + f.name() + " at " +
                    point_to_string(*bad));
    return f.with_system(std::move(sys));
}

// ---------------------------------------------------------------------------
// Pointwise combinators
// ---------------------------------------------------------------------------

namespace {

void check_same_shape(const Sequence& f, const Sequence& g) {
    if (f.rank() != g.rank())
        throw UsageError("rank mismatch: " + f.name() + " has rank " +
                         std::to_string(f.rank()) + ", " + g.name() + " has rank " +
                         std::to_string(g.rank()));
}

}  // namespace

namespace {

std::vector<AxisDomain> merged_domains(const Sequence& f, const Sequence& g) {
    std::vector<AxisDomain> d;
    for (int i = 0; i < f.rank(); ++i) {
        bool nn = f.domains()[static_cast<std::size_t>(i)] == AxisDomain::NonNegative ||
                  g.domains()[static_cast<std::size_t>(i)] == AxisDomain::NonNegative;
        d.push_back(nn ? AxisDomain::NonNegative : AxisDomain::FullLine);
    }
    return d;
}

}  // namespace

Sequence seq_add(const Sequence& f, const Sequence& g) {
    check_same_shape(f, g);
    RingPtr ring = ring_union(f.sring(), g.sring());
    Sequence out = Sequence::make(
        f.rank(), ring, f.vars(), "(" + f.name() + " + " + g.name() + ")",
        [f, g](std::span<const std::int64_t> p) { return f.at(p) + g.at(p); });
    return out.with_domains(merged_domains(f, g));
}

Sequence seq_mul(const Sequence& f, const Sequence& g) {
    check_same_shape(f, g);
    RingPtr ring = ring_union(f.sring(), g.sring());
    Sequence out = Sequence::make(
        f.rank(), ring, f.vars(), "(" + f.name() + " * " + g.name() + ")",
        [f, g](std::span<const std::int64_t> p) { return f.at(p) * g.at(p); });
    // A product vanishes wherever either factor does, so any support spec of
    // either factor remains valid.
    for (auto& s : f.supports()) out = out.with_support(s);
    for (auto& s : g.supports()) out = out.with_support(s);
    return out.with_domains(merged_domains(f, g));
}

Sequence seq_scale(const Scalar& c, const Sequence& f) {
    RingPtr ring = ring_union(c.ring(), f.sring());
    Scalar cc = c.promoted(ring);
    Sequence out = Sequence::make(
        f.rank(), ring, f.vars(), f.name(),
        [cc, f](std::span<const std::int64_t> p) { return cc * f.at(p); });
    if (!c.is_zero())
        for (auto& s : f.supports()) out = out.with_support(s);
    return out.with_domains(f.domains());
}

// ---------------------------------------------------------------------------
// Reindexing combinators
// ---------------------------------------------------------------------------

Sequence seq_affine(const Sequence& f, const std::vector<std::vector<std::int64_t>>& A,
                    const std::vector<std::int64_t>& b, std::vector<std::string> vars) {
    const int r = f.rank();
    if (static_cast<int>(A.size()) != r || static_cast<int>(b.size()) != r)
        throw UsageError("affine data must have one row per coordinate of " + f.name());
    const int s = A.empty() ? 0 : static_cast<int>(A.front().size());
    for (auto& row : A)
        if (static_cast<int>(row.size()) != s)
            throw UsageError("ragged affine matrix");
    if (vars.empty()) vars = Sequence::default_vars(s);
    return Sequence::make(
        s, f.sring(), std::move(vars), f.name() + "@affine",
        [f, A, b, r, s](std::span<const std::int64_t> n) {
            Point m(static_cast<std::size_t>(r));
            for (int i = 0; i < r; ++i) {
                std::int64_t acc = b[static_cast<std::size_t>(i)];
                for (int j = 0; j < s; ++j)
                    acc += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                           n[static_cast<std::size_t>(j)];
                m[static_cast<std::size_t>(i)] = acc;
            }
            return f.at(m);
        });
}

Sequence seq_restrict(const Sequence& f, const std::vector<std::int64_t>& fixed_tail) {
    const int r = f.rank();
    const int cut = static_cast<int>(fixed_tail.size());
    if (cut > r) throw UsageError("restricting more coordinates than the rank");
    const int s = r - cut;
    std::vector<std::string> vars(f.vars().begin(), f.vars().begin() + s);
    return Sequence::make(
        s, f.sring(), std::move(vars), f.name() + "@restrict",
        [f, fixed_tail, s](std::span<const std::int64_t> n) {
            Point m(n.begin(), n.end());
            m.insert(m.end(), fixed_tail.begin(), fixed_tail.end());
            return f.at(m);
        });
}

Sequence seq_extend(const Sequence& f, int extra) {
    if (extra < 0) throw UsageError("negative extension count");
    const int r = f.rank();
    std::vector<std::string> vars = f.vars();
    std::vector<std::string> fresh = Sequence::default_vars(r + extra);
    for (int i = r; i < r + extra; ++i) {
        std::string cand = fresh[static_cast<std::size_t>(i)];
        while (std::find(vars.begin(), vars.end(), cand) != vars.end()) cand += "x";
        vars.push_back(cand);
    }
    Sequence out = Sequence::make(
        r + extra, f.sring(), std::move(vars), f.name() + "@extend",
        [f, r](std::span<const std::int64_t> n) { return f.at(n.subspan(0, static_cast<std::size_t>(r))); });
    // Prefix-only strict specs remain valid; per-prefix tails would have to
    // cover the new unconstrained coordinates, so they are dropped.
    for (auto& s : f.supports())
        if (s.kind == SupportSpec::Kind::StrictBox) out = out.with_support(s);
    return out;
}

Sequence seq_truncate(const Sequence& f, const Window& box) {
    if (box.rank() != f.rank()) throw UsageError("truncation box rank mismatch");
    Sequence out = Sequence::make(
        f.rank(), f.sring(), f.vars(), f.name() + "@trunc",
        [f, box](std::span<const std::int64_t> p) {
            return box.contains(p) ? f.at(p) : Scalar::zero(f.sring());
        });
    return out.with_support(SupportSpec::finite_box(box));
}

// ---------------------------------------------------------------------------
// Convolution and summation
// ---------------------------------------------------------------------------

Sequence seq_convolve(const Sequence& f, const Sequence& g, int split) {
    check_same_shape(f, g);
    const int r = f.rank();
    if (split < 0 || split > r) throw UsageError("convolution split out of range");
    auto gs = g.find_strict(split);
    if (split > 0 && !gs)
        throw UsageError("convolution needs a strict support box on the first " +
                         std::to_string(split) + " coordinates of " + g.name());
    std::optional<SupportSpec> fp;
    if (split < r) {
        fp = f.find_per_prefix(split);
        if (!fp)
            throw UsageError("convolution needs per-prefix finite support on the last " +
                             std::to_string(r - split) + " coordinates of " + f.name());
    }
    RingPtr ring = ring_union(f.sring(), g.sring());
    return Sequence::make(
        r, ring, f.vars(), "conv(" + f.name() + ", " + g.name() + ")",
        [f, g, gs, fp, split, r, ring](std::span<const std::int64_t> n) {
            Scalar acc = Scalar::zero(ring);
            // Prefix part of m ranges over g's strict box.
            Window pre = (split > 0) ? gs->prefix_box : Window{};
            pre.for_each_point([&](const Point& mpre) {
                // Tail part: f(n-m) vanishes unless the tail of n-m lies in
                // f's per-prefix support for the prefix of n-m.
                Point diff_pre(static_cast<std::size_t>(split));
                for (int i = 0; i < split; ++i)
                    diff_pre[static_cast<std::size_t>(i)] =
                        n[static_cast<std::size_t>(i)] - mpre[static_cast<std::size_t>(i)];
                Window tailRange;
                if (split < r) {
                    Window supp = fp->tail_bounds(diff_pre);
                    for (int j = 0; j < r - split; ++j) {
                        auto [lo, hi] = supp.axes.at(static_cast<std::size_t>(j));
                        std::int64_t nj = n[static_cast<std::size_t>(split + j)];
                        tailRange.axes.emplace_back(nj - hi, nj - lo);
                    }
                }
                tailRange.for_each_point([&](const Point& mpost) {
                    Point m(static_cast<std::size_t>(r));
                    Point nm(static_cast<std::size_t>(r));
                    for (int i = 0; i < split; ++i) m[static_cast<std::size_t>(i)] = mpre[static_cast<std::size_t>(i)];
                    for (int j = 0; j < r - split; ++j)
                        m[static_cast<std::size_t>(split + j)] = mpost[static_cast<std::size_t>(j)];
                    for (int i = 0; i < r; ++i)
                        nm[static_cast<std::size_t>(i)] = n[static_cast<std::size_t>(i)] - m[static_cast<std::size_t>(i)];
                    Scalar gv = g.at(m);
                    if (gv.is_zero()) return;
                    acc += gv * f.at(nm);
                });
            });
            return acc;
        });
}

Sequence seq_multisum_bounded(const Sequence& f) {
    const int r = f.rank();
    if (r < 1) throw UsageError("bounded sum needs at least one coordinate");
    std::vector<std::string> vars(f.vars().begin(), f.vars().end() - 1);
    for (const char* extra : {"a", "b"}) {
        std::string cand = extra;
        while (std::find(vars.begin(), vars.end(), cand) != vars.end()) cand += "x";
        vars.push_back(cand);
    }
    return Sequence::make(
        r + 1, f.sring(), std::move(vars), "sum[" + f.name() + "]",
        [f, r](std::span<const std::int64_t> p) {
            std::int64_t a = p[static_cast<std::size_t>(r - 1)];
            std::int64_t b = p[static_cast<std::size_t>(r)];
            Scalar acc = Scalar::zero(f.sring());
            Point q(p.begin(), p.begin() + r);
            for (std::int64_t t = a; t <= b; ++t) {
                q[static_cast<std::size_t>(r - 1)] = t;
                acc += f.at(q);
            }
            return acc;
        });
}

Sequence seq_multisum_line(const Sequence& f) {
    const int r = f.rank();
    if (r < 1) throw UsageError("line sum needs at least one coordinate");
    // Probe that some support spec can bound the last axis.
    {
        Point probe(static_cast<std::size_t>(r), 0);
        if (!f.axis_bounds(r - 1, probe))
            throw UsageError("full-line sum over the last axis of " + f.name() +
                             " needs support information bounding that axis");
    }
    std::vector<std::string> vars(f.vars().begin(), f.vars().end() - 1);
    return Sequence::make(
        r - 1, f.sring(), std::move(vars), "sumZ[" + f.name() + "]",
        [f, r](std::span<const std::int64_t> p) {
            Point q(p.begin(), p.end());
            q.push_back(0);
            auto range = f.axis_bounds(r - 1, q);
            if (!range)
                throw UsageError("support information for " + f.name() + " disappeared");
            Scalar acc = Scalar::zero(f.sring());
            for (std::int64_t t = range->first; t <= range->second; ++t) {
                q[static_cast<std::size_t>(r - 1)] = t;
                acc += f.at(q);
            }
            return acc;
        });
}

Sequence seq_rescale_q(const Sequence& f, std::int64_t c) {
    if (c == 0) throw UsageError("q-rescaling exponent must be nonzero");
    Sequence out = Sequence::make(
        f.rank(), f.sring(), f.vars(), f.name() + "@q^" + std::to_string(c),
        [f, c](std::span<const std::int64_t> p) { return f.at(p).rescale_q(c); });
    for (auto& s : f.supports()) out = out.with_support(s);
    return out;
}

// ---------------------------------------------------------------------------
// Patching
// ---------------------------------------------------------------------------

Sequence seq_patch_finite(const Sequence& f,
                          const std::vector<std::pair<Point, Scalar>>& changes) {
    RingPtr ring = f.sring();
    std::map<Point, Scalar> table;
    for (auto& [p, v] : changes) {
        if (static_cast<int>(p.size()) != f.rank())
            throw UsageError("patch point arity mismatch at " + point_to_string(p));
        ring = ring_union(ring, v.ring());
        table[p] = v;
    }
    return Sequence::make(
        f.rank(), ring, f.vars(), f.name() + "@patched",
        [f, table](std::span<const std::int64_t> p) {
            Point key(p.begin(), p.end());
            auto it = table.find(key);
            if (it != table.end()) return it->second;
            return f.at(p);
        });
}

Sequence seq_patch_hyperplane(const Sequence& f, int axis, std::int64_t value,
                              const Sequence& g) {
    const int r = f.rank();
    if (axis < 0 || axis >= r) throw UsageError("patch axis out of range");
    if (g.rank() != r - 1)
        throw UsageError("hyperplane replacement must have rank " + std::to_string(r - 1));
    RingPtr ring = ring_union(f.sring(), g.sring());
    return Sequence::make(
        r, ring, f.vars(), f.name() + "@hyperplane",
        [f, g, axis, value](std::span<const std::int64_t> p) {
            if (p[static_cast<std::size_t>(axis)] != value) return f.at(p);
            Point rest;
            for (int i = 0; i < static_cast<int>(p.size()); ++i)
                if (i != axis) rest.push_back(p[static_cast<std::size_t>(i)]);
            return g.at(rest);
        });
}

Sequence seq_patch_orthants(const std::vector<Sequence>& pieces) {
    if (pieces.empty()) throw UsageError("no orthant pieces");
    const int r = pieces.front().rank();
    if (pieces.size() != (std::size_t{1} << r))
        throw UsageError("orthant patching of rank " + std::to_string(r) + " needs " +
                         std::to_string(std::size_t{1} << r) + " pieces");
    RingPtr ring = pieces.front().sring();
    for (auto& p : pieces) {
        if (p.rank() != r) throw UsageError("orthant piece rank mismatch");
        ring = ring_union(ring, p.sring());
    }
    return Sequence::make(
        r, ring, pieces.front().vars(), "orthants",
        [pieces, r](std::span<const std::int64_t> p) {
            std::size_t mask = 0;
            for (int i = 0; i < r; ++i)
                if (p[static_cast<std::size_t>(i)] < 0) mask |= std::size_t{1} << i;
            return pieces[mask].at(p);
        });
}

std::optional<Point> orthant_overlap_mismatch(const Sequence& f,
                                              const std::vector<Sequence>& pieces,
                                              const Window& window) {
    const int r = f.rank();
    if (pieces.size() != (std::size_t{1} << r))
        throw UsageError("orthant piece count mismatch");
    std::optional<Point> bad;
    window.for_each_point([&](const Point& p) {
        if (bad) return;
        Scalar want = f.at(p);
        for (std::size_t mask = 0; mask < pieces.size(); ++mask) {
            bool closureContains = true;
            for (int i = 0; i < r; ++i) {
                std::int64_t v = p[static_cast<std::size_t>(i)];
                bool negSide = (mask >> i) & 1;
                if (negSide ? v > 0 : v < 0) {
                    closureContains = false;
                    break;
                }
            }
            if (!closureContains) continue;
            Scalar got = pieces[mask].at(p);
            RingPtr u = ring_union(want.ring(), got.ring());
            if (!(got.promoted(u) == want.promoted(u))) {
                bad = p;
                return;
            }
        }
    });
    return bad;
}

// ---------------------------------------------------------------------------
// Solving a rank-1 recurrence
// ---------------------------------------------------------------------------

namespace {

/// Value of an M-only operator (a polynomial in M) at integer point m.
Scalar m_poly_value(const WeylOperator& mOnly, std::int64_t m) {
    Scalar acc = Scalar::zero(mOnly.sring());
    for (auto& [key, c] : mOnly.terms())
        acc += c * Scalar::q_power(mOnly.sring(), key[0] * m);
    return acc;
}

}  // namespace

Sequence seq_from_recurrence(const WeylOperator& op,
                             const std::map<std::int64_t, Scalar>& initial,
                             std::string name) {
    if (op.rank() != 1) throw UsageError("recurrence solving is rank-1 only");
    if (op.is_zero()) throw UsageError("zero recurrence operator");
    if (!op.is_plus()) throw UsageError("recurrence operator must have nonnegative exponents");
    const std::int64_t d = op.degree_L(0);
    const std::int64_t t = op.lowest_degree_L(0);
    if (d < 1) throw UsageError("recurrence operator must move the index");
    if (initial.empty()) throw UsageError("no initial values");

    // The anchor segment: a contiguous run of supplied points of length >= d.
    std::int64_t segLo = initial.begin()->first, segHi = segLo;
    {
        std::int64_t runLo = segLo, prev = segLo;
        for (auto it = std::next(initial.begin()); it != initial.end(); ++it) {
            if (it->first == prev + 1) {
                prev = it->first;
            } else {
                runLo = it->first;
                prev = it->first;
            }
            if (prev - runLo > segHi - segLo) {
                segLo = runLo;
                segHi = prev;
            }
        }
        if (segHi - segLo + 1 < d)
            throw UsageError("initial values must cover " + std::to_string(d) +
                             " consecutive points");
    }

    RingPtr ring = op.sring();
    for (auto& [p, v] : initial) ring = ring_union(ring, v.ring());

    std::vector<WeylOperator> coeff;
    for (std::int64_t j = 0; j <= d; ++j) coeff.push_back(l_coefficient(op, 0, j));

    auto table = std::make_shared<std::map<std::int64_t, Scalar>>();
    for (auto& [p, v] : initial) (*table)[p] = v.promoted(ring);

    auto eval = [table, coeff, ring, d, t, segLo, segHi](std::span<const std::int64_t> pt) {
        std::int64_t n = pt[0];
        auto have = [&](std::int64_t m) { return table->count(m) > 0; };
        if (have(n)) return table->at(n);
        if (n > segHi) {
            for (std::int64_t m = segHi + 1; m <= n; ++m) {
                if (have(m)) continue;
                std::int64_t base = m - d;
                Scalar lead = m_poly_value(coeff[static_cast<std::size_t>(d)], base).promoted(ring);
                if (lead.is_zero())
                    throw Error("leading coefficient vanishes at n = " + std::to_string(m) +
                                "; supply the value there");
                Scalar acc = Scalar::zero(ring);
                for (std::int64_t j = 0; j < d; ++j) {
                    const auto& cj = coeff[static_cast<std::size_t>(j)];
                    if (cj.is_zero()) continue;
                    if (!have(base + j))
                        throw Error("missing prior value at n = " + std::to_string(base + j));
                    acc += m_poly_value(cj, base).promoted(ring) * table->at(base + j);
                }
                (*table)[m] = -(acc / lead);
            }
            return table->at(n);
        }
        // n < segLo: solve backward from the trailing coefficient.
        for (std::int64_t m = segLo - 1; m >= n; --m) {
            if (have(m)) continue;
            std::int64_t base = m - t;
            Scalar trail = m_poly_value(coeff[static_cast<std::size_t>(t)], base).promoted(ring);
            if (trail.is_zero())
                throw Error("trailing coefficient vanishes at n = " + std::to_string(m) +
                            "; supply the value there");
            Scalar acc = Scalar::zero(ring);
            for (std::int64_t j = t + 1; j <= d; ++j) {
                const auto& cj = coeff[static_cast<std::size_t>(j)];
                if (cj.is_zero()) continue;
                if (!have(base + j))
                    throw Error("missing later value at n = " + std::to_string(base + j));
                acc += m_poly_value(cj, base).promoted(ring) * table->at(base + j);
            }
            (*table)[m] = -(acc / trail);
        }
        return table->at(n);
    };
    return Sequence::make(1, ring, {}, std::move(name), eval);
}

}  // namespace qhol
