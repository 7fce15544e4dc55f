#include "qhol/fourier.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace qhol {

namespace {

void check_same_rank(const FormalSeries& s, const FormalSeries& t) {
    if (s.rank() != t.rank())
        throw UsageError("series ranks differ: " + std::to_string(s.rank()) + " vs " +
                         std::to_string(t.rank()));
    if (!same_ring(s.ring, t.ring))
        throw UsageError("series live over different coefficient rings");
}

bool box_inside(const Window& inner, const Window& outer) {
    for (int i = 0; i < inner.rank(); ++i)
        if (inner.axes[i].first < outer.axes[i].first ||
            inner.axes[i].second > outer.axes[i].second)
            return false;
    return true;
}

}  // namespace

Scalar FormalSeries::at(std::span<const std::int64_t> p) const {
    if (static_cast<int>(p.size()) != rank())
        throw UsageError("coefficient index has the wrong rank");
    if (box.contains(p)) {
        auto it = coeff.find(Point(p.begin(), p.end()));
        return it == coeff.end() ? Scalar::zero(ring) : it->second;
    }
    if (exact_support) return Scalar::zero(ring);
    throw UsageError("coefficient at " + point_to_string(p) +
                     " lies outside the truncation box " + box.str());
}

Scalar FormalSeries::at(std::initializer_list<std::int64_t> p) const {
    return at(std::span<const std::int64_t>(p.begin(), p.size()));
}

void FormalSeries::set(Point p, Scalar c) {
    if (!box.contains(p))
        throw UsageError("cannot set a coefficient outside the truncation box");
    if (c.is_zero())
        coeff.erase(p);
    else
        coeff[std::move(p)] = std::move(c);
}

bool FormalSeries::operator==(const FormalSeries& o) const {
    return same_ring(ring, o.ring) && box == o.box && exact_support == o.exact_support &&
           coeff == o.coeff;
}

std::string FormalSeries::str() const {
    if (coeff.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    box.for_each_point([&](const Point& p) {
        auto it = coeff.find(p);
        if (it == coeff.end()) return;
        if (!first) out << "\n";
        first = false;
        out << "z^" << point_to_string(p) << " : " << it->second.str();
    });
    return out.str();
}

FormalSeries fourier_truncate(const Sequence& f, const Window& box) {
    if (!f.valid()) throw UsageError("fourier_truncate needs a valid sequence");
    if (box.rank() != f.rank())
        throw UsageError("truncation box rank does not match the sequence");
    FormalSeries s;
    s.ring = f.sring();
    s.box = box;
    if (auto spec = f.find_strict(f.rank()))
        s.exact_support = box_inside(spec->prefix_box, box);
    box.for_each_point([&](const Point& p) {
        Scalar v = f.at(p);
        if (!v.is_zero()) s.coeff.emplace(p, std::move(v));
    });
    return s;
}

FormalSeries series_op(const WeylOperator& P, const FormalSeries& s) {
    if (P.rank() != s.rank())
        throw UsageError("operator rank does not match the series");
    if (!same_ring(P.sring(), s.ring))
        throw UsageError("operator and series live over different coefficient rings");
    const int r = s.rank();
    FormalSeries out;
    out.ring = s.ring;
    if (P.is_zero()) {
        out.box = s.box;
        out.exact_support = true;
        return out;
    }

    std::vector<std::int64_t> beta_min(r, 0), beta_max(r, 0);
    bool first = true;
    for (const auto& [key, coeff] : P.terms()) {
        (void)coeff;
        for (int i = 0; i < r; ++i) {
            std::int64_t b = key[r + i];
            if (first) {
                beta_min[i] = beta_max[i] = b;
            } else {
                beta_min[i] = std::min(beta_min[i], b);
                beta_max[i] = std::max(beta_max[i], b);
            }
        }
        first = false;
    }

    std::vector<std::pair<std::int64_t, std::int64_t>> axes;
    for (int i = 0; i < r; ++i) {
        auto [lo, hi] = s.box.axes[i];
        if (s.exact_support) {
            // Shifts move the support; keep everything it can reach.
            axes.emplace_back(lo - beta_max[i], hi - beta_min[i]);
        } else {
            // Keep only coefficients whose every read stays inside the box.
            axes.emplace_back(lo - beta_min[i], hi - beta_max[i]);
        }
    }
    out.box = Window(std::move(axes));
    out.exact_support = s.exact_support;

    out.box.for_each_point([&](const Point& n) {
        Scalar acc = Scalar::zero(s.ring);
        for (const auto& [key, coeff] : P.terms()) {
            std::int64_t e = 0;
            Point shifted(r);
            for (int i = 0; i < r; ++i) {
                e += key[i] * n[i];
                shifted[i] = n[i] + key[r + i];
            }
            Scalar sv = s.at(shifted);
            if (!sv.is_zero()) acc += coeff * Scalar::q_power(s.ring, e) * sv;
        }
        if (!acc.is_zero()) out.coeff.emplace(n, std::move(acc));
    });
    return out;
}

FormalSeries series_scale(const Scalar& c, const FormalSeries& s) {
    FormalSeries out;
    out.ring = s.ring;
    out.box = s.box;
    out.exact_support = s.exact_support;
    if (c.is_zero()) return out;
    for (const auto& [p, v] : s.coeff) {
        Scalar w = c * v;
        if (!w.is_zero()) out.coeff.emplace(p, std::move(w));
    }
    return out;
}

FormalSeries series_add(const FormalSeries& s, const FormalSeries& t) {
    check_same_rank(s, t);
    const int r = s.rank();
    FormalSeries out;
    out.ring = s.ring;
    std::vector<std::pair<std::int64_t, std::int64_t>> axes;
    if (s.exact_support && t.exact_support) {
        for (int i = 0; i < r; ++i)
            axes.emplace_back(std::min(s.box.axes[i].first, t.box.axes[i].first),
                              std::max(s.box.axes[i].second, t.box.axes[i].second));
        out.exact_support = true;
    } else {
        for (int i = 0; i < r; ++i)
            axes.emplace_back(std::max(s.box.axes[i].first, t.box.axes[i].first),
                              std::min(s.box.axes[i].second, t.box.axes[i].second));
        out.exact_support = false;
    }
    out.box = Window(std::move(axes));
    out.box.for_each_point([&](const Point& p) {
        Scalar v = s.at(p) + t.at(p);
        if (!v.is_zero()) out.coeff.emplace(p, std::move(v));
    });
    return out;
}

FormalSeries hadamard(const FormalSeries& s, const FormalSeries& t) {
    check_same_rank(s, t);
    const int r = s.rank();
    FormalSeries out;
    out.ring = s.ring;
    std::vector<std::pair<std::int64_t, std::int64_t>> axes;
    for (int i = 0; i < r; ++i)
        axes.emplace_back(std::max(s.box.axes[i].first, t.box.axes[i].first),
                          std::min(s.box.axes[i].second, t.box.axes[i].second));
    out.box = Window(std::move(axes));
    // The product's support lies inside the intersection of the supports, so
    // exactness survives whenever the result box provably covers it.
    out.exact_support = (s.exact_support && t.exact_support) ||
                        (s.exact_support && box_inside(s.box, t.box)) ||
                        (t.exact_support && box_inside(t.box, s.box));
    for (const auto& [p, v] : s.coeff) {
        if (!out.box.contains(p)) continue;
        Scalar w = v * t.at(p);
        if (!w.is_zero()) out.coeff.emplace(p, std::move(w));
    }
    return out;
}

FormalSeries series_mul(const FormalSeries& s, const FormalSeries& t) {
    check_same_rank(s, t);
    if (!s.exact_support || !t.exact_support)
        throw UsageError(
            "power-series multiplication needs exactly supported operands; enlarge the "
            "truncation boxes until they contain the whole support");
    const int r = s.rank();
    FormalSeries out;
    out.ring = s.ring;
    std::vector<std::pair<std::int64_t, std::int64_t>> axes;
    for (int i = 0; i < r; ++i)
        axes.emplace_back(s.box.axes[i].first + t.box.axes[i].first,
                          s.box.axes[i].second + t.box.axes[i].second);
    out.box = Window(std::move(axes));
    out.exact_support = true;
    for (const auto& [ps, cs] : s.coeff) {
        for (const auto& [pt, ct] : t.coeff) {
            Scalar w = cs * ct;
            if (w.is_zero()) continue;
            Point p(r);
            for (int i = 0; i < r; ++i) p[i] = ps[i] + pt[i];
            auto [it, fresh] = out.coeff.try_emplace(p, w);
            if (!fresh) it->second += w;
        }
    }
    for (auto it = out.coeff.begin(); it != out.coeff.end();)
        it = it->second.is_zero() ? out.coeff.erase(it) : std::next(it);
    return out;
}

}  // namespace qhol
