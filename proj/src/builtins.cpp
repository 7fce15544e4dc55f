#include "qhol/builtins.hpp"

#include <algorithm>

namespace qhol {

namespace {

constexpr std::int64_t kBuiltinVerifyLo = -4;
constexpr std::int64_t kBuiltinVerifyHi = 4;

struct BuiltinInfo {
    const char* name;
    int rank;
    bool needs_x;
};

const std::vector<BuiltinInfo>& catalog() {
    static const std::vector<BuiltinInfo> c = {
        {"alt", 1, false},    {"qpow", 1, false},      {"qpow2", 1, false},
        {"qtri", 1, false},   {"delta", 1, false},     {"heaviside", 1, false},
        {"qpoch", 1, false},  {"qpochinv", 1, false},  {"xqpoch", 1, true},
        {"delta2", 2, false}, {"Fseq", 2, false},      {"Gseq", 2, false},
        {"Hbin", 2, true},    {"Kbin", 3, false},      {"cex", 2, false},
    };
    return c;
}

const BuiltinInfo& info_for(const std::string& name) {
    for (auto& b : catalog())
        if (name == b.name) return b;
    throw UsageError("unknown builtin '" + name + "'");
}

Scalar qp(const RingPtr& ring, std::int64_t e) { return Scalar::q_power(ring, e); }

/// (q;q)_n = prod_{j=1}^{n} (1 - q^j) for n >= 0 (1 when n == 0).
Scalar qpoch_value(const RingPtr& ring, std::int64_t n) {
    Scalar acc = Scalar::one(ring);
    for (std::int64_t j = 1; j <= n; ++j) acc *= Scalar::one(ring) - qp(ring, j);
    return acc;
}

/// (x;q)_n on all of Z: prod_{j=0}^{n-1}(1 - x q^j) for n >= 0 and
/// prod_{j=1}^{-n} 1/(1 - x q^{-j}) for n < 0 (the natural extension).
Scalar xqpoch_value(const RingPtr& ring, std::int64_t n) {
    Scalar x = Scalar::variable(ring, "x");
    Scalar acc = Scalar::one(ring);
    if (n >= 0) {
        for (std::int64_t j = 0; j < n; ++j) acc *= Scalar::one(ring) - x * qp(ring, j);
    } else {
        for (std::int64_t j = 1; j <= -n; ++j) acc /= Scalar::one(ring) - x * qp(ring, -j);
    }
    return acc;
}

Scalar hbin_value(const RingPtr& ring, std::int64_t n, std::int64_t k) {
    if (k < 0) return Scalar::zero(ring);
    Scalar x = Scalar::variable(ring, "x");
    Scalar xi = x.inverse();
    Scalar acc = Scalar::one(ring);
    for (std::int64_t j = 1; j <= k; ++j) {
        Scalar numf = x * qp(ring, n - j + 1) - xi * qp(ring, -n + j - 1);
        Scalar denf = qp(ring, j) - qp(ring, -j);
        acc *= numf / denf;
    }
    return acc;
}

Scalar kbin_value(const RingPtr& ring, std::int64_t n, std::int64_t k, std::int64_t l) {
    if (k < 0) return Scalar::zero(ring);
    Scalar acc = Scalar::one(ring);
    for (std::int64_t j = 1; j <= k; ++j) {
        Scalar numf = qp(ring, l + n - j + 1) - qp(ring, -l - n + j - 1);
        Scalar denf = qp(ring, j) - qp(ring, -j);
        acc *= numf / denf;
    }
    return acc;
}

// Operator-building helpers over a fixed rank/ring.
struct OpKit {
    int r;
    RingPtr ring;
    WeylOperator M(int axis, std::int64_t e = 1) const {
        return WeylOperator::gen_M(r, ring, axis, e);
    }
    WeylOperator L(int axis, std::int64_t e = 1) const {
        return WeylOperator::gen_L(r, ring, axis, e);
    }
    WeylOperator c(std::int64_t v) const {
        return WeylOperator::from_scalar(r, Scalar::integer(ring, v));
    }
    WeylOperator q(std::int64_t e = 1) const {
        return WeylOperator::from_scalar(r, Scalar::q_power(ring, e));
    }
    WeylOperator x(std::int64_t e = 1) const {
        Scalar xv = Scalar::variable(ring, "x");
        return WeylOperator::from_scalar(r, xv.pow(e));
    }
};

AnnihilatorSystem make_system(int rank, std::map<int, WeylOperator> direction,
                              std::vector<WeylOperator> extras) {
    AnnihilatorSystem sys;
    sys.rank = rank;
    sys.direction = std::move(direction);
    sys.extras = std::move(extras);
    sys.status = VerifyStatus::Claimed;
    sys.provenance = "builtin";
    return sys;
}

Sequence build(const std::string& name, const RingPtr& ring) {
    const BuiltinInfo& bi = info_for(name);
    const int r = bi.rank;
    OpKit k{r, ring};

    Sequence seq;
    AnnihilatorSystem sys;

    if (name == "alt") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return Scalar::integer(ring, (p[0] % 2 + 2) % 2 == 0 ? 1 : -1);
        });
        sys = make_system(1, {{0, k.L(0) + k.c(1)}}, {});
    } else if (name == "qpow") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return qp(ring, p[0]);
        });
        sys = make_system(1, {{0, k.L(0) - k.q()}}, {});
    } else if (name == "qpow2") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return qp(ring, p[0] * p[0]);
        });
        sys = make_system(1, {{0, k.L(0) - k.q() * k.M(0, 2)}}, {});
    } else if (name == "qtri") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return qp(ring, p[0] * (p[0] - 1) / 2);
        });
        sys = make_system(1, {{0, k.L(0) - k.M(0)}}, {});
    } else if (name == "delta") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return Scalar::integer(ring, p[0] == 0 ? 1 : 0);
        });
        sys = make_system(1, {{0, k.c(1) - k.M(0)}}, {});
        seq = seq.with_support(SupportSpec::finite_box(Window::cube(1, 0, 0)));
    } else if (name == "heaviside") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return Scalar::integer(ring, p[0] >= 0 ? 1 : 0);
        });
        sys = make_system(1, {{0, (k.c(1) - k.q() * k.M(0)) * (k.L(0) - k.c(1))}}, {});
    } else if (name == "qpoch") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            if (p[0] < 0) return Scalar::zero(ring);
            return qpoch_value(ring, p[0]);
        });
        WeylOperator u = k.c(1) - k.q() * k.M(0);
        sys = make_system(1, {{0, u * k.L(0) - u * u}}, {});
    } else if (name == "qpochinv") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            if (p[0] < 0) return Scalar::zero(ring);
            return qpoch_value(ring, p[0]).inverse();
        });
        sys = make_system(1, {{0, (k.c(1) - k.q() * k.M(0)) * k.L(0) - k.c(1)}}, {});
    } else if (name == "xqpoch") {
        seq = Sequence::make(1, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return xqpoch_value(ring, p[0]);
        });
        sys = make_system(1, {{0, k.L(0) + (k.x() * k.M(0) - k.c(1))}}, {});
    } else if (name == "delta2") {
        seq = Sequence::make(2, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return Scalar::integer(ring, p[0] == p[1] ? 1 : 0);
        });
        sys = make_system(
            2,
            {{0, (k.M(1) - k.q() * k.M(0)) * k.L(0)},
             {1, (k.M(0) - k.q() * k.M(1)) * k.L(1)}},
            {k.L(0) * k.L(1) - k.c(1), k.M(0) - k.M(1)});
        seq = seq.with_support(SupportSpec::per_prefix(1, [](std::span<const std::int64_t> pre) {
            Window w;
            w.axes.emplace_back(pre[0], pre[0]);
            return w;
        }));
    } else if (name == "Fseq") {
        seq = Sequence::make(2, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            std::int64_t n = p[0], kk = p[1];
            if (kk < 0) return Scalar::zero(ring);
            Scalar acc = Scalar::one(ring);
            for (std::int64_t j = 0; j < kk; ++j) acc *= Scalar::one(ring) - qp(ring, n - j);
            return acc;
        });
        WeylOperator ndir =
            (k.M(1) - k.q() * k.M(0)) * k.L(0) - k.M(1) * (k.c(1) - k.q() * k.M(0));
        WeylOperator kdir = (k.c(1) - k.q() * k.M(1)) *
                            (k.M(1) * k.L(1) - k.M(1) + k.M(0));
        sys = make_system(2, {{0, ndir}, {1, kdir}}, {});
    } else if (name == "Gseq") {
        seq = Sequence::make(2, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            std::int64_t n = p[0], kk = p[1];
            if (kk < 0 || kk > n) return Scalar::zero(ring);
            Scalar acc = Scalar::one(ring);
            for (std::int64_t j = 0; j < kk; ++j) acc *= Scalar::one(ring) - qp(ring, n - j);
            return acc / qpoch_value(ring, kk);
        });
        WeylOperator ndir =
            (k.M(1) - k.q() * k.M(0)) * k.L(0) - k.M(1) * (k.c(1) - k.q() * k.M(0));
        WeylOperator kdir =
            (k.M(1) - k.q() * k.M(1) * k.M(1)) * k.L(1) - (k.M(1) - k.M(0));
        sys = make_system(2, {{0, ndir}, {1, kdir}}, {});
        seq = seq.with_support(SupportSpec::per_prefix(1, [](std::span<const std::int64_t> pre) {
            Window w;
            w.axes.emplace_back(0, pre[0]);  // empty when the row index is negative
            return w;
        }));
    } else if (name == "Hbin") {
        seq = Sequence::make(2, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return hbin_value(ring, p[0], p[1]);
        });
        WeylOperator ndir = (k.x(2) * k.q(2) * k.M(0, 2) - k.M(1, 2)) * k.L(0) -
                            (k.x(2) * k.q(2) * k.M(0, 2) - k.c(1)) * k.M(1);
        WeylOperator kdir = (k.q(2) * k.M(0) * k.M(1, 2) - k.M(0)) * k.L(1) -
                            k.q() * k.x() * k.M(0, 2) + k.q() * k.x(-1) * k.M(1, 2);
        // Clear the x^{-1} so the operator stays polynomial.
        kdir = k.x() * kdir;
        sys = make_system(2, {{0, ndir}, {1, kdir}}, {});
    } else if (name == "Kbin") {
        seq = Sequence::make(3, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            return kbin_value(ring, p[0], p[1], p[2]);
        });
        WeylOperator common = k.q(2) * k.M(2, 2) * k.M(0, 2);
        WeylOperator ndir = (common - k.M(1, 2)) * k.L(0) - (common - k.c(1)) * k.M(1);
        WeylOperator ldir = (common - k.M(1, 2)) * k.L(2) - (common - k.c(1)) * k.M(1);
        WeylOperator kdir =
            (k.q(2) * k.M(0) * k.M(2) * k.M(1, 2) - k.M(0) * k.M(2)) * k.L(1) -
            k.q() * (k.M(2, 2) * k.M(0, 2) - k.M(1, 2));
        sys = make_system(3, {{0, ndir}, {1, kdir}, {2, ldir}},
                          {k.L(0) - k.L(2)});
    } else if (name == "cex") {
        seq = Sequence::make(2, ring, {}, name, [ring](std::span<const std::int64_t> p) {
            Scalar den = qp(ring, p[0]) + qp(ring, p[1]) + Scalar::one(ring);
            return den.inverse();
        });
        WeylOperator s = k.M(0) + k.M(1) + k.c(1);
        sys = make_system(2,
                          {{0, (k.q() * k.M(0) + k.M(1) + k.c(1)) * k.L(0) - s},
                           {1, (k.M(0) + k.q() * k.M(1) + k.c(1)) * k.L(1) - s}},
                          {});
    } else {
        throw UsageError("unknown builtin '" + name + "'");
    }

    // Zero-extensions of one-sided objects are marked NonNegative on the
    // extended axes; their simple natural-side recurrences then verify on
    // the appropriate default windows.
    const AxisDomain Z = AxisDomain::FullLine, N = AxisDomain::NonNegative;
    if (name == "qpoch" || name == "qpochinv" || name == "heaviside")
        seq = seq.with_domains({N});
    else if (name == "Gseq")
        seq = seq.with_domains({N, N});
    else if (name == "Fseq" || name == "Hbin")
        seq = seq.with_domains({Z, N});
    else if (name == "Kbin")
        seq = seq.with_domains({Z, N, Z});

    return attach_verified(seq, std::move(sys),
                           Window::cube(r, kBuiltinVerifyLo, kBuiltinVerifyHi));
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (auto& b : catalog()) v.emplace_back(b.name);
        return v;
    }();
    return names;
}

bool is_builtin(const std::string& name) {
    auto& names = builtin_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

int builtin_rank(const std::string& name) { return info_for(name).rank; }

std::vector<std::string> builtin_params(const std::string& name) {
    return info_for(name).needs_x ? std::vector<std::string>{"x"} : std::vector<std::string>{};
}

Sequence builtin_sequence(const std::string& name, const RingPtr& sring) {
    if (!sring || sring->size() == 0 || sring->name(0) != "q")
        throw UsageError("builtin sequences need a scalar ring with q first");
    for (auto& p : builtin_params(name))
        if (!sring->index_of(p))
            throw UsageError("builtin '" + name + "' needs parameter '" + p +
                             "' in the scalar ring");
    return build(name, sring);
}

RingPtr q_ring() { return PolyRing::make({"q"}); }

RingPtr qx_ring() { return PolyRing::make({"q", "x"}); }

}  // namespace qhol
