#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhol/analysis.hpp"
#include "qhol/builtins.hpp"
#include "qhol/closure.hpp"
#include "qhol/common.hpp"
#include "qhol/fourier.hpp"
#include "qhol/guess.hpp"

#include <string>
#include <vector>

using namespace qhol;

namespace {

Sequence B(const std::string& name) { return builtin_sequence(name, q_ring()); }

WeylOperator op1(const std::string& text) {
    return WeylOperator::parse(1, q_ring(), text);
}

WeylOperator op2(const std::string& text) {
    return WeylOperator::parse(2, q_ring(), text, {"n", "k"});
}

Sequence zero_seq() {
    return Sequence::make(1, q_ring(), {"n"}, "zero",
                          [](std::span<const std::int64_t>) { return Scalar::zero(q_ring()); });
}

/// Pseudo-random integer values: generic enough to have no small relations,
/// so a tight window saturates.
Sequence scrambled_seq() {
    return Sequence::make(1, q_ring(), {"n"}, "scrambled",
                          [](std::span<const std::int64_t> p) {
                              std::int64_t n = p[0];
                              return Scalar::integer(q_ring(), (n * n * 13 + n * 7 + 5) % 101 + 1);
                          });
}

/// 1/(q^n + 2): order-1 recurrence with a degree-1 rank profile, used to
/// exercise the short-tail reporting.
Sequence shifted_inverse_seq() {
    return Sequence::make(1, q_ring(), {"n"}, "shiftinv",
                          [](std::span<const std::int64_t> p) {
                              auto qr = q_ring();
                              return Scalar::one(qr) /
                                     (Scalar::q_power(qr, p[0]) + Scalar::integer(qr, 2));
                          });
}

/// Bounds that keep every guessing run in the classifier small.
GuessConfig tight_bounds(int rank) {
    GuessConfig cfg;
    cfg.order = {1};
    cfg.mdeg = 2;
    cfg.qdeg = 2;
    if (rank == 2) cfg.eval_window = Window::cube(2, 0, 10);
    return cfg;
}

/// The reported flags must be consistent with the implication chain and with
/// the sharing between direction searches and the {M_1..M_r, L_i} subsets.
void check_report_consistency(const FinitenessReport& rep) {
    if (rep.integrally_finite) CHECK(rep.finite);
    if (rep.strongly_finite_evidence) CHECK(rep.finite);
    for (const auto& d : rep.directions) {
        if (d.unit_leading) CHECK(d.found);
        CHECK(d.found == d.op.has_value());
        CHECK(d.unit_leading == d.unit_op.has_value());
    }
    // Subsets are ordered lexicographically; the first r of them are the
    // direction subsets {M_1..M_r, L_i} and must agree with the directions.
    const std::size_t r = rep.directions.size();
    REQUIRE(rep.subsets.size() >= r);
    for (std::size_t i = 0; i < r; ++i)
        CHECK(rep.subsets[i].found == rep.directions[i].found);
}

std::vector<std::size_t> ranks_of(const Sequence& f, int K, const Window& w, RankMode mode) {
    return dimension_estimate(f, K, w, mode, 42).ranks;
}

}  // namespace

// ---------------------------------------------------------------------------
// filtration ranks
// ---------------------------------------------------------------------------

TEST_CASE("basis sizes count the shift monomials of bounded degree") {
    CHECK(filtration_basis_size(1, 0) == 1);
    CHECK(filtration_basis_size(1, 1) == 3);
    CHECK(filtration_basis_size(1, 2) == 6);
    CHECK(filtration_basis_size(1, 3) == 10);
    CHECK(filtration_basis_size(2, 3) == 35);
    CHECK(filtration_basis_size(2, 6) == 210);
}

TEST_CASE("low-level ranks of qpoch match the hand count") {
    Sequence f = B("qpoch");
    // On [0, 10] the degree-1 matrix has rank 2: f, Lf, Mf, with the single
    // relation Lf = (1 - q M) f valid on the nonnegative axis.
    Window inside(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 10}});
    CHECK(filtration_rank(f, 1, inside, RankMode::Exact) == 2);
    CHECK(filtration_rank(f, 1, inside, RankMode::Probabilistic, 42) == 2);
    // A window crossing 0 picks up the third independent stratum.
    Window across(std::vector<std::pair<std::int64_t, std::int64_t>>{{-5, 6}});
    CHECK(filtration_rank(f, 1, across, RankMode::Exact) == 3);
    CHECK(filtration_rank(f, 1, across, RankMode::Probabilistic, 42) == 3);
}

TEST_CASE("too few window points is a usage error, not a capped rank") {
    CHECK_THROWS_AS(filtration_rank(B("qpoch"), 2, Window::cube(1, 0, 3), RankMode::Exact),
                    UsageError);
    CHECK_THROWS_AS(
        filtration_rank(B("qpoch"), 2, Window::cube(1, 0, 3), RankMode::Probabilistic, 42),
        UsageError);
}

TEST_CASE("the zero sequence has rank zero at every level") {
    Sequence z = zero_seq();
    Window w = Window::cube(1, 0, 10);
    CHECK(filtration_rank(z, 0, w, RankMode::Exact) == 0);
    CHECK(filtration_rank(z, 2, w, RankMode::Exact) == 0);
    CHECK(filtration_rank(z, 2, w, RankMode::Probabilistic, 42) == 0);
}

TEST_CASE("exact and probabilistic ranks agree across the rank-1 catalog") {
    Window w = Window::cube(1, -6, 8);
    const std::vector<std::size_t> steep{1, 3, 5, 7, 9};
    const std::vector<std::size_t> shallow{1, 2, 3, 4, 5};
    for (const char* name : {"qpoch", "heaviside", "qpow2"}) {
        CAPTURE(name);
        CHECK(ranks_of(B(name), 4, w, RankMode::Exact) == steep);
        CHECK(ranks_of(B(name), 4, w, RankMode::Probabilistic) == steep);
    }
    for (const char* name : {"delta", "qpow", "alt", "qtri"}) {
        CAPTURE(name);
        CHECK(ranks_of(B(name), 4, w, RankMode::Exact) == shallow);
        CHECK(ranks_of(B(name), 4, w, RankMode::Probabilistic) == shallow);
    }
}

// ---------------------------------------------------------------------------
// dimension estimates
// ---------------------------------------------------------------------------

TEST_CASE("deep rank-1 profiles fit degree one and pass the verdict") {
    Window w = Window::cube(1, -12, 36);
    DimensionReport a = dimension_estimate(B("qpoch"), 8, w, RankMode::Probabilistic, 42);
    CHECK(a.ranks == std::vector<std::size_t>{1, 3, 5, 7, 9, 11, 13, 15, 17});
    CHECK(a.fitted_degree == 1);
    CHECK(a.stabilized);
    CHECK(a.verdict == DimensionVerdict::ConsistentWithQHolonomic);

    DimensionReport b = dimension_estimate(B("delta"), 8, w, RankMode::Probabilistic, 42);
    CHECK(b.ranks == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(b.fitted_degree == 1);
    CHECK(b.verdict == DimensionVerdict::ConsistentWithQHolonomic);
}

TEST_CASE("the diagonal spike grows quadratically in rank 2") {
    DimensionReport rep =
        dimension_estimate(B("delta2"), 6, Window::cube(2, -7, 8), RankMode::Probabilistic, 42);
    CHECK(rep.ranks == std::vector<std::size_t>{1, 4, 9, 16, 25, 36, 49});
    CHECK(rep.fitted_degree == 2);
    CHECK(rep.stabilized);
    CHECK(rep.verdict == DimensionVerdict::ConsistentWithQHolonomic);
}

TEST_CASE("the non-holonomic witness exceeds the rank-2 bound") {
    DimensionReport rep =
        dimension_estimate(B("cex"), 6, Window::cube(2, -7, 8), RankMode::Probabilistic, 42);
    CHECK(rep.ranks == std::vector<std::size_t>{1, 5, 13, 26, 45, 71, 105});
    for (std::size_t k = 1; k < rep.ranks.size(); ++k) CHECK(rep.ranks[k] >= rep.ranks[k - 1]);
    CHECK(rep.fitted_degree == 3);
    CHECK_FALSE(rep.stabilized);
    CHECK(rep.verdict == DimensionVerdict::ExceedsHolonomicBound);
    CHECK(rep.to_json().find("\"verdict\":\"exceeds-holonomic-bound\"") != std::string::npos);
}

TEST_CASE("the two-variable product sequence stabilizes at degree two") {
    DimensionReport rep =
        dimension_estimate(B("Gseq"), 8, Window::cube(2, -9, 15), RankMode::Probabilistic, 42);
    CHECK(rep.ranks == std::vector<std::size_t>{1, 5, 14, 28, 47, 71, 100, 134, 173});
    CHECK(rep.fitted_degree == 2);
    CHECK(rep.stabilized);
    CHECK(rep.verdict == DimensionVerdict::ConsistentWithQHolonomic);
}

TEST_CASE("a saturated window is inconclusive, never a verdict") {
    Window w(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 2}});
    DimensionReport rep = dimension_estimate(scrambled_seq(), 1, w, RankMode::Probabilistic, 42);
    CHECK(rep.ranks == std::vector<std::size_t>{1, 3});
    CHECK(rep.verdict == DimensionVerdict::Inconclusive);
    CHECK(rep.note == "top rank equals the window point count; enlarge the window");
}

TEST_CASE("a single-entry constant row is reported as a lower bound") {
    Window w(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 5}});
    DimensionReport rep =
        dimension_estimate(shifted_inverse_seq(), 2, w, RankMode::Probabilistic, 42);
    CHECK(rep.ranks == std::vector<std::size_t>{1, 3, 5});
    CHECK(rep.fitted_degree == 1);
    CHECK_FALSE(rep.stabilized);
    CHECK(rep.verdict == DimensionVerdict::Inconclusive);
    CHECK(rep.note == "the constant difference row has a single entry; deepen K or the window");
    CHECK(rep.to_json() ==
          "{\"schema\":\"qhol/1\",\"kind\":\"dimension-report\",\"K\":2,\"ranks\":[1,3,5],"
          "\"fitted_degree\":1,\"stabilized\":false,\"verdict\":\"inconclusive\","
          "\"note\":\"the constant difference row has a single entry; deepen K or the window\","
          "\"window\":[[0,5]],\"mode\":\"probabilistic\",\"seed\":42,\"trials\":3}");
}

TEST_CASE("default depth leaves room for the top-half tail fit") {
    CHECK(dimension_default_K(1) == 8);
    CHECK(dimension_default_K(2) == 10);
}

// ---------------------------------------------------------------------------
// finiteness classification
// ---------------------------------------------------------------------------

TEST_CASE("qpoch is integrally finite with a unit-leading witness") {
    FinitenessReport rep = classify_finiteness(B("qpoch"), tight_bounds(1));
    check_report_consistency(rep);
    CHECK_FALSE(rep.zero_sequence);
    CHECK(rep.integrally_finite);
    CHECK(rep.finite);
    CHECK(rep.strongly_finite_evidence);
    REQUIRE(rep.directions.size() == 1);
    const DirectionEvidence& d = rep.directions[0];
    CHECK(d.source == "attached");
    CHECK(*d.op == op1("L - q*M*L - q^2*M^2 + 2*q*M - 1"));
    CHECK(*d.unit_op == op1("L + q*M - 1"));
    CHECK(rep.to_json({"n"}) ==
          "{\"schema\":\"qhol/1\",\"kind\":\"finiteness-report\",\"zero_sequence\":false,"
          "\"integrally_finite\":true,\"finite\":true,\"strongly_finite_evidence\":true,"
          "\"directions\":[{\"axis\":0,\"variable\":\"n\",\"found\":true,\"unit_leading\":true,"
          "\"source\":\"attached\",\"operator\":\"-q*Mn*Ln + Ln - q^2*Mn^2 + 2*q*Mn - 1\","
          "\"unit_operator\":\"Ln + q*Mn - 1\"}],"
          "\"subsets\":[{\"generators\":\"Mn,Ln\",\"found\":true,"
          "\"operator\":\"-q*Mn*Ln + Ln - q^2*Mn^2 + 2*q*Mn - 1\"}]}");
}

TEST_CASE("the spike is finite but not integrally finite") {
    FinitenessReport rep = classify_finiteness(B("delta"), tight_bounds(1));
    check_report_consistency(rep);
    CHECK_FALSE(rep.integrally_finite);
    CHECK(rep.finite);
    CHECK(rep.strongly_finite_evidence);
    REQUIRE(rep.directions.size() == 1);
    CHECK(rep.directions[0].source == "attached");
    CHECK(*rep.directions[0].op == op1("1 - M"));
    CHECK_FALSE(rep.directions[0].unit_leading);
    CHECK_FALSE(rep.directions[0].unit_op.has_value());
}

TEST_CASE("unit-leading witnesses for the step and square-exponent sequences") {
    FinitenessReport h = classify_finiteness(B("heaviside"), tight_bounds(1));
    check_report_consistency(h);
    CHECK(h.integrally_finite);
    CHECK(*h.directions[0].unit_op == op1("L - 1"));

    FinitenessReport p = classify_finiteness(B("qpow2"), tight_bounds(1));
    check_report_consistency(p);
    CHECK(p.integrally_finite);
    CHECK(*p.directions[0].unit_op == op1("L - q*M^2"));
}

TEST_CASE("the two-variable product sequence: finite, subset evidence split") {
    FinitenessReport rep = classify_finiteness(B("Gseq"), tight_bounds(2));
    check_report_consistency(rep);
    CHECK_FALSE(rep.integrally_finite);
    CHECK(rep.finite);
    CHECK_FALSE(rep.strongly_finite_evidence);
    REQUIRE(rep.directions.size() == 2);
    CHECK(rep.directions[0].source == "attached");
    CHECK(*rep.directions[0].op == op2("Mk*Ln - q*Mn*Ln + q*Mn*Mk - Mk"));
    CHECK(*rep.directions[1].op == op2("Mk*Lk - q*Mk^2*Lk + Mn - Mk"));
    REQUIRE(rep.subsets.size() == 4);
    CHECK(rep.subsets[0].gens_text == "Mn,Mk,Ln");
    CHECK(rep.subsets[0].found);
    CHECK(rep.subsets[1].gens_text == "Mn,Mk,Lk");
    CHECK(rep.subsets[1].found);
    CHECK(rep.subsets[2].gens_text == "Mn,Ln,Lk");
    CHECK_FALSE(rep.subsets[2].found);
    CHECK(rep.subsets[3].gens_text == "Mk,Ln,Lk");
    CHECK(rep.subsets[3].found);
    CHECK(*rep.subsets[3].op == op2("Ln*Lk - q*Mk*Lk - 1"));
}

TEST_CASE("the non-holonomic witness: finite in both directions only") {
    FinitenessReport rep = classify_finiteness(B("cex"), tight_bounds(2));
    check_report_consistency(rep);
    CHECK_FALSE(rep.integrally_finite);
    CHECK(rep.finite);
    CHECK_FALSE(rep.strongly_finite_evidence);
    REQUIRE(rep.subsets.size() == 4);
    CHECK(rep.subsets[0].found);
    CHECK(rep.subsets[1].found);
    CHECK_FALSE(rep.subsets[2].found);  // Mn,Ln,Lk
    CHECK_FALSE(rep.subsets[3].found);  // Mk,Ln,Lk
}

TEST_CASE("the zero sequence is trivially everything") {
    FinitenessReport rep = classify_finiteness(zero_seq(), tight_bounds(1));
    check_report_consistency(rep);
    CHECK(rep.zero_sequence);
    CHECK(rep.integrally_finite);
    CHECK(rep.finite);
    CHECK(rep.strongly_finite_evidence);
    REQUIRE(rep.directions.size() == 1);
    CHECK(rep.directions[0].source == "zero");
    CHECK(*rep.directions[0].op == op1("1"));
}

// ---------------------------------------------------------------------------
// equality relative to a system
// ---------------------------------------------------------------------------

TEST_CASE("the telescoped product equals the step sequence modulo its system") {
    Sequence f = seq_mul(B("qpoch"), B("qpochinv"));
    Sequence h = B("heaviside");
    AnnihilatorSystem sys = closure_mul_system(B("qpoch"), B("qpochinv"));
    std::vector<Point> base{{-1}, {0}, {1}};
    EqualityReport rep = prove_equal(f, h, sys, base);
    CHECK(rep.equal);
    CHECK(rep.status == "equal-modulo-annihilator-claim");
    CHECK_FALSE(rep.witness.has_value());
    CHECK(rep.message.find("provided the system annihilates both sequences") != std::string::npos);
    CHECK(rep.to_json({"n"}).find("\"kind\":\"equality-report\"") != std::string::npos);
    CHECK(rep.to_json({"n"}).find("\"witness\":null") != std::string::npos);

    // Without the point left of the vanishing leading coefficient the base
    // set cannot reach the negative half-line.
    try {
        prove_equal(f, h, sys, {{5}});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        std::string msg = e.what();
        CHECK(msg.find("do not determine the value at") != std::string::npos);
        CHECK(msg.find("(-6)") != std::string::npos);
        CHECK(msg.find("enlarge the base set") != std::string::npos);
    }
}

TEST_CASE("a value difference is an unconditional mismatch witness") {
    Sequence f = B("qpow");
    Sequence g = B("alt");
    REQUIRE(f.system() != nullptr);
    EqualityReport rep = prove_equal(f, g, *f.system(), {{0}, {1}});
    CHECK_FALSE(rep.equal);
    CHECK(rep.status == "mismatch");
    REQUIRE(rep.witness.has_value());
    CHECK(*rep.witness == Point{1});
}

TEST_CASE("a system failing on either sequence is rejected by name") {
    Sequence f = B("qpow");
    Sequence g = B("qtri");
    const AnnihilatorSystem& sys = *f.system();
    try {
        prove_equal(f, g, sys, {{0}});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("second sequence") != std::string::npos);
    }
    try {
        prove_equal(g, f, sys, {{0}});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("first sequence") != std::string::npos);
    }
}

// ---------------------------------------------------------------------------
// formal series
// ---------------------------------------------------------------------------

TEST_CASE("truncating a spike yields an exactly supported series") {
    FormalSeries d = fourier_truncate(B("delta"), Window::cube(1, -3, 3));
    CHECK(d.exact_support);
    CHECK(d.str() == "z^(0) : 1");
    CHECK(d.at({0}) == Scalar::one(q_ring()));
    CHECK(d.at({2}).is_zero());
    CHECK(d.at({10}).is_zero());  // outside the box, but the support is exact
}

TEST_CASE("a full-line truncation refuses reads outside its box") {
    FormalSeries s = fourier_truncate(B("qpow"), Window::cube(1, -3, 3));
    CHECK_FALSE(s.exact_support);
    CHECK(s.at({3}) == Scalar::q_power(q_ring(), 3));
    CHECK_THROWS_AS(s.at({4}), UsageError);
}

TEST_CASE("the shift operator transports to the series side") {
    Sequence f = B("qpow");
    FormalSeries s = fourier_truncate(f, Window::cube(1, -3, 3));
    FormalSeries t = series_op(op1("L"), s);
    CHECK(t.box == Window::cube(1, -4, 2));
    for (std::int64_t p = -4; p <= 2; ++p) CHECK(t.at({p}) == f.at({p + 1}));
}

TEST_CASE("an annihilator of the sequence kills its transform") {
    FormalSeries s = fourier_truncate(B("qpow"), Window::cube(1, -3, 3));
    FormalSeries t = series_op(op1("L - q"), s);
    CHECK(t.box == Window(std::vector<std::pair<std::int64_t, std::int64_t>>{{-3, 2}}));
    CHECK(t.coeff.empty());
}

TEST_CASE("the commutation rule survives the transport") {
    FormalSeries s = fourier_truncate(B("qpow"), Window::cube(1, -4, 4));
    FormalSeries lm = series_op(op1("L"), series_op(op1("M"), s));
    FormalSeries ml = series_op(op1("M"), series_op(op1("L"), s));
    FormalSeries rhs = series_scale(Scalar::variable(q_ring(), "q"), ml);
    CHECK(lm.box == Window::cube(1, -5, 3));
    CHECK(lm == rhs);
}

TEST_CASE("hadamard product transports the pointwise product") {
    Window box = Window::cube(1, -3, 3);
    FormalSeries a = hadamard(fourier_truncate(B("qpow"), box), fourier_truncate(B("alt"), box));
    CHECK(a == fourier_truncate(seq_mul(B("qpow"), B("alt")), box));
    FormalSeries b =
        hadamard(fourier_truncate(B("heaviside"), box), fourier_truncate(B("qpow"), box));
    CHECK(b == fourier_truncate(seq_mul(B("heaviside"), B("qpow")), box));
}

TEST_CASE("multiplication rules on the hadamard side") {
    Window box = Window::cube(1, -3, 3);
    FormalSeries s = fourier_truncate(B("qpow"), box);
    FormalSeries t = fourier_truncate(B("alt"), box);
    WeylOperator M = op1("M");
    WeylOperator L = op1("L");
    CHECK(series_op(M, hadamard(s, t)) == hadamard(series_op(M, s), t));
    CHECK(series_op(M, hadamard(s, t)) == hadamard(s, series_op(M, t)));
    CHECK(series_op(L, hadamard(s, t)) == hadamard(series_op(L, s), series_op(L, t)));
}

TEST_CASE("the spike is the unit of series multiplication") {
    FormalSeries d = fourier_truncate(B("delta"), Window::cube(1, -4, 4));
    FormalSeries p = series_mul(d, d);
    CHECK(p.exact_support);
    CHECK(p.coeff.size() == 1);
    CHECK(p.at({0}) == Scalar::one(q_ring()));
    CHECK(p == fourier_truncate(B("delta"), p.box));
}

TEST_CASE("convolving a truncated geometric block squares the series") {
    auto qr = q_ring();
    Window support(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 3}});
    Sequence blk = seq_truncate(B("qpow"), support);
    FormalSeries s = fourier_truncate(blk, support);
    REQUIRE(s.exact_support);
    FormalSeries p = series_mul(s, s);
    CHECK(p.box == Window(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 6}}));
    const std::int64_t counts[7] = {1, 2, 3, 4, 3, 2, 1};
    for (std::int64_t m = 0; m <= 6; ++m)
        CHECK(p.at({m}) == Scalar::integer(qr, counts[m]) * Scalar::q_power(qr, m));
    // Cross-check against the sequence-level convolution.
    Sequence conv = seq_convolve(blk, blk, 1);
    for (std::int64_t m = 0; m <= 6; ++m) CHECK(p.at({m}) == conv.at({m}));
}

TEST_CASE("multiplication requires exactly supported operands") {
    FormalSeries s = fourier_truncate(B("qpow"), Window::cube(1, -3, 3));
    try {
        series_mul(s, s);
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()) ==
              "power-series multiplication needs exactly supported operands; enlarge the "
              "truncation boxes until they contain the whole support");
    }
}

TEST_CASE("multiplication rules on the convolution side") {
    Window support(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 3}});
    FormalSeries s = fourier_truncate(seq_truncate(B("qpow"), support), support);
    FormalSeries t = fourier_truncate(seq_truncate(B("qtri"), support), support);
    WeylOperator M = op1("M");
    WeylOperator L = op1("L");
    CHECK(series_op(M, series_mul(s, t)) == series_mul(series_op(M, s), series_op(M, t)));
    FormalSeries lhs = series_op(L, series_mul(s, t));
    FormalSeries r1 = series_mul(series_op(L, s), t);
    FormalSeries r2 = series_mul(s, series_op(L, t));
    // The three boxes may differ; compare coefficients on the common range.
    for (std::int64_t m = -1; m <= 5; ++m) {
        CHECK(lhs.at({m}) == r1.at({m}));
        CHECK(lhs.at({m}) == r2.at({m}));
    }
}

TEST_CASE("series addition tracks exactness") {
    auto qr = q_ring();
    FormalSeries d = fourier_truncate(B("delta"), Window::cube(1, -3, 3));
    Window support(std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 3}});
    FormalSeries blk = fourier_truncate(seq_truncate(B("qpow"), support), support);
    FormalSeries u = series_add(d, blk);
    CHECK(u.exact_support);
    CHECK(u.box == Window::cube(1, -3, 3));
    CHECK(u.at({0}) == Scalar::integer(qr, 2));
    CHECK(u.at({3}) == Scalar::q_power(qr, 3));
    CHECK(u.at({-2}).is_zero());

    FormalSeries s = fourier_truncate(B("qpow"), Window::cube(1, -3, 3));
    FormalSeries t =
        fourier_truncate(B("alt"), Window(std::vector<std::pair<std::int64_t, std::int64_t>>{{-1, 5}}));
    FormalSeries v = series_add(s, t);
    CHECK_FALSE(v.exact_support);
    CHECK(v.box == Window(std::vector<std::pair<std::int64_t, std::int64_t>>{{-1, 3}}));
    CHECK(v.at({0}) == Scalar::integer(qr, 2));
    CHECK(v.at({1}) == Scalar::variable(qr, "q") - Scalar::one(qr));
}
