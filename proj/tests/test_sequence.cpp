#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhol/builtins.hpp"
#include "qhol/sequence.hpp"

using namespace qhol;

namespace {

Scalar S(const RingPtr& ring, const char* text) { return Scalar::parse(ring, text); }

}  // namespace

TEST_CASE("builtin catalog shape") {
    CHECK(builtin_names().size() == 15);
    CHECK(builtin_rank("qpoch") == 1);
    CHECK(builtin_rank("Gseq") == 2);
    CHECK(builtin_rank("Kbin") == 3);
    CHECK(builtin_params("Hbin") == std::vector<std::string>{"x"});
    CHECK_THROWS_AS((void)builtin_sequence("nope", q_ring()), UsageError);
    // Parameter-needing builtins reject a plain k(q) ring.
    CHECK_THROWS_AS((void)builtin_sequence("xqpoch", q_ring()), UsageError);
    // q must be the first ring variable.
    CHECK_THROWS_AS((void)builtin_sequence("qpow", PolyRing::make({"x", "q"})), UsageError);
}

TEST_CASE("rank-1 builtin values") {
    RingPtr R = q_ring();
    Sequence alt = builtin_sequence("alt", R);
    CHECK(alt.at({0}) == S(R, "1"));
    CHECK(alt.at({-3}) == S(R, "-1"));
    CHECK(alt.at({4}) == S(R, "1"));

    Sequence qpow = builtin_sequence("qpow", R);
    CHECK(qpow.at({5}) == S(R, "q^5"));
    CHECK(qpow.at({-2}) == S(R, "q^-2"));

    Sequence qpow2 = builtin_sequence("qpow2", R);
    CHECK(qpow2.at({3}) == S(R, "q^9"));
    CHECK(qpow2.at({-3}) == S(R, "q^9"));

    Sequence qtri = builtin_sequence("qtri", R);
    CHECK(qtri.at({4}) == S(R, "q^6"));
    CHECK(qtri.at({0}) == S(R, "1"));
    CHECK(qtri.at({-1}) == S(R, "q"));

    Sequence delta = builtin_sequence("delta", R);
    CHECK(delta.at({0}) == S(R, "1"));
    CHECK(delta.at({2}) == S(R, "0"));
    CHECK(delta.at({-1}) == S(R, "0"));

    Sequence hv = builtin_sequence("heaviside", R);
    CHECK(hv.at({0}) == S(R, "1"));
    CHECK(hv.at({7}) == S(R, "1"));
    CHECK(hv.at({-1}) == S(R, "0"));
}

TEST_CASE("q-Pochhammer family values") {
    RingPtr R = q_ring();
    Sequence qpoch = builtin_sequence("qpoch", R);
    CHECK(qpoch.at({0}) == S(R, "1"));
    CHECK(qpoch.at({1}) == S(R, "1 - q"));
    CHECK(qpoch.at({3}) == S(R, "1 - q - q^2 + q^4 + q^5 - q^6"));
    CHECK(qpoch.at({-1}) == S(R, "0"));
    CHECK(qpoch.at({-2}) == S(R, "0"));

    Sequence inv = builtin_sequence("qpochinv", R);
    CHECK(inv.at({2}) * qpoch.at({2}) == S(R, "1"));
    CHECK(inv.at({0}) == S(R, "1"));
    CHECK(inv.at({-3}) == S(R, "0"));

    RingPtr Rx = qx_ring();
    Sequence xp = builtin_sequence("xqpoch", Rx);
    CHECK(xp.at({0}) == S(Rx, "1"));
    CHECK(xp.at({2}) == S(Rx, "(1 - x)*(1 - x*q)"));
    // The natural extension keeps the one-step ratio exact across 0:
    // f(n+1) = (1 - x q^n) f(n) at n = -1.
    CHECK(xp.at({0}) == (S(Rx, "1") - S(Rx, "x*q^-1")) * xp.at({-1}));
    CHECK(xp.at({-2}) == S(Rx, "1") / S(Rx, "(1 - x*q^-1)*(1 - x*q^-2)"));
}

TEST_CASE("rank-2 and rank-3 builtin values") {
    RingPtr R = q_ring();
    Sequence d2 = builtin_sequence("delta2", R);
    CHECK(d2.at({3, 3}) == S(R, "1"));
    CHECK(d2.at({-2, -2}) == S(R, "1"));
    CHECK(d2.at({1, 0}) == S(R, "0"));

    Sequence F = builtin_sequence("Fseq", R);
    CHECK(F.at({2, 2}) == S(R, "(1 - q^2)*(1 - q)"));
    CHECK(F.at({-1, 1}) == S(R, "(q - 1)/q"));
    CHECK(F.at({2, 3}) == S(R, "0"));  // the j = 2 factor vanishes
    CHECK(F.at({3, -1}) == S(R, "0"));

    Sequence G = builtin_sequence("Gseq", R);
    CHECK(G.at({0, 0}) == S(R, "1"));
    CHECK(G.at({2, 1}) == S(R, "1 + q"));
    CHECK(G.at({4, 2}) == S(R, "(1 + q^2)*(1 + q + q^2)"));
    CHECK(G.at({1, 2}) == S(R, "0"));
    CHECK(G.at({-1, 0}) == S(R, "0"));
    CHECK(G.at({5, 2}) == G.at({5, 3}));  // symmetry k <-> n-k

    RingPtr Rx = qx_ring();
    Sequence H = builtin_sequence("Hbin", Rx);
    CHECK(H.at({5, 0}) == S(Rx, "1"));
    CHECK(H.at({-2, 0}) == S(Rx, "1"));
    CHECK(H.at({1, 1}) * (S(Rx, "q") - S(Rx, "q^-1")) == S(Rx, "x*q - x^-1*q^-1"));
    CHECK(H.at({0, -1}) == S(Rx, "0"));

    Sequence K = builtin_sequence("Kbin", R);
    CHECK(K.at({1, 1, 0}) == S(R, "1"));
    CHECK(K.at({2, 1, 0}) == S(R, "q + q^-1"));
    CHECK(K.at({0, 1, 2}) == S(R, "q + q^-1"));  // depends on n + l only
    CHECK(K.at({2, 1, 0}) == K.at({0, 1, 2}));

    Sequence cex = builtin_sequence("cex", R);
    CHECK(cex.at({0, 0}) == S(R, "1/3"));
    CHECK(cex.at({1, 0}) == S(R, "1/(q + 2)"));
    CHECK(cex.at({-1, -1}) == S(R, "q/(q + 2)"));
}

TEST_CASE("attached systems are construction-verified and vanish on a larger window") {
    RingPtr R = q_ring();
    for (const char* name : {"alt", "qpow", "qpow2", "qtri", "delta", "heaviside",
                             "qpoch", "qpochinv"}) {
        Sequence f = builtin_sequence(name, R);
        REQUIRE(f.system() != nullptr);
        CHECK(f.system()->status == VerifyStatus::WindowVerified);
        for (auto& op : f.system()->all_operators())
            CHECK(!verify_operator(op, f, Window::cube(1, -6, 6)).has_value());
    }
    for (const char* name : {"delta2", "Fseq", "Gseq", "cex"}) {
        Sequence f = builtin_sequence(name, R);
        REQUIRE(f.system() != nullptr);
        for (auto& op : f.system()->all_operators())
            CHECK(!verify_operator(op, f, Window::cube(2, -5, 5)).has_value());
    }
    {
        Sequence f = builtin_sequence("Hbin", qx_ring());
        for (auto& op : f.system()->all_operators())
            CHECK(!verify_operator(op, f, Window::cube(2, -5, 5)).has_value());
    }
    {
        Sequence f = builtin_sequence("Kbin", R);
        CHECK(f.system()->status == VerifyStatus::WindowVerified);
        CHECK(f.system()->window == Window::cube(3, -4, 4));
    }
}

TEST_CASE("weyl_apply matches the shift/scale action") {
    RingPtr R = q_ring();
    Sequence qpow = builtin_sequence("qpow", R);
    // (M f)(n) = q^n f(n) and (L f)(n) = f(n+1).
    WeylOperator M = WeylOperator::gen_M(1, R, 0);
    WeylOperator L = WeylOperator::gen_L(1, R, 0);
    CHECK(weyl_apply(M, qpow, {3}) == S(R, "q^6"));
    CHECK(weyl_apply(L, qpow, {3}) == S(R, "q^4"));
    CHECK(weyl_apply(L.pow(-1), qpow, {3}) == S(R, "q^2"));

    // A wrong operator is caught with the first failing window point.
    WeylOperator bad = L - WeylOperator::from_scalar(1, S(R, "q^2"));
    auto witness = verify_operator(bad, qpow, Window::cube(1, -2, 2));
    REQUIRE(witness.has_value());
    CHECK(*witness == Point{-2});

    // Rank-2 action with mixed exponents.
    Sequence G = builtin_sequence("Gseq", R);
    WeylOperator mixed = WeylOperator::gen_M(2, R, 0) * WeylOperator::gen_L(2, R, 1);
    CHECK(weyl_apply(mixed, G, {2, 0}) == S(R, "q^2") * G.at({2, 1}));
}

TEST_CASE("verify_system failure reporting and attach_verified") {
    RingPtr R = q_ring();
    Sequence qpow = builtin_sequence("qpow", R);
    AnnihilatorSystem sys;
    sys.rank = 1;
    sys.direction[0] = WeylOperator::parse(1, R, "L - q^2");
    auto bad = verify_system(sys, qpow, Window::cube(1, 0, 3));
    REQUIRE(bad.has_value());
    CHECK(*bad == Point{0});
    CHECK(sys.status == VerifyStatus::Claimed);
    CHECK_THROWS_AS((void)attach_verified(qpow, sys, Window::cube(1, 0, 3)), Error);

    sys.direction[0] = WeylOperator::parse(1, R, "L - q");
    CHECK(!verify_system(sys, qpow, Window::cube(1, -3, 3)).has_value());
    CHECK(sys.status == VerifyStatus::WindowVerified);
    CHECK(sys.window == Window::cube(1, -3, 3));
}

TEST_CASE("pointwise combinators") {
    RingPtr R = q_ring();
    Sequence qpow = builtin_sequence("qpow", R);
    Sequence alt = builtin_sequence("alt", R);
    Sequence sum = seq_add(qpow, alt);
    CHECK(sum.at({2}) == S(R, "q^2 + 1"));
    Sequence prod = seq_mul(qpow, alt);
    CHECK(prod.at({3}) == S(R, "-q^3"));
    Sequence scaled = seq_scale(S(R, "5"), qpow);
    CHECK(scaled.at({1}) == S(R, "5*q"));
    CHECK_THROWS_AS((void)seq_add(qpow, builtin_sequence("Gseq", R)), UsageError);
}

TEST_CASE("affine reindexing") {
    RingPtr R = q_ring();
    Sequence qpow2 = builtin_sequence("qpow2", R);
    Sequence doubled = seq_affine(qpow2, {{2}}, {0});
    CHECK(doubled.at({1}) == S(R, "q^4"));
    CHECK(doubled.at({2}) == S(R, "q^16"));

    Sequence qpoch = builtin_sequence("qpoch", R);
    Sequence shifted = seq_affine(qpoch, {{1}}, {1});
    CHECK(shifted.at({-1}) == S(R, "1"));
    CHECK(shifted.at({2}) == qpoch.at({3}));

    // Diagonal restriction of a rank-2 sequence to rank 1.
    Sequence G = builtin_sequence("Gseq", R);
    Sequence central = seq_affine(G, {{2}, {1}}, {0, 0});
    CHECK(central.at({1}) == G.at({2, 1}));
    CHECK(central.at({2}) == G.at({4, 2}));

    CHECK_THROWS_AS((void)seq_affine(qpoch, {{1}, {0}}, {0}), UsageError);
}

TEST_CASE("restrict and extend") {
    RingPtr R = q_ring();
    Sequence G = builtin_sequence("Gseq", R);
    Sequence col1 = seq_restrict(G, {1});
    CHECK(col1.rank() == 1);
    CHECK(col1.at({3}) == S(R, "1 + q + q^2"));
    CHECK(col1.at({0}) == S(R, "0"));

    Sequence alt = builtin_sequence("alt", R);
    Sequence wide = seq_extend(alt, 1);
    CHECK(wide.rank() == 2);
    CHECK(wide.at({3, 17}) == S(R, "-1"));
    CHECK(wide.vars().size() == 2);

    // Round trip: extend then restrict recovers the original values.
    Sequence back = seq_restrict(wide, {0});
    CHECK(back.at({5}) == alt.at({5}));
}

TEST_CASE("truncation and convolution") {
    RingPtr R = q_ring();
    Sequence hv = builtin_sequence("heaviside", R);
    Window box = Window::cube(1, 0, 3);
    Sequence f = seq_truncate(hv, box);
    CHECK(f.at({3}) == S(R, "1"));
    CHECK(f.at({4}) == S(R, "0"));
    REQUIRE(f.find_strict(1).has_value());
    REQUIRE(f.find_per_prefix(0).has_value());

    Sequence delta = builtin_sequence("delta", R);
    Sequence dshift = seq_affine(delta, {{1}}, {-1})
                          .with_support(SupportSpec::finite_box(Window::cube(1, 1, 1)));
    Sequence conv = seq_convolve(f, dshift, 0);
    for (std::int64_t n = -2; n <= 6; ++n) {
        Point p{n}, pm{n - 1};
        CHECK(conv.at(p) == f.at(pm));
    }
    // Convolution with the plain delta is the identity.
    Sequence convId = seq_convolve(f, delta, 0);
    for (std::int64_t n = -1; n <= 5; ++n) {
        Point p{n};
        CHECK(convId.at(p) == f.at(p));
    }
    // Symmetric order gives the same values.
    Sequence conv2 = seq_convolve(dshift, f, 0);
    for (std::int64_t n = -2; n <= 6; ++n) {
        Point p{n};
        CHECK(conv2.at(p) == conv.at(p));
    }
    // Missing support information is reported as a usage error.
    CHECK_THROWS_AS((void)seq_convolve(delta, hv, 1), UsageError);
    CHECK_THROWS_AS((void)seq_convolve(hv, delta, 0), UsageError);
}

TEST_CASE("bounded and full-line summation") {
    RingPtr R = q_ring();
    Sequence G = builtin_sequence("Gseq", R);
    Sequence ms = seq_multisum_bounded(G);
    CHECK(ms.rank() == 3);
    CHECK(ms.at({2, 0, 2}) == S(R, "q + 3"));
    CHECK(ms.at({2, 1, 1}) == S(R, "1 + q"));
    CHECK(ms.at({2, 3, 1}) == S(R, "0"));  // empty range

    Sequence d2 = builtin_sequence("delta2", R);
    Sequence line = seq_multisum_line(d2);
    CHECK(line.rank() == 1);
    CHECK(line.at({5}) == S(R, "1"));
    CHECK(line.at({-3}) == S(R, "1"));

    Sequence rowsum = seq_multisum_line(G);
    CHECK(rowsum.at({2}) == S(R, "q + 3"));
    CHECK(rowsum.at({-1}) == S(R, "0"));

    Sequence hv = builtin_sequence("heaviside", R);
    CHECK_THROWS_AS((void)seq_multisum_line(seq_extend(hv, 1)), UsageError);
}

TEST_CASE("q-rescaling") {
    RingPtr R = q_ring();
    Sequence qpoch = builtin_sequence("qpoch", R);
    Sequence r2 = seq_rescale_q(qpoch, 2);
    CHECK(r2.at({2}) == S(R, "(1 - q^2)*(1 - q^4)"));
    Sequence qpow = builtin_sequence("qpow", R);
    // Rescaling commutes with pointwise products.
    Sequence lhs = seq_rescale_q(seq_mul(qpoch, qpow), 3);
    Sequence rhs = seq_mul(seq_rescale_q(qpoch, 3), seq_rescale_q(qpow, 3));
    for (std::int64_t n = -2; n <= 4; ++n) {
        Point p{n};
        CHECK(lhs.at(p) == rhs.at(p));
    }
    CHECK_THROWS_AS((void)seq_rescale_q(qpoch, 0), UsageError);
}

TEST_CASE("patching") {
    RingPtr R = q_ring();
    Sequence hv = builtin_sequence("heaviside", R);
    Sequence patched = seq_patch_finite(hv, {{Point{0}, S(R, "5")}});
    CHECK(patched.at({0}) == S(R, "5"));
    CHECK(patched.at({1}) == S(R, "1"));
    CHECK(patched.at({-1}) == S(R, "0"));

    Sequence cex = builtin_sequence("cex", R);
    Sequence row = builtin_sequence("qpow", R);
    Sequence hp = seq_patch_hyperplane(cex, 1, 0, row);
    CHECK(hp.at({3, 0}) == S(R, "q^3"));
    CHECK(hp.at({3, 1}) == cex.at({3, 1}));

    // Orthant pieces must agree on the shared boundary {0}: the negative-side
    // piece of the Pochhammer sequence is the delta (1 at 0, else 0).
    Sequence qpoch = builtin_sequence("qpoch", R);
    std::vector<Sequence> pieces = {qpoch, builtin_sequence("delta", R)};
    Sequence glued = seq_patch_orthants(pieces);
    for (std::int64_t n = -3; n <= 3; ++n) {
        Point p{n};
        CHECK(glued.at(p) == qpoch.at(p));
    }
    CHECK(!orthant_overlap_mismatch(qpoch, pieces, Window::cube(1, -3, 3)).has_value());
    std::vector<Sequence> wrong = {qpoch, builtin_sequence("alt", R)};
    auto bad = orthant_overlap_mismatch(qpoch, wrong, Window::cube(1, -3, 3));
    REQUIRE(bad.has_value());
    CHECK(*bad == Point{-3});
}

TEST_CASE("solving a rank-1 recurrence") {
    RingPtr R = q_ring();
    // q-Fibonacci: f(n+2) = f(n+1) + q f(n), f(0)=1, f(1)=2.
    WeylOperator op = WeylOperator::parse(1, R, "L^2 - L - q");
    Sequence fib = seq_from_recurrence(op, {{0, S(R, "1")}, {1, S(R, "2")}});
    CHECK(fib.at({2}) == S(R, "q + 2"));
    CHECK(fib.at({3}) == S(R, "3*q + 2"));
    CHECK(fib.at({4}) == fib.at({3}) + S(R, "q") * fib.at({2}));
    // Backward: f(-1) = (f(1) - f(0))/q.
    CHECK(fib.at({-1}) == S(R, "1/q"));

    // The Pochhammer operator on Z: backward solving hits a vanishing pivot
    // at n = -1 unless the value there is supplied.
    Sequence qpoch = builtin_sequence("qpoch", R);
    WeylOperator pz = qpoch.system()->dir(0);
    Sequence bad = seq_from_recurrence(pz, {{0, S(R, "1")}});
    CHECK_THROWS_WITH_AS((void)bad.at({-1}),
                         "trailing coefficient vanishes at n = -1; supply the value there",
                         Error);
    Sequence good = seq_from_recurrence(pz, {{0, S(R, "1")}, {-1, S(R, "0")}});
    CHECK(good.at({-3}) == S(R, "0"));
    CHECK(good.at({4}) == qpoch.at({4}));

    CHECK_THROWS_AS((void)seq_from_recurrence(op, {{0, S(R, "1")}}), UsageError);
}

TEST_CASE("support bookkeeping") {
    RingPtr R = q_ring();
    Sequence d2 = builtin_sequence("delta2", R);
    Point probe{7, 0};
    auto bounds = d2.axis_bounds(1, probe);
    REQUIRE(bounds.has_value());
    CHECK(bounds->first == 7);
    CHECK(bounds->second == 7);
    CHECK(!d2.axis_bounds(0, probe).has_value());

    Sequence delta = builtin_sequence("delta", R);
    auto strict = delta.find_strict(1);
    REQUIRE(strict.has_value());
    CHECK(strict->prefix_box == Window::cube(1, 0, 0));

    // Products inherit support from either factor.
    Sequence pr = seq_mul(builtin_sequence("qpow", R), delta);
    CHECK(pr.find_strict(1).has_value());
}
