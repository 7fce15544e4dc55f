#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhol/builtins.hpp"
#include "qhol/guess.hpp"
#include "qhol/linalg.hpp"

#include <algorithm>

using namespace qhol;

namespace {

SparseRow row_of(std::initializer_list<int> dense) {
    SparseRow r;
    std::size_t c = 0;
    for (int v : dense) {
        if (v != 0) r.emplace_back(c, BigRat(v));
        ++c;
    }
    return r;
}

WeylOperator op1(const std::string& text) {
    return WeylOperator::parse(1, q_ring(), text);
}

bool contains(const std::vector<WeylOperator>& ops, const WeylOperator& op) {
    return std::find(ops.begin(), ops.end(), op) != ops.end();
}

}  // namespace

// ---------------------------------------------------------------------------
// exact linear algebra
// ---------------------------------------------------------------------------

TEST_CASE("nullspace tracker cuts one dimension per independent row") {
    NullspaceTracker t(3);
    CHECK(t.dimension() == 3);
    CHECK(t.process_row(row_of({1, 1, 0})));
    CHECK(t.dimension() == 2);
    CHECK_FALSE(t.process_row(row_of({2, 2, 0})));  // dependent: no cut
    CHECK(t.process_row(row_of({0, 1, 1})));
    CHECK(t.dimension() == 1);
    // Nullspace of {x+y, y+z} is spanned by (1, -1, 1).
    auto basis = t.reduced_basis();
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == std::vector<BigRat>{1, -1, 1});
    CHECK(t.process_row(row_of({1, 0, 0})));
    CHECK(t.empty());
    CHECK_FALSE(t.process_row(row_of({0, 1, 0})));  // space already empty
}

TEST_CASE("reduced nullspace basis is integer-scaled with positive leading entries") {
    NullspaceTracker t(3);
    t.process_row({{0, BigRat(1)}, {1, BigRat(1, 2)}, {2, BigRat(1, 3)}});
    auto basis = t.reduced_basis();
    REQUIRE(basis.size() == 2);
    // Rows of the RREF'd complement, cleared to coprime integers.
    CHECK(basis[0] == std::vector<BigRat>{1, 0, -3});
    CHECK(basis[1] == std::vector<BigRat>{0, 2, -3});
    for (auto& row : basis) {
        for (auto& v : row)
            if (v != 0) {
                CHECK(v > 0);
                break;
            }
    }
}

TEST_CASE("rref and rational rank agree on a singular matrix") {
    std::vector<std::vector<BigRat>> m = {
        {1, 2, 3},
        {4, 5, 6},
        {7, 8, 9},  // row3 = 2*row2 - row1
    };
    CHECK(rational_rank(m) == 2);
    std::vector<std::vector<BigRat>> c = m;
    CHECK(rref_rows(c) == 2);
    CHECK(c.size() == 2);
    CHECK(c[0] == std::vector<BigRat>{1, 0, -1});
    CHECK(c[1] == std::vector<BigRat>{0, 1, 2});
}

TEST_CASE("modular rank tracker certifies independence") {
    ModularRankTracker t(3);
    CHECK(t.process_row(row_of({1, 1, 0})));
    CHECK_FALSE(t.process_row(row_of({3, 3, 0})));
    CHECK(t.process_row(row_of({0, 1, 1})));
    CHECK_FALSE(t.process_row(row_of({1, 0, -1})));  // in the span of the first two
    CHECK_FALSE(t.full());
    CHECK(t.process_row(row_of({0, 0, 7})));
    CHECK(t.full());
    CHECK_FALSE(t.process_row(row_of({5, 0, 0})));
}

TEST_CASE("scalar rank over the rational-function field") {
    auto R = q_ring();
    const Scalar q = Scalar::q_power(R, 1);
    const Scalar one = Scalar::one(R);
    std::vector<std::vector<Scalar>> rows = {
        {one, q},
        {q, q * q},           // q * row1
        {one + q, q + q * q}, // (1+q) * row1
    };
    CHECK(scalar_rank(rows, false) == 1);
    CHECK(scalar_rank(rows, true) == 1);
    rows.push_back({one, one});
    CHECK(scalar_rank(rows, false) == 2);
    CHECK(scalar_rank(rows, true) == 2);
}

TEST_CASE("dependence finder reports the first linear dependence with unit last coefficient") {
    auto R = q_ring();
    const Scalar q = Scalar::q_power(R, 1);
    const Scalar one = Scalar::one(R);
    ScalarDependenceFinder fin(2, R);
    CHECK_FALSE(fin.offer({one, q}).has_value());
    auto dep = fin.offer({q, q * q});  // q * previous
    REQUIRE(dep.has_value());
    REQUIRE(dep->size() == 2);
    CHECK((*dep)[1] == one);
    CHECK((*dep)[0] == -q);
    // sum_t c_t v_t == 0
    CHECK(((*dep)[0] * one + (*dep)[1] * q).is_zero());
    CHECK(fin.rank() == 1);
}

// ---------------------------------------------------------------------------
// canonical operator form
// ---------------------------------------------------------------------------

TEST_CASE("canonical operator form clears denominators, content, and sign") {
    auto R = q_ring();
    CHECK(canonical_operator_form(op1("(2*q^2 + 2*q)*L - (2*q + 2)")).str() == "q*L - 1");
    CHECK(canonical_operator_form(op1("-L + q")).str() == "L - q");
    CHECK(canonical_operator_form(op1("((1)/(q))*M + L")).str() == "q*L + M");
    // The leading term is L-major: the shift part dominates the sign choice.
    CHECK(canonical_operator_form(op1("-q*M^2 + L")).str() == "L - q*M^2");
    CHECK(canonical_operator_form(WeylOperator::zero(1, R)).is_zero());
    // Invariant under scaling by any nonzero rational function.
    const WeylOperator base = op1("L - 1 + q*M");
    const Scalar c = Scalar::parse(R, "(q - 1)/(3*q + 3)");
    CHECK(canonical_operator_form(base.scale(c)) == canonical_operator_form(base));
}

// ---------------------------------------------------------------------------
// default windows
// ---------------------------------------------------------------------------

TEST_CASE("default guess windows depend on the ansatz size and the axis domains") {
    GuessConfig cfg;
    cfg.order = {1};
    cfg.mdeg = 1;
    // qpoch is a zero-extension: no negative probes by default.
    auto [e1, v1] = guess_windows(builtin_sequence("qpoch", q_ring()), cfg);
    CHECK(e1 == Window::cube(1, 0, 12));  // 4 ansatz monomials -> [0, 2*4+4]
    CHECK(v1 == Window::cube(1, 0, 16));
    // alt lives on the full line: verification reaches into the negatives.
    auto [e2, v2] = guess_windows(builtin_sequence("alt", q_ring()), cfg);
    CHECK(e2 == Window::cube(1, 0, 12));
    CHECK(v2 == Window::cube(1, -4, 16));
    // A user-supplied verification window must strictly contain evaluation.
    cfg.eval_window = Window::cube(1, 0, 10);
    cfg.verify_window = Window::cube(1, 0, 10);
    CHECK_THROWS_AS(guess_windows(builtin_sequence("alt", q_ring()), cfg),
                    UsageError);
    cfg.verify_window = Window::cube(1, 2, 20);
    CHECK_THROWS_AS(guess_windows(builtin_sequence("alt", q_ring()), cfg),
                    UsageError);
}

TEST_CASE("window too small for the ansatz is rejected before any work") {
    GuessConfig cfg;
    cfg.order = {1};
    cfg.mdeg = 1;
    cfg.eval_window = Window::cube(1, 0, 2);  // 3 points < 4 monomials
    CHECK_THROWS_AS(guess_annihilator(builtin_sequence("qpoch", q_ring()), cfg),
                    UsageError);
}

// ---------------------------------------------------------------------------
// recoveries on the catalog
// ---------------------------------------------------------------------------

TEST_CASE("guessing recovers the first-order recurrences of the catalog") {
    GuessConfig cfg;
    cfg.order = {1};
    cfg.mdeg = 1;

    auto qpoch_ops = guess_annihilator(builtin_sequence("qpoch", q_ring()), cfg);
    REQUIRE(qpoch_ops.size() == 1);
    CHECK(qpoch_ops[0] == op1("L - 1 + q*M"));
    CHECK(qpoch_ops[0].str() == "L + q*M - 1");

    auto qtri_ops = guess_annihilator(builtin_sequence("qtri", q_ring()), cfg);
    REQUIRE(qtri_ops.size() == 1);
    CHECK(qtri_ops[0] == op1("L - M"));

    cfg.mdeg = 2;
    auto qpow2_ops = guess_annihilator(builtin_sequence("qpow2", q_ring()), cfg);
    REQUIRE(qpow2_ops.size() == 1);
    CHECK(qpow2_ops[0] == op1("L - q*M^2"));
    CHECK(qpow2_ops[0].str() == "L - q*M^2");

    cfg.mdeg = 0;
    auto alt_ops = guess_annihilator(builtin_sequence("alt", q_ring()), cfg);
    REQUIRE(alt_ops.size() == 1);
    CHECK(alt_ops[0] == op1("L + 1"));
}

TEST_CASE("guessing with a symbolic parameter recovers the xqpoch recurrence") {
    GuessConfig cfg;
    cfg.order = {1};
    cfg.mdeg = 1;
    cfg.pdeg = 1;
    auto R = qx_ring();
    auto ops = guess_annihilator(builtin_sequence("xqpoch", R), cfg);
    REQUIRE(ops.size() == 1);
    CHECK(ops[0] == WeylOperator::parse(1, R, "L + x*M - 1"));
}

TEST_CASE("guessing with default bounds finds the qpow operator among the basis") {
    GuessConfig cfg;  // order 2, mdeg 2, qdeg 4
    auto ops = guess_annihilator(builtin_sequence("qpow", q_ring()), cfg);
    CHECK(!ops.empty());
    CHECK(contains(ops, op1("L - q")));
    // The basis is sorted by (L-order, total degree, text): the lowest-order
    // lowest-degree operator comes first.
    CHECK(ops.front() == op1("L - q"));
    // Soundness: everything returned annihilates on an independent window.
    for (const auto& op : ops)
        CHECK_FALSE(verify_operator(op, builtin_sequence("qpow", q_ring()),
                                    Window::cube(1, -6, 20))
                        .has_value());
}

// ---------------------------------------------------------------------------
// emptiness within bounds
// ---------------------------------------------------------------------------

TEST_CASE("the cube-exponent sequence admits no recurrence within generous bounds") {
    auto R = q_ring();
    Sequence cube = Sequence::make(1, R, {"n"}, "qcube", [R](std::span<const std::int64_t> p) {
        return Scalar::q_power(R, p[0] * p[0] * p[0]);
    });
    GuessConfig cfg;
    cfg.order = {3};
    cfg.mdeg = 6;
    cfg.qdeg = 12;
    CHECK(guess_annihilator(cube, cfg).empty());
    // Smaller bounds are empty as well (monotonicity in reverse).
    cfg.order = {2};
    cfg.mdeg = 2;
    cfg.qdeg = 4;
    CHECK(guess_annihilator(cube, cfg).empty());
}

TEST_CASE("the non-holonomic rank-2 example defeats elimination in {Mn, Lk, Ln}") {
    auto cex = builtin_sequence("cex", q_ring());
    GuessConfig cfg;
    cfg.order = {3, 3};
    cfg.mdeg = 4;
    cfg.qdeg = 4;
    cfg.gens = GeneratorSet::parse("Mn,Lk,Ln", 2, {"n", "k"});
    CHECK(guess_annihilator(cex, cfg).empty());
}

// ---------------------------------------------------------------------------
// systems
// ---------------------------------------------------------------------------

TEST_CASE("guess_system assembles a verified rectangular system for the q-binomial") {
    auto g = builtin_sequence("Gseq", q_ring());
    GuessConfig cfg;
    cfg.order = {1, 1};
    cfg.mdeg = 2;
    cfg.eval_window = Window::cube(2, 0, 8);
    auto sys = guess_system(g, cfg);
    CHECK(sys.rank == 2);
    CHECK(sys.rectangular());
    CHECK(sys.status == VerifyStatus::WindowVerified);
    CHECK(sys.provenance == "guessed");
    // Both direction operators annihilate the sequence away from the window
    // used to find them (natural domain side).
    for (int axis = 0; axis < 2; ++axis) {
        CHECK(sys.dir(axis).single_L_direction(axis));
        CHECK(sys.order(axis) <= 1);
        CHECK_FALSE(verify_operator(sys.dir(axis), g, Window::cube(2, 0, 14)).has_value());
    }
}

TEST_CASE("guess_system on the diagonal indicator finds the M-relation") {
    auto d2 = builtin_sequence("delta2", q_ring());
    GuessConfig cfg;
    cfg.order = {1, 1};
    cfg.mdeg = 1;
    cfg.eval_window = Window(std::vector<std::pair<std::int64_t, std::int64_t>>{{-4, 6}, {-4, 6}});
    cfg.verify_window = Window(std::vector<std::pair<std::int64_t, std::int64_t>>{{-6, 8}, {-6, 8}});
    auto sys = guess_system(d2, cfg);
    std::vector<std::string> nk{"n", "k"};
    // The lowest candidate in both directions is the order-zero relation
    // q^n - q^k (which annihilates the diagonal indicator outright).
    CHECK(sys.dir(0) == WeylOperator::parse(2, q_ring(), "Mn - Mk", nk));
    CHECK(sys.dir(1) == WeylOperator::parse(2, q_ring(), "Mn - Mk", nk));
    CHECK(sys.status == VerifyStatus::WindowVerified);
}

TEST_CASE("guess_system on a rank-extended sequence finds the trivial direction") {
    auto f = seq_extend(builtin_sequence("qpow", q_ring()), 1);
    GuessConfig cfg;
    cfg.order = {1, 1};
    cfg.mdeg = 1;
    cfg.eval_window = Window::cube(2, 0, 6);
    auto sys = guess_system(f, cfg);
    std::vector<std::string> nk{"n", "k"};
    CHECK(sys.dir(0) == WeylOperator::parse(2, q_ring(), "Ln - q", nk));
    CHECK(sys.dir(1) == WeylOperator::parse(2, q_ring(), "Lk - 1", nk));
}

TEST_CASE("guess_system names the directions where nothing was found") {
    auto R = q_ring();
    Sequence cube = Sequence::make(1, R, {"n"}, "qcube", [R](std::span<const std::int64_t> p) {
        return Scalar::q_power(R, p[0] * p[0] * p[0]);
    });
    GuessConfig cfg;
    cfg.order = {2};
    cfg.mdeg = 2;
    CHECK_THROWS_WITH_AS(guess_system(cube, cfg),
                         doctest::Contains("no operator in direction n"), Error);
}

TEST_CASE("the per-direction searches on cex succeed even though elimination fails") {
    // cex has one recurrence per direction (each uses both M's); only the
    // three-generator elimination subsets come up empty.
    auto cex = builtin_sequence("cex", q_ring());
    GuessConfig cfg;
    cfg.order = {1, 1};
    cfg.mdeg = 1;
    cfg.qdeg = 1;
    cfg.eval_window = Window::cube(2, 0, 8);
    cfg.verify_window = Window::cube(2, -4, 12);
    auto sys = guess_system(cex, cfg);
    std::vector<std::string> nk{"n", "k"};
    CHECK(sys.dir(0) ==
          WeylOperator::parse(2, q_ring(), "(q*Mn + Mk + 1)*Ln - (Mn + Mk + 1)", nk));
    CHECK(sys.dir(1) ==
          WeylOperator::parse(2, q_ring(), "(Mn + q*Mk + 1)*Lk - (Mn + Mk + 1)", nk));
}

// ---------------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------------

TEST_CASE("enlarging the bounds keeps previously discovered operators valid") {
    auto f = builtin_sequence("qpoch", q_ring());
    GuessConfig small;
    small.order = {1};
    small.mdeg = 1;
    auto ops_small = guess_annihilator(f, small);
    GuessConfig big;
    big.order = {2};
    big.mdeg = 2;
    auto ops_big = guess_annihilator(f, big);
    CHECK(ops_big.size() >= ops_small.size());
    CHECK(contains(ops_big, op1("L - 1 + q*M")));
    auto [eval_b, verify_b] = guess_windows(f, big);
    (void)eval_b;
    for (const auto& op : ops_small)
        CHECK_FALSE(verify_operator(op, f, verify_b).has_value());
}

TEST_CASE("guessing is invariant under scaling the sequence") {
    auto f = builtin_sequence("qpoch", q_ring());
    auto g = seq_scale(Scalar::integer(q_ring(), 5), f);
    GuessConfig cfg;
    cfg.order = {1};
    cfg.mdeg = 1;
    auto a = guess_annihilator(f, cfg);
    auto b = guess_annihilator(g, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("guessing twice produces byte-identical output") {
    auto f = builtin_sequence("Fseq", q_ring());
    GuessConfig cfg;
    cfg.order = {1, 1};
    cfg.mdeg = 2;
    cfg.eval_window = Window::cube(2, 0, 6);
    auto a = guess_annihilator(f, cfg);
    auto b = guess_annihilator(f, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].str() == b[i].str());
    CHECK(!a.empty());
}

TEST_CASE("generator-set parsing accepts names, indices, and bare kinds") {
    std::vector<std::string> nk{"n", "k"};
    auto g = GeneratorSet::parse("Mn,Lk", 2, nk);
    CHECK(g.allow_M == std::vector<bool>{true, false});
    CHECK(g.allow_L == std::vector<bool>{false, true});
    CHECK(g.str(nk) == "Mn,Lk");
    auto h = GeneratorSet::parse("M,L2", 2, nk);
    CHECK(h.allow_M == std::vector<bool>{true, true});
    CHECK(h.allow_L == std::vector<bool>{false, true});
    CHECK_THROWS_AS(GeneratorSet::parse("Mz", 2, nk), UsageError);
    CHECK_THROWS_AS(GeneratorSet::parse("Q1", 2, nk), UsageError);
}
