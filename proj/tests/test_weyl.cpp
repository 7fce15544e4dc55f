#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhol/weyl.hpp"

#include <random>

using namespace qhol;

namespace {

RingPtr qring() { return PolyRing::make({"q"}); }

WeylOperator M(const RingPtr& R, std::int64_t e = 1) { return WeylOperator::gen_M(1, R, 0, e); }
WeylOperator L(const RingPtr& R, std::int64_t e = 1) { return WeylOperator::gen_L(1, R, 0, e); }
WeylOperator C(const RingPtr& R, std::int64_t v) {
    return WeylOperator::from_scalar(1, Scalar::integer(R, v));
}

/// Small random operator with seeded generator (deterministic).
WeylOperator random_op(std::mt19937_64& rng, int rank, const RingPtr& R, bool plus_only) {
    std::uniform_int_distribution<int> nterms(1, 3);
    std::uniform_int_distribution<std::int64_t> expd(plus_only ? 0 : -2, 2);
    std::uniform_int_distribution<std::int64_t> coefd(-3, 3);
    std::uniform_int_distribution<std::int64_t> qd(0, 2);
    WeylOperator p = WeylOperator::zero(rank, R);
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        Exps a(static_cast<std::size_t>(rank)), b(static_cast<std::size_t>(rank));
        for (int j = 0; j < rank; ++j) {
            a[static_cast<std::size_t>(j)] = expd(rng);
            b[static_cast<std::size_t>(j)] = expd(rng);
        }
        std::int64_t c = coefd(rng);
        if (c == 0) c = 1;
        Scalar coeff = Scalar::integer(R, c) * Scalar::q_power(R, qd(rng));
        p += WeylOperator::monomial(rank, R, a, b, coeff);
    }
    return p;
}

}  // namespace

TEST_CASE("commutation rule") {
    auto R = qring();
    // L*M = q*M*L, and twice: L^2*M = q^2*M*L^2
    CHECK(L(R) * M(R) == (M(R) * L(R)).scale(Scalar::q_power(R, 1)));
    CHECK(L(R, 2) * M(R) == (M(R) * L(R, 2)).scale(Scalar::q_power(R, 2)));
    // inverse generators: L^-1 * M = q^-1 * M * L^-1
    CHECK(L(R, -1) * M(R) == (M(R) * L(R, -1)).scale(Scalar::q_power(R, -1)));
    // (M + L)^2 = M^2 + (1+q)*M*L + L^2
    WeylOperator lhs = (M(R) + L(R)).pow(2);
    WeylOperator rhs = M(R) * M(R) + (M(R) * L(R)).scale(Scalar::parse(R, "1+q")) + L(R) * L(R);
    CHECK(lhs == rhs);
}

TEST_CASE("ring operations") {
    auto R = qring();
    CHECK((L(R) + M(R)) - M(R) == L(R));
    CHECK(WeylOperator::zero(1, R) + L(R) == L(R));
    CHECK(L(R) * WeylOperator::identity(1, R) == L(R));
    CHECK((L(R) - L(R)).is_zero());
    WeylOperator p = L(R) - C(R, 1);
    CHECK(p.term_count() == 2);
    CHECK(p.degree_L(0) == 1);
    CHECK(p.lowest_degree_L(0) == 0);
    auto R2 = PolyRing::make({"q"});
    WeylOperator q2 = WeylOperator::gen_L(2, R2, 1);
    CHECK_THROWS_AS(L(R) * q2, UsageError);
}

TEST_CASE("negative monomial powers") {
    auto R = qring();
    WeylOperator m = (M(R) * L(R)).scale(Scalar::variable(R, "q"));  // q*M*L
    CHECK(m * m.pow(-1) == WeylOperator::identity(1, R));
    CHECK(m.pow(-1) * m == WeylOperator::identity(1, R));
    CHECK_THROWS_AS((M(R) + L(R)).pow(-1), UsageError);
}

TEST_CASE("associativity and distributivity on random triples") {
    auto R = qring();
    std::mt19937_64 rng(12345);
    for (int iter = 0; iter < 60; ++iter) {
        int rank = 1 + (iter % 2);
        WeylOperator P = random_op(rng, rank, R, false);
        WeylOperator Q = random_op(rng, rank, R, false);
        WeylOperator S = random_op(rng, rank, R, false);
        CHECK((P * Q) * S == P * (Q * S));
        CHECK(P * (Q + S) == P * Q + P * S);
        CHECK((P + Q) * S == P * S + Q * S);
    }
}

TEST_CASE("grading bound for plus operators") {
    auto R = qring();
    std::mt19937_64 rng(777);
    for (int iter = 0; iter < 40; ++iter) {
        WeylOperator P = random_op(rng, 2, R, true);
        WeylOperator Q = random_op(rng, 2, R, true);
        CHECK(P.is_plus());
        CHECK((P * Q).total_degree() <= P.total_degree() + Q.total_degree());
    }
}

TEST_CASE("zero extension multiplier") {
    auto R = qring();
    Scalar q = Scalar::variable(R, "q");
    // P = L - (1 - q*M)  ->  (1-q*M)*L - (1-q*M)^2
    WeylOperator kernel = WeylOperator::identity(1, R) - M(R).scale(q);
    WeylOperator P = L(R) - kernel;
    CHECK(weyl_zero_extension_multiplier(P, 0) == kernel * L(R) - kernel * kernel);
    // d = 0: unchanged
    CHECK(weyl_zero_extension_multiplier(kernel, 0) == kernel);
    // P = L^2 - 1 -> (1-qM)(1-q^2M)(L^2-1)
    WeylOperator P2 = L(R, 2) - WeylOperator::identity(1, R);
    WeylOperator k2 = WeylOperator::identity(1, R) - M(R).scale(Scalar::q_power(R, 2));
    CHECK(weyl_zero_extension_multiplier(P2, 0) == k2 * kernel * P2);
    CHECK_THROWS_AS(weyl_zero_extension_multiplier(L(R, -1), 0), UsageError);
}

TEST_CASE("symplectic matrices") {
    CHECK(SymplecticMatrix::is_symplectic({{0, 1}, {-1, 0}}));
    CHECK(SymplecticMatrix::is_symplectic({{1, 0}, {1, 1}}));
    CHECK_FALSE(SymplecticMatrix::is_symplectic({{1, 1}, {0, 0}}));
    CHECK_FALSE(SymplecticMatrix::is_symplectic({{2, 0}, {0, 1}}));
    CHECK_THROWS_AS(SymplecticMatrix::from_matrix({{2, 0}, {0, 1}}), UsageError);
    // exchange matrix squared = -identity (as exponent maps: negation)
    auto X = SymplecticMatrix::exchange(2);
    auto X2 = X * X;
    std::vector<std::int64_t> e{1, 2, 3, 4};
    CHECK(X2.apply(e) == std::vector<std::int64_t>{-1, -2, -3, -4});
}

TEST_CASE("symplectic operator transforms") {
    auto R = qring();
    WeylOperator P = L(R) - M(R).scale(Scalar::variable(R, "q"));
    CHECK(P.symplectic(SymplecticMatrix::identity(1)) == P);
    // exchange: M -> L^{-1}, L -> M
    auto X = SymplecticMatrix::exchange(1);
    CHECK(M(R).symplectic(X) == L(R, -1));
    CHECK(L(R).symplectic(X) == M(R));
    CHECK(M(R).symplectic(X).symplectic(X) == M(R, -1));
    // lower-triangular block example: M -> M*L
    auto T = SymplecticMatrix::from_matrix({{1, 0}, {1, 1}});
    CHECK(M(R).symplectic(T) == M(R) * L(R));
}

TEST_CASE("symplectic images preserve the defining relations") {
    auto R = qring();
    std::mt19937_64 rng(4242);
    const int r = 2;
    auto gen_image = [&](const SymplecticMatrix& X, char kind, int axis) {
        WeylOperator g = kind == 'M' ? WeylOperator::gen_M(r, R, axis)
                                     : WeylOperator::gen_L(r, R, axis);
        return g.symplectic(X);
    };
    auto check_relations = [&](const SymplecticMatrix& X) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                WeylOperator Li = gen_image(X, 'L', i), Mj = gen_image(X, 'M', j);
                Scalar qd = Scalar::q_power(R, i == j ? 1 : 0);
                CHECK(Li * Mj == (Mj * Li).scale(qd));
                WeylOperator Mi = gen_image(X, 'M', i);
                CHECK(Mi * Mj == Mj * Mi);
                WeylOperator Lj = gen_image(X, 'L', j);
                CHECK(Li * Lj == Lj * Li);
            }
    };
    check_relations(SymplecticMatrix::identity(r));
    check_relations(SymplecticMatrix::exchange(r));
    // random products of elementary symplectic blocks
    std::uniform_int_distribution<std::int64_t> small(-2, 2);
    for (int iter = 0; iter < 10; ++iter) {
        SymplecticMatrix X = SymplecticMatrix::identity(r);
        for (int step = 0; step < 4; ++step) {
            std::int64_t a = small(rng), b = small(rng), c = small(rng);
            IntMatrix S{{a, b}, {b, c}};  // symmetric
            IntMatrix I{{1, 0}, {0, 1}}, Z{{0, 0}, {0, 0}};
            SymplecticMatrix E = (iter + step) % 2 == 0
                                     ? SymplecticMatrix::from_blocks(I, S, Z, I)
                                     : SymplecticMatrix::from_blocks(I, Z, S, I);
            X = X * E;
        }
        check_relations(X);
    }
}

TEST_CASE("symplectic composition is matrix product on monomials") {
    auto R = qring();
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::int64_t> expd(-3, 3);
    auto X = SymplecticMatrix::exchange(2);
    auto Y = SymplecticMatrix::from_blocks({{1, 0}, {0, 1}}, {{1, 1}, {1, 0}},
                                           {{0, 0}, {0, 0}}, {{1, 0}, {0, 1}});
    for (int iter = 0; iter < 20; ++iter) {
        Exps a{expd(rng), expd(rng)}, b{expd(rng), expd(rng)};
        WeylOperator m = WeylOperator::monomial(2, R, a, b, Scalar::one(R));
        CHECK(m.symplectic(Y).symplectic(X) == m.symplectic(X * Y));
    }
}

TEST_CASE("operator parse/print round trip") {
    auto R = PolyRing::make({"q", "x"});
    for (const char* text : {
             "L - q",
             "M^2 - 2*M + 1",
             "(q^2 + 1)*M*L^2 - L^-1",
             "((1)/(q))*M",
             "L + x*M",
             "0",
             "1",
             "-M - 1",
         }) {
        WeylOperator p = WeylOperator::parse(1, R, text);
        CHECK(p.str() == text);
        CHECK(WeylOperator::parse(1, R, p.str()) == p);
    }
    // rank 2, indexed and alias spellings
    std::vector<std::string> nk{"n", "k"};
    WeylOperator p = WeylOperator::parse(2, R, "Mn*Lk - q*M2", nk);
    CHECK(p == WeylOperator::parse(2, R, "M1*L2 - q*M2"));
    CHECK(p.str(nk) == "Mn*Lk - q*Mk");
    CHECK(p.str() == "M1*L2 - q*M2");
    // normal ordering happens during parsing
    CHECK(WeylOperator::parse(1, R, "L*M").str() == "q*M*L");
    CHECK(WeylOperator::parse(1, R, "(1-q*M)*L - (1-q*M)^2") ==
          WeylOperator::parse(1, R, "-q*M*L + L - q^2*M^2 + 2*q*M - 1"));
}

TEST_CASE("operator parse errors") {
    auto R = qring();
    CHECK_THROWS_AS(WeylOperator::parse(2, R, "M3 + 1"), ParseError);
    CHECK_THROWS_AS(WeylOperator::parse(1, R, "Mx"), ParseError);
    CHECK_THROWS_AS(WeylOperator::parse(1, R, "L +"), ParseError);
    CHECK_THROWS_AS(WeylOperator::parse(1, R, "1/L"), ParseError);
    CHECK_THROWS_AS(WeylOperator::parse(1, R, "(M + L)^-1"), UsageError);
    CHECK_THROWS_AS(WeylOperator::parse(1, R, "M/0"), DivisionByZeroError);
}
