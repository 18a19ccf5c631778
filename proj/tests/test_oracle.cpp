#include "fluxmdp/generate.hpp"
#include "fluxmdp/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fluxmdp;

namespace {

const Numerics<Rational> exact;

Policy policy_of(std::vector<int> choice) { return Policy{std::move(choice)}; }

Mdp random_instance(SplitMix64& rng, bool uniform) {
    GenSpec spec;
    spec.n = 1 + static_cast<int>(rng.below(8));
    spec.m = spec.n + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * spec.n)));
    if (uniform) {
        spec.discount_model = DiscountModel::Uniform;
        spec.gamma_lo = Rational(99, 100);
    } else {
        spec.discount_model = DiscountModel::PerActionRange;
        spec.gamma_lo = Rational(1, 2);
        spec.gamma_hi = Rational(999, 1000);
    }
    spec.seed = rng.next();
    return generate(spec);
}

Policy random_policy(const Mdp& inst, SplitMix64& rng) {
    Policy pi;
    for (int s = 0; s < inst.num_states(); ++s) {
        const auto& usable = inst.actions_in(s);
        pi.choice.push_back(usable[rng.below(usable.size())]);
    }
    return pi;
}

} // namespace

TEST_CASE("enumeration counts and order") {
    Mdp ex1 = fixture("EX1");
    CHECK(count_policies(ex1) == 2);
    PolicyEnumerator it(ex1);
    CHECK(it.next() == policy_of({0, 2}));
    CHECK(it.next() == policy_of({1, 2}));
    CHECK_FALSE(it.next());

    Mdp ex2 = fixture("EX2");
    CHECK(count_policies(ex2) == 4);
    PolicyEnumerator it2(ex2);
    // lexicographic by state, then action id
    CHECK(it2.next() == policy_of({0, 1}));
    CHECK(it2.next() == policy_of({0, 2}));
    CHECK(it2.next() == policy_of({3, 1}));
    CHECK(it2.next() == policy_of({3, 2}));
    CHECK_FALSE(it2.next());

    Mdp cube(3, {{0, 0, 0, Rational(0), Rational(1, 2)},
                 {1, 0, 1, Rational(0), Rational(1, 2)},
                 {2, 0, 2, Rational(0), Rational(1, 2)},
                 {3, 1, 0, Rational(0), Rational(1, 2)},
                 {4, 1, 1, Rational(0), Rational(1, 2)},
                 {5, 1, 2, Rational(0), Rational(1, 2)},
                 {6, 2, 0, Rational(0), Rational(1, 2)},
                 {7, 2, 1, Rational(0), Rational(1, 2)},
                 {8, 2, 2, Rational(0), Rational(1, 2)}});
    CHECK(count_policies(cube) == 27);
    PolicyEnumerator it3(cube);
    int seen = 0;
    while (it3.next()) ++seen;
    CHECK(seen == 27);
}

TEST_CASE("the enumeration cap guards against exponential blowups") {
    Mdp cube(3, {{0, 0, 0, Rational(0), Rational(1, 2)},
                 {1, 0, 1, Rational(0), Rational(1, 2)},
                 {2, 0, 2, Rational(0), Rational(1, 2)},
                 {3, 1, 0, Rational(0), Rational(1, 2)},
                 {4, 1, 1, Rational(0), Rational(1, 2)},
                 {5, 1, 2, Rational(0), Rational(1, 2)},
                 {6, 2, 0, Rational(0), Rational(1, 2)},
                 {7, 2, 1, Rational(0), Rational(1, 2)},
                 {8, 2, 2, Rational(0), Rational(1, 2)}});
    try {
        PolicyEnumerator it(cube, 26);
        FAIL("expected TooManyPolicies");
    } catch (const OracleError& ex) {
        CHECK(ex.kind() == OracleError::Kind::TooManyPolicies);
    }
    CHECK_THROWS_AS(brute_force_optimum(cube, exact, 26), OracleError);
}

TEST_CASE("brute force finds the dominating policy of the fixtures") {
    Mdp ex1 = fixture("EX1");
    BruteForceResult<Rational> best1 = brute_force_optimum(ex1, exact);
    CHECK(best1.policy == policy_of({0, 2}));
    CHECK(best1.values == std::vector<Rational>{Rational(3), Rational(4)});

    Mdp ex2 = fixture("EX2");
    BruteForceResult<Rational> best2 = brute_force_optimum(ex2, exact);
    CHECK(best2.policy == policy_of({0, 1}));
    CHECK(best2.values == std::vector<Rational>{Rational(270, 19), Rational(300, 19)});
}

TEST_CASE("single-policy instances are their own optimum") {
    Mdp loop(1, {{0, 0, 0, Rational(1), Rational(1, 2)}});
    BruteForceResult<Rational> best = brute_force_optimum(loop, exact);
    CHECK(best.policy == policy_of({0}));
    CHECK(best.values == std::vector<Rational>{Rational(2)});
}

TEST_CASE("optimality certificates") {
    Mdp inst = fixture("EX1");
    CertificateReport<Rational> good = verify_optimality_certificate(inst, policy_of({0, 2}), exact);
    CHECK(good.certified);
    CHECK(good.max_gain == 0);                        // policy actions sit at zero
    CHECK(good.max_off_policy_gain == Rational(-3, 2));

    CertificateReport<Rational> bad = verify_optimality_certificate(inst, policy_of({1, 2}), exact);
    CHECK_FALSE(bad.certified);
    CHECK(bad.max_gain == Rational(3));
    CHECK(bad.argmax_action == 0);

    Mdp loop(1, {{0, 0, 0, Rational(1), Rational(1, 2)}});
    CHECK(verify_optimality_certificate(loop, policy_of({0}), exact).certified);
}

TEST_CASE("dense solve matches the hand-computed fixtures") {
    Mdp ex1 = fixture("EX1");
    CHECK(dense_value_solve(ex1, policy_of({0, 2}), exact) ==
          std::vector<Rational>{Rational(3), Rational(4)});

    Mdp loop(1, {{0, 0, 0, Rational(3), Rational(1, 4)}});
    CHECK(dense_value_solve(loop, policy_of({0}), exact) ==
          std::vector<Rational>{Rational(4)}); // 3 / (1 - 1/4)
}

TEST_CASE("dense solve and the closed form agree exactly on 1000 random instances") {
    SplitMix64 rng(987654321);
    for (int round = 0; round < 1000; ++round) {
        Mdp inst = random_instance(rng, round % 2 == 0);
        Policy pi = random_policy(inst, rng);
        CHECK(dense_value_solve(inst, pi, exact) == value_vector(inst, pi, exact));
    }
}

TEST_CASE("dense solve agrees with the closed form in float mode") {
    SplitMix64 rng(192837465);
    for (int round = 0; round < 200; ++round) {
        Mdp inst = random_instance(rng, round % 2 == 0);
        Numerics<double> num = make_float_numerics(inst);
        Policy pi = random_policy(inst, rng);
        std::vector<double> dense = dense_value_solve(inst, pi, num);
        std::vector<double> closed = value_vector(inst, pi, num);
        double norm = 0;
        for (double v : closed) norm = std::max(norm, std::abs(v));
        for (std::size_t s = 0; s < dense.size(); ++s)
            CHECK(std::abs(dense[s] - closed[s]) <= num.eps * (1.0 + norm));
    }
}

TEST_CASE("the brute force optimum dominates every policy componentwise") {
    SplitMix64 rng(1029384756);
    for (int round = 0; round < 60; ++round) {
        Mdp inst = random_instance(rng, round % 2 == 0);
        BruteForceResult<Rational> best = brute_force_optimum(inst, exact);
        PolicyEnumerator it(inst);
        while (auto pi = it.next()) {
            std::vector<Rational> v = value_vector(inst, *pi, exact);
            for (std::size_t s = 0; s < v.size(); ++s)
                CHECK(best.values[s] >= v[s]);
        }
    }
}
