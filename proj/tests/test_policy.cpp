#include "fluxmdp/generate.hpp"
#include "fluxmdp/policy.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace fluxmdp;

namespace {

// Independent oracle: follow the pointer chain from s naively and report the
// number of steps until a state repeats its first cycle visit.
struct ChaseResult {
    bool on_cycle;
    int distance;
    int first_cycle_state;
};

ChaseResult chase(const Mdp& inst, const Policy& pi, int s) {
    std::vector<int> order;
    std::set<int> seen;
    int cur = s;
    while (!seen.count(cur)) {
        seen.insert(cur);
        order.push_back(cur);
        cur = inst.action(pi.choice[static_cast<std::size_t>(cur)]).target;
    }
    // cur is the first revisited state: everything from its first occurrence
    // onward is the cycle
    int cycle_start = 0;
    while (order[static_cast<std::size_t>(cycle_start)] != cur) ++cycle_start;
    return {cycle_start == 0, cycle_start, cur};
}

Policy policy_of(std::vector<int> choice) { return Policy{std::move(choice)}; }

} // namespace

TEST_CASE("EX1 with the improving policy: one cycle, one path state") {
    Mdp inst = fixture("EX1");
    PolicyStructure st = decompose_policy(inst, policy_of({0, 2}));

    REQUIRE(st.cycles.size() == 1);
    CHECK(st.cycles[0].states == std::vector<int>{1});
    CHECK(st.cycles[0].actions == std::vector<int>{2});
    CHECK(st.cycles[0].discount_product == Rational(1, 2));
    CHECK(st.cycles[0].dominating_action == 2);

    CHECK(st.placement[1].on_cycle);
    CHECK(st.placement[1].position == 0);
    CHECK_FALSE(st.placement[0].on_cycle);
    CHECK(st.placement[0].cycle == 0);
    CHECK(st.placement[0].distance == 1);
}

TEST_CASE("EX1 with both self-loops: two singleton cycles, no paths") {
    Mdp inst = fixture("EX1");
    PolicyStructure st = decompose_policy(inst, policy_of({1, 2}));

    REQUIRE(st.cycles.size() == 2);
    CHECK(st.cycles[0].actions == std::vector<int>{1});
    CHECK(st.cycles[1].actions == std::vector<int>{2});
    for (const StatePlacement& p : st.placement) CHECK(p.on_cycle);
}

TEST_CASE("single self-loop state decomposes to one cycle") {
    Mdp inst(1, {{0, 0, 0, Rational(1), Rational(1, 2)}});
    PolicyStructure st = decompose_policy(inst, policy_of({0}));
    REQUIRE(st.cycles.size() == 1);
    CHECK(st.cycles[0].length() == 1);
    CHECK(st.placement[0].on_cycle);
}

TEST_CASE("cycles are stored from their smallest state") {
    // 3-cycle 0 -> 2 -> 1 -> 0 entered from nowhere
    Mdp inst(3, {{0, 0, 2, Rational(0), Rational(1, 2)},
                 {1, 1, 0, Rational(0), Rational(1, 2)},
                 {2, 2, 1, Rational(0), Rational(1, 2)}});
    PolicyStructure st = decompose_policy(inst, policy_of({0, 1, 2}));
    REQUIRE(st.cycles.size() == 1);
    CHECK(st.cycles[0].states == std::vector<int>{0, 2, 1});
    CHECK(st.cycles[0].actions == std::vector<int>{0, 2, 1});
}

TEST_CASE("cycle discount products") {
    Mdp inst(2, {{0, 0, 1, Rational(0), Rational(9, 10)},
                 {1, 1, 0, Rational(0), Rational(99, 100)}});
    CHECK(cycle_discount(inst, {0, 1}) == Rational(891, 1000));

    Mdp zero(2, {{0, 0, 1, Rational(0), Rational(0)},
                 {1, 1, 0, Rational(0), Rational(9, 10)}});
    CHECK(cycle_discount(zero, {0, 1}) == Rational(0));
    CHECK_THROWS_AS(cycle_discount(inst, {}), std::invalid_argument);
}

TEST_CASE("dominating discount takes the minimum, smallest id on ties") {
    Mdp inst(2, {{0, 0, 1, Rational(0), Rational(9, 10)},
                 {1, 1, 0, Rational(0), Rational(99, 100)}});
    CHECK(dominating_discount(inst, {0, 1}) == std::pair<int, Rational>(0, Rational(9, 10)));

    Mdp tied(2, {{4, 0, 1, Rational(0), Rational(1, 2)},
                 {7, 1, 0, Rational(0), Rational(1, 2)},
                 {0, 0, 0, Rational(0), Rational(1, 2)},
                 {1, 0, 0, Rational(0), Rational(1, 2)},
                 {2, 0, 0, Rational(0), Rational(1, 2)},
                 {3, 0, 0, Rational(0), Rational(1, 2)},
                 {5, 1, 1, Rational(0), Rational(1, 2)},
                 {6, 1, 1, Rational(0), Rational(1, 2)}});
    CHECK(dominating_discount(tied, {7, 4}).first == 4);

    CHECK(dominating_discount(inst, {1}).first == 1); // singleton
}

TEST_CASE("apply_pivot swaps exactly one state's action") {
    Mdp inst = fixture("EX1");
    auto [next, leaving] = apply_pivot(inst, policy_of({1, 2}), 0);
    CHECK(next == policy_of({0, 2}));
    CHECK(leaving == 1);

    CHECK_THROWS_AS(apply_pivot(inst, policy_of({0, 2}), 0), PivotError);
    CHECK_THROWS_AS(apply_pivot(inst, policy_of({0, 2}), 9), PivotError);

    Mdp ex2 = fixture("EX2");
    auto [next2, leaving2] = apply_pivot(ex2, policy_of({0, 2}), 1);
    CHECK(next2 == policy_of({0, 1}));
    CHECK(leaving2 == 2);
}

TEST_CASE("pivot and revert is the identity") {
    Mdp inst = fixture("EX2");
    const Policy pi = policy_of({3, 2});
    auto [forward, leaving] = apply_pivot(inst, pi, 0);
    auto [back, leaving2] = apply_pivot(inst, forward, leaving);
    CHECK(back == pi);
    CHECK(leaving2 == 0);
}

TEST_CASE("invalid policies are rejected") {
    Mdp inst = fixture("EX1");
    CHECK_THROWS_AS(validate_policy(inst, policy_of({2, 2})), PolicyError); // wrong source
    CHECK_THROWS_AS(validate_policy(inst, policy_of({0})), PolicyError);    // wrong length
    CHECK_THROWS_AS(validate_policy(inst, policy_of({0, 5})), PolicyError); // out of range
}

TEST_CASE("decomposition partitions the states and distances are exact") {
    // property sweep over random instances and policies
    SplitMix64 rng(20260811);
    for (int round = 0; round < 200; ++round) {
        GenSpec spec;
        spec.n = 2 + static_cast<int>(rng.below(7));
        spec.m = spec.n + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * spec.n)));
        spec.discount_model = DiscountModel::PerActionRange;
        spec.gamma_lo = Rational(1, 2);
        spec.gamma_hi = Rational(999, 1000);
        spec.seed = rng.next();
        spec.family = round % 3 == 0   ? Family::Random
                      : round % 3 == 1 ? Family::CycleRich
                                       : Family::PathHeavy;
        Mdp inst = generate(spec);

        Policy pi;
        for (int s = 0; s < inst.num_states(); ++s) {
            const auto& usable = inst.actions_in(s);
            pi.choice.push_back(usable[rng.below(usable.size())]);
        }
        PolicyStructure st = decompose_policy(inst, pi);

        int on_cycles = 0;
        for (const CycleInfo& c : st.cycles) on_cycles += c.length();
        int placed_on_cycle = 0;
        for (int s = 0; s < inst.num_states(); ++s) {
            const StatePlacement& p = st.placement[static_cast<std::size_t>(s)];
            ChaseResult expect = chase(inst, pi, s);
            CHECK(p.on_cycle == expect.on_cycle);
            if (p.on_cycle) {
                ++placed_on_cycle;
                CHECK(p.distance == 0);
                CHECK(st.cycles[static_cast<std::size_t>(p.cycle)]
                          .states[static_cast<std::size_t>(p.position)] == s);
            } else {
                CHECK(p.distance == expect.distance);
                // the chain lands on the recorded cycle, and no shorter prefix does
                const CycleInfo& c = st.cycles[static_cast<std::size_t>(p.cycle)];
                CHECK(std::find(c.states.begin(), c.states.end(), expect.first_cycle_state) !=
                      c.states.end());
            }
            CHECK(st.cycles[static_cast<std::size_t>(p.cycle)].discount_product <
                  Rational(1));
            CHECK(st.cycles[static_cast<std::size_t>(p.cycle)].discount_product >= 0);
        }
        CHECK(placed_on_cycle == on_cycles);

        // each cycle is closed and its discount product matches a direct product
        for (const CycleInfo& c : st.cycles) {
            for (int i = 0; i < c.length(); ++i) {
                const ActionDef& a = inst.action(c.actions[static_cast<std::size_t>(i)]);
                CHECK(a.source == c.states[static_cast<std::size_t>(i)]);
                CHECK(a.target ==
                      c.states[static_cast<std::size_t>((i + 1) % c.length())]);
            }
            CHECK(c.discount_product == cycle_discount(inst, c.actions));
        }
    }
}

TEST_CASE("uniform discount cycles have discount gamma^k") {
    Mdp inst = fixture("EX2");
    PolicyStructure st = decompose_policy(inst, policy_of({0, 1}));
    REQUIRE(st.cycles.size() == 1);
    CHECK(st.cycles[0].length() == 2);
    CHECK(st.cycles[0].discount_product == Rational(81, 100)); // (9/10)^2
}
