#pragma once

#include "fluxmdp/instance.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxmdp {

class GenError : public std::runtime_error {
  public:
    enum class Kind { InvalidSpec, UnknownFixture };

    GenError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

/**
 * splitmix64: the 64-bit mixing generator of Steele, Lea and Flood. Chosen
 * because it is trivial to reproduce bit-for-bit from its published code, so
 * instances regenerate identically anywhere; the name is recorded in every
 * generated instance's meta block.
 */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Integer in [0, bound), by modulo; bound must be positive.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

    /// Exact rational in [0, 1) on the 2^-53 grid.
    Rational unit() { return Rational(BigInt(next() >> 11), BigInt(1) << 53); }

  private:
    std::uint64_t state_;
};

enum class DiscountModel { Uniform, PerActionRange, PerActionSet };
enum class RewardModel { IntegerRange, UnitInterval };
enum class Family { Random, CycleRich, PathHeavy };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::Random: return "random";
    case Family::CycleRich: return "cycle-rich";
    default: return "path-heavy";
    }
}

struct GenSpec {
    int n = 2;
    int m = 2; // total actions, >= n
    DiscountModel discount_model = DiscountModel::Uniform;
    Rational gamma_lo;                // Uniform: the discount; PerActionRange: lower end
    Rational gamma_hi;                // PerActionRange: upper end (exclusive-ish grid)
    std::vector<Rational> gamma_set;  // PerActionSet choices
    RewardModel reward_model = RewardModel::IntegerRange;
    long long reward_lo = -10;
    long long reward_hi = 10;
    std::uint64_t seed = 0;
    Family family = Family::Random;
};

namespace detail {

inline void check_discount_value(const Rational& g) {
    if (g < 0 || g >= 1)
        throw GenError(GenError::Kind::InvalidSpec,
                       "discounts must lie in [0,1), got " + format_scalar(g));
}

inline int draw_target(SplitMix64& rng, Family family, int source, int n) {
    switch (family) {
    case Family::Random:
        return static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    case Family::CycleRich: {
        // half the edges become self-loops, seeding many short cycles
        const std::uint64_t r = rng.next();
        if (r & 1) return source;
        return static_cast<int>((r >> 1) % static_cast<std::uint64_t>(n));
    }
    default: // PathHeavy: edges point forward, the last state absorbs
        if (source >= n - 1) return n - 1;
        return source + 1 +
               static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1 - source)));
    }
}

} // namespace detail

/**
 * Deterministic instance construction from a GenSpec. Draw order (one
 * splitmix64 stream seeded with spec.seed): first the n guaranteed actions,
 * one per state in state order (target only); then sources and targets of the
 * remaining m-n actions; then every reward in action-id order; then every
 * discount in action-id order. Equal specs give byte-identical instances.
 */
inline Mdp generate(const GenSpec& spec) {
    if (spec.n < 1 || spec.m < spec.n)
        throw GenError(GenError::Kind::InvalidSpec, "need n >= 1 and m >= n");
    switch (spec.discount_model) {
    case DiscountModel::Uniform:
        detail::check_discount_value(spec.gamma_lo);
        break;
    case DiscountModel::PerActionRange:
        detail::check_discount_value(spec.gamma_lo);
        detail::check_discount_value(spec.gamma_hi);
        if (spec.gamma_lo > spec.gamma_hi)
            throw GenError(GenError::Kind::InvalidSpec, "discount range is reversed");
        break;
    case DiscountModel::PerActionSet:
        if (spec.gamma_set.empty())
            throw GenError(GenError::Kind::InvalidSpec, "discount set is empty");
        for (const Rational& g : spec.gamma_set) detail::check_discount_value(g);
        break;
    }
    if (spec.reward_model == RewardModel::IntegerRange && spec.reward_lo > spec.reward_hi)
        throw GenError(GenError::Kind::InvalidSpec, "reward range is reversed");

    SplitMix64 rng(spec.seed);
    std::vector<ActionDef> actions(static_cast<std::size_t>(spec.m));

    for (int s = 0; s < spec.n; ++s) {
        actions[static_cast<std::size_t>(s)].id = s;
        actions[static_cast<std::size_t>(s)].source = s;
        actions[static_cast<std::size_t>(s)].target =
            detail::draw_target(rng, spec.family, s, spec.n);
    }
    for (int a = spec.n; a < spec.m; ++a) {
        const int source = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n)));
        actions[static_cast<std::size_t>(a)].id = a;
        actions[static_cast<std::size_t>(a)].source = source;
        actions[static_cast<std::size_t>(a)].target =
            detail::draw_target(rng, spec.family, source, spec.n);
    }

    for (ActionDef& a : actions) {
        if (spec.reward_model == RewardModel::IntegerRange) {
            const std::uint64_t span =
                static_cast<std::uint64_t>(spec.reward_hi - spec.reward_lo) + 1;
            a.reward = Rational(BigInt(spec.reward_lo + static_cast<long long>(rng.below(span))));
        } else {
            a.reward = rng.unit();
        }
    }

    for (ActionDef& a : actions) {
        switch (spec.discount_model) {
        case DiscountModel::Uniform:
            a.discount = spec.gamma_lo;
            break;
        case DiscountModel::PerActionRange:
            a.discount = spec.gamma_lo + rng.unit() * (spec.gamma_hi - spec.gamma_lo);
            break;
        case DiscountModel::PerActionSet:
            a.discount = spec.gamma_set[rng.below(spec.gamma_set.size())];
            break;
        }
    }

    json meta{{"seed", spec.seed},
              {"family", to_string(spec.family)},
              {"generator", "splitmix64"}};
    return Mdp(spec.n, std::move(actions), std::move(meta));
}

/**
 * The three named desk fixtures used throughout the tests:
 *   EX1: two states, gamma 0.5 everywhere, one improving switch available.
 *   EX2: two states, gamma 0.9, where the optimal policy is the 2-cycle.
 *   EX3: EX2 with action 1 discounted at 0.99 instead, so discounts differ.
 */
inline Mdp fixture(const std::string& name) {
    const Rational half(1, 2), r09(9, 10), r099(99, 100);
    if (name == "EX1")
        return Mdp(2, {{0, 0, 1, Rational(1), half},
                       {1, 0, 0, Rational(0), half},
                       {2, 1, 1, Rational(2), half}});
    if (name == "EX2")
        return Mdp(2, {{0, 0, 1, Rational(0), r09},
                       {1, 1, 0, Rational(3), r09},
                       {2, 1, 1, Rational(1), r09},
                       {3, 0, 0, Rational(0), r09}});
    if (name == "EX3")
        return Mdp(2, {{0, 0, 1, Rational(0), r09},
                       {1, 1, 0, Rational(3), r099},
                       {2, 1, 1, Rational(1), r09},
                       {3, 0, 0, Rational(0), r09}});
    throw GenError(GenError::Kind::UnknownFixture, "unknown fixture: " + name);
}

} // namespace fluxmdp
