#pragma once

#include "fluxmdp/numerics.hpp"
#include "fluxmdp/policy.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace fluxmdp {

/// Everything one policy evaluation yields. flux and gains are indexed by
/// action (flux zero off-policy); values by state; objective = sum of values.
template <typename Num>
struct EvalResult {
    std::vector<Num> values;
    std::vector<Num> flux;
    std::vector<Num> gains;
    Num objective;
};

namespace detail {

/// Path states grouped for closed-form sweeps: ascending distance for values,
/// descending for flux.
inline std::vector<int> path_states_by_distance(const PolicyStructure& st, bool ascending) {
    int max_d = 0;
    for (const StatePlacement& p : st.placement)
        if (!p.on_cycle && p.distance > max_d) max_d = p.distance;
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(max_d) + 1);
    for (std::size_t s = 0; s < st.placement.size(); ++s)
        if (!st.placement[s].on_cycle)
            buckets[static_cast<std::size_t>(st.placement[s].distance)].push_back(
                static_cast<int>(s));
    std::vector<int> out;
    if (ascending)
        for (const auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
    else
        for (auto it = buckets.rbegin(); it != buckets.rend(); ++it)
            out.insert(out.end(), it->begin(), it->end());
    return out;
}

} // namespace detail

/**
 * Value vector of a policy, computed by the cycle/path closed forms: each
 * cycle state's value is its discounted reward sum once around the cycle
 * divided by (1 - gamma_C); path states then follow v_s = r_a + gamma_a *
 * v_target outward from the cycles. O(n) arithmetic operations.
 */
template <typename Num>
std::vector<Num> value_vector(const Mdp& inst, const Policy& pi, const PolicyStructure& st,
                              const Numerics<Num>& num) {
    const Num one = num.from(Rational(1));
    std::vector<Num> values(static_cast<std::size_t>(inst.num_states()), Num(0));

    for (const CycleInfo& c : st.cycles) {
        const int k = c.length();
        Num prod = one, first = Num(0);
        for (int i = 0; i < k; ++i) {
            const ActionDef& a = inst.action(c.actions[static_cast<std::size_t>(i)]);
            first += prod * num.from(a.reward);
            prod *= num.from(a.discount);
        }
        // prod is now gamma_C; back-substitute around the cycle from states[0]
        values[static_cast<std::size_t>(c.states[0])] = first / (one - prod);
        for (int i = k - 1; i >= 1; --i) {
            const ActionDef& a = inst.action(c.actions[static_cast<std::size_t>(i)]);
            values[static_cast<std::size_t>(c.states[static_cast<std::size_t>(i)])] =
                num.from(a.reward) +
                num.from(a.discount) *
                    values[static_cast<std::size_t>(c.states[static_cast<std::size_t>((i + 1) % k)])];
        }
    }

    for (int s : detail::path_states_by_distance(st, /*ascending=*/true)) {
        const ActionDef& a = inst.action(pi.choice[static_cast<std::size_t>(s)]);
        values[static_cast<std::size_t>(s)] =
            num.from(a.reward) + num.from(a.discount) * values[static_cast<std::size_t>(a.target)];
    }
    return values;
}

/**
 * Flux vector of a policy: one unit of mass starts on every state, flows
 * along the policy discounted per action, and the total passing through each
 * chosen action is recorded. Tree in-flows are accumulated toward the cycles
 * in decreasing-distance order; each cycle then needs a single division by
 * (1 - gamma_C) for its circulation.
 */
template <typename Num>
std::vector<Num> flux_vector(const Mdp& inst, const Policy& pi, const PolicyStructure& st,
                             const Numerics<Num>& num) {
    const Num one = num.from(Rational(1));
    const int n = inst.num_states();
    std::vector<Num> through(static_cast<std::size_t>(n), Num(0)); // y_s: total flux through s
    std::vector<Num> inflow(static_cast<std::size_t>(n), Num(0));  // tree inflow into s

    for (int s : detail::path_states_by_distance(st, /*ascending=*/false)) {
        const ActionDef& a = inst.action(pi.choice[static_cast<std::size_t>(s)]);
        through[static_cast<std::size_t>(s)] = one + inflow[static_cast<std::size_t>(s)];
        inflow[static_cast<std::size_t>(a.target)] +=
            num.from(a.discount) * through[static_cast<std::size_t>(s)];
    }

    for (const CycleInfo& c : st.cycles) {
        const int k = c.length();
        // entering flow e_i = own unit + tree inflow; fold it once around the
        // cycle into the circulation unknown at states[0]
        Num folded = one + inflow[static_cast<std::size_t>(c.states[0])];
        Num prod = one;
        for (int i = k - 1; i >= 1; --i) {
            prod *= num.from(inst.action(c.actions[static_cast<std::size_t>(i)]).discount);
            folded += prod * (one + inflow[static_cast<std::size_t>(
                                        c.states[static_cast<std::size_t>(i)])]);
        }
        prod *= num.from(inst.action(c.actions[0]).discount); // now gamma_C
        through[static_cast<std::size_t>(c.states[0])] = folded / (one - prod);
        for (int i = 1; i < k; ++i) {
            const ActionDef& prev = inst.action(c.actions[static_cast<std::size_t>(i - 1)]);
            through[static_cast<std::size_t>(c.states[static_cast<std::size_t>(i)])] =
                one + inflow[static_cast<std::size_t>(c.states[static_cast<std::size_t>(i)])] +
                num.from(prev.discount) *
                    through[static_cast<std::size_t>(c.states[static_cast<std::size_t>(i - 1)])];
        }
    }

    std::vector<Num> flux(static_cast<std::size_t>(inst.num_actions()), Num(0));
    for (int s = 0; s < n; ++s)
        flux[static_cast<std::size_t>(pi.choice[static_cast<std::size_t>(s)])] =
            through[static_cast<std::size_t>(s)];
    return flux;
}

/**
 * Flux originating from a single state: the unit of mass placed on `state`
 * walks its path prefix once, then circulates the cycle it reaches. Nonzero
 * only on the forward orbit of `state`; summed over all states this equals
 * flux_vector.
 */
template <typename Num>
std::vector<Num> per_state_flux(const Mdp& inst, const Policy& pi, const PolicyStructure& st,
                                int state, const Numerics<Num>& num) {
    const Num one = num.from(Rational(1));
    std::vector<Num> flux(static_cast<std::size_t>(inst.num_actions()), Num(0));

    Num mass = one;
    int cur = state;
    while (!st.placement[static_cast<std::size_t>(cur)].on_cycle) {
        const ActionDef& a = inst.action(pi.choice[static_cast<std::size_t>(cur)]);
        flux[static_cast<std::size_t>(a.id)] = mass;
        mass *= num.from(a.discount);
        cur = a.target;
    }

    const CycleInfo& c = st.cycles[static_cast<std::size_t>(
        st.placement[static_cast<std::size_t>(cur)].cycle)];
    const int k = c.length();
    const int entry = st.placement[static_cast<std::size_t>(cur)].position;
    Num circulating = mass / (one - num.from(c.discount_product));
    for (int i = 0; i < k; ++i) {
        const int a = c.actions[static_cast<std::size_t>((entry + i) % k)];
        flux[static_cast<std::size_t>(a)] = circulating;
        circulating *= num.from(inst.action(a).discount);
    }
    return flux;
}

/**
 * Gain (reduced cost) of every action against the given values: the one-step
 * improvement r_a + gamma_a * v_target - v_source. Actions in the evaluated
 * policy come out at exactly zero in exact mode; they are computed, not
 * special-cased.
 */
template <typename Num>
std::vector<Num> gain_vector(const Mdp& inst, const std::vector<Num>& values,
                             const Numerics<Num>& num) {
    std::vector<Num> gains;
    gains.reserve(static_cast<std::size_t>(inst.num_actions()));
    for (const ActionDef& a : inst.actions())
        gains.push_back(num.from(a.reward) +
                        num.from(a.discount) * values[static_cast<std::size_t>(a.target)] -
                        values[static_cast<std::size_t>(a.source)]);
    return gains;
}

template <typename Num>
Num objective_value(const std::vector<Num>& values) {
    Num total(0);
    for (const Num& v : values) total += v;
    return total;
}

/**
 * Highest-gain action (smallest id on ties), or nullopt when no gain beats
 * the improvement threshold: zero in exact mode, eps in float mode. nullopt
 * certifies the policy optimal.
 */
template <typename Num>
std::optional<std::pair<int, Num>> best_gain(const std::vector<Num>& gains,
                                             const Numerics<Num>& num) {
    int arg = -1;
    for (std::size_t a = 0; a < gains.size(); ++a)
        if (arg < 0 || gains[a] > gains[static_cast<std::size_t>(arg)]) arg = static_cast<int>(a);
    if (arg < 0 || !num.improving(gains[static_cast<std::size_t>(arg)])) return std::nullopt;
    return std::make_pair(arg, gains[static_cast<std::size_t>(arg)]);
}

template <typename Num>
EvalResult<Num> evaluate_policy(const Mdp& inst, const Policy& pi, const PolicyStructure& st,
                                const Numerics<Num>& num) {
    EvalResult<Num> out;
    out.values = value_vector(inst, pi, st, num);
    out.flux = flux_vector(inst, pi, st, num);
    out.gains = gain_vector(inst, out.values, num);
    out.objective = objective_value(out.values);
    return out;
}

// Conveniences that decompose internally.

template <typename Num>
std::vector<Num> value_vector(const Mdp& inst, const Policy& pi, const Numerics<Num>& num) {
    return value_vector(inst, pi, decompose_policy(inst, pi), num);
}

template <typename Num>
std::vector<Num> flux_vector(const Mdp& inst, const Policy& pi, const Numerics<Num>& num) {
    return flux_vector(inst, pi, decompose_policy(inst, pi), num);
}

template <typename Num>
std::vector<Num> per_state_flux(const Mdp& inst, const Policy& pi, int state,
                                const Numerics<Num>& num) {
    return per_state_flux(inst, pi, decompose_policy(inst, pi), state, num);
}

template <typename Num>
EvalResult<Num> evaluate_policy(const Mdp& inst, const Policy& pi, const Numerics<Num>& num) {
    return evaluate_policy(inst, pi, decompose_policy(inst, pi), num);
}

} // namespace fluxmdp
