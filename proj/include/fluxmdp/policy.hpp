#pragma once

#include "fluxmdp/instance.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fluxmdp {

class PolicyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// EnteringAlreadyInPolicy and friends.
class PivotError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One chosen action per state; choice[s].source == s.
struct Policy {
    std::vector<int> choice;

    bool operator==(const Policy& other) const = default;
    bool uses(int action) const {
        return std::find(choice.begin(), choice.end(), action) != choice.end();
    }
};

inline void validate_policy(const Mdp& inst, const Policy& pi) {
    if (static_cast<int>(pi.choice.size()) != inst.num_states())
        throw PolicyError("policy must choose one action for each state");
    for (int s = 0; s < inst.num_states(); ++s) {
        int a = pi.choice[static_cast<std::size_t>(s)];
        if (a < 0 || a >= inst.num_actions() || inst.action(a).source != s)
            throw PolicyError("state " + std::to_string(s) +
                              " assigned an action it cannot use: " + std::to_string(a));
    }
}

/// The policy choosing the smallest action id in every state.
inline Policy min_id_policy(const Mdp& inst) {
    Policy pi;
    pi.choice.reserve(static_cast<std::size_t>(inst.num_states()));
    for (int s = 0; s < inst.num_states(); ++s) pi.choice.push_back(inst.actions_in(s).front());
    return pi;
}

/**
 * One directed cycle of a policy's functional graph, stored in traversal
 * order starting from its smallest state id (the canonical rotation, so equal
 * cycles compare equal across iterations). actions[i] moves states[i] to
 * states[(i+1) % size].
 */
struct CycleInfo {
    std::vector<int> states;
    std::vector<int> actions;
    Rational discount_product;   // gamma_C, exact
    int dominating_action = -1;  // attains the minimum discount, smallest id on ties

    int length() const { return static_cast<int>(actions.size()); }
};

struct StatePlacement {
    bool on_cycle = false;
    int cycle = -1;    // index into PolicyStructure::cycles (own, or the one reached)
    int position = -1; // traversal index within the cycle, -1 for path states
    int distance = 0;  // actions used before the first cycle state, 0 on cycles
};

/// A policy's functional graph split into cycles and the in-trees feeding them.
struct PolicyStructure {
    std::vector<CycleInfo> cycles; // ordered by smallest state id
    std::vector<StatePlacement> placement;

    /// Canonical cycles as action-id sequences, for set comparison across policies.
    std::vector<std::vector<int>> canonical_cycles() const {
        std::vector<std::vector<int>> out;
        out.reserve(cycles.size());
        for (const CycleInfo& c : cycles) out.push_back(c.actions);
        return out;
    }
};

/// Product of the discounts around a (nonempty) cycle, exact.
inline Rational cycle_discount(const Mdp& inst, const std::vector<int>& cycle_actions) {
    if (cycle_actions.empty()) throw std::invalid_argument("cycle must be nonempty");
    Rational prod = 1;
    for (int a : cycle_actions) prod *= inst.action(a).discount;
    return prod;
}

/// Action with the minimum discount on the cycle (smallest id on ties) and that discount.
inline std::pair<int, Rational> dominating_discount(const Mdp& inst,
                                                    const std::vector<int>& cycle_actions) {
    if (cycle_actions.empty()) throw std::invalid_argument("cycle must be nonempty");
    int best = cycle_actions.front();
    for (int a : cycle_actions) {
        const Rational& d = inst.action(a).discount;
        if (d < inst.action(best).discount || (d == inst.action(best).discount && a < best))
            best = a;
    }
    return {best, inst.action(best).discount};
}

namespace detail {

inline CycleInfo make_cycle(const Mdp& inst, const Policy& pi, std::vector<int> states) {
    auto smallest = std::min_element(states.begin(), states.end());
    std::rotate(states.begin(), smallest, states.end());
    CycleInfo c;
    c.states = std::move(states);
    c.actions.reserve(c.states.size());
    for (int s : c.states) c.actions.push_back(pi.choice[static_cast<std::size_t>(s)]);
    c.discount_product = cycle_discount(inst, c.actions);
    c.dominating_action = dominating_discount(inst, c.actions).first;
    return c;
}

} // namespace detail

/**
 * Decomposes a policy into its directed cycles plus, for every other state,
 * the cycle it drains into and the number of actions used to get there. Every
 * functional graph decomposes; this never fails on a valid policy.
 */
inline PolicyStructure decompose_policy(const Mdp& inst, const Policy& pi) {
    validate_policy(inst, pi);
    const int n = inst.num_states();
    PolicyStructure out;
    out.placement.assign(static_cast<std::size_t>(n), {});

    std::vector<int> color(static_cast<std::size_t>(n), 0); // 0 new, 1 on walk, 2 settled
    std::vector<int> walk_pos(static_cast<std::size_t>(n), -1);
    std::vector<int> walk;

    for (int start = 0; start < n; ++start) {
        if (color[static_cast<std::size_t>(start)] != 0) continue;
        walk.clear();
        int cur = start;
        while (color[static_cast<std::size_t>(cur)] == 0) {
            color[static_cast<std::size_t>(cur)] = 1;
            walk_pos[static_cast<std::size_t>(cur)] = static_cast<int>(walk.size());
            walk.push_back(cur);
            cur = inst.action(pi.choice[static_cast<std::size_t>(cur)]).target;
        }

        int attach_cycle;
        int attach_distance; // distance of the last walk state's target
        if (color[static_cast<std::size_t>(cur)] == 1) {
            // the walk closed on itself: states from walk_pos[cur] onward form a new cycle
            const int p = walk_pos[static_cast<std::size_t>(cur)];
            std::vector<int> cyc(walk.begin() + p, walk.end());
            CycleInfo info = detail::make_cycle(inst, pi, std::move(cyc));
            const int idx = static_cast<int>(out.cycles.size());
            for (int i = 0; i < info.length(); ++i) {
                const int s = info.states[static_cast<std::size_t>(i)];
                out.placement[static_cast<std::size_t>(s)] = {true, idx, i, 0};
                color[static_cast<std::size_t>(s)] = 2;
            }
            out.cycles.push_back(std::move(info));
            walk.resize(static_cast<std::size_t>(p)); // the remaining prefix is a path into it
            attach_cycle = idx;
            attach_distance = 0;
        } else {
            const StatePlacement& hit = out.placement[static_cast<std::size_t>(cur)];
            attach_cycle = hit.cycle;
            attach_distance = hit.distance;
        }
        for (int i = static_cast<int>(walk.size()) - 1; i >= 0; --i) {
            const int s = walk[static_cast<std::size_t>(i)];
            const int d = attach_distance + (static_cast<int>(walk.size()) - i);
            out.placement[static_cast<std::size_t>(s)] = {false, attach_cycle, -1, d};
            color[static_cast<std::size_t>(s)] = 2;
        }
    }

    // order cycles by their smallest state and remap placements accordingly
    std::vector<int> order(out.cycles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return out.cycles[static_cast<std::size_t>(a)].states[0] <
               out.cycles[static_cast<std::size_t>(b)].states[0];
    });
    std::vector<int> rank(order.size());
    std::vector<CycleInfo> sorted;
    sorted.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
        sorted.push_back(std::move(out.cycles[static_cast<std::size_t>(order[i])]));
    }
    out.cycles = std::move(sorted);
    for (StatePlacement& p : out.placement) p.cycle = rank[static_cast<std::size_t>(p.cycle)];
    return out;
}

/**
 * Switches the source state of `entering` onto it and reports the displaced
 * action. Throws PivotError if `entering` is already chosen.
 */
inline std::pair<Policy, int> apply_pivot(const Mdp& inst, const Policy& pi, int entering) {
    if (entering < 0 || entering >= inst.num_actions())
        throw PivotError("entering action id out of range: " + std::to_string(entering));
    const int s = inst.action(entering).source;
    if (pi.choice[static_cast<std::size_t>(s)] == entering)
        throw PivotError("entering action " + std::to_string(entering) +
                         " is already in the policy");
    Policy next = pi;
    const int leaving = next.choice[static_cast<std::size_t>(s)];
    next.choice[static_cast<std::size_t>(s)] = entering;
    return {std::move(next), leaving};
}

} // namespace fluxmdp
