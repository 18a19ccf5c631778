#pragma once

#include "fluxmdp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fluxmdp {

/// Float-mode arithmetic lost enough precision to contradict a structural
/// guarantee (monotone values); the run is aborted rather than continued.
class NumericBreakdown : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A cycle closed (or present) at a pivot, with its discount data.
struct CycleEvent {
    std::vector<int> actions; // canonical rotation, smallest state first
    Rational discount_product;
    int dominating_action = -1;
    Rational dominating_discount;
};

template <typename Num>
struct PivotRecord {
    std::uint64_t iteration = 1; // 1-based position in the run
    int entering = -1;
    int leaving = -1;
    int state = -1; // the state whose action changed
    Num gain{};     // top gain at the pre-pivot policy
    Num objective_before{};
    Num objective_after{};
    std::vector<Num> values_before; // empty when the trace is light
    std::vector<Num> values_after;
    std::optional<CycleEvent> cycle_created;
    std::vector<std::vector<int>> cycles_broken; // canonical action sequences
};

enum class Termination { Optimal, IterationCap };

inline const char* to_string(Termination t) {
    return t == Termination::Optimal ? "optimal" : "iteration_cap";
}

template <typename Num>
struct PivotTrace {
    std::string digest;
    NumericMode mode = Numerics<Num>::mode;
    Policy initial;
    std::vector<PivotRecord<Num>> records;
    Policy final_policy;
    std::vector<Num> final_values;
    Num final_objective{};
    Termination termination = Termination::Optimal;
    bool light = false;
    std::optional<std::uint64_t> seed; // generator seed when the instance has one

    std::uint64_t iterations() const { return records.size(); }
};

/// ceil(ln n), the logarithm appearing in the iteration bounds.
inline std::uint64_t ceil_log(int n) {
    std::uint64_t k = 0;
    while (std::exp(static_cast<double>(k)) < static_cast<double>(n)) ++k;
    return k;
}

namespace detail {

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

} // namespace detail

/**
 * Default pivot budget: ten times the engine's iteration-count order,
 * 10 n^3 m^2 (ceil(ln n)+1)^2 with a uniform discount and
 * 10 n^5 m^3 (ceil(ln n)+1)^2 with per-action discounts. Reaching it is
 * reported in the trace, never silently truncated.
 */
inline std::uint64_t default_iteration_cap(const Mdp& inst) {
    const std::uint64_t n = static_cast<std::uint64_t>(inst.num_states());
    const std::uint64_t m = static_cast<std::uint64_t>(inst.num_actions());
    const std::uint64_t log_term = ceil_log(inst.num_states()) + 1;
    std::uint64_t cap = 10;
    const int n_pow = inst.uniform_discount() ? 3 : 5;
    const int m_pow = inst.uniform_discount() ? 2 : 3;
    for (int i = 0; i < n_pow; ++i) cap = detail::sat_mul(cap, n);
    for (int i = 0; i < m_pow; ++i) cap = detail::sat_mul(cap, m);
    cap = detail::sat_mul(cap, log_term);
    cap = detail::sat_mul(cap, log_term);
    return cap;
}

struct EventFields {
    std::optional<CycleEvent> created;
    std::vector<std::vector<int>> broken;
};

/**
 * Compares the canonical cycle sets of two consecutive policy structures:
 * `created` is the cycle of `after` containing the entering action, if the
 * pivot closed one; `broken` lists the cycles of `before` absent from
 * `after`.
 */
inline EventFields classify_event(const Mdp& inst, const PolicyStructure& before,
                                  const PolicyStructure& after, int entering) {
    EventFields out;
    for (const CycleInfo& c : after.cycles) {
        if (std::find(c.actions.begin(), c.actions.end(), entering) == c.actions.end()) continue;
        CycleEvent ev;
        ev.actions = c.actions;
        ev.discount_product = c.discount_product;
        ev.dominating_action = c.dominating_action;
        ev.dominating_discount = inst.action(c.dominating_action).discount;
        out.created = std::move(ev);
        break;
    }
    auto after_cycles = after.canonical_cycles();
    for (const CycleInfo& c : before.cycles)
        if (std::find(after_cycles.begin(), after_cycles.end(), c.actions) == after_cycles.end())
            out.broken.push_back(c.actions);
    return out;
}

namespace detail {

template <typename Num>
void check_monotone(const std::vector<Num>& before, const std::vector<Num>& after,
                    const Numerics<Num>& num, std::uint64_t iteration) {
    for (std::size_t s = 0; s < before.size(); ++s) {
        if (num.ge(after[s], before[s])) continue;
        const std::string msg = "value of state " + std::to_string(s) +
                                " decreased at iteration " + std::to_string(iteration);
        if (Numerics<Num>::mode == NumericMode::Exact)
            throw std::logic_error(msg + "; this contradicts pivot monotonicity");
        throw NumericBreakdown(msg + "; float arithmetic broke down, rerun in exact mode");
    }
}

template <typename Num>
PivotRecord<Num> make_record(const Mdp& inst, std::uint64_t iteration, int entering, int leaving,
                             const std::pair<int, Num>& best, const EvalResult<Num>& before,
                             const EvalResult<Num>& after, const PolicyStructure& st_before,
                             const PolicyStructure& st_after, bool light) {
    PivotRecord<Num> rec;
    rec.iteration = iteration;
    rec.entering = entering;
    rec.leaving = leaving;
    rec.state = inst.action(entering).source;
    rec.gain = best.second;
    rec.objective_before = before.objective;
    rec.objective_after = after.objective;
    if (!light) {
        rec.values_before = before.values;
        rec.values_after = after.values;
    }
    EventFields events = classify_event(inst, st_before, st_after, entering);
    rec.cycle_created = std::move(events.created);
    rec.cycles_broken = std::move(events.broken);
    return rec;
}

} // namespace detail

template <typename Num>
struct StepResult {
    PivotRecord<Num> record;
    Policy next;
};

/**
 * One highest-gain pivot: evaluates pi, switches the best improving action
 * (smallest id on ties), classifies the cycle events, and returns the record
 * plus the successor policy. nullopt means pi is already optimal.
 */
template <typename Num>
std::optional<StepResult<Num>> pivot_step(const Mdp& inst, const Policy& pi,
                                          const Numerics<Num>& num, std::uint64_t iteration = 1,
                                          bool light = false) {
    PolicyStructure st = decompose_policy(inst, pi);
    EvalResult<Num> eval = evaluate_policy(inst, pi, st, num);
    auto best = best_gain(eval.gains, num);
    if (!best) return std::nullopt;

    auto [next, leaving] = apply_pivot(inst, pi, best->first);
    PolicyStructure st_next = decompose_policy(inst, next);
    EvalResult<Num> eval_next = evaluate_policy(inst, next, st_next, num);
    detail::check_monotone(eval.values, eval_next.values, num, iteration);

    StepResult<Num> out{detail::make_record(inst, iteration, best->first, leaving, *best, eval,
                                            eval_next, st, st_next, light),
                        std::move(next)};
    return out;
}

/**
 * The simplex method with Dantzig's highest-gain rule, run to optimality or
 * the iteration cap. On normal termination the final gains are all below the
 * improvement threshold, which certifies the final policy optimal. Identical
 * inputs produce identical traces.
 */
template <typename Num>
PivotTrace<Num> run_simplex(const Mdp& inst, const Policy& initial, const Numerics<Num>& num,
                            std::uint64_t iteration_cap, bool light = false) {
    if (iteration_cap < 1) throw std::invalid_argument("iteration cap must be at least 1");
    validate_policy(inst, initial);

    PivotTrace<Num> trace;
    trace.digest = inst.digest();
    trace.initial = initial;
    trace.light = light;
    if (inst.meta().is_object() && inst.meta().contains("seed") &&
        inst.meta()["seed"].is_number_unsigned())
        trace.seed = inst.meta()["seed"].get<std::uint64_t>();

    Policy pi = initial;
    PolicyStructure st = decompose_policy(inst, pi);
    EvalResult<Num> eval = evaluate_policy(inst, pi, st, num);
    trace.termination = Termination::IterationCap;
    for (std::uint64_t it = 1; it <= iteration_cap; ++it) {
        auto best = best_gain(eval.gains, num);
        if (!best) {
            trace.termination = Termination::Optimal;
            break;
        }
        auto [next, leaving] = apply_pivot(inst, pi, best->first);
        PolicyStructure st_next = decompose_policy(inst, next);
        EvalResult<Num> eval_next = evaluate_policy(inst, next, st_next, num);
        detail::check_monotone(eval.values, eval_next.values, num, it);
        trace.records.push_back(detail::make_record(inst, it, best->first, leaving, *best, eval,
                                                    eval_next, st, st_next, light));
        pi = std::move(next);
        st = std::move(st_next);
        eval = std::move(eval_next);
    }
    if (trace.termination == Termination::IterationCap && !best_gain(eval.gains, num))
        trace.termination = Termination::Optimal; // optimum reached exactly at the cap
    trace.final_policy = std::move(pi);
    trace.final_values = std::move(eval.values);
    trace.final_objective = std::move(eval.objective);
    return trace;
}

template <typename Num>
PivotTrace<Num> run_simplex(const Mdp& inst, const Policy& initial, const Numerics<Num>& num) {
    return run_simplex(inst, initial, num, default_iteration_cap(inst));
}

template <typename Num>
struct PolicyIterationTrace {
    Policy initial;
    std::vector<Policy> policies; // the policy after each improvement round
    Policy final_policy;
    std::vector<Num> final_values;
    Termination termination = Termination::Optimal;

    std::uint64_t iterations() const { return policies.size(); }
};

/**
 * All-switches policy iteration, the comparison baseline: every state holding
 * a positive-gain action switches to its own best one (smallest id on ties)
 * simultaneously, until no gain is positive.
 */
template <typename Num>
PolicyIterationTrace<Num> run_policy_iteration(const Mdp& inst, const Policy& initial,
                                               const Numerics<Num>& num,
                                               std::uint64_t iteration_cap) {
    if (iteration_cap < 1) throw std::invalid_argument("iteration cap must be at least 1");
    validate_policy(inst, initial);

    PolicyIterationTrace<Num> trace;
    trace.initial = initial;
    Policy pi = initial;
    std::vector<Num> values = value_vector(inst, pi, num);
    trace.termination = Termination::IterationCap;
    for (std::uint64_t it = 1; it <= iteration_cap; ++it) {
        std::vector<Num> gains = gain_vector(inst, values, num);
        Policy next = pi;
        bool switched = false;
        for (int s = 0; s < inst.num_states(); ++s) {
            int arg = -1;
            for (int a : inst.actions_in(s)) {
                if (!num.improving(gains[static_cast<std::size_t>(a)])) continue;
                if (arg < 0 ||
                    gains[static_cast<std::size_t>(a)] > gains[static_cast<std::size_t>(arg)])
                    arg = a;
            }
            if (arg >= 0 && arg != pi.choice[static_cast<std::size_t>(s)]) {
                next.choice[static_cast<std::size_t>(s)] = arg;
                switched = true;
            }
        }
        if (!switched) {
            trace.termination = Termination::Optimal;
            break;
        }
        std::vector<Num> next_values = value_vector(inst, next, num);
        detail::check_monotone(values, next_values, num, it);
        trace.policies.push_back(next);
        pi = std::move(next);
        values = std::move(next_values);
    }
    if (trace.termination == Termination::IterationCap) {
        std::vector<Num> gains = gain_vector(inst, values, num);
        if (!best_gain(gains, num)) trace.termination = Termination::Optimal;
    }
    trace.final_policy = std::move(pi);
    trace.final_values = std::move(values);
    return trace;
}

} // namespace fluxmdp
