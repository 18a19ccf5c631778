#pragma once

#include "fluxmdp/evaluate.hpp"
#include "fluxmdp/simplex.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fluxmdp {

/// Outcome of one named check. `margin` is the worst slack encountered (in
/// double, for reporting): positive slack for inequalities, minus the largest
/// deviation for equalities, so 0 is a tight pass and negative is a failure.
struct CheckResult {
    std::string check;
    std::string scope;
    bool pass = true;
    bool hard = true;
    double margin = 0.0;
    std::string detail;

    json to_json() const {
        return json{{"check", check}, {"scope", scope},   {"pass", pass},
                    {"hard", hard},   {"margin", margin}, {"detail", detail}};
    }
};

/**
 * Cycle-event bookkeeping for one run: how often pivots created cycles, the
 * longest stretch without a creation, and creations grouped by the created
 * cycle's dominating discount. The thresholds are the engine's explicit
 * safety-factor constants on the analytic iteration orders; exceeding them is
 * flagged for attention, never treated as a failure, because those orders
 * carry unspecified constants.
 */
struct EventSummary {
    std::uint64_t iterations = 0;
    std::uint64_t cycle_creations = 0;
    std::uint64_t max_creation_gap = 0; // includes the stretch before the first creation
    std::vector<std::pair<std::string, std::uint64_t>> creations_by_discount;
    std::uint64_t creation_gap_threshold = 0;   // 10 n^2 m (ceil(ln n)+1)
    std::uint64_t per_discount_threshold = 0;   // 10 n^3 m (ceil(ln n)+1)
    bool gap_within_threshold = true;
    bool per_discount_within_threshold = true;

    json to_json() const {
        json by_discount = json::array();
        for (const auto& [discount, count] : creations_by_discount)
            by_discount.push_back({{"discount", discount}, {"creations", count}});
        return json{{"iterations", iterations},
                    {"cycle_creations", cycle_creations},
                    {"max_creation_gap", max_creation_gap},
                    {"creations_by_discount", std::move(by_discount)},
                    {"creation_gap_threshold", creation_gap_threshold},
                    {"per_discount_threshold", per_discount_threshold},
                    {"gap_within_threshold", gap_within_threshold},
                    {"per_discount_within_threshold", per_discount_within_threshold}};
    }
};

template <typename Num>
EventSummary event_accounting(const Mdp& inst, const PivotTrace<Num>& trace) {
    EventSummary out;
    out.iterations = trace.iterations();
    const std::uint64_t log_term = ceil_log(inst.num_states()) + 1;
    const std::uint64_t n = static_cast<std::uint64_t>(inst.num_states());
    const std::uint64_t m = static_cast<std::uint64_t>(inst.num_actions());
    out.creation_gap_threshold = detail::sat_mul(detail::sat_mul(10 * n, n), m * log_term);
    out.per_discount_threshold = detail::sat_mul(out.creation_gap_threshold, n);

    std::map<Rational, std::uint64_t> per_discount;
    std::uint64_t previous = 0;
    for (const PivotRecord<Num>& rec : trace.records) {
        if (!rec.cycle_created) continue;
        ++out.cycle_creations;
        ++per_discount[rec.cycle_created->dominating_discount];
        if (rec.iteration - previous > out.max_creation_gap)
            out.max_creation_gap = rec.iteration - previous;
        previous = rec.iteration;
    }
    if (out.iterations - previous > out.max_creation_gap)
        out.max_creation_gap = out.iterations - previous;
    for (const auto& [discount, count] : per_discount) {
        out.creations_by_discount.emplace_back(format_scalar(discount), count);
        if (count > out.per_discount_threshold) out.per_discount_within_threshold = false;
    }
    if (out.max_creation_gap > out.creation_gap_threshold) out.gap_within_threshold = false;
    return out;
}

struct VerificationReport {
    std::vector<CheckResult> checks;
    EventSummary summary;

    bool hard_pass() const {
        for (const CheckResult& c : checks)
            if (c.hard && !c.pass) return false;
        return true;
    }

    json to_json() const {
        json jchecks = json::array();
        for (const CheckResult& c : checks) jchecks.push_back(c.to_json());
        return json{{"checks", std::move(jchecks)},
                    {"hard_pass", hard_pass()},
                    {"summary", summary.to_json()}};
    }
};

namespace detail {

template <typename Num>
double approx(const Num& v) {
    if constexpr (Numerics<Num>::mode == NumericMode::Exact)
        return to_double(v);
    else
        return v;
}

/// Accumulates one named check across many subconditions, keeping the worst
/// margin and the first failing detail.
template <typename Num>
class CheckBuilder {
  public:
    CheckBuilder(std::string name, std::string scope, const Numerics<Num>& num, bool hard = true)
        : result_{std::move(name), std::move(scope), true, hard, 0.0, ""}, num_(&num),
          first_(true) {}

    void require_ge(const Num& lhs, const Num& rhs, const std::string& what) {
        update(num_->ge(lhs, rhs), approx<Num>(lhs) - approx<Num>(rhs), what);
    }
    void require_le(const Num& lhs, const Num& rhs, const std::string& what) {
        update(num_->ge(rhs, lhs), approx<Num>(rhs) - approx<Num>(lhs), what);
    }
    void require_gt(const Num& lhs, const Num& rhs, const std::string& what) {
        update(num_->gt(lhs, rhs), approx<Num>(lhs) - approx<Num>(rhs), what);
    }
    void require_eq(const Num& lhs, const Num& rhs, const std::string& what) {
        double dev = approx<Num>(lhs) - approx<Num>(rhs);
        update(num_->eq(lhs, rhs), dev == 0.0 ? 0.0 : -std::abs(dev), what);
    }
    void require(bool ok, const std::string& what) { update(ok, ok ? 0.0 : -1.0, what); }

    CheckResult finish() { return std::move(result_); }

  private:
    void update(bool ok, double margin, const std::string& what) {
        if (first_ || margin < result_.margin) result_.margin = margin;
        first_ = false;
        if (!ok && result_.pass) {
            result_.pass = false;
            result_.detail = what;
        }
    }

    CheckResult result_;
    const Numerics<Num>* num_;
    bool first_;
};

} // namespace detail

/**
 * Flux layer bounds at one policy. Uniform discount: path actions carry flux
 * in [1, n] summing to at most n^2, cycle actions in [1/(1-g), n/(1-g)]
 * summing to at most n/(1-g), and the grand total is exactly n/(1-g).
 * Per-action discounts: for every state s on a cycle C dominated by gamma_a,
 * the flux originating at s is exactly 1/(1-gamma_C) through s's own action,
 * within [gamma_C/(1-gamma_C), 1/(1-gamma_C)] on the rest of C, and
 * 1/(1-gamma_C) itself sits inside [1/(n(1-gamma_a)), 1/(1-gamma_a)].
 */
template <typename Num>
void check_flux_layers(const Mdp& inst, const Policy& pi, const PolicyStructure& st,
                       const Numerics<Num>& num, const std::string& scope,
                       std::vector<CheckResult>& out) {
    const Num one = num.from(Rational(1));
    const Num n_num = num.from(Rational(inst.num_states()));
    std::vector<Num> flux = flux_vector(inst, pi, st, num);

    if (inst.uniform_discount()) {
        const Num gamma = num.from(inst.uniform_discount_value());
        const Num cycle_unit = one / (one - gamma);
        detail::CheckBuilder<Num> path_range("flux-path-range", scope, num);
        detail::CheckBuilder<Num> cycle_range("flux-cycle-range", scope, num);
        Num path_total(0), cycle_total(0);
        for (int s = 0; s < inst.num_states(); ++s) {
            const int a = pi.choice[static_cast<std::size_t>(s)];
            const Num& x = flux[static_cast<std::size_t>(a)];
            const std::string what = "action " + std::to_string(a);
            if (st.placement[static_cast<std::size_t>(s)].on_cycle) {
                cycle_range.require_ge(x, cycle_unit, what);
                cycle_range.require_le(x, n_num * cycle_unit, what);
                cycle_total += x;
            } else {
                path_range.require_ge(x, one, what);
                path_range.require_le(x, n_num, what);
                path_total += x;
            }
        }
        out.push_back(path_range.finish());
        out.push_back(cycle_range.finish());
        detail::CheckBuilder<Num> totals("flux-layer-totals", scope, num);
        totals.require_le(path_total, n_num * n_num, "total path flux vs n^2");
        totals.require_le(cycle_total, n_num * cycle_unit, "total cycle flux vs n/(1-g)");
        totals.require_eq(path_total + cycle_total, n_num * cycle_unit,
                          "grand total vs n/(1-g)");
        out.push_back(totals.finish());
        return;
    }

    detail::CheckBuilder<Num> policy_lower("flux-policy-lower", scope, num);
    for (int s = 0; s < inst.num_states(); ++s)
        policy_lower.require_ge(flux[static_cast<std::size_t>(pi.choice[static_cast<std::size_t>(s)])],
                                one, "action of state " + std::to_string(s));
    out.push_back(policy_lower.finish());

    detail::CheckBuilder<Num> own("flux-own-action", scope, num);
    detail::CheckBuilder<Num> band("flux-cycle-band", scope, num);
    detail::CheckBuilder<Num> bracket("flux-discount-bracket", scope, num);
    for (const CycleInfo& c : st.cycles) {
        const Num gamma_c = num.from(c.discount_product);
        const Num circ = one / (one - gamma_c);
        const Num gamma_dom = num.from(inst.action(c.dominating_action).discount);
        const std::string cyc = "cycle at state " + std::to_string(c.states[0]);
        bracket.require_ge(circ, one / (n_num * (one - gamma_dom)), cyc);
        bracket.require_le(circ, one / (one - gamma_dom), cyc);
        for (int s : c.states) {
            std::vector<Num> from_s = per_state_flux(inst, pi, st, s, num);
            const std::string who = "state " + std::to_string(s);
            own.require_eq(from_s[static_cast<std::size_t>(pi.choice[static_cast<std::size_t>(s)])],
                           circ, who);
            for (int a : c.actions) {
                band.require_ge(from_s[static_cast<std::size_t>(a)], gamma_c * circ,
                                who + " through action " + std::to_string(a));
                band.require_le(from_s[static_cast<std::size_t>(a)], circ,
                                who + " through action " + std::to_string(a));
            }
        }
    }
    out.push_back(own.finish());
    out.push_back(band.finish());
    out.push_back(bracket.finish());
}

template <typename Num>
VerificationReport check_flux_layers(const Mdp& inst, const Policy& pi,
                                     const Numerics<Num>& num) {
    VerificationReport report;
    check_flux_layers(inst, pi, decompose_policy(inst, pi), num, "policy", report.checks);
    return report;
}

/**
 * The two gain identities linking any ordered pair of policies: the gains of
 * pi1 dotted with pi2's flux equal the objective difference, and dotted with
 * pi2's single-state flux equal that state's value difference.
 */
template <typename Num>
void check_identities(const Mdp& inst, const Policy& pi1, const Policy& pi2,
                      const Numerics<Num>& num, const std::string& scope,
                      std::vector<CheckResult>& out) {
    PolicyStructure st1 = decompose_policy(inst, pi1);
    PolicyStructure st2 = decompose_policy(inst, pi2);
    std::vector<Num> v1 = value_vector(inst, pi1, st1, num);
    std::vector<Num> v2 = value_vector(inst, pi2, st2, num);
    std::vector<Num> gains1 = gain_vector(inst, v1, num);
    std::vector<Num> flux2 = flux_vector(inst, pi2, st2, num);

    Num lhs(0);
    for (int s = 0; s < inst.num_states(); ++s) {
        const int a = pi2.choice[static_cast<std::size_t>(s)];
        lhs += gains1[static_cast<std::size_t>(a)] * flux2[static_cast<std::size_t>(a)];
    }
    detail::CheckBuilder<Num> objective_id("identity-objective", scope, num);
    objective_id.require_eq(lhs, objective_value(v2) - objective_value(v1),
                            "gains(pi1) . flux(pi2) vs objective difference");
    out.push_back(objective_id.finish());

    detail::CheckBuilder<Num> state_id("identity-per-state", scope, num);
    for (int s = 0; s < inst.num_states(); ++s) {
        std::vector<Num> from_s = per_state_flux(inst, pi2, st2, s, num);
        Num dot(0);
        for (int t = 0; t < inst.num_states(); ++t) {
            const int a = pi2.choice[static_cast<std::size_t>(t)];
            dot += gains1[static_cast<std::size_t>(a)] * from_s[static_cast<std::size_t>(a)];
        }
        state_id.require_eq(dot,
                            v2[static_cast<std::size_t>(s)] - v1[static_cast<std::size_t>(s)],
                            "state " + std::to_string(s));
    }
    out.push_back(state_id.finish());
}

template <typename Num>
VerificationReport check_identities(const Mdp& inst, const Policy& pi1, const Policy& pi2,
                                    const Numerics<Num>& num) {
    VerificationReport report;
    check_identities(inst, pi1, pi2, num, "pair", report.checks);
    return report;
}

/**
 * Full trace audit. The trace's recorded numbers are claims: every
 * intermediate policy is re-evaluated from the instance and each claim is
 * confirmed against the recomputation. Checks, per pivot: the replayed
 * leaving action and pivoted state; the recorded gain, objectives and value
 * vectors; cycle events against a fresh structural comparison; componentwise
 * monotone values; strictly increasing objectives; and the per-pivot progress
 * lower bounds (objective gain of at least the top gain off cycles, at least
 * top gain / (1-g) on uniform cycle creations, and a pivoted-state value gain
 * of at least top gain / (n (1-gamma_a)) on per-action-discount cycle
 * creations). Per policy: zero gains on the basis and the flux layer bounds.
 * At the end: the optimality certificate and that no policy repeated.
 */
template <typename Num>
VerificationReport check_trace(const Mdp& inst, const PivotTrace<Num>& trace,
                               const Numerics<Num>& num) {
    VerificationReport report;
    report.summary = event_accounting(inst, trace);
    const Num one = num.from(Rational(1));
    const Num n_num = num.from(Rational(inst.num_states()));

    // replay the policy sequence
    std::vector<Policy> policies{trace.initial};
    try {
        validate_policy(inst, trace.initial);
        for (const PivotRecord<Num>& rec : trace.records)
            policies.push_back(apply_pivot(inst, policies.back(), rec.entering).first);
    } catch (const std::exception& ex) {
        report.checks.push_back(
            {"replay-policy-sequence", "trace", false, true, -1.0, ex.what()});
        return report;
    }

    std::vector<PolicyStructure> structures;
    std::vector<EvalResult<Num>> evals;
    structures.reserve(policies.size());
    evals.reserve(policies.size());
    for (const Policy& pi : policies) {
        structures.push_back(decompose_policy(inst, pi));
        evals.push_back(evaluate_policy(inst, pi, structures.back(), num));
    }

    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const PivotRecord<Num>& rec = trace.records[i];
        const std::string scope = "iter " + std::to_string(i + 1);
        const EvalResult<Num>& before = evals[i];
        const EvalResult<Num>& after = evals[i + 1];

        detail::CheckBuilder<Num> replay("replay-pivot", scope, num);
        replay.require(rec.iteration == i + 1, "iteration index out of sequence");
        replay.require(rec.state == inst.action(rec.entering).source,
                       "recorded state is not the entering action's source");
        replay.require(rec.leaving ==
                           policies[i].choice[static_cast<std::size_t>(rec.state)],
                       "recorded leaving action does not match the replay");
        report.checks.push_back(replay.finish());

        detail::CheckBuilder<Num> gain_check("recorded-gain", scope, num);
        auto best = best_gain(before.gains, num);
        gain_check.require(best.has_value(), "no improving action at this policy");
        if (best) {
            gain_check.require(best->first == rec.entering,
                               "pivot did not take the highest-gain action");
            gain_check.require_eq(rec.gain, best->second, "recorded top gain");
        }
        report.checks.push_back(gain_check.finish());

        detail::CheckBuilder<Num> objective_check("recorded-objective", scope, num);
        objective_check.require_eq(rec.objective_before, before.objective, "objective before");
        objective_check.require_eq(rec.objective_after, after.objective, "objective after");
        report.checks.push_back(objective_check.finish());

        if (!trace.light) {
            detail::CheckBuilder<Num> values_check("recorded-values", scope, num);
            values_check.require(rec.values_before.size() == before.values.size() &&
                                     rec.values_after.size() == after.values.size(),
                                 "value vector length mismatch");
            if (rec.values_before.size() == before.values.size())
                for (std::size_t s = 0; s < before.values.size(); ++s)
                    values_check.require_eq(rec.values_before[s], before.values[s],
                                            "value before, state " + std::to_string(s));
            if (rec.values_after.size() == after.values.size())
                for (std::size_t s = 0; s < after.values.size(); ++s)
                    values_check.require_eq(rec.values_after[s], after.values[s],
                                            "value after, state " + std::to_string(s));
            report.checks.push_back(values_check.finish());
        }

        EventFields events = classify_event(inst, structures[i], structures[i + 1], rec.entering);
        detail::CheckBuilder<Num> event_check("cycle-events", scope, num);
        event_check.require(events.created.has_value() == rec.cycle_created.has_value(),
                            "cycle creation presence mismatch");
        if (events.created && rec.cycle_created) {
            event_check.require(events.created->actions == rec.cycle_created->actions,
                                "created cycle actions mismatch");
            event_check.require(events.created->discount_product ==
                                    rec.cycle_created->discount_product,
                                "created cycle discount mismatch");
            event_check.require(events.created->dominating_action ==
                                    rec.cycle_created->dominating_action,
                                "created cycle dominator mismatch");
            event_check.require(events.created->dominating_discount ==
                                    rec.cycle_created->dominating_discount,
                                "created cycle dominating discount mismatch");
        }
        event_check.require(events.broken == rec.cycles_broken, "broken cycle set mismatch");
        report.checks.push_back(event_check.finish());

        detail::CheckBuilder<Num> monotone("monotone-values", scope, num);
        for (std::size_t s = 0; s < before.values.size(); ++s)
            monotone.require_ge(after.values[s], before.values[s],
                                "state " + std::to_string(s));
        report.checks.push_back(monotone.finish());

        detail::CheckBuilder<Num> strict("objective-strict-increase", scope, num);
        strict.require_gt(after.objective, before.objective, "objective did not increase");
        report.checks.push_back(strict.finish());

        if (best) {
            const Num delta = best->second;
            if (!events.created) {
                detail::CheckBuilder<Num> progress("pivot-progress-path", scope, num);
                progress.require_ge(after.objective - before.objective, delta,
                                    "objective gain vs top gain");
                report.checks.push_back(progress.finish());
            } else if (inst.uniform_discount()) {
                detail::CheckBuilder<Num> progress("pivot-progress-cycle-uniform", scope, num);
                const Num gamma = num.from(inst.uniform_discount_value());
                progress.require_ge(after.objective - before.objective, delta / (one - gamma),
                                    "objective gain vs top gain / (1-g)");
                report.checks.push_back(progress.finish());
            } else {
                detail::CheckBuilder<Num> progress("pivot-progress-cycle-value", scope, num);
                const Num gamma_dom = num.from(events.created->dominating_discount);
                const std::size_t s = static_cast<std::size_t>(rec.state);
                progress.require_ge(after.values[s] - before.values[s],
                                    delta / (n_num * (one - gamma_dom)),
                                    "pivoted state's value gain vs top gain / (n (1-gamma_a))");
                report.checks.push_back(progress.finish());
            }
        }
    }

    for (std::size_t i = 0; i < policies.size(); ++i) {
        const std::string scope = "policy " + std::to_string(i);
        detail::CheckBuilder<Num> basis("basis-gains-zero", scope, num);
        for (int a : policies[i].choice)
            basis.require_eq(evals[i].gains[static_cast<std::size_t>(a)], Num(0),
                             "action " + std::to_string(a));
        report.checks.push_back(basis.finish());
        check_flux_layers(inst, policies[i], structures[i], num, scope, report.checks);
    }

    detail::CheckBuilder<Num> final_match("final-policy-match", "final", num);
    final_match.require(trace.final_policy == policies.back(),
                        "final policy does not match the replayed sequence");
    final_match.require(trace.final_values.size() == evals.back().values.size(),
                        "final value vector length mismatch");
    if (trace.final_values.size() == evals.back().values.size())
        for (std::size_t s = 0; s < trace.final_values.size(); ++s)
            final_match.require_eq(trace.final_values[s], evals.back().values[s],
                                   "final value, state " + std::to_string(s));
    final_match.require_eq(trace.final_objective, evals.back().objective, "final objective");
    report.checks.push_back(final_match.finish());

    const bool improvable = best_gain(evals.back().gains, num).has_value();
    detail::CheckBuilder<Num> termination("termination-consistent", "final", num);
    termination.require((trace.termination == Termination::Optimal) == !improvable,
                        "termination reason contradicts the final gains");
    report.checks.push_back(termination.finish());

    if (trace.termination == Termination::Optimal) {
        detail::CheckBuilder<Num> cert("final-gains-nonpositive", "final", num);
        for (std::size_t a = 0; a < evals.back().gains.size(); ++a)
            cert.require(!num.improving(evals.back().gains[a]),
                         "action " + std::to_string(a) + " still improves");
        report.checks.push_back(cert.finish());
    }

    detail::CheckBuilder<Num> distinct("no-repeated-policy", "trace", num);
    std::set<std::vector<int>> seen;
    for (const Policy& pi : policies)
        distinct.require(seen.insert(pi.choice).second, "a policy repeated within the trace");
    report.checks.push_back(distinct.finish());

    return report;
}

} // namespace fluxmdp
