// Minimal library walkthrough: build a small deterministic MDP in code, run
// the highest-gain simplex method in exact arithmetic, and audit the trace.

#include "fluxmdp/fluxmdp.hpp"

#include <iostream>

int main() {
    using namespace fluxmdp;

    // Two states. State 0 can idle (action 1) or move to state 1 for reward 1
    // (action 0); state 1 loops on itself for reward 2. Everything discounts
    // at one half per step.
    Mdp inst(2, {{0, 0, 1, Rational(1), Rational(1, 2)},
                 {1, 0, 0, Rational(0), Rational(1, 2)},
                 {2, 1, 1, Rational(2), Rational(1, 2)}});

    const Numerics<Rational> exact;
    Policy start{{1, 2}}; // begin on the idle loop
    PivotTrace<Rational> trace = run_simplex(inst, start, exact);

    std::cout << "pivots: " << trace.iterations() << "\n";
    for (const PivotRecord<Rational>& rec : trace.records)
        std::cout << "  switched state " << rec.state << " to action " << rec.entering
                  << " (gain " << rec.gain.str() << "), objective "
                  << rec.objective_before.str() << " -> " << rec.objective_after.str() << "\n";
    std::cout << "final values:";
    for (const Rational& v : trace.final_values) std::cout << ' ' << v.str();
    std::cout << "\n";

    // every invariant of the run, re-derived from scratch
    VerificationReport report = check_trace(inst, trace, exact);
    std::cout << "trace audit: " << (report.hard_pass() ? "clean" : "FAILED") << " ("
              << report.checks.size() << " checks)\n";

    // and the brute-force oracle agrees
    BruteForceResult<Rational> best = brute_force_optimum(inst, exact);
    std::cout << "oracle match: " << (best.values == trace.final_values ? "yes" : "NO") << "\n";
    return report.hard_pass() && best.values == trace.final_values ? 0 : 1;
}
