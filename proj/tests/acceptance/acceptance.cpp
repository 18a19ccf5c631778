// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. Runs the full randomized corpus (about a thousand seeded instances)
// in exact arithmetic, certifies every solve against the brute-force oracle,
// and audits every trace invariant at zero tolerance.
//
// usage: acceptance [scratch-dir]

#include "fluxmdp/fluxmdp.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

using namespace fluxmdp;

namespace {

const Numerics<Rational> exact;

struct Criterion {
    int id;
    std::string name;
    bool pass = true;
    std::uint64_t checked = 0;
    std::string detail;
    double seconds = 0.0;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

struct CorpusItem {
    GenSpec spec;
    std::string label;
};

std::vector<CorpusItem> build_corpus() {
    std::vector<CorpusItem> corpus;
    const Rational gammas[] = {Rational(1, 2), Rational(9, 10), Rational(99, 100)};
    for (int n = 2; n <= 6; ++n) {
        std::set<int> ms{n, n + (n / 2), 2 * n, 3 * n};
        for (int m : ms) {
            for (int cfg = 0; cfg < 4; ++cfg) {
                for (std::uint64_t seed = 0; seed < 13; ++seed) {
                    GenSpec spec;
                    spec.n = n;
                    spec.m = m;
                    spec.seed = seed * 7919 + static_cast<std::uint64_t>(100 * n + m);
                    if (cfg < 3) {
                        spec.discount_model = DiscountModel::Uniform;
                        spec.gamma_lo = gammas[cfg];
                    } else {
                        spec.discount_model = DiscountModel::PerActionRange;
                        spec.gamma_lo = Rational(1, 2);
                        spec.gamma_hi = Rational(999, 1000);
                    }
                    corpus.push_back(
                        {spec, "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                   " cfg=" + std::to_string(cfg) +
                                   " seed=" + std::to_string(spec.seed)});
                }
            }
        }
    }
    return corpus;
}

Policy random_policy(const Mdp& inst, SplitMix64& rng) {
    Policy pi;
    for (int s = 0; s < inst.num_states(); ++s) {
        const auto& usable = inst.actions_in(s);
        pi.choice.push_back(usable[rng.below(usable.size())]);
    }
    return pi;
}

bool has_check_failure(const VerificationReport& report, const std::string& prefix,
                       std::string& why) {
    for (const CheckResult& c : report.checks)
        if (c.check.rfind(prefix, 0) == 0 && !c.pass) {
            why = c.check + " [" + c.scope + "] " + c.detail;
            return true;
        }
    return false;
}

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path scratch = argc > 1 ? argv[1] : "acceptance_scratch";
    std::filesystem::create_directories(scratch);

    std::vector<Criterion> criteria{
        {1, "oracle equivalence"},    {2, "evaluator cross-check"},
        {3, "identity suite"},        {4, "monotonicity and non-degeneracy"},
        {5, "flux layers"},           {6, "per-pivot progress"},
        {7, "golden fixtures"},       {8, "discount-independence probe"},
        {9, "determinism"},
    };
    Criterion& oracle_eq = criteria[0];
    Criterion& evaluator = criteria[1];
    Criterion& identities = criteria[2];
    Criterion& monotone = criteria[3];
    Criterion& flux_layers = criteria[4];
    Criterion& progress = criteria[5];
    Criterion& fixtures_ok = criteria[6];
    Criterion& sweep_ok = criteria[7];
    Criterion& determinism = criteria[8];

    // ---- criteria 1-6 and the trace half of 9 share the corpus pass ----
    {
        Stopwatch corpus_watch;
        std::vector<CorpusItem> corpus = build_corpus();
        for (const CorpusItem& item : corpus) {
            Mdp inst = generate(item.spec);
            PivotTrace<Rational> trace = run_simplex(inst, min_id_policy(inst), exact);

            // criterion 1: exact oracle equivalence and certification
            ++oracle_eq.checked;
            BruteForceResult<Rational> best = brute_force_optimum(inst, exact);
            if (trace.termination != Termination::Optimal ||
                trace.final_values != best.values ||
                !verify_optimality_certificate(inst, trace.final_policy, exact).certified)
                oracle_eq.fail("simplex did not reach the enumerated optimum on " + item.label);

            // the policies the trace visits
            std::vector<Policy> policies{trace.initial};
            for (const PivotRecord<Rational>& rec : trace.records)
                policies.push_back(apply_pivot(inst, policies.back(), rec.entering).first);

            // criterion 2: closed form vs dense solve, exact and float
            Numerics<double> fnum = make_float_numerics(inst);
            std::vector<Policy> eval_targets = policies;
            eval_targets.push_back(best.policy);
            for (const Policy& pi : eval_targets) {
                ++evaluator.checked;
                if (value_vector(inst, pi, exact) != dense_value_solve(inst, pi, exact))
                    evaluator.fail("exact closed form != dense solve on " + item.label);
                std::vector<double> closed = value_vector(inst, pi, fnum);
                std::vector<double> dense = dense_value_solve(inst, pi, fnum);
                double norm = 0;
                for (double v : closed) norm = std::max(norm, std::abs(v));
                for (std::size_t s = 0; s < closed.size(); ++s)
                    if (std::abs(closed[s] - dense[s]) > 1e-9 * (1.0 + norm))
                        evaluator.fail("float closed form strayed from dense solve on " +
                                       item.label);
            }

            // criterion 3: pair identities, all ordered trace pairs + 100 random pairs
            std::string why;
            for (const Policy& a : policies)
                for (const Policy& b : policies) {
                    ++identities.checked;
                    VerificationReport pair = check_identities(inst, a, b, exact);
                    if (!pair.hard_pass()) {
                        has_check_failure(pair, "identity", why);
                        identities.fail(why + " on " + item.label);
                    }
                }
            SplitMix64 pair_rng(item.spec.seed ^ 0xacce97edbeefull);
            for (int k = 0; k < 100; ++k) {
                ++identities.checked;
                Policy a = random_policy(inst, pair_rng);
                Policy b = random_policy(inst, pair_rng);
                VerificationReport pair = check_identities(inst, a, b, exact);
                if (!pair.hard_pass()) {
                    has_check_failure(pair, "identity", why);
                    identities.fail(why + " on " + item.label);
                }
            }

            // criteria 4, 5, 6 come out of the full trace audit
            VerificationReport audit = check_trace(inst, trace, exact);
            ++monotone.checked;
            if (has_check_failure(audit, "monotone-values", why) ||
                has_check_failure(audit, "objective-strict-increase", why) ||
                has_check_failure(audit, "no-repeated-policy", why))
                monotone.fail(why + " on " + item.label);
            ++flux_layers.checked;
            if (has_check_failure(audit, "flux-", why))
                flux_layers.fail(why + " on " + item.label);
            ++progress.checked;
            if (has_check_failure(audit, "pivot-progress", why))
                progress.fail(why + " on " + item.label);
            // any other audit failure counts against criterion 4's integrity claim
            if (!audit.hard_pass()) {
                for (const CheckResult& c : audit.checks)
                    if (c.hard && !c.pass) why = c.check + " [" + c.scope + "] " + c.detail;
                monotone.fail("trace audit failed: " + why + " on " + item.label);
            }

            // criterion 9, trace half: rerunning is byte-identical
            ++determinism.checked;
            PivotTrace<Rational> again = run_simplex(inst, min_id_policy(inst), exact);
            if (serialize_trace(trace) != serialize_trace(again))
                determinism.fail("rerun produced a different trace on " + item.label);
        }
        const double elapsed = corpus_watch.seconds();
        for (Criterion* c :
             {&oracle_eq, &evaluator, &identities, &monotone, &flux_layers, &progress})
            c->seconds = elapsed;
        determinism.seconds = elapsed;
        oracle_eq.detail = oracle_eq.pass
                               ? std::to_string(corpus.size()) + " instances"
                               : oracle_eq.detail;
    }

    // ---- criterion 6, tight case on EX2 ----
    {
        Stopwatch watch;
        Mdp ex2 = fixture("EX2");
        PivotTrace<Rational> trace = run_simplex(ex2, Policy{{3, 2}}, exact);
        ++progress.checked;
        if (trace.iterations() != 2)
            progress.fail("EX2 golden run did not take 2 pivots");
        else {
            const PivotRecord<Rational>& last = trace.records[1];
            const Rational increase = last.objective_after - last.objective_before;
            const Rational bound =
                last.gain / (Rational(1) - ex2.uniform_discount_value());
            if (!(last.gain == Rational(11, 10) && increase == Rational(11) &&
                  increase == bound && last.cycle_created.has_value()))
                progress.fail("EX2 cycle pivot is not the tight case: gain " +
                              last.gain.str() + ", increase " + increase.str());
        }
        progress.seconds += watch.seconds();
    }

    // ---- criterion 7: golden fixtures ----
    {
        Stopwatch watch;
        Mdp ex1 = fixture("EX1");
        PivotTrace<Rational> t1 = run_simplex(ex1, Policy{{1, 2}}, exact);
        ++fixtures_ok.checked;
        if (t1.iterations() != 1 ||
            t1.final_values != std::vector<Rational>{Rational(3), Rational(4)})
            fixtures_ok.fail("EX1 must solve in exactly 1 pivot to values (3, 4)");

        Mdp ex2 = fixture("EX2");
        PivotTrace<Rational> t2 = run_simplex(ex2, Policy{{3, 2}}, exact);
        ++fixtures_ok.checked;
        if (t2.iterations() != 2 || t2.final_objective != Rational(30))
            fixtures_ok.fail("EX2 must solve in exactly 2 pivots to objective 30");

        Mdp ex3 = fixture("EX3");
        PivotTrace<Rational> t3 = run_simplex(ex3, Policy{{3, 2}}, exact);
        ++fixtures_ok.checked;
        bool ex3_ok = false;
        for (const PivotRecord<Rational>& rec : t3.records)
            if (rec.cycle_created &&
                rec.cycle_created->discount_product == Rational(891, 1000) &&
                rec.cycle_created->dominating_action == 0)
                ex3_ok = true;
        if (!ex3_ok)
            fixtures_ok.fail("EX3 run must create the cycle with discount 891/1000 "
                             "dominated by action 0");
        fixtures_ok.seconds = watch.seconds();
    }

    // ---- criterion 8: gamma sweep at n=10, m=30 ----
    std::string sweep_text;
    SweepSpec sweep_spec;
    {
        Stopwatch watch;
        sweep_spec.n_list = {10};
        sweep_spec.m_list = {30};
        sweep_spec.gamma_list = {"0.9",       "0.99",       "0.999",
                                 "0.9999",    "0.99999",    "0.999999",
                                 "0.9999999", "0.99999999", "0.999999999"};
        sweep_spec.seeds = 3;
        sweep_spec.mode = NumericMode::Exact;
        std::vector<SweepRow> rows = run_sweep(sweep_spec);
        sweep_text = sweep_csv(rows);
        write_file((scratch / "gamma_sweep.csv").string(), sweep_text);

        const std::uint64_t cap_formula = 10ull * 1000 * 900 * 16; // 10 n^3 m^2 (ceil(ln n)+1)^2
        sweep_ok.checked = rows.size();
        if (rows.size() != 27) sweep_ok.fail("expected 27 sweep rows");
        for (const SweepRow& row : rows)
            if (row.status != "ok" || !row.certified || row.iterations > cap_formula)
                sweep_ok.fail("sweep row n=" + std::to_string(row.n) + " gamma=" + row.gamma +
                              " seed=" + std::to_string(row.seed) + " status=" + row.status);
        if (sweep_ok.pass)
            sweep_ok.detail = "27 runs certified, CSV at " +
                              (scratch / "gamma_sweep.csv").string();
        sweep_ok.seconds = watch.seconds();
    }

    // ---- criterion 9, CSV half: the sweep reruns byte-identically ----
    {
        Stopwatch watch;
        ++determinism.checked;
        std::string second = sweep_csv(run_sweep(sweep_spec));
        if (sweep_csv_without_timing(sweep_text) != sweep_csv_without_timing(second))
            determinism.fail("sweep CSV differs between identical runs");
        determinism.seconds += watch.seconds();
    }

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        all_pass = all_pass && c.pass;
        std::printf("criterion %d (%s): %s%s%s [%llu checks, %.1fs]\n", c.id, c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.detail.empty() ? "" : " - ", c.detail.c_str(),
                    static_cast<unsigned long long>(c.checked), c.seconds);
    }
    return all_pass ? 0 : 1;
}
