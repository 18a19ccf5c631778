// Command-line front end: solve instances, generate them, verify traces, and
// run parameter sweeps. Every behavior routes through the library; nothing
// here computes anything itself.

#include "fluxmdp/fluxmdp.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace fluxmdp;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string default_trace_path(const std::string& instance_path) {
    std::string base = instance_path;
    if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
        base.resize(base.size() - 5);
    return base + ".trace.jsonl";
}

NumericMode parse_mode(const std::string& mode) {
    if (mode == "exact") return NumericMode::Exact;
    if (mode == "float") return NumericMode::Float64;
    throw CLI::ValidationError("--mode", "must be 'exact' or 'float'");
}

Family parse_family(const std::string& family) {
    if (family == "random") return Family::Random;
    if (family == "cycle-rich") return Family::CycleRich;
    if (family == "path-heavy") return Family::PathHeavy;
    throw CLI::ValidationError("--family", "must be random, cycle-rich or path-heavy");
}

template <typename Num>
int solve_with(const Mdp& inst, const Policy& initial, const Numerics<Num>& num,
               std::uint64_t cap, bool light, bool baseline, const std::string& trace_path) {
    PivotTrace<Num> trace = run_simplex(inst, initial, num, cap, light);
    CertificateReport<Num> cert = verify_optimality_certificate(inst, trace.final_policy, num);
    const bool certified = trace.termination == Termination::Optimal && cert.certified;

    write_file(trace_path, serialize_trace(trace));
    std::cout << "iterations=" << trace.iterations()
              << " objective=" << Numerics<Num>::render(trace.final_objective)
              << " certified=" << (certified ? "true" : "false") << "\n";
    if (trace.termination == Termination::IterationCap)
        std::cout << "iteration cap reached after " << trace.iterations() << " pivots\n";

    if (baseline) {
        PolicyIterationTrace<Num> pit = run_policy_iteration(inst, initial, num, cap);
        CertificateReport<Num> pit_cert =
            verify_optimality_certificate(inst, pit.final_policy, num);
        std::cout << "baseline policy-iteration: iterations=" << pit.iterations()
                  << " objective=" << Numerics<Num>::render(objective_value(pit.final_values))
                  << " certified="
                  << (pit.termination == Termination::Optimal && pit_cert.certified ? "true"
                                                                                    : "false")
                  << "\n";
    }
    return certified ? 0 : 2;
}

int cmd_solve(const std::string& instance_path, const std::string& mode,
              const std::string& initial_spec, std::uint64_t cap, std::string trace_path,
              bool light, const std::string& baseline) {
    Mdp inst = Mdp::load(instance_path);
    Policy initial =
        initial_spec == "min-id" ? min_id_policy(inst) : load_policy(initial_spec, inst);
    if (cap == 0) cap = default_iteration_cap(inst);
    if (trace_path.empty()) trace_path = default_trace_path(instance_path);
    if (!baseline.empty() && baseline != "policy-iteration")
        throw CLI::ValidationError("--baseline", "only policy-iteration is available");

    if (parse_mode(mode) == NumericMode::Exact)
        return solve_with(inst, initial, Numerics<Rational>{}, cap, light, !baseline.empty(),
                          trace_path);
    return solve_with(inst, initial, make_float_numerics(inst), cap, light, !baseline.empty(),
                      trace_path);
}

int cmd_gen(const std::string& fixture_name, int n, int m, const std::string& gamma,
            const std::vector<std::string>& gamma_range, const std::string& gamma_set,
            const std::string& reward_model, long long reward_lo, long long reward_hi,
            std::uint64_t seed, const std::string& family, const std::string& out_path) {
    if (!fixture_name.empty()) {
        fixture(fixture_name).save(out_path);
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }
    GenSpec spec;
    spec.n = n;
    spec.m = m;
    spec.seed = seed;
    spec.family = parse_family(family);
    if (!gamma.empty()) {
        spec.discount_model = DiscountModel::Uniform;
        spec.gamma_lo = parse_scalar(gamma);
    } else if (!gamma_range.empty()) {
        spec.discount_model = DiscountModel::PerActionRange;
        spec.gamma_lo = parse_scalar(gamma_range.at(0));
        spec.gamma_hi = parse_scalar(gamma_range.at(1));
    } else if (!gamma_set.empty()) {
        spec.discount_model = DiscountModel::PerActionSet;
        for (const std::string& g : split_list(gamma_set))
            spec.gamma_set.push_back(parse_scalar(g));
    } else {
        throw CLI::ValidationError("gen",
                                   "one of --gamma, --gamma-range, --gamma-set is required");
    }
    if (reward_model == "int") {
        spec.reward_model = RewardModel::IntegerRange;
        spec.reward_lo = reward_lo;
        spec.reward_hi = reward_hi;
    } else if (reward_model == "unit") {
        spec.reward_model = RewardModel::UnitInterval;
    } else {
        throw CLI::ValidationError("--reward-model", "must be 'int' or 'unit'");
    }
    generate(spec).save(out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

template <typename Num>
int verify_with(const Mdp& inst, const PivotTrace<Num>& trace, const Numerics<Num>& num,
                std::uint64_t oracle_cap, const std::string& report_path) {
    VerificationReport report = check_trace(inst, trace, num);
    json out = report.to_json();

    std::string oracle_status = "skipped";
    std::string oracle_detail;
    if (count_policies(inst) <= oracle_cap) {
        BruteForceResult<Num> best = brute_force_optimum(inst, num, oracle_cap);
        if (trace.termination == Termination::Optimal) {
            bool match = trace.final_values.size() == best.values.size();
            for (std::size_t s = 0; match && s < best.values.size(); ++s)
                if (!num.eq(trace.final_values[s], best.values[s])) match = false;
            oracle_status = match ? "confirmed" : "mismatch";
            if (!match) oracle_detail = "final values differ from the enumerated optimum";
        } else {
            oracle_status = "not-applicable";
            oracle_detail = "trace stopped at the iteration cap";
        }
    } else {
        oracle_detail = "policy count exceeds the oracle cap";
    }
    out["oracle"] = json{{"status", oracle_status}, {"detail", oracle_detail}};
    write_file(report_path, out.dump(2) + "\n");

    int failures = 0;
    for (const CheckResult& c : report.checks)
        if (c.hard && !c.pass) {
            ++failures;
            std::cout << "FAIL " << c.check << " [" << c.scope << "] " << c.detail << "\n";
        }
    const bool ok = report.hard_pass() && oracle_status != "mismatch";
    if (oracle_status == "mismatch") std::cout << "FAIL oracle: " << oracle_detail << "\n";
    std::cout << "verify: " << (ok ? "PASS" : "FAIL") << " (" << report.checks.size()
              << " checks, " << failures << " failed, oracle " << oracle_status << ")\n"
              << "report written to " << report_path << "\n";
    return ok ? 0 : 3;
}

int cmd_verify(const std::string& instance_path, const std::string& trace_path,
               std::string report_path, std::uint64_t oracle_cap) {
    Mdp inst = Mdp::load(instance_path);
    const std::string text = read_file(trace_path);
    if (report_path.empty()) report_path = trace_path + ".report.json";

    if (trace_mode(text) == NumericMode::Exact) {
        PivotTrace<Rational> trace = parse_trace<Rational>(text);
        if (trace.digest != inst.digest()) {
            std::cerr << "trace digest " << trace.digest << " does not match instance digest "
                      << inst.digest() << "\n";
            return 1;
        }
        return verify_with(inst, trace, Numerics<Rational>{}, oracle_cap, report_path);
    }
    PivotTrace<double> trace = parse_trace<double>(text);
    if (trace.digest != inst.digest()) {
        std::cerr << "trace digest " << trace.digest << " does not match instance digest "
                  << inst.digest() << "\n";
        return 1;
    }
    return verify_with(inst, trace, make_float_numerics(inst), oracle_cap, report_path);
}

int cmd_sweep(const std::string& n_list, const std::string& m_list, const std::string& gamma_list,
              std::uint64_t seeds, const std::string& mode, const std::string& family,
              std::uint64_t cap, const std::string& out_path) {
    SweepSpec spec;
    for (const std::string& v : split_list(n_list)) spec.n_list.push_back(std::stoi(v));
    for (const std::string& v : split_list(m_list)) spec.m_list.push_back(std::stoi(v));
    spec.gamma_list = split_list(gamma_list);
    if (spec.n_list.empty() || spec.m_list.empty() || spec.gamma_list.empty() || seeds == 0)
        throw CLI::ValidationError("sweep", "need nonempty --n-list, --m-list, --gamma-list and "
                                            "--seeds >= 1");
    for (const std::string& g : spec.gamma_list) {
        const Rational parsed = parse_scalar(g); // fail fast on bad literals
        if (parsed < 0 || parsed >= 1)
            throw CLI::ValidationError("--gamma-list", "discounts must lie in [0,1), got " + g);
    }
    spec.seeds = seeds;
    spec.mode = parse_mode(mode);
    spec.family = parse_family(family);
    spec.iteration_cap = cap;

    std::vector<SweepRow> rows = run_sweep(spec);
    write_file(out_path, sweep_csv(rows));
    std::uint64_t failed = 0;
    for (const SweepRow& row : rows)
        if (row.status != "ok" || !row.certified) ++failed;
    std::cout << "wrote " << rows.size() << " rows to " << out_path << " (" << failed
              << " flagged)\n";
    return failed == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic-MDP simplex solver with exact arithmetic and "
                 "verifiable pivot traces"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run the highest-gain simplex method");
    std::string instance_path, mode = "exact", initial = "min-id", trace_path, baseline;
    std::uint64_t cap = 0;
    bool light = false;
    solve->add_option("instance", instance_path, "instance JSON file")->required();
    solve->add_option("--mode", mode, "numeric mode: exact or float");
    solve->add_option("--initial", initial, "'min-id' or a policy JSON file");
    solve->add_option("--cap", cap, "iteration cap (default: the engine formula)")
        ->check(CLI::PositiveNumber);
    solve->add_option("--trace", trace_path, "trace output path (JSONL)");
    solve->add_flag("--light", light, "omit per-pivot value vectors from the trace");
    solve->add_option("--baseline", baseline, "also run 'policy-iteration' for comparison");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance");
    std::string fixture_name, gamma, gamma_set, reward_model = "int", family = "random";
    std::string out_path = "instance.json";
    std::vector<std::string> gamma_range;
    int n = 2, m = 2;
    long long reward_lo = -10, reward_hi = 10;
    std::uint64_t seed = 0;
    gen->add_option("--fixture", fixture_name, "named fixture: EX1, EX2 or EX3");
    gen->add_option("--n", n, "number of states");
    gen->add_option("--m", m, "number of actions (>= n)");
    gen->add_option("--gamma", gamma, "uniform discount (decimal literal)");
    gen->add_option("--gamma-range", gamma_range, "per-action discount range: lo hi")
        ->expected(2);
    gen->add_option("--gamma-set", gamma_set, "comma-separated per-action discount choices");
    gen->add_option("--reward-model", reward_model, "'int' or 'unit'");
    gen->add_option("--reward-lo", reward_lo, "integer reward lower bound");
    gen->add_option("--reward-hi", reward_hi, "integer reward upper bound");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--family", family, "random, cycle-rich or path-heavy");
    gen->add_option("--out", out_path, "output path");

    // verify
    auto* verify = app.add_subcommand("verify", "replay and audit a trace");
    std::string v_instance, v_trace, v_report;
    std::uint64_t oracle_cap = 1'000'000;
    verify->add_option("instance", v_instance, "instance JSON file")->required();
    verify->add_option("trace", v_trace, "trace JSONL file")->required();
    verify->add_option("--out", v_report, "report output path (JSON)");
    verify->add_option("--oracle-cap", oracle_cap,
                       "skip brute-force certification beyond this many policies");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "solve a grid of generated instances into CSV");
    std::string n_list, m_list, gamma_list, sweep_mode = "exact", sweep_family = "random";
    std::string sweep_out = "sweep.csv";
    std::uint64_t seeds = 1, sweep_cap = 0;
    sweep->add_option("--n-list", n_list, "comma-separated state counts")->required();
    sweep->add_option("--m-list", m_list, "comma-separated action counts")->required();
    sweep->add_option("--gamma-list", gamma_list, "comma-separated uniform discounts")
        ->required();
    sweep->add_option("--seeds", seeds, "seeds 0..k-1 per combination");
    sweep->add_option("--mode", sweep_mode, "numeric mode: exact or float");
    sweep->add_option("--family", sweep_family, "instance family");
    sweep->add_option("--cap", sweep_cap, "iteration cap override")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out, "CSV output path");

    try {
        app.parse(argc, argv);
        if (solve->parsed())
            return cmd_solve(instance_path, mode, initial, cap, trace_path, light, baseline);
        if (gen->parsed())
            return cmd_gen(fixture_name, n, m, gamma, gamma_range, gamma_set, reward_model,
                           reward_lo, reward_hi, seed, family, out_path);
        if (verify->parsed()) return cmd_verify(v_instance, v_trace, v_report, oracle_cap);
        if (sweep->parsed())
            return cmd_sweep(n_list, m_list, gamma_list, seeds, sweep_mode, sweep_family,
                             sweep_cap, sweep_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
