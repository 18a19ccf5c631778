#pragma once

#include "fluxmdp/generate.hpp"
#include "fluxmdp/oracle.hpp"
#include "fluxmdp/verify.hpp"

#include <chrono>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace fluxmdp {

/**
 * A sweep solves one generated instance per (n, m, gamma, seed) combination
 * and tabulates iteration counts and cycle-event statistics as CSV, the raw
 * material for discount-independence experiments. Gamma values are kept as
 * the caller's literal text so the gamma column reproduces byte-identically.
 */
struct SweepSpec {
    std::vector<int> n_list;
    std::vector<int> m_list;
    std::vector<std::string> gamma_list; // decimal literals, uniform discount per row
    std::uint64_t seeds = 1;             // seeds 0..seeds-1
    NumericMode mode = NumericMode::Exact;
    Family family = Family::Random;
    long long reward_lo = -10;
    long long reward_hi = 10;
    std::uint64_t iteration_cap = 0; // 0: the engine default for each instance
};

struct SweepRow {
    int n = 0;
    int m = 0;
    std::string gamma;
    std::uint64_t seed = 0;
    std::uint64_t iterations = 0;
    std::uint64_t cycle_creations = 0;
    std::uint64_t max_gap = 0;
    bool certified = false;
    double wall_ms = 0.0;
    std::string status = "ok";
};

namespace detail {

template <typename Num>
void run_sweep_row(const Mdp& inst, const Numerics<Num>& num, std::uint64_t cap, SweepRow& row) {
    PivotTrace<Num> trace =
        run_simplex(inst, min_id_policy(inst), num, cap ? cap : default_iteration_cap(inst));
    EventSummary summary = event_accounting(inst, trace);
    row.iterations = summary.iterations;
    row.cycle_creations = summary.cycle_creations;
    row.max_gap = summary.max_creation_gap;
    row.certified = trace.termination == Termination::Optimal &&
                    verify_optimality_certificate(inst, trace.final_policy, num).certified;
}

} // namespace detail

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    std::vector<SweepRow> rows;
    for (int n : spec.n_list)
        for (int m : spec.m_list)
            for (const std::string& gamma : spec.gamma_list)
                for (std::uint64_t seed = 0; seed < spec.seeds; ++seed) {
                    SweepRow row;
                    row.n = n;
                    row.m = m;
                    row.gamma = gamma;
                    row.seed = seed;
                    const auto started = std::chrono::steady_clock::now();
                    try {
                        GenSpec gen;
                        gen.n = n;
                        gen.m = m;
                        gen.discount_model = DiscountModel::Uniform;
                        gen.gamma_lo = parse_scalar(gamma);
                        gen.reward_lo = spec.reward_lo;
                        gen.reward_hi = spec.reward_hi;
                        gen.seed = seed;
                        gen.family = spec.family;
                        Mdp inst = generate(gen);
                        if (spec.mode == NumericMode::Exact)
                            detail::run_sweep_row(inst, Numerics<Rational>{},
                                                  spec.iteration_cap, row);
                        else
                            detail::run_sweep_row(inst, make_float_numerics(inst),
                                                  spec.iteration_cap, row);
                    } catch (const std::exception& ex) {
                        std::string reason = ex.what();
                        for (char& c : reason)
                            if (c == ',' || c == '\n') c = ';';
                        row.status = reason;
                    }
                    row.wall_ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - started)
                                      .count();
                    rows.push_back(std::move(row));
                }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "n,m,gamma,seed,iterations,cycle_creations,max_gap_between_creations,certified,"
           "wall_ms,status\n";
    for (const SweepRow& row : rows) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.3f", row.wall_ms);
        out << row.n << ',' << row.m << ',' << row.gamma << ',' << row.seed << ','
            << row.iterations << ',' << row.cycle_creations << ',' << row.max_gap << ','
            << (row.certified ? "true" : "false") << ',' << wall << ',' << row.status << '\n';
    }
    return out.str();
}

/// CSV with the timing column blanked, for byte-comparing deterministic reruns.
inline std::string sweep_csv_without_timing(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        // wall_ms is the second-to-last field
        const auto last = line.rfind(',');
        if (last == std::string::npos) {
            out << line << '\n';
            continue;
        }
        const auto prev = line.rfind(',', last - 1);
        out << line.substr(0, prev + 1) << line.substr(last + 1) << '\n';
    }
    return out.str();
}

} // namespace fluxmdp
