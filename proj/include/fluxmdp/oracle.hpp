#pragma once

#include "fluxmdp/evaluate.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxmdp {

class OracleError : public std::runtime_error {
  public:
    enum class Kind { TooManyPolicies, NoDominatingPolicy };

    OracleError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Number of pure policies, saturating at uint64 max.
inline std::uint64_t count_policies(const Mdp& inst) {
    std::uint64_t total = 1;
    for (int s = 0; s < inst.num_states(); ++s) {
        const std::uint64_t k = inst.actions_in(s).size();
        if (total > UINT64_MAX / k) return UINT64_MAX;
        total *= k;
    }
    return total;
}

/**
 * Yields every pure policy exactly once, lexicographic by state then action
 * id. Construction throws TooManyPolicies when the policy count exceeds the
 * cap; this oracle is desk-scale by design.
 */
class PolicyEnumerator {
  public:
    explicit PolicyEnumerator(const Mdp& inst, std::uint64_t cap = kDefaultEnumerationCap)
        : inst_(&inst) {
        if (count_policies(inst) > cap)
            throw OracleError(OracleError::Kind::TooManyPolicies,
                              "instance has more than " + std::to_string(cap) + " policies");
        odometer_.assign(static_cast<std::size_t>(inst.num_states()), 0);
    }

    std::optional<Policy> next() {
        if (done_) return std::nullopt;
        Policy out;
        out.choice.reserve(odometer_.size());
        for (int s = 0; s < inst_->num_states(); ++s)
            out.choice.push_back(inst_->actions_in(s)[odometer_[static_cast<std::size_t>(s)]]);
        // advance, least-significant state last
        int s = inst_->num_states() - 1;
        while (s >= 0) {
            if (++odometer_[static_cast<std::size_t>(s)] <
                inst_->actions_in(s).size()) break;
            odometer_[static_cast<std::size_t>(s)] = 0;
            --s;
        }
        if (s < 0) done_ = true;
        return out;
    }

  private:
    const Mdp* inst_;
    std::vector<std::size_t> odometer_;
    bool done_ = false;
};

template <typename Num>
struct BruteForceResult {
    Policy policy;
    std::vector<Num> values;
};

/**
 * Exhaustive ground truth: enumerates every policy and returns one whose
 * value vector dominates all others componentwise. A dominating policy always
 * exists for these MDPs; failing to find one indicates a bug and throws
 * NoDominatingPolicy rather than falling back to objective comparison.
 */
template <typename Num>
BruteForceResult<Num> brute_force_optimum(const Mdp& inst, const Numerics<Num>& num,
                                          std::uint64_t cap = kDefaultEnumerationCap) {
    const std::size_t n = static_cast<std::size_t>(inst.num_states());
    std::vector<Num> best(n, Num(0));
    bool first = true;

    PolicyEnumerator pass1(inst, cap);
    while (auto pi = pass1.next()) {
        std::vector<Num> v = value_vector(inst, *pi, num);
        if (first) {
            best = std::move(v);
            first = false;
            continue;
        }
        for (std::size_t s = 0; s < n; ++s)
            if (v[s] > best[s]) best[s] = v[s];
    }

    PolicyEnumerator pass2(inst, cap);
    while (auto pi = pass2.next()) {
        std::vector<Num> v = value_vector(inst, *pi, num);
        bool dominating = true;
        for (std::size_t s = 0; s < n && dominating; ++s)
            if (!num.ge(v[s], best[s])) dominating = false;
        if (dominating) return {*pi, std::move(v)};
    }
    throw OracleError(OracleError::Kind::NoDominatingPolicy,
                      "no enumerated policy dominates all others componentwise");
}

template <typename Num>
struct CertificateReport {
    bool certified = false;
    Num max_gain;            // over all actions
    Num max_off_policy_gain; // over actions outside the policy (0 if none exist)
    int argmax_action = -1;
};

/**
 * Recomputes the gains at `pi` from scratch and reports whether they certify
 * optimality: all gains <= 0 in exact mode, <= eps in float mode.
 */
template <typename Num>
CertificateReport<Num> verify_optimality_certificate(const Mdp& inst, const Policy& pi,
                                                     const Numerics<Num>& num) {
    std::vector<Num> gains = gain_vector(inst, value_vector(inst, pi, num), num);
    CertificateReport<Num> report;
    report.max_gain = gains[0];
    report.max_off_policy_gain = Num(0);
    report.argmax_action = 0;
    bool any_off = false;
    for (std::size_t a = 0; a < gains.size(); ++a) {
        if (gains[a] > report.max_gain) {
            report.max_gain = gains[a];
            report.argmax_action = static_cast<int>(a);
        }
        if (!pi.uses(static_cast<int>(a))) {
            if (!any_off || gains[a] > report.max_off_policy_gain)
                report.max_off_policy_gain = gains[a];
            any_off = true;
        }
    }
    report.certified = !num.improving(report.max_gain);
    return report;
}

/**
 * Straight dense Gaussian elimination on the n-by-n value system; exists only
 * to cross-check the closed-form evaluator. Exact elimination in exact mode,
 * partial pivoting in float mode.
 */
template <typename Num>
std::vector<Num> dense_value_solve(const Mdp& inst, const Policy& pi, const Numerics<Num>& num) {
    const int n = inst.num_states();
    if (n > 64) throw std::invalid_argument("dense_value_solve is capped at 64 states");
    const Num one = num.from(Rational(1));

    // rows: v_s - gamma_a * v_target = r_a for a = pi(s)
    std::vector<std::vector<Num>> aug(static_cast<std::size_t>(n),
                                      std::vector<Num>(static_cast<std::size_t>(n) + 1, Num(0)));
    for (int s = 0; s < n; ++s) {
        const ActionDef& a = inst.action(pi.choice[static_cast<std::size_t>(s)]);
        auto& row = aug[static_cast<std::size_t>(s)];
        row[static_cast<std::size_t>(s)] += one;
        row[static_cast<std::size_t>(a.target)] -= num.from(a.discount);
        row[static_cast<std::size_t>(n)] = num.from(a.reward);
    }

    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r) {
            const Num& cand = aug[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (cand == Num(0)) continue;
            if (pivot < 0 ||
                Numerics<Num>::better_pivot(
                    cand, aug[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
                pivot = r;
        }
        // all discounts < 1 make the system nonsingular, so a pivot exists
        if (pivot < 0) throw std::logic_error("singular value system; instance is corrupt");
        std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(pivot)]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            auto& row = aug[static_cast<std::size_t>(r)];
            const Num factor = row[static_cast<std::size_t>(col)] /
                               aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            if (factor == Num(0)) continue;
            for (int c = col; c <= n; ++c)
                row[static_cast<std::size_t>(c)] -=
                    factor * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
    }
    std::vector<Num> values(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s)
        values[static_cast<std::size_t>(s)] =
            aug[static_cast<std::size_t>(s)][static_cast<std::size_t>(n)] /
            aug[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)];
    return values;
}

} // namespace fluxmdp
