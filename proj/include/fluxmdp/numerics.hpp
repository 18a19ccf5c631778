#pragma once

#include "fluxmdp/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace fluxmdp {

enum class NumericMode { Float64, Exact };

inline const char* to_string(NumericMode mode) {
    return mode == NumericMode::Exact ? "exact" : "float";
}

/**
 * Numeric policy the solver, evaluator and verifier are templated on.
 *
 * Numerics<Rational> computes exactly: comparisons are plain comparisons and
 * the termination threshold for gains is literally zero. Numerics<double>
 * carries a relative tolerance eps (default 1e-9 scaled by the largest
 * absolute reward) and answers every comparison up to eps * (1 + magnitude),
 * since discounts near 1 make absolute tolerances meaningless.
 */
template <typename Num>
struct Numerics;

template <>
struct Numerics<Rational> {
    using number = Rational;
    static constexpr NumericMode mode = NumericMode::Exact;

    Rational from(const Rational& q) const { return q; }
    bool improving(const Rational& gain) const { return gain > 0; }
    bool eq(const Rational& a, const Rational& b) const { return a == b; }
    bool ge(const Rational& a, const Rational& b) const { return a >= b; }
    bool gt(const Rational& a, const Rational& b) const { return a > b; }
    bool nonneg(const Rational& a) const { return a >= 0; }
    static bool better_pivot(const Rational& cand, const Rational& cur) {
        return cur == 0 && cand != 0;
    }
    static std::string render(const Rational& v) { return v.str(); }
};

template <>
struct Numerics<double> {
    using number = double;
    static constexpr NumericMode mode = NumericMode::Float64;

    double eps = 1e-9;

    Numerics() = default;
    explicit Numerics(double epsilon) : eps(epsilon) {}

    double from(const Rational& q) const { return to_double(q); }
    bool improving(double gain) const { return gain > eps; }
    bool eq(double a, double b) const {
        return std::abs(a - b) <= eps * (1.0 + std::max(std::abs(a), std::abs(b)));
    }
    bool ge(double a, double b) const { return a >= b - eps * (1.0 + std::abs(b)); }
    bool gt(double a, double b) const { return a > b - eps * (1.0 + std::abs(b)); }
    bool nonneg(double a) const { return a >= -eps; }
    static bool better_pivot(double cand, double cur) { return std::abs(cand) > std::abs(cur); }

    // Shortest round-trip decimal form; keeps serialized traces reproducible.
    static std::string render(double v) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, end);
    }
};

} // namespace fluxmdp
