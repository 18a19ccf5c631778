#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fluxmdp {

/// Arbitrary-precision integers and rationals (GMP-backed, value semantics).
using BigInt =
    boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline BigInt pow10(long k) { return pow(BigInt(10), static_cast<unsigned>(k)); }

// GMP string parsing treats a leading zero as an octal prefix; digit strings
// must be stripped before conversion.
inline BigInt from_digits(std::string_view digits) {
    std::size_t first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return BigInt(0);
    return BigInt{std::string(digits.substr(first))};
}

} // namespace detail

/**
 * Parses a scalar written either as a decimal literal ("2.7", "-0.5", "1e-3",
 * "0.999999999") or as a fraction of two integers ("270/19"). Decimal text is
 * converted exactly, digit by digit, so no binary-float rounding is involved.
 */
inline Rational parse_scalar(std::string_view text) {
    const auto fail = [&] {
        throw std::invalid_argument("not a valid rational literal: '" + std::string(text) + "'");
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        bool neg = false;
        if (!num.empty() && (num[0] == '+' || num[0] == '-')) {
            neg = num[0] == '-';
            num.remove_prefix(1);
        }
        if (!detail::all_digits(num) || !detail::all_digits(den)) fail();
        BigInt n = detail::from_digits(num);
        BigInt d = detail::from_digits(den);
        if (d == 0) fail();
        Rational q(n, d);
        return neg ? Rational(-q) : q;
    }

    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_len = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') digits += text[i++];
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            digits += text[i++];
            ++frac_len;
        }
    }
    if (digits.empty()) fail();
    long exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        std::string edig;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') edig += text[i++];
        if (edig.empty() || edig.size() > 6) fail();
        exponent = std::stol(edig);
        if (eneg) exponent = -exponent;
    }
    if (i != text.size()) fail();

    BigInt mantissa = detail::from_digits(digits);
    long shift = exponent - frac_len;
    Rational q = shift >= 0 ? Rational(mantissa * detail::pow10(shift))
                            : Rational(mantissa, detail::pow10(-shift));
    return neg ? Rational(-q) : q;
}

/**
 * Renders a rational canonically: as an integer when possible, as a terminating
 * decimal (no trailing zeros) when the denominator divides a power of ten, and
 * as "num/den" otherwise. parse_scalar round-trips every output.
 */
inline std::string format_scalar(const Rational& q) {
    BigInt num = numerator(q);
    BigInt den = denominator(q);
    if (den == 1) return num.str();

    BigInt rest = den;
    long twos = 0, fives = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++twos;
    }
    while (rest % 5 == 0) {
        rest /= 5;
        ++fives;
    }
    if (rest != 1) return num.str() + "/" + den.str();

    const long k = twos > fives ? twos : fives;
    BigInt digits = abs(num) * pow(BigInt(2), static_cast<unsigned>(k - twos)) *
                    pow(BigInt(5), static_cast<unsigned>(k - fives));
    std::string s = digits.str();
    if (static_cast<long>(s.size()) <= k) s.insert(0, static_cast<std::size_t>(k) - s.size() + 1, '0');
    std::string out = s.substr(0, s.size() - k) + "." + s.substr(s.size() - k);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
    return (num < 0 ? "-" : "") + out;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

} // namespace fluxmdp
