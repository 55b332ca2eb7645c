#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "recind/errors.hpp"

namespace recind {

// Exact arithmetic backend for the enumeration oracle and the identity
// checks. Arbitrary precision: pattern sums multiply many small fractions
// and their common denominators outgrow any fixed-width integer.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Canonical serialization: "num/den", no whitespace, denominator always
// present ("0/1", "1/1", "-3/7").
inline std::string to_fraction_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

// Accepts "a/b" or a plain integer "a" (optional sign on the numerator).
inline Rational parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(BigInt(text));
        }
        const BigInt num(text.substr(0, slash));
        const BigInt den(text.substr(slash + 1));
        if (den == 0) throw InputError("zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw InputError("cannot parse rational '" + text + "'");
    }
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace recind
