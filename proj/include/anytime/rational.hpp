#pragma once
// Exact rational values for the tree engine.  Everything the tree computes is
// an equality between rationals, so no floating point is allowed to leak in.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace anytime {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "3/4", "-7/2", or a plain integer "5".  The denominator must be a
// positive integer; anything else is rejected with the offending text.
inline Rat rat_parse(const std::string& text) {
    auto fail = [&]() -> Rat {
        throw std::invalid_argument("not a rational: '" + text + "'");
    };
    if (text.empty()) return fail();
    auto is_int = [](const std::string& s) {
        std::size_t i = s[0] == '-' ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    std::size_t slash = text.find('/');
    if (slash == std::string::npos) {
        if (!is_int(text)) return fail();
        return Rat(BigInt(text));
    }
    std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) return fail();
    BigInt d(den);
    if (d <= 0) return fail();
    return Rat(BigInt(num), d);
}

inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

}  // namespace anytime
