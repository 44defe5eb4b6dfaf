#ifndef TMBOSON_RATIONAL_HPP
#define TMBOSON_RATIONAL_HPP

#include <boost/rational.hpp>

#include <optional>
#include <string>

namespace tmb {

/// Exact rational arithmetic for representation labels and shift values.
/// Desk-scale blocks keep numerators/denominators tiny, so 64-bit
/// components are ample.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_string(const Rational& r);

/// Parses "p/q", "p", or "-p/q". Returns nullopt on malformed input or q = 0.
std::optional<Rational> parse_rational(const std::string& text);

}  // namespace tmb

#endif
