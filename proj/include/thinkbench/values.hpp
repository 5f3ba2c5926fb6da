#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace thinkbench {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Ordered integer list (sorting payloads and answers).
struct IntList {
  std::vector<std::int64_t> values;
  friend bool operator==(const IntList&, const IntList&) = default;
};

// Unordered set of integers, kept sorted ascending and de-duplicated.
struct IntSet {
  std::vector<std::int64_t> values;

  static IntSet from(std::vector<std::int64_t> v);
  friend bool operator==(const IntSet&, const IntSet&) = default;
};

// Relation of Number 1 to Number 2.
enum class Relation { kGreater, kLess, kEqual };

std::string_view relation_name(Relation r);
std::optional<Relation> parse_relation_name(std::string_view s);

// A numeric answer written with a fractional part, a fraction, or an
// exponent. The value is held exactly.
struct Decimal {
  Rational value;
  friend bool operator==(const Decimal&, const Decimal&) = default;
};

// "n" for integers, "n/d" otherwise; lowest terms.
std::string rational_to_string(const Rational& r);
// Exact decimal text when the expansion terminates within max_places,
// otherwise rounded half away from zero to max_places.
std::string rational_to_decimal(const Rational& r, int max_places = 6);
// Round half away from zero to `places` decimal places.
Rational round_to_places(const Rational& r, int places);
// "[3, -5, 7]"
std::string render_int_list(const std::vector<std::int64_t>& values);

// n/d in lowest terms. Use instead of Rational(n, d): Boost 1.74 rejects a
// negative denominator there. Throws std::invalid_argument when d == 0.
Rational make_rational(const BigInt& n, const BigInt& d);

// Parses a base-10 integer with optional sign. Leading zeros are plain
// zeros (never an octal prefix). Throws std::invalid_argument.
BigInt parse_bigint(std::string_view s);

// Parses "n" or "n/d". Throws std::invalid_argument on bad input.
Rational parse_rational(std::string_view s);

}  // namespace thinkbench
