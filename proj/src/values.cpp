#include "thinkbench/values.hpp"

#include <algorithm>
#include <stdexcept>

namespace thinkbench {

IntSet IntSet::from(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return IntSet{std::move(v)};
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::kGreater: return "greater";
    case Relation::kLess: return "less";
    case Relation::kEqual: return "equal";
  }
  return "equal";
}

std::optional<Relation> parse_relation_name(std::string_view s) {
  if (s == "greater") return Relation::kGreater;
  if (s == "less") return Relation::kLess;
  if (s == "equal") return Relation::kEqual;
  return std::nullopt;
}

std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational round_to_places(const Rational& r, int places) {
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(places));
  Rational scaled = abs(r) * scale;
  BigInt num = boost::multiprecision::numerator(scaled);
  BigInt den = boost::multiprecision::denominator(scaled);
  // floor(scaled + 1/2) == floor((2 num + den) / (2 den))
  BigInt rounded = (2 * num + den) / (2 * den);
  if (r < 0) rounded = -rounded;
  return make_rational(rounded, scale);
}

std::string rational_to_decimal(const Rational& r, int max_places) {
  Rational v = r;
  const BigInt den = boost::multiprecision::denominator(r);
  // Terminating iff den has only 2 and 5 as prime factors.
  BigInt rest = den;
  int twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  int places = max_places;
  if (rest == 1) places = std::min(max_places, std::max(twos, fives));
  v = round_to_places(r, places);

  const bool negative = v < 0;
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(places));
  BigInt scaled = boost::multiprecision::numerator(Rational(abs(v) * scale));
  std::string digits = scaled.str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
  }
  if (negative && digits != "0") digits.insert(0, "-");
  return digits;
}

std::string render_int_list(const std::vector<std::int64_t>& values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(values[i]);
  }
  return s + "]";
}

Rational make_rational(const BigInt& n, const BigInt& d) {
  if (d == 0) throw std::invalid_argument("zero denominator");
  return d < 0 ? Rational(BigInt(-n), BigInt(-d)) : Rational(n, d);
}

BigInt parse_bigint(std::string_view t) {
  if (t.empty()) throw std::invalid_argument("empty integer");
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) throw std::invalid_argument("bad integer");
  for (std::size_t j = i; j < t.size(); ++j) {
    if (t[j] < '0' || t[j] > '9') throw std::invalid_argument("bad integer");
  }
  // Boost reads a leading 0 as an octal prefix.
  std::size_t first = t.find_first_not_of('0', i);
  if (first == std::string_view::npos) return 0;
  BigInt v(std::string(t.substr(first)));
  return t[0] == '-' ? BigInt(-v) : v;
}

Rational parse_rational(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(s));
  BigInt den = parse_bigint(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator");
  return make_rational(parse_bigint(s.substr(0, slash)), den);
}

}  // namespace thinkbench
