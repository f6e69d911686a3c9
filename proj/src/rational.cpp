#include "rankone/rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace rankone {

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s{text};
  auto trim = [](std::string& v) {
    v.erase(0, v.find_first_not_of(" \t"));
    v.erase(v.find_last_not_of(" \t") + 1);
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? std::string{"1"} : s.substr(slash + 1);
  auto digits_ok = [](const std::string& v, bool allow_sign) {
    if (v.empty()) return false;
    std::size_t i = (allow_sign && (v[0] == '-' || v[0] == '+')) ? 1 : 0;
    if (i == v.size()) return false;
    return std::all_of(v.begin() + static_cast<std::ptrdiff_t>(i), v.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!digits_ok(num, true) || !digits_ok(den, false)) {
    throw std::invalid_argument("malformed rational: '" + s + "'");
  }
  if (num[0] == '+') num.erase(0, 1);
  BigInt n{num}, d{den};
  if (d == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
  Rational q{n, d};
  q.canonicalize();
  return q;
}

Bracket abs_bounds(const Bracket& b) {
  if (b.lower >= 0) return b;
  if (b.upper <= 0) return {-b.upper, -b.lower};
  return {0, std::max(Rational{-b.lower}, b.upper)};
}

Bracket multiply(const Bracket& a, const Bracket& b) {
  const Rational c[4] = {a.lower * b.lower, a.lower * b.upper, a.upper * b.lower,
                         a.upper * b.upper};
  Bracket r{c[0], c[0]};
  for (const auto& v : c) {
    if (v < r.lower) r.lower = v;
    if (v > r.upper) r.upper = v;
  }
  return r;
}

}  // namespace rankone
