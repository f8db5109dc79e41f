#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace md {

// All weights, distances, times and delay values in this library are exact
// rationals. Comparisons in the algorithms and in the bound checks are exact;
// there are no tolerances anywhere.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline Rat make_rat(long long p, long long q = 1) { return Rat(Int(p), Int(q)); }

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

// Canonical text form: "p" for integers, "p/q" otherwise.
inline std::string rat_str(const Rat& r) {
  if (rat_den(r) == 1) return rat_num(r).str();
  return rat_num(r).str() + "/" + rat_den(r).str();
}

// Parses "p", "-p", "p/q". Whitespace is not tolerated.
inline Rat rat_parse(const std::string& s) {
  if (s.empty()) throw Error("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int p(s.substr(0, slash));
    Int q(s.substr(slash + 1));
    if (q <= 0) throw Error("rational with nonpositive denominator: " + s);
    return Rat(p, q);
  } catch (const std::exception&) {
    throw Error("bad rational literal: " + s);
  }
}

// Decimal rendering with a fixed number of fractional digits (round toward
// zero). Used for the human-readable CSV columns next to the exact p/q form.
inline std::string rat_decimal(const Rat& r, int digits = 9) {
  Int p = rat_num(r), q = rat_den(r);
  bool neg = p < 0;
  if (neg) p = -p;
  Int ip = p / q, fp = p % q;
  std::string out = (neg ? "-" : "") + ip.str();
  if (digits <= 0) return out;
  std::string frac;
  for (int i = 0; i < digits; ++i) {
    fp *= 10;
    frac += char('0' + int(fp / q));
    fp %= q;
  }
  while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
  if (frac != "0") out += "." + frac;
  return out;
}

// Smallest power of two >= r (r > 0). Exponent may be negative.
inline Rat pow2_ceil(const Rat& r) {
  if (r <= 0) throw Error("pow2_ceil requires a positive value");
  Rat x(1);
  if (r >= 1) {
    while (x < r) x *= 2;
  } else {
    while (x / 2 >= r) x /= 2;
  }
  return x;
}

inline bool is_pow2(const Rat& r) { return r > 0 && pow2_ceil(r) == r; }

inline const Rat& rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Optional time value; empty means "never" / +infinity.
using MaybeTime = std::optional<Rat>;

}  // namespace md
