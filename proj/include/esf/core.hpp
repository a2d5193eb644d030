#pragma once

// Shared numeric carriers and error types.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace esf {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Exact probability carrier. Produced only by the rational backends.
using ExactProb = Rational;

/// Input violates a documented precondition (malformed partition, bad parameter, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested computation has no meaning for the given state (e.g. a downward
/// transition from the empty multiple partition).
class NoTransition : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Asymptotic regime that has no normal limit for the given class count.
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parses "p/q", "p" (optionally signed). Throws InvalidInput on anything else.
/// num/den in lowest terms (GMP's two-argument constructor does not reduce).
template <class A, class B>
Rational make_rational(const A& num, const B& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty rational literal");
  std::size_t slash = text.find('/');
  auto digits_ok = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den))
    throw InvalidInput("not a rational literal: '" + std::string(text) + "'");
  std::string num_s(num), den_s(den);
  if (!num_s.empty() && num_s.front() == '+') num_s.erase(0, 1);
  if (!den_s.empty() && den_s.front() == '+') den_s.erase(0, 1);
  BigInt d(den_s);
  if (d == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  Rational r(BigInt(num_s), d);
  r.canonicalize();
  return r;
}

/// Always "num/den", also for integers.
inline std::string to_fraction_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

/// Natural log of a positive rational without overflowing double range.
inline double log_of(const Rational& r) {
  if (sgn(r) <= 0) throw InvalidInput("log of non-positive rational");
  auto log_big = [](const BigInt& z) {
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
  };
  return log_big(r.get_num()) - log_big(r.get_den());
}

}  // namespace esf
