#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace minklab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

double to_double(const Rational& q);
std::string to_string(const Rational& q);

/// Exact power q^n for integer n (negative n allowed when q != 0).
Rational pow(const Rational& q, long n);

/// Number a + b*sqrt(s) with rational a, b and squarefree s >= 2, or a plain
/// rational when b == 0. Operands with different radicands cannot be mixed.
class Surd {
 public:
  Surd() = default;
  Surd(const Rational& a);  // NOLINT(google-explicit-constructor)
  Surd(long long a) : Surd(Rational(a)) {}  // NOLINT(google-explicit-constructor)
  Surd(const Rational& a, const Rational& b, std::int64_t radicand);

  /// sqrt(q) for a nonnegative rational q, reduced to k*sqrt(s).
  static Surd sqrt(const Rational& q);

  const Rational& rational_part() const { return a_; }
  const Rational& surd_part() const { return b_; }
  /// Squarefree radicand, or 0 for rational values.
  std::int64_t radicand() const { return b_ == 0 ? 0 : s_; }
  bool is_rational() const { return b_ == 0; }

  int sign() const;
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  double to_double() const;
  std::string to_string() const;

  Surd operator-() const;
  Surd& operator+=(const Surd& o);
  Surd& operator-=(const Surd& o);
  Surd& operator*=(const Surd& o);
  Surd& operator/=(const Surd& o);

  friend Surd operator+(Surd x, const Surd& y) { return x += y; }
  friend Surd operator-(Surd x, const Surd& y) { return x -= y; }
  friend Surd operator*(Surd x, const Surd& y) { return x *= y; }
  friend Surd operator/(Surd x, const Surd& y) { return x /= y; }

  friend bool operator==(const Surd& x, const Surd& y) { return (x - y).sign() == 0; }
  friend bool operator!=(const Surd& x, const Surd& y) { return !(x == y); }
  friend bool operator<(const Surd& x, const Surd& y) { return (x - y).sign() < 0; }
  friend bool operator<=(const Surd& x, const Surd& y) { return (x - y).sign() <= 0; }
  friend bool operator>(const Surd& x, const Surd& y) { return (x - y).sign() > 0; }
  friend bool operator>=(const Surd& x, const Surd& y) { return (x - y).sign() >= 0; }

 private:
  std::int64_t common_radicand(const Surd& o) const;

  Rational a_{0};
  Rational b_{0};
  std::int64_t s_{0};
};

Surd pow(const Surd& x, long n);

/// Parses an exact number expression such as "1/2", "-0.25", "sqrt(3)/12",
/// "6*sqrt(3)" or "3/2 - sqrt(3)/4". Throws ValidationError on malformed text
/// or on mixing different square roots.
Surd parse_exact(std::string_view text);

/// True when text parses as an exact expression.
bool is_exact_expression(std::string_view text);

/// Exact rational value of a finite double.
Rational rational_from_double(double x);

}  // namespace minklab
