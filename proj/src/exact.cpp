#include "minklab/exact.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "minklab/errors.hpp"

namespace minklab {

double to_double(const Rational& q) {
  return q.convert_to<double>();
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << '/' << denominator(q);
  return os.str();
}

Rational pow(const Rational& q, long n) {
  if (n < 0) {
    if (q == 0) throw ValidationError("zero raised to a negative power");
    return pow(Rational(1) / q, -n);
  }
  Rational result(1);
  Rational base = q;
  unsigned long e = static_cast<unsigned long>(n);
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e != 0) base *= base;
  }
  return result;
}

namespace {

// Splits n = k^2 * s with s squarefree.
void squarefree_split(BigInt n, BigInt& k, BigInt& s) {
  k = 1;
  s = 1;
  for (BigInt p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      k *= p;
    }
    if (n % p == 0) {
      n /= p;
      s *= p;
    }
  }
  s *= n;
}

}  // namespace

Surd::Surd(const Rational& a) : a_(a) {}

Surd::Surd(const Rational& a, const Rational& b, std::int64_t radicand) : a_(a), b_(b), s_(radicand) {
  if (b_ == 0) {
    s_ = 0;
    return;
  }
  if (radicand < 2) throw ValidationError("surd radicand must be a squarefree integer >= 2");
  BigInt k, s;
  squarefree_split(BigInt(radicand), k, s);
  if (k != 1) throw ValidationError("surd radicand must be squarefree");
}

Surd Surd::sqrt(const Rational& q) {
  if (q < 0) throw ValidationError("square root of a negative number");
  if (q == 0) return Surd();
  // sqrt(p/r) = sqrt(p*r)/r
  BigInt num = numerator(q) * denominator(q);
  BigInt k, s;
  squarefree_split(num, k, s);
  Rational coef = Rational(k) / Rational(denominator(q));
  if (s == 1) return Surd(coef);
  if (s > BigInt(std::numeric_limits<std::int64_t>::max()))
    throw ValidationError("square root radicand too large");
  return Surd(Rational(0), coef, s.convert_to<std::int64_t>());
}

int Surd::sign() const {
  int sa = a_.sign();
  int sb = b_.sign();
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // opposite signs: compare a^2 with b^2 s
  Rational lhs = a_ * a_;
  Rational rhs = b_ * b_ * s_;
  if (lhs > rhs) return sa;
  if (lhs < rhs) return sb;
  return 0;
}

double Surd::to_double() const {
  if (b_ == 0) return minklab::to_double(a_);
  return minklab::to_double(a_) + minklab::to_double(b_) * std::sqrt(static_cast<double>(s_));
}

std::string Surd::to_string() const {
  if (b_ == 0) return minklab::to_string(a_);
  std::ostringstream os;
  if (a_ != 0) os << minklab::to_string(a_) << (b_ > 0 ? " + " : " - ");
  else if (b_ < 0) os << "-";
  Rational mag = b_ < 0 ? Rational(-b_) : b_;
  BigInt n = numerator(mag), den = denominator(mag);
  if (n != 1) os << n << "*";
  os << "sqrt(" << s_ << ")";
  if (den != 1) os << "/" << den;
  return os.str();
}

std::int64_t Surd::common_radicand(const Surd& o) const {
  std::int64_t r1 = radicand(), r2 = o.radicand();
  if (r1 == 0) return r2;
  if (r2 == 0 || r1 == r2) return r1;
  throw ValidationError("cannot mix square roots sqrt(" + std::to_string(r1) + ") and sqrt(" +
                        std::to_string(r2) + ") in exact arithmetic");
}

Surd Surd::operator-() const {
  Surd r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

Surd& Surd::operator+=(const Surd& o) {
  s_ = common_radicand(o);
  a_ += o.a_;
  b_ += o.b_;
  if (b_ == 0) s_ = 0;
  return *this;
}

Surd& Surd::operator-=(const Surd& o) { return *this += -o; }

Surd& Surd::operator*=(const Surd& o) {
  std::int64_t s = common_radicand(o);
  Rational a = a_ * o.a_ + b_ * o.b_ * s;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = a;
  b_ = b;
  s_ = b_ == 0 ? 0 : s;
  return *this;
}

Surd& Surd::operator/=(const Surd& o) {
  if (o.is_zero()) throw ValidationError("division by zero in exact arithmetic");
  std::int64_t s = common_radicand(o);
  Rational norm = o.a_ * o.a_ - o.b_ * o.b_ * s;
  Surd conj = o;
  conj.b_ = -conj.b_;
  *this *= conj;
  a_ /= norm;
  b_ /= norm;
  if (b_ == 0) s_ = 0;
  return *this;
}

Surd pow(const Surd& x, long n) {
  if (n < 0) return Surd(1) / pow(x, -n);
  Surd result(1);
  Surd base = x;
  unsigned long e = static_cast<unsigned long>(n);
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e != 0) base *= base;
  }
  return result;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("non-finite value has no rational form");
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // mant * 2^53 is an integer
  long long m = static_cast<long long>(std::ldexp(mant, 53));
  Rational q(m);
  int e = exp - 53;
  if (e > 0) q *= pow(Rational(2), e);
  else if (e < 0) q /= pow(Rational(2), -e);
  return q;
}

}  // namespace minklab
