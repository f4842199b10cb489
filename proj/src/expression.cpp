#include <cctype>
#include <string>

#include "minklab/errors.hpp"
#include "minklab/exact.hpp"

namespace minklab {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Surd parse() {
    Surd value = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("malformed exact number \"" + std::string(text_) + "\": " + what +
                          " at position " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Surd expr() {
    Surd value = term();
    for (;;) {
      if (accept('+')) value += term();
      else if (accept('-')) value -= term();
      else return value;
    }
  }

  Surd term() {
    Surd value = unary();
    for (;;) {
      if (accept('*')) {
        value *= unary();
      } else if (accept('/')) {
        Surd d = unary();
        if (d.is_zero()) fail("division by zero");
        value /= d;
      } else {
        return value;
      }
    }
  }

  Surd unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Surd power() {
    Surd base = primary();
    if (accept('^')) {
      skip_space();
      bool neg = accept('-');
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      long e = std::stol(std::string(text_.substr(start, pos_ - start)));
      if (base.is_zero() && neg) fail("zero to a negative power");
      return pow(base, neg ? -e : e);
    }
    return base;
  }

  Surd primary() {
    skip_space();
    if (accept('(')) {
      Surd v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (text_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      if (!accept('(')) fail("expected '(' after sqrt");
      Surd arg = expr();
      if (!accept(')')) fail("expected ')'");
      if (!arg.is_rational()) fail("nested square roots are not supported");
      if (arg.rational_part() < 0) fail("square root of a negative number");
      return Surd::sqrt(arg.rational_part());
    }
    return number();
  }

  Surd number() {
    skip_space();
    std::size_t start = pos_;
    BigInt digits = 0;
    int frac_digits = 0;
    bool any = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      digits = digits * 10 + (text_[pos_] - '0');
      ++pos_;
      any = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits = digits * 10 + (text_[pos_] - '0');
        ++frac_digits;
        ++pos_;
        any = true;
      }
    }
    if (!any) {
      pos_ = start;
      fail("expected a number");
    }
    long exp10 = -frac_digits;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      bool neg = false;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) neg = text_[pos_++] == '-';
      std::size_t es = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (es == pos_) fail("expected exponent digits");
      long e = std::stol(std::string(text_.substr(es, pos_ - es)));
      exp10 += neg ? -e : e;
    }
    Rational q(digits);
    q *= pow(Rational(10), exp10);
    return Surd(q);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Surd parse_exact(std::string_view text) {
  return Parser(text).parse();
}

bool is_exact_expression(std::string_view text) {
  try {
    parse_exact(text);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

}  // namespace minklab
