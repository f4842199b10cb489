#include <cmath>

#include "doctest.h"
#include "minklab/errors.hpp"
#include "minklab/exact.hpp"

using namespace minklab;

TEST_SUITE("exact") {
  TEST_CASE("surd arithmetic stays in the quadratic field") {
    const Surd r3 = Surd::sqrt(Rational(3));
    CHECK(r3 * r3 == Surd(3));
    CHECK((Surd(1) + r3) * (Surd(1) - r3) == Surd(-2));
    CHECK((Surd(2) / r3).to_double() == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(Surd::sqrt(Rational(12)) == Surd(2) * r3);
    CHECK(Surd::sqrt(Rational(9, 4)) == Surd(Rational(3, 2)));
    CHECK(pow(r3, 3) == Surd(3) * r3);
    CHECK(pow(r3, -2) == Surd(Rational(1, 3)));
  }

  TEST_CASE("surd ordering is exact near cancellation") {
    // 1351/780 is a continued-fraction convergent of sqrt(3), just above it.
    const Surd r3 = Surd::sqrt(Rational(3));
    CHECK(r3 < Surd(Rational(1351, 780)));
    CHECK(r3 > Surd(Rational(265, 153)));
    CHECK((r3 - Surd(Rational(1351, 780))).sign() == -1);
  }

  TEST_CASE("mixing radicands is rejected") {
    CHECK_THROWS(Surd::sqrt(Rational(2)) + Surd::sqrt(Rational(3)));
  }

  TEST_CASE("exact expressions parse") {
    CHECK(parse_exact("1/2") == Surd(Rational(1, 2)));
    CHECK(parse_exact("-0.25") == Surd(Rational(-1, 4)));
    CHECK(parse_exact("sqrt(3)/12") == Surd(Rational(0), Rational(1, 12), 3));
    CHECK(parse_exact("6*sqrt(3)") == Surd(Rational(0), Rational(6), 3));
    CHECK(parse_exact("3/2 - sqrt(3)/4") == Surd(Rational(3, 2), Rational(-1, 4), 3));
    CHECK(parse_exact("(1+sqrt(5))/2").to_double() == doctest::Approx((1 + std::sqrt(5.0)) / 2));
    CHECK(is_exact_expression("2/7"));
    CHECK_FALSE(is_exact_expression("1/"));
    CHECK_THROWS_AS(parse_exact("1/0"), ValidationError);
    CHECK_THROWS_AS(parse_exact("abc"), ValidationError);
    CHECK_THROWS_AS(parse_exact("sqrt(2)+sqrt(3)"), ValidationError);
  }

  TEST_CASE("doubles convert to exact rationals") {
    CHECK(rational_from_double(0.375) == Rational(3, 8));
    CHECK(to_double(rational_from_double(0.1)) == 0.1);
  }
}
