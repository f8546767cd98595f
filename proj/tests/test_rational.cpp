#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "vident/rational.hpp"

using vident::DataError;
using vident::Rational;
using vident::parse_rational;

TEST_CASE("rational construction canonicalizes") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(0, -7).denominator() == 1);
  CHECK(Rational(6, 3).denominator() == 1);
  CHECK(Rational(6, 3).numerator() == 2);
  CHECK_THROWS_AS(Rational(1, 0), DataError);
}

TEST_CASE("rational arithmetic is exact") {
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
  CHECK(Rational(-1, 2) * Rational(-1, 2) == Rational(1, 4));
  CHECK_THROWS_AS(Rational(1) / Rational(0), DataError);

  // Exhaustive small grid against long double as the independent check.
  for (int an = -6; an <= 6; ++an)
    for (int ad = 1; ad <= 6; ++ad)
      for (int bn = -6; bn <= 6; ++bn)
        for (int bd = 1; bd <= 6; ++bd) {
          Rational a(an, ad), b(bn, bd);
          long double fa = static_cast<long double>(an) / ad;
          long double fb = static_cast<long double>(bn) / bd;
          Rational sum = a + b;
          long double fsum = static_cast<long double>(sum.numerator()) / sum.denominator();
          CHECK(std::abs(fsum - (fa + fb)) < 1e-15L);
          CHECK((a < b) == (fa < fb));
          CHECK((a == b) == (std::abs(fa - fb) < 1e-15L));
        }
}

TEST_CASE("rational overflow is reported, not wrapped") {
  Rational big(INT64_MAX / 2 + 1, 1);
  CHECK_THROWS_AS(big * Rational(4), DataError);
  CHECK_THROWS_AS(big + big, DataError);
  CHECK_NOTHROW(Rational(INT64_MAX / 2) + Rational(1));
}

TEST_CASE("canonical rendering picks digits, small fractions, then decimals") {
  CHECK(Rational(7).canonical() == "7");
  CHECK(Rational(-12).canonical() == "-12");
  CHECK(Rational(0).canonical() == "0");
  CHECK(Rational(3, 2).canonical() == "3/2");
  CHECK(Rational(-5, 4).canonical() == "-5/4");
  CHECK(Rational(1, 3).canonical() == "1/3");
  CHECK(Rational(1, 64).canonical() == "1/64");
  CHECK(Rational(2, 64).canonical() == "1/32");
  // Denominator above 64: decimal with six significant digits.
  CHECK(Rational(1, 128).canonical() == "0.0078125");
  CHECK(Rational(1, 100).canonical() == "0.01");
  CHECK(Rational(1, 96).canonical() == "0.0104167");
  CHECK(Rational(1000001, 100).canonical() == "10000");
  // Small denominator wins even when the value is large.
  CHECK(Rational(1000000, 3).canonical() == "1000000/3");
}

TEST_CASE("parse_rational accepts integers, fractions, decimals") {
  CHECK(parse_rational("2") == Rational(2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("+7") == Rational(7));
  CHECK(parse_rational("3/2") == Rational(3, 2));
  CHECK(parse_rational("-3/2") == Rational(-3, 2));
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK(parse_rational("1.5") == Rational(3, 2));
  CHECK(parse_rational(".25") == Rational(1, 4));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
  CHECK(parse_rational("0") == Rational(0));

  CHECK_FALSE(parse_rational("").has_value());
  CHECK_FALSE(parse_rational("abc").has_value());
  CHECK_FALSE(parse_rational("1/0").has_value());
  CHECK_FALSE(parse_rational("1.2.3").has_value());
  CHECK_FALSE(parse_rational("1e5").has_value());
  CHECK_FALSE(parse_rational("1 /2").has_value());
  CHECK_FALSE(parse_rational("--3").has_value());
}

TEST_CASE("parse_rational round-trips canonical renderings with small denominators") {
  for (int num = -40; num <= 40; ++num)
    for (int den = 1; den <= 64; ++den) {
      Rational r(num, den);
      auto back = parse_rational(r.canonical());
      REQUIRE(back.has_value());
      CHECK(*back == r);
    }
}

TEST_CASE("rational hash agrees with equality") {
  CHECK(Rational(2, 4).hash() == Rational(1, 2).hash());
  CHECK(std::hash<Rational>{}(Rational(5)) == Rational(5).hash());
}
