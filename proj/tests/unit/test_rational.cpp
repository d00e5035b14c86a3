#include "doctest.h"
#include "rxscale/rational.hpp"

using namespace rxscale;

TEST_CASE("rational strings round trip") {
  CHECK(rat_from_string("3/40") == Rat(3, 40));
  CHECK(rat_from_string("-2/3") == Rat(-2, 3));
  CHECK(rat_from_string("7") == Rat(7));
  CHECK(rat_from_string("6/4") == Rat(3, 2));
  CHECK(to_string(Rat(3, 40)) == "3/40");
  CHECK(to_string(Rat(-2, 3)) == "-2/3");
  CHECK(to_string(Rat(7)) == "7");
}

TEST_CASE("decimal and scientific literals convert exactly") {
  CHECK(rat_from_string("0.025") == Rat(1, 40));
  CHECK(rat_from_string("0.0000075") == Rat(3, 400000));
  CHECK(rat_from_string("7.5e-6") == Rat(3, 400000));
  CHECK(rat_from_string("1e6") == Rat(1000000));
  CHECK(rat_from_string("2.5") == Rat(5, 2));
}

TEST_CASE("malformed rational input is rejected") {
  CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(rat_from_string("abc"), std::invalid_argument);
  CHECK_THROWS_AS(rat_from_string(""), std::invalid_argument);
  CHECK_THROWS_AS(rat_from_string("1/2/3"), std::invalid_argument);
}

TEST_CASE("integer powers") {
  CHECK(rat_pow(Rat(2, 3), 3) == Rat(8, 27));
  CHECK(rat_pow(Rat(2, 3), -2) == Rat(9, 4));
  CHECK(rat_pow(Rat(5), 0) == Rat(1));
}

TEST_CASE("exact roots and rational powers exist only when the root is rational") {
  CHECK(rat_root(Rat(1000000), 3) == Rat(100));
  CHECK(rat_root(Rat(4, 9), 2) == Rat(2, 3));
  CHECK_FALSE(rat_root(Rat(10), 2).has_value());

  CHECK(rat_pow_exact(Rat(1000), Rat(2, 3)) == Rat(100));
  CHECK(rat_pow_exact(Rat(4, 9), Rat(3, 2)) == Rat(8, 27));
  CHECK(rat_pow_exact(Rat(1000), Rat(-2, 3)) == Rat(1, 100));
  CHECK_FALSE(rat_pow_exact(Rat(1000), Rat(1, 2)).has_value());
}

TEST_CASE("double powers agree with the exact path") {
  CHECK(rat_pow_d(Rat(1000), Rat(2, 3)) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK(rat_pow_d(Rat(10), Rat(-1, 2)) == doctest::Approx(0.31622776601683794).epsilon(1e-13));
  CHECK(rat_pow_d(Rat(1, 4), Rat(1, 2)) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("decimal rendering handles only 2^a 5^b denominators") {
  CHECK(to_decimal_string(Rat(1, 40)) == "0.025");
  CHECK(to_decimal_string(Rat(3, 8000)) == "0.000375");
  CHECK(to_decimal_string(Rat(15, 2)) == "7.5");
  CHECK(to_decimal_string(Rat(7)) == "7");
  CHECK_THROWS_AS(to_decimal_string(Rat(1, 3)), std::domain_error);
}
