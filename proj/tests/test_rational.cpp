#include "doctest.h"

#include "birkhoff/rational.hpp"

using birkhoff::ArithmeticOverflow;
using birkhoff::Rational;

TEST_CASE("rational normalization and arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, 4) == Rational(-1, 2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
    CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
    CHECK(Rational(2, 3) / Rational(4, 3) == Rational(1, 2));
    CHECK(Rational(7, 3).str() == "7/3");
    CHECK(Rational(6, 3).str() == "2");
}

TEST_CASE("rational comparisons are exact") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(-1, 3));
    CHECK(Rational(1000000006, 1000000007) < Rational(1));
    CHECK(Rational(1, 2) <= Rational(1, 2));
    CHECK(Rational(1, 2) >= Rational(1, 2));
    // cross products beyond 64 bits still compare correctly
    Rational a(4000000000000000000LL, 4000000000000000001LL);
    CHECK(a < Rational(1));
}

TEST_CASE("rational overflow is detected, not wrapped") {
    Rational big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * Rational(8), ArithmeticOverflow);
    CHECK_THROWS_AS(Rational(1) / Rational(0), ArithmeticOverflow);
}
