#include "doctest.h"

#include <cmath>
#include <random>

#include "birkhoff/oracle.hpp"
#include "birkhoff/thermo.hpp"
#include "testutil.hpp"

using namespace birkhoff;
using namespace testutil;

TEST_CASE("count_words on the reference systems") {
    CHECK(count_words(full2(), 5) == BigInt(32));
    CHECK(count_words(golden(), 4) == BigInt(8));
    // enumeration cross-check on the golden mean
    for (int n = 1; n <= 10; ++n) {
        unsigned long long direct = 0;
        for (unsigned long long bits = 0; bits < (1ull << n); ++bits) {
            bool ok = true;
            for (int i = 0; i + 1 < n; ++i)
                ok = ok && !(((bits >> i) & 1) && ((bits >> (i + 1)) & 1));
            if (ok) ++direct;
        }
        CHECK(count_words(golden(), n) == BigInt(static_cast<unsigned long>(direct)));
    }
}

TEST_CASE("count_level_words: exact windows") {
    // exactly two ones among four symbols: C(4,2)
    CHECK(count_level_words(full2(), ones(), Rational(1, 2), Rational(1, 2), 4) == BigInt(6));
    // full-range window counts everything
    CHECK(count_level_words(full2(), ones(), Rational(0), Rational(1), 12) ==
          count_words(full2(), 12));
    CHECK(count_level_words(golden(), ones(), Rational(0), Rational(1), 12) ==
          count_words(golden(), 12));
    // empty integer window
    CHECK_THROWS_AS(
        count_level_words(full2(), ones(), Rational(1, 3), Rational(1, 3), 4),
        DegenerateWindow);
}

TEST_CASE("flat kernel equals the serial reference") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 12; ++t) {
        SymbolicSystem sys = random_primitive(rng, 4);
        Observable f = random_observable(rng, sys.alphabet_size(), (t % 2) + 1);
        ValueRange r = average_range(sys, f);
        double lo_d = r.lo.to_double(), hi_d = r.hi.to_double();
        double a = lo_d + (hi_d - lo_d) * 0.3, b = lo_d + (hi_d - lo_d) * 0.7;
        Rational lo(std::llround(a * 840), 840), hi(std::llround(b * 840), 840);
        if (hi < lo) std::swap(lo, hi);
        long long n = 20 + static_cast<long long>(rng() % 40);
        BigInt fast = count_level_words(sys, f, lo, hi, n, false);
        BigInt slow = count_level_words(sys, f, lo, hi, n, true);
        CHECK(fast == slow);
    }
    // joint windows
    std::vector<LatticeWindow> joint{{ones(), Rational(1, 4), Rational(1, 2)},
                                     {ind11(), Rational(0), Rational(1, 5)}};
    CHECK(count_level_words(full2(), joint, 40, false) ==
          count_level_words(full2(), joint, 40, true));
}

TEST_CASE("level counts match binomial enumeration") {
    // ones-average in [0.35, 0.65] of length 12: sum of C(12,k), k = 5..7
    BigInt expect = BigInt(792) + BigInt(924) + BigInt(792);
    CHECK(count_level_words(full2(), ones(), Rational(35, 100), Rational(65, 100), 12) ==
          expect);
}

TEST_CASE("counting growth approaches the constrained entropy") {
    // (1/n) ln #\{40% ones\} near H(0.4) already at n = 600
    BigInt c = count_level_words(full2(), ones(), Rational(38, 100), Rational(42, 100), 600);
    double rate = log_of(c) / 600.0;
    CHECK(std::abs(rate - Hb(0.4)) < 0.05);

    // golden mean: the window count is dominated by the most entropic point
    // of the window, here alpha = 0.3
    BigInt g = count_level_words(golden(), ones(), Rational(3, 10), Rational(2, 5), 400);
    ConstrainedResult edge = constrained_value(golden(), {{ones(), Rational(3, 10)}}, zero());
    CHECK(std::abs(log_of(g) / 400.0 - edge.value) < 0.05);
}

TEST_CASE("weighted rate: consistency and closed form") {
    // psi = 0 reduces to plain counting
    BigInt c = count_level_words(full2(), ones(), Rational(1, 4), Rational(3, 4), 50);
    double rate0 = pressure_of_set_estimate(full2(), zero(), ones(), Rational(1, 4),
                                            Rational(3, 4), 50);
    CHECK(rate0 == doctest::Approx(log_of(c) / 50.0).epsilon(1e-10));

    // whole space, psi = symbol-1: the sum is (1 + e)^n exactly
    double rate = pressure_of_set_estimate(full2(), ones(), {}, 400);
    CHECK(rate == doctest::Approx(std::log(1.0 + std::exp(1.0))).epsilon(1e-12));

    // window + potential approaches the constrained pressure H(1/2) + 1/2
    double rate2 = pressure_of_set_estimate(full2(), ones(), ones(), Rational(48, 100),
                                            Rational(52, 100), 600);
    CHECK(std::abs(rate2 - (std::log(2.0) + 0.5)) < 0.05);
}

TEST_CASE("count tables partition the word count") {
    CountTable t = count_table(golden(), ones(), 12);
    CHECK(t.total() == count_words(golden(), 12));
    CountTable t2 = count_table(full2(), ind11(), 10);
    CHECK(t2.total() == count_words(full2(), 10));
    // the ones-sum of a length-12 golden word is at most 6
    for (const auto& [state, cnt] : t.counts) CHECK(state.second <= 6);
}

TEST_CASE("mistake functions and Bowen balls") {
    MistakeFunction zero_g = MistakeFunction::zero();
    MistakeFunction slow = MistakeFunction::theta_over_log(2.0);
    zero_g.validate_on(1000);
    slow.validate_on(1000);
    CHECK(slow(1000) == static_cast<long long>(std::floor(2000.0 / std::log(1000.0))));

    CHECK_FALSE(bowen_ball_membership(parse_word("000"), parse_word("001"), 3, 0.75, zero_g));
    MistakeFunction one = MistakeFunction::theta_over_log(0.5);  // g(3) = 1
    CHECK(one(3) == 1);
    CHECK(bowen_ball_membership(parse_word("000"), parse_word("001"), 3, 0.75, one));
    CHECK(bowen_ball_membership(parse_word("010101"), parse_word("010101"), 6, 0.9, zero_g));
    CHECK_THROWS_AS(bowen_ball_membership(parse_word("01"), parse_word("10"), 3, 0.75, zero_g),
                    WordTooShort);
    CHECK_THROWS_AS(bowen_ball_membership(parse_word("000"), parse_word("001"), 3, 0.3, zero_g),
                    InvalidInput);

    // enlarging the mistake function never shrinks a Bowen ball
    std::mt19937_64 rng(53);
    for (int t = 0; t < 200; ++t) {
        Word x, y;
        for (int i = 0; i < 12; ++i) {
            x.push_back(static_cast<Symbol>(rng() % 2));
            y.push_back(static_cast<Symbol>(rng() % 2));
        }
        MistakeFunction small = MistakeFunction::theta_over_log(1.0);
        MistakeFunction large = MistakeFunction::theta_over_log(3.0);
        if (bowen_ball_membership(x, y, 12, 0.8, small))
            CHECK(bowen_ball_membership(x, y, 12, 0.8, large));
    }
}

TEST_CASE("separated-set counts") {
    EmpiricalMeasure whole{2, 1, {0.5, 0.5}};

    // separation by >= 1 coordinate: all four 2-words qualify
    SeparatedCount all4 = count_separated(full2(), whole, 2.5, 0.5, 2, 0.75);
    CHECK(all4.exact);
    CHECK(all4.count == 4);

    // ceil(delta*n) = 3 at n = 3: the repetition code {000, 111}
    SeparatedCount rep = count_separated(full2(), whole, 2.5, 1.0, 3, 0.75);
    CHECK(rep.exact);
    CHECK(rep.count == 2);

    // delta = 0 degenerates to counting X_{n,F}
    SeparatedCount plain = count_separated(golden(), whole, 2.5, 0.0, 5, 0.75);
    CHECK(plain.count == 13);  // golden-mean words of length 5

    CHECK_THROWS_AS(count_separated(full2(), whole, 2.5, 0.5, 21, 0.75), ExhaustiveTooLarge);

    // greedy mode lower-bounds the exact count
    SeparatedCount greedy = count_separated(full2(), whole, 2.5, 1.0, 3, 0.75,
                                            SeparatedMode::GreedyLowerBound);
    CHECK_FALSE(greedy.exact);
    CHECK(greedy.count <= rep.count);
    CHECK(greedy.count >= 1);
}

TEST_CASE("separated-set growth at desk scale") {
    // the growth-rate bound behind the entropy estimates: a weak* ball of
    // radius 0.1 around the fair-coin marginal, one mismatch required
    EmpiricalMeasure center{2, 1, {0.5, 0.5}};
    for (int n = 10; n <= 14; ++n) {
        SeparatedCount c = count_separated(full2(), center, 0.1, 1.0 / n, n, 0.75);
        CHECK(c.exact);
        double rate = std::log2(static_cast<double>(c.count)) / n;
        CHECK(rate >= 1.0 - 0.25);
    }
}
