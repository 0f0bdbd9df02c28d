#include "doctest.h"

#include <random>

#include "birkhoff/observable.hpp"
#include "testutil.hpp"

using namespace birkhoff;
using namespace testutil;

TEST_CASE("birkhoff averages are exact rationals") {
    CHECK(birkhoff_average(parse_word("0101"), ones()) == Rational(1, 2));
    CHECK(birkhoff_average(parse_word("0000"), ones()) == Rational(0));
    // one 11 among the three depth-2 windows of 0110
    CHECK(birkhoff_average(parse_word("0110"), ind11()) == Rational(1, 3));
    CHECK_THROWS_AS(birkhoff_average(parse_word("1"), ind11()), WordTooShort);
}

TEST_CASE("scaling an observable scales the average exactly") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        Observable f = random_observable(rng, 2, 2);
        Rational c(static_cast<long long>(rng() % 15) + 1, static_cast<long long>(rng() % 7) + 1);
        Observable g = linear_combination({{c, f}});
        Word w;
        for (int i = 0; i < 40; ++i) w.push_back(static_cast<Symbol>(rng() % 2));
        CHECK(birkhoff_average(w, g) == c * birkhoff_average(w, f));
    }
}

TEST_CASE("averages stay within the value bounds") {
    std::mt19937_64 rng(5);
    SymbolicSystem sys = full2();
    for (int t = 0; t < 30; ++t) {
        Observable f = random_observable(rng, 2, 1 + static_cast<int>(rng() % 2));
        Word w;
        for (int i = 0; i < 25; ++i) w.push_back(static_cast<Symbol>(rng() % 2));
        Rational avg = birkhoff_average(w, f);
        CHECK(f.min_value(sys) <= avg);
        CHECK(avg <= f.max_value(sys));
    }
}

TEST_CASE("window bookkeeping: dropping the first symbol changes the sum by one window") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        Observable f = random_observable(rng, 2, 2);
        Word w;
        for (int i = 0; i < 30; ++i) w.push_back(static_cast<Symbol>(rng() % 2));
        Word shifted(w.begin() + 1, w.end());
        long long s_n = birkhoff_sum_scaled(w, f);
        long long s_tail = birkhoff_sum_scaled(shifted, f);
        long long max_abs = 0;
        for (std::size_t r = 0; r < f.table_size(); ++r)
            max_abs = std::max(max_abs, std::abs(f.scaled_at(r)));
        CHECK(std::abs(s_n - s_tail) <= max_abs);
    }
}

TEST_CASE("birkhoff_stats tracks running averages with burn-in") {
    Word periodic = repeat(parse_word("01"), 500);
    std::vector<long long> checkpoints;
    for (long long c = 100; c <= 1000; c += 100) checkpoints.push_back(c);
    BirkhoffStats stats = birkhoff_stats(periodic, ones(), checkpoints);
    CHECK(stats.liminf_estimate == doctest::Approx(0.5).epsilon(0.01));
    CHECK(stats.limsup_estimate == doctest::Approx(0.5).epsilon(0.01));
    CHECK(stats.liminf_estimate <= stats.limsup_estimate);

    Word zeros(1000, 0);
    BirkhoffStats flat = birkhoff_stats(zeros, ones(), checkpoints);
    CHECK(flat.liminf_estimate == 0.0);
    CHECK(flat.limsup_estimate == 0.0);

    CHECK_THROWS_AS(birkhoff_stats(zeros, ones(), {200, 100}), BadCheckpoints);
    CHECK_THROWS_AS(birkhoff_stats(zeros, ones(), {200, 2000}), BadCheckpoints);
    CHECK_THROWS_AS(birkhoff_stats(zeros, ones(), {}), BadCheckpoints);
}

TEST_CASE("observables load from entries and reject incomplete tables") {
    SymbolicSystem g = golden();
    std::vector<std::pair<Word, Rational>> entries = {
        {{0, 0}, Rational(1, 3)}, {{0, 1}, Rational(0)}, {{1, 0}, Rational(-2, 5)}};
    Observable f = Observable::from_entries(g, 2, entries);
    CHECK(f.value({0, 0}) == Rational(1, 3));
    CHECK(f.common_denominator() == 15);

    entries.pop_back();
    CHECK_THROWS_AS(Observable::from_entries(g, 2, entries), InvalidInput);
}

TEST_CASE("linear combinations promote depth and stay exact") {
    Observable f = ones();
    Observable g = ind11();
    Observable h = linear_combination({{Rational(2), f}, {Rational(-1, 2), g}});
    CHECK(h.depth() == 2);
    CHECK(h.value({1, 1}) == Rational(2) - Rational(1, 2));
    CHECK(h.value({0, 1}) == Rational(2));
    CHECK(h.value({1, 0}) == Rational(0));
}
