#include "doctest.h"

#include <cmath>
#include <random>

#include "birkhoff/measure.hpp"
#include "testutil.hpp"

using namespace birkhoff;
using namespace testutil;

TEST_CASE("markov entropy on closed-form cases") {
    CHECK(MarkovMixtureMeasure(bernoulli(0.5)).entropy() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // Parry measure of the golden mean: entropy = ln of the Perron root
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    // stationary Markov chain built from the Perron eigenvector by hand
    MarkovMeasure parry = MarkovMeasure::from_transitions(
        golden(), {{1 / phi, 1 / (phi * phi)}, {1.0, 0.0}});
    CHECK(parry.entropy() == doctest::Approx(std::log(phi)).epsilon(1e-10));
    CHECK(parry.entropy() == doctest::Approx(0.481212).epsilon(1e-5));

    // affine combination of two zero-entropy point masses
    MarkovMixtureMeasure cycles({{0.5, delta_cycle0()}, {0.5, delta_cycle1()}});
    CHECK(cycles.entropy() == doctest::Approx(0.0));
}

TEST_CASE("integration against markov measures") {
    CHECK(bernoulli(0.4).integrate(ones()) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(bernoulli(0.4).integrate(ind11()) == doctest::Approx(0.16).epsilon(1e-12));

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    MarkovMeasure parry = MarkovMeasure::from_transitions(
        golden(), {{1 / phi, 1 / (phi * phi)}, {1.0, 0.0}});
    // stationary frequency of symbol 1 equals (5 - sqrt 5)/10
    CHECK(parry.integrate(ones()) ==
          doctest::Approx((5.0 - std::sqrt(5.0)) / 10.0).epsilon(1e-10));
    CHECK(parry.integrate(ones()) == doctest::Approx(0.276393).epsilon(1e-5));
}

TEST_CASE("measure construction validates its invariants") {
    CHECK_THROWS_AS(MarkovMeasure::from_transitions(full2(), {{0.5, 0.6}, {0.5, 0.5}}),
                    BadMeasure);
    CHECK_THROWS_AS(MarkovMeasure::from_transitions(golden(), {{0.5, 0.5}, {0.5, 0.5}}),
                    BadMeasure);  // mass on the forbidden pair 11
    // two recurrent classes: stationary distribution is not unique
    CHECK_THROWS_AS(MarkovMeasure::from_transitions(full2(), {{1.0, 0.0}, {0.0, 1.0}}),
                    BadMeasure);
    CHECK_THROWS_AS(MarkovMixtureMeasure({{0.7, bernoulli(0.5)}, {0.7, bernoulli(0.2)}}),
                    BadWeights);
}

TEST_CASE("empirical measures from words") {
    EmpiricalMeasure e1 = empirical_measure(parse_word("0101"), 1, 2);
    CHECK(e1.frequencies[0] == doctest::Approx(0.5));
    CHECK(e1.frequencies[1] == doctest::Approx(0.5));

    EmpiricalMeasure e2 = empirical_measure(parse_word("0011"), 2, 2);
    CHECK(e2.frequencies[0] == doctest::Approx(1.0 / 3));  // 00
    CHECK(e2.frequencies[1] == doctest::Approx(1.0 / 3));  // 01
    CHECK(e2.frequencies[2] == doctest::Approx(0.0));      // 10
    CHECK(e2.frequencies[3] == doctest::Approx(1.0 / 3));  // 11

    CHECK_THROWS_AS(empirical_measure(parse_word("0"), 2, 2), WordTooShort);
}

TEST_CASE("law of large numbers for seeded samples") {
    std::mt19937_64 rng(42);
    Word w = sample_path(bernoulli(0.3), 100000, rng);
    EmpiricalMeasure e = empirical_measure(w, 1, 2);
    CHECK(std::abs(e.frequencies[1] - 0.3) < 0.01);
}

TEST_CASE("weak* distance: examples and paper bound") {
    EmpiricalMeasure p{2, 1, {1.0, 0.0}};
    EmpiricalMeasure q{2, 1, {0.0, 1.0}};
    CHECK(weakstar_distance(p, p) == 0.0);
    // depth-1 family: 2^{-1}|1-0| + 2^{-2}|0-1|
    CHECK(weakstar_distance(p, q) == doctest::Approx(0.75));
    CHECK(weakstar_distance(p, q) <= 2.0);

    EmpiricalMeasure a{2, 2, {0.25, 0.25, 0.25, 0.25}};
    EmpiricalMeasure b{2, 1, {0.5, 0.5}};
    CHECK_THROWS_AS(weakstar_distance(a, b), DepthMismatch);
}

TEST_CASE("weak* metric axioms hold on random frequency vectors") {
    std::mt19937_64 rng(17);
    auto random_freq = [&](int cells) {
        std::vector<double> f(cells);
        double total = 0;
        for (double& x : f) {
            x = static_cast<double>(rng() % 1000) + 1;
            total += x;
        }
        for (double& x : f) x /= total;
        return f;
    };
    int checked = 0;
    for (int t = 0; t < 334; ++t) {
        EmpiricalMeasure p{2, 2, random_freq(4)};
        EmpiricalMeasure q{2, 2, random_freq(4)};
        EmpiricalMeasure r{2, 2, random_freq(4)};
        double pq = weakstar_distance(p, q);
        double qp = weakstar_distance(q, p);
        double pr = weakstar_distance(p, r);
        double qr = weakstar_distance(q, r);
        CHECK(pq == qp);                    // symmetry
        CHECK(pq <= pr + qr + 1e-15);       // triangle inequality
        CHECK(pq <= 2.0);                   // paper bound
        CHECK(weakstar_distance(p, p) == 0.0);
        if (pq == 0.0) {
            for (int i = 0; i < 4; ++i) CHECK(p.frequencies[i] == q.frequencies[i]);
        }
        checked += 3;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("empirical measures converge to the marginal at 1/sqrt(N) rate") {
    MarkovMeasure m = MarkovMeasure::from_transitions(golden(), {{0.4, 0.6}, {1.0, 0.0}});
    MarkovMixtureMeasure mix(m);
    EmpiricalMeasure truth = to_empirical(mix, 2);
    for (long long n : {1000, 10000, 100000}) {
        std::mt19937_64 rng(7);
        Word w = sample_path(m, n, rng);
        double d = weakstar_distance(empirical_measure(w, 2, 2), truth);
        CHECK(d <= 5.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("convex combinations are affine in entropy and integrals") {
    MarkovMixtureMeasure b(bernoulli(0.5));
    CHECK(convex_combine({b}, {1.0}).entropy() == doctest::Approx(b.entropy()));
    CHECK(convex_combine({b, b}, {0.5, 0.5}).entropy() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    MarkovMixtureMeasure mix =
        convex_combine({b, MarkovMixtureMeasure(delta_cycle0())}, {0.9, 0.1});
    CHECK(mix.entropy() == doctest::Approx(0.9 * std::log(2.0)).epsilon(1e-12));
    CHECK(mix.entropy() == doctest::Approx(0.623832).epsilon(1e-5));
    CHECK(mix.integrate(ones()) == doctest::Approx(0.45).epsilon(1e-12));

    CHECK_THROWS_AS(convex_combine({b, b}, {0.6, 0.6}), BadWeights);

    std::mt19937_64 rng(23);
    for (int t = 0; t < 20; ++t) {
        double p = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0;
        double q = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0;
        double w = static_cast<double>(rng() % 101) / 100.0;
        MarkovMixtureMeasure m1(bernoulli(p)), m2(bernoulli(q));
        MarkovMixtureMeasure mix2 = convex_combine({m1, m2}, {w, 1 - w});
        CHECK(mix2.entropy() ==
              doctest::Approx(w * m1.entropy() + (1 - w) * m2.entropy()).epsilon(1e-12));
        Observable f = random_observable(rng, 2, 2);
        CHECK(mix2.integrate(f) ==
              doctest::Approx(w * m1.integrate(f) + (1 - w) * m2.integrate(f)).epsilon(1e-10));
    }
}
