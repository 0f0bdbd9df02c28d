#include "doctest.h"

#include <cmath>
#include <random>

#include "birkhoff/thermo.hpp"
#include "testutil.hpp"

using namespace birkhoff;
using namespace testutil;

namespace {

Observable scaled_ones(const Rational& q, int alphabet = 2) {
    return linear_combination({{q, Observable::indicator(alphabet, {1})}});
}

}  // namespace

TEST_CASE("transfer matrices") {
    // golden mean with potential 1*(symbol-1): [[1, e],[1, 0]]
    std::vector<double> m = transfer_matrix(golden(), scaled_ones(Rational(1)));
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(std::exp(1.0)));
    CHECK(m[2] == doctest::Approx(1.0));
    CHECK(m[3] == 0.0);

    std::vector<double> a = transfer_matrix(golden(), zero());
    CHECK(a == std::vector<double>{1.0, 1.0, 1.0, 0.0});

    std::vector<double> f = transfer_matrix(full2(), scaled_ones(Rational(3, 2)));
    CHECK(f[0] + f[1] == doctest::Approx(1.0 + std::exp(1.5)));
    CHECK(f[2] + f[3] == doctest::Approx(1.0 + std::exp(1.5)));
}

TEST_CASE("pressure closed forms") {
    CHECK(pressure(full2(), zero()) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(pressure(golden(), zero()) == doctest::Approx(std::log(phi)).epsilon(1e-12));
    CHECK(pressure(golden(), zero()) == doctest::Approx(0.481212).epsilon(1e-5));

    for (Rational q : {Rational(-5), Rational(-2), Rational(0), Rational(3, 2), Rational(5)}) {
        double p = pressure(full2(), scaled_ones(q));
        CHECK(std::abs(p - std::log(1.0 + std::exp(q.to_double()))) < 1e-10);
    }
}

TEST_CASE("equilibrium states from Perron vectors") {
    MarkovMeasure uniform = equilibrium_state(full2(), zero());
    CHECK(uniform.edge_frequency(0, 0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(uniform.edge_frequency(1, 1) == doctest::Approx(0.25).epsilon(1e-10));

    MarkovMeasure parry = equilibrium_state(golden(), zero());
    CHECK(parry.integrate(ones()) ==
          doctest::Approx((5.0 - std::sqrt(5.0)) / 10.0).epsilon(1e-10));

    // Gibbs weights: potential q*(symbol-1) with q = ln 3 gives Bernoulli(1/4, 3/4)
    std::vector<Observable> cons{ones()};
    PressureEvaluation pe = evaluate_pressure(full2(), cons, {std::log(3.0)}, zero());
    CHECK(pe.equilibrium.stationary(1) == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(pe.equilibrium.transition(0, 1) == doctest::Approx(0.75).epsilon(1e-10));

    // variational identity: pressure = h + q * integral
    double lhs = pe.pressure;
    double rhs = pe.equilibrium.entropy() + std::log(3.0) * pe.gradient[0];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("average ranges by Karp") {
    ValueRange r1 = average_range(full2(), ones());
    CHECK(r1.lo == Rational(0));
    CHECK(r1.hi == Rational(1));

    ValueRange r2 = average_range(golden(), ones());
    CHECK(r2.lo == Rational(0));
    CHECK(r2.hi == Rational(1, 2));

    ValueRange r3 = average_range(golden(), Observable::indicator(2, {0, 0}));
    CHECK(r3.lo == Rational(0));
    CHECK(r3.hi == Rational(1));
}

TEST_CASE("Karp equals exhaustive cycle enumeration on random primitive digraphs") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 40; ++t) {
        SymbolicSystem sys = random_primitive(rng);
        Observable f = random_observable(rng, sys.alphabet_size(), (t % 2) + 1);
        ValueRange got = average_range(sys, f);
        auto [lo, hi] = cycle_range_bruteforce(EdgeMask::of(sys), f);
        CHECK(got.lo == lo);
        CHECK(got.hi == hi);
    }
}

TEST_CASE("constrained value closed forms on the full 2-shift") {
    ConstrainedResult half = constrained_value(full2(), {{ones(), Rational(1, 2)}}, zero());
    CHECK(half.converged);
    CHECK(half.value == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    ConstrainedResult quarter = constrained_value(full2(), {{ones(), Rational(1, 4)}}, zero());
    CHECK(quarter.value == doctest::Approx(Hb(0.25)).epsilon(1e-9));
    CHECK(quarter.value == doctest::Approx(0.562335).epsilon(1e-5));
    CHECK(quarter.measure.integrate(ones()) == doctest::Approx(0.25).epsilon(1e-8));

    // two pinned constraints force iid(0.4): entropy 0.673012
    ConstrainedResult joint = constrained_value(
        full2(), {{ones(), Rational(2, 5)}, {ind11(), Rational(4, 25)}}, zero());
    CHECK(joint.value == doctest::Approx(Hb(0.4)).epsilon(1e-8));
    CHECK(joint.value == doctest::Approx(0.673012).epsilon(1e-5));

    // objective potential: sup{h + integral(ones)} at integral(ones) = 1/2
    ConstrainedResult with_obj =
        constrained_value(full2(), {{ones(), Rational(1, 2)}}, ones());
    CHECK(with_obj.value == doctest::Approx(std::log(2.0) + 0.5).epsilon(1e-10));
}

TEST_CASE("boundary targets take the critical-subgraph path") {
    // average 0 on the full shift: only the fixed point 0^inf, entropy 0
    ConstrainedResult zero_level = constrained_value(full2(), {{ones(), Rational(0)}}, zero());
    CHECK(zero_level.boundary_reduced);
    CHECK(zero_level.value == doctest::Approx(0.0));
    CHECK(zero_level.measure.stationary(0) == doctest::Approx(1.0));

    // average 1/2 on the golden mean: the 01-cycle, entropy 0
    ConstrainedResult gm_half = constrained_value(golden(), {{ones(), Rational(1, 2)}}, zero());
    CHECK(gm_half.boundary_reduced);
    CHECK(gm_half.value == doctest::Approx(0.0));
    CHECK(gm_half.measure.edge_frequency(0, 1) == doctest::Approx(0.5).epsilon(1e-10));

    // pinned 11-frequency 0 on the full shift restricts to the golden mean
    ConstrainedResult no11 = constrained_value(
        full2(), {{ind11(), Rational(0)}, {ones(), Rational(2, 5)}}, zero());
    CHECK(no11.boundary_reduced);
    CHECK(no11.value == doctest::Approx(0.6 * Hb(2.0 / 3.0)).epsilon(1e-8));
    CHECK(no11.value == doctest::Approx(0.381908).epsilon(1e-5));
}

TEST_CASE("degenerate and infeasible constraints") {
    Observable constant = Observable::constant(2, Rational(3, 7));
    ConstrainedResult ok = constrained_value(full2(), {{constant, Rational(3, 7)}}, zero());
    CHECK(ok.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(constrained_value(full2(), {{constant, Rational(1, 2)}}, zero()),
                    Infeasible);

    CHECK_THROWS_AS(constrained_value(full2(), {{ones(), Rational(3, 2)}}, zero()), Infeasible);
    CHECK_THROWS_AS(constrained_value(golden(), {{ones(), Rational(3, 5)}}, zero()), Infeasible);
    // contradictory duplicated observable
    CHECK_THROWS_AS(constrained_value(
                        full2(), {{ones(), Rational(1, 2)}, {ones(), Rational(3, 10)}}, zero()),
                    Infeasible);
    // jointly infeasible interior targets: 11-frequency above the 1-frequency
    CHECK_THROWS_AS(constrained_value(
                        full2(), {{ones(), Rational(2, 5)}, {ind11(), Rational(1, 2)}}, zero()),
                    Infeasible);
}

TEST_CASE("dual gradient matches finite differences of the pressure") {
    std::vector<Observable> cons{ones(), ind11()};
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> q{-2.0 + 4.0 * static_cast<double>(rng() % 100) / 100.0,
                              -2.0 + 4.0 * static_cast<double>(rng() % 100) / 100.0};
        PressureEvaluation pe = evaluate_pressure(full2(), cons, q, zero());
        for (int c = 0; c < 2; ++c) {
            const double h = 1e-5;
            std::vector<double> qp = q, qm = q;
            qp[c] += h;
            qm[c] -= h;
            double fd = (evaluate_pressure(full2(), cons, qp, zero()).pressure -
                         evaluate_pressure(full2(), cons, qm, zero()).pressure) /
                        (2 * h);
            CHECK(std::abs(fd - pe.gradient[c]) < 1e-6);
        }
    }
}

TEST_CASE("pressure is convex in the dual variables") {
    std::vector<Observable> cons{ones(), ind11()};
    std::mt19937_64 rng(19);
    for (int t = 0; t < 5; ++t) {
        std::vector<double> q{-1.5 + 3.0 * static_cast<double>(rng() % 100) / 100.0,
                              -1.5 + 3.0 * static_cast<double>(rng() % 100) / 100.0};
        const double h = 1e-4;
        double hess[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                std::vector<double> qpp = q, qpm = q, qmp = q, qmm = q;
                qpp[a] += h, qpp[b] += h;
                qpm[a] += h, qpm[b] -= h;
                qmp[a] -= h, qmp[b] += h;
                qmm[a] -= h, qmm[b] -= h;
                hess[a][b] = (evaluate_pressure(full2(), cons, qpp, zero()).pressure -
                              evaluate_pressure(full2(), cons, qpm, zero()).pressure -
                              evaluate_pressure(full2(), cons, qmp, zero()).pressure +
                              evaluate_pressure(full2(), cons, qmm, zero()).pressure) /
                             (4 * h * h);
            }
        double tr = hess[0][0] + hess[1][1];
        double det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        CHECK(tr / 2 - disc >= -1e-6);  // smallest eigenvalue
    }
}

TEST_CASE("Legendre consistency and monotone dual gradient") {
    std::vector<Observable> cons{ones()};
    double prev_alpha = -1;
    for (double q = -3.0; q <= 3.0; q += 0.5) {
        PressureEvaluation pe = evaluate_pressure(full2(), cons, {q}, zero());
        double alpha = pe.gradient[0];
        CHECK(alpha > prev_alpha);  // monotone in q
        prev_alpha = alpha;
        long long num = std::llround(alpha * 1000000.0);
        Rational a(num, 1000000);
        ConstrainedResult cv = constrained_value(full2(), {{ones(), a}}, zero());
        // compare at the quantized target; the optimal q shifts by O(1e-6)
        // and the value by O(1e-12)
        CHECK(std::abs(cv.value - (pe.pressure - q * a.to_double())) < 1e-8);
    }
}

TEST_CASE("self-consistency of pressure evaluations on random systems") {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 10; ++t) {
        SymbolicSystem sys = random_primitive(rng, 5);
        Observable f = random_observable(rng, sys.alphabet_size(), 1);
        Observable g = random_observable(rng, sys.alphabet_size(), 2);
        std::vector<Observable> cons{f};
        double q = -1.0 + 2.0 * static_cast<double>(rng() % 100) / 100.0;
        PressureEvaluation pe = evaluate_pressure(sys, cons, {q}, g);
        double direct = pe.equilibrium.entropy() + pe.equilibrium.integrate(g) +
                        q * pe.gradient[0];
        CHECK(pe.pressure == doctest::Approx(direct).epsilon(1e-8));
    }
}
