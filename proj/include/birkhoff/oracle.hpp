#pragma once

#include <map>
#include <utility>
#include <vector>

#include "birkhoff/bigint.hpp"
#include "birkhoff/lattice_dp.hpp"
#include "birkhoff/measure.hpp"
#include "birkhoff/observable.hpp"
#include "birkhoff/rational.hpp"
#include "birkhoff/system.hpp"

namespace birkhoff {

// Exact number of admissible n-words: vector DP on the transition matrix for
// SFTs, Parry-criterion automaton DP for beta systems (n <= expansion depth).
BigInt count_words(const SymbolicSystem& sys, long long n);

// Exact count of admissible n-words whose Birkhoff average of f lies in
// [lo, hi]; big-integer lattice DP. Set `serial_reference` to run the
// map-based reference kernel instead of the flat OpenMP one.
BigInt count_level_words(const SymbolicSystem& sys, const Observable& f, const Rational& lo,
                         const Rational& hi, long long n, bool serial_reference = false);

// Joint windows on several observables simultaneously (the counting side of
// the pinned-level formulas).
BigInt count_level_words(const SymbolicSystem& sys, const std::vector<LatticeWindow>& windows,
                         long long n, bool serial_reference = false);

// (1/n) ln sum_{w in window} exp(S_n psi(w)); locally constant psi makes the
// per-cylinder supremum exact. Empty `windows` means the whole space.
double pressure_of_set_estimate(const SymbolicSystem& sys, const Observable& psi,
                                const std::vector<LatticeWindow>& windows, long long n);
double pressure_of_set_estimate(const SymbolicSystem& sys, const Observable& psi,
                                const Observable& f, const Rational& lo, const Rational& hi,
                                long long n);

// Final distribution of (last symbol, scaled Birkhoff sum) over all
// admissible n-words; total always equals count_words(sys, n).
struct CountTable {
    long long n = 0;
    std::map<std::pair<Symbol, long long>, BigInt> counts;

    BigInt total() const;
};

CountTable count_table(const SymbolicSystem& sys, const Observable& f, long long n);

// Mistake function family g(n): monotone in n, sublinear. The epsilon
// argument of the abstract definition is dropped: these families are
// epsilon-uniform.
struct MistakeFunction {
    enum class Kind { Zero, ThetaOverLog };

    Kind kind = Kind::Zero;
    double theta = 0;

    static MistakeFunction zero() { return {Kind::Zero, 0}; }
    static MistakeFunction theta_over_log(double theta);

    long long operator()(long long n) const;
    // checks monotonicity and g(n)/n -> 0 numerically up to the horizon
    void validate_on(long long horizon) const;
};

// y lies in the (g; n, eps)-Bowen ball around x: coordinate mismatches among
// the first n entries number at most g(n). Requires eps in (1/2, 1), where
// eps-separation is exactly coordinate disagreement.
bool bowen_ball_membership(const Word& x, const Word& y, long long n, double eps,
                           const MistakeFunction& g);

enum class SeparatedMode { Exact, GreedyLowerBound };

struct SeparatedCount {
    unsigned long long count = 0;
    bool exact = true;
};

// Maximal (delta, n, eps)-separated subset of the admissible n-words whose
// depth-`center.depth` empirical measure lies within `radius` of `center`
// (weak* distance, strict). Exact via exhaustive enumeration and, when
// ceil(delta*n) >= 2, branch-and-bound maximum clique; greedy mode returns a
// flagged lower bound.
SeparatedCount count_separated(const SymbolicSystem& sys, const EmpiricalMeasure& center,
                               double radius, double delta, int n, double eps,
                               SeparatedMode mode = SeparatedMode::Exact);

}  // namespace birkhoff
