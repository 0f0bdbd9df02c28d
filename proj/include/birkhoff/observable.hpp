#pragma once

#include <vector>

#include "birkhoff/rational.hpp"
#include "birkhoff/system.hpp"

namespace birkhoff {

// Locally constant rational-valued function of finite depth k: a value for
// every k-word over the alphabet (entries on inadmissible words are inert).
// A common denominator D and D-scaled integer values are precomputed so that
// Birkhoff sums live on an exact integer lattice.
class Observable {
  public:
    Observable(int alphabet_size, int depth, std::vector<Rational> table);

    // every admissible k-word must appear; missing inadmissible words get 0
    static Observable from_entries(const SymbolicSystem& sys, int depth,
                                   const std::vector<std::pair<Word, Rational>>& entries);
    static Observable indicator(int alphabet_size, const Word& pattern);
    static Observable constant(int alphabet_size, const Rational& value);

    int depth() const { return depth_; }
    int alphabet_size() const { return alphabet_; }
    long long common_denominator() const { return den_; }

    std::size_t table_size() const { return table_.size(); }
    std::size_t rank(const Symbol* w) const;

    const Rational& value_at(std::size_t rank) const { return table_[rank]; }
    Rational value(const Word& w, std::size_t pos = 0) const;
    long long scaled_at(std::size_t rank) const { return scaled_[rank]; }

    // extremes over the admissible k-words of `sys`
    Rational min_value(const SymbolicSystem& sys) const;
    Rational max_value(const SymbolicSystem& sys) const;

    bool same_table(const Observable& other) const;

    // value table of `this` re-expressed at a deeper depth (reads the last
    // `depth()` symbols of each window); integrals are unchanged
    Observable promote(int new_depth) const;

  private:
    int alphabet_;
    int depth_;
    std::vector<Rational> table_;
    long long den_;                  // common denominator D
    std::vector<long long> scaled_;  // D * value, exact integers
};

// sum c_i * f_i at the maximum of the depths, exact
Observable linear_combination(const std::vector<std::pair<Rational, Observable>>& terms);

// Exact Birkhoff average over all n-k+1 full windows of w.
Rational birkhoff_average(const Word& w, const Observable& f);

// Unnormalized window sum scaled by the common denominator (integer lattice).
long long birkhoff_sum_scaled(const Word& w, const Observable& f);

struct BirkhoffStats {
    std::vector<long long> checkpoints;
    std::vector<double> averages;
    double liminf_estimate = 0;
    double limsup_estimate = 0;
    long long window = 0;  // evaluation horizon (word length)
};

// Running averages at the checkpoint prefix lengths; liminf/limsup estimates
// are the min/max of the averages past the burn-in fraction of checkpoints.
BirkhoffStats birkhoff_stats(const Word& w, const Observable& f,
                             const std::vector<long long>& checkpoints,
                             double burn_in_fraction = 0.1);

}  // namespace birkhoff
