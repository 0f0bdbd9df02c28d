#pragma once

#include <random>
#include <vector>

#include "birkhoff/observable.hpp"
#include "birkhoff/system.hpp"

namespace birkhoff {

// Stationary Markov measure supported on the allowed transitions of a system,
// represented by its depth-2 cylinder data (edge frequencies). Lossless for
// integrals of depth <= 2 observables and for entropy.
class MarkovMeasure {
  public:
    static MarkovMeasure from_transitions(const SymbolicSystem& sys,
                                          const std::vector<std::vector<double>>& rows);
    static MarkovMeasure from_edge_frequencies(const SymbolicSystem& sys,
                                               const std::vector<double>& edge_freq);
    // support is not checked against a system (internal use on edge masks,
    // which are subsets of validated systems by construction)
    static MarkovMeasure from_edge_frequencies(int alphabet_size,
                                               const std::vector<double>& edge_freq);

    int alphabet_size() const { return alphabet_; }
    double edge_frequency(Symbol a, Symbol b) const { return edge_freq_[a * alphabet_ + b]; }
    double stationary(Symbol a) const { return stationary_[a]; }
    double transition(Symbol a, Symbol b) const { return transition_[a * alphabet_ + b]; }

    double entropy() const;  // nats
    double integrate(const Observable& f) const;

    // cylinder probabilities at the given depth, indexed lexicographically
    std::vector<double> marginal(int depth) const;

  private:
    MarkovMeasure() = default;
    static MarkovMeasure make_from_edges(int n, const std::vector<double>& edge_freq);
    void finish_from_edges(const SymbolicSystem* sys);

    int alphabet_ = 0;
    std::vector<double> edge_freq_;   // x_ij, row-major, sums to 1
    std::vector<double> stationary_;  // pi_i = sum_j x_ij
    std::vector<double> transition_;  // P_ij = x_ij / pi_i (rows of zero-mass states uniform)
};

// Finite convex combination of stationary Markov measures. Entropy and
// integrals are affine in the weights.
class MarkovMixtureMeasure {
  public:
    MarkovMixtureMeasure(std::vector<std::pair<double, MarkovMeasure>> components);
    MarkovMixtureMeasure(const MarkovMeasure& single);  // weight-1 mixture

    const std::vector<std::pair<double, MarkovMeasure>>& components() const {
        return components_;
    }
    int alphabet_size() const { return components_.front().second.alphabet_size(); }

    double entropy() const;
    double integrate(const Observable& f) const;
    std::vector<double> marginal(int depth) const;

  private:
    std::vector<std::pair<double, MarkovMeasure>> components_;
};

double markov_entropy(const MarkovMixtureMeasure& m);
double integrate(const MarkovMixtureMeasure& m, const Observable& f);

MarkovMixtureMeasure convex_combine(const std::vector<MarkovMixtureMeasure>& measures,
                                    const std::vector<double>& weights);

// Sliding-window cylinder frequencies of a finite word.
struct EmpiricalMeasure {
    int alphabet_size = 0;
    int depth = 0;
    std::vector<double> frequencies;  // size alphabet^depth, lex-indexed
};

EmpiricalMeasure empirical_measure(const Word& w, int depth, int alphabet_size);
EmpiricalMeasure to_empirical(const MarkovMixtureMeasure& m, int depth);

// Weak* distance between two cylinder-frequency vectors at a common depth L:
// sum over the fixed dense family of cylinder indicators (enumerated by depth
// 1..L, lexicographic within each depth, j starting at 1) of
// 2^{-j} |p(cyl_j) - q(cyl_j)|. Always in [0, 2].
double weakstar_distance(const EmpiricalMeasure& p, const EmpiricalMeasure& q);

// Deterministic sample of a stationary Markov path (start from the stationary
// distribution, walk by rows); inverse-CDF draws from the given engine.
Word sample_path(const MarkovMeasure& m, long long length, std::mt19937_64& rng);

}  // namespace birkhoff
