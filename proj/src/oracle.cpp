#include "birkhoff/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace birkhoff {

namespace {

BigInt count_words_sft(const SymbolicSystem& sys, long long n) {
    const int k = sys.alphabet_size();
    std::vector<BigInt> cur(k, BigInt(1));
    for (long long step = 1; step < n; ++step) {
        std::vector<BigInt> next(k, BigInt(0));
        for (Symbol s = 0; s < k; ++s) {
            if (cur[s] == 0) continue;
            for (Symbol t = 0; t < k; ++t)
                if (sys.allows(s, t)) next[t] += cur[s];
        }
        cur = std::move(next);
    }
    BigInt total = 0;
    for (const BigInt& c : cur) total += c;
    return total;
}

// Follower automaton of the truncated expansion b: state = length of the
// longest suffix of the word that is a prefix of b. Reading d in state j:
// d == b[j] advances, d > b[j] kills the word, d < b[j] falls back through
// the KMP failure chain (a larger digit along the chain also kills it).
struct BetaAutomaton {
    std::vector<int> fail;
    const Word& b;

    explicit BetaAutomaton(const Word& expansion) : b(expansion) {
        const int depth = static_cast<int>(b.size());
        fail.assign(depth + 1, 0);
        int k = 0;
        for (int j = 1; j < depth; ++j) {
            while (k > 0 && b[j] != b[k]) k = fail[k];
            if (b[j] == b[k]) ++k;
            fail[j + 1] = k;
        }
    }

    // next state, or -1 when the word becomes inadmissible
    int step(int state, Symbol d) const {
        int j = state;
        for (;;) {
            if (d == b[j]) return j + 1;
            if (d > b[j]) return -1;
            if (j == 0) return 0;
            j = fail[j];
        }
    }
};

BigInt count_words_beta(const SymbolicSystem& sys, long long n) {
    if (n > sys.expansion_depth())
        throw WordTooLong("word length exceeds the stored expansion depth");
    const int depth = sys.expansion_depth();
    const int alphabet = sys.alphabet_size();
    BetaAutomaton automaton(sys.beta_expansion());
    std::vector<BigInt> cur(depth + 1, BigInt(0));
    cur[0] = 1;
    for (long long step = 0; step < n; ++step) {
        std::vector<BigInt> next(depth + 1, BigInt(0));
        for (int j = 0; j <= depth; ++j) {
            if (cur[j] == 0) continue;
            for (Symbol d = 0; d < alphabet; ++d) {
                int to = automaton.step(j, d);
                if (to >= 0) next[to] += cur[j];
            }
        }
        cur = std::move(next);
    }
    BigInt total = 0;
    for (const BigInt& c : cur) total += c;
    return total;
}

}  // namespace

BigInt count_words(const SymbolicSystem& sys, long long n) {
    if (n < 1) throw InvalidInput("word length must be positive");
    if (sys.kind() == SystemKind::Beta) return count_words_beta(sys, n);
    return count_words_sft(sys, n);
}

BigInt count_level_words(const SymbolicSystem& sys, const Observable& f, const Rational& lo,
                         const Rational& hi, long long n, bool serial_reference) {
    std::vector<LatticeWindow> windows{{f, lo, hi}};
    return count_level_words(sys, windows, n, serial_reference);
}

BigInt count_level_words(const SymbolicSystem& sys, const std::vector<LatticeWindow>& windows,
                         long long n, bool serial_reference) {
    if (serial_reference) return lattice_count_serial(sys, windows, n);
    return lattice_count(sys, windows, n);
}

double pressure_of_set_estimate(const SymbolicSystem& sys, const Observable& psi,
                                const std::vector<LatticeWindow>& windows, long long n) {
    return lattice_weighted_rate(sys, psi, windows, n);
}

double pressure_of_set_estimate(const SymbolicSystem& sys, const Observable& psi,
                                const Observable& f, const Rational& lo, const Rational& hi,
                                long long n) {
    std::vector<LatticeWindow> windows{{f, lo, hi}};
    return lattice_weighted_rate(sys, psi, windows, n);
}

BigInt CountTable::total() const {
    BigInt t = 0;
    for (const auto& [state, c] : counts) t += c;
    return t;
}

CountTable count_table(const SymbolicSystem& sys, const Observable& f, long long n) {
    if (n < 1) throw InvalidInput("word length must be positive");
    if (!sys.is_shift_of_finite_type())
        throw InvalidInput("count tables run on full shifts and SFTs only");
    if (f.depth() > 2) throw DepthMismatch("observable depth exceeds 2; recode first");
    const int k = sys.alphabet_size();

    std::map<std::pair<Symbol, long long>, BigInt> cur;
    for (Symbol s = 0; s < k; ++s)
        cur[{s, f.depth() == 1 ? f.scaled_at(static_cast<std::size_t>(s)) : 0}] += 1;
    for (long long step = 1; step < n; ++step) {
        std::map<std::pair<Symbol, long long>, BigInt> next;
        for (const auto& [state, cnt] : cur) {
            auto [s, sum] = state;
            for (Symbol t = 0; t < k; ++t) {
                if (!sys.allows(s, t)) continue;
                long long inc;
                if (f.depth() == 1) {
                    inc = f.scaled_at(static_cast<std::size_t>(t));
                } else {
                    Symbol e[2] = {s, t};
                    inc = f.scaled_at(f.rank(e));
                }
                next[{t, sum + inc}] += cnt;
            }
        }
        cur = std::move(next);
    }
    CountTable table;
    table.n = n;
    table.counts = std::move(cur);
    return table;
}

MistakeFunction MistakeFunction::theta_over_log(double theta) {
    if (theta < 0) throw InvalidInput("mistake function parameter must be non-negative");
    return {Kind::ThetaOverLog, theta};
}

long long MistakeFunction::operator()(long long n) const {
    if (n < 0) throw InvalidInput("mistake function argument must be non-negative");
    switch (kind) {
        case Kind::Zero:
            return 0;
        case Kind::ThetaOverLog: {
            double denom = std::max(1.0, std::log(static_cast<double>(n)));
            return static_cast<long long>(std::floor(theta * static_cast<double>(n) / denom));
        }
    }
    return 0;
}

void MistakeFunction::validate_on(long long horizon) const {
    long long prev = 0;
    for (long long n = 1; n <= horizon; ++n) {
        long long g = (*this)(n);
        if (g < prev) throw InvalidInput("mistake function is not monotone on the horizon");
        prev = g;
    }
    if (horizon >= 100) {
        double tail = static_cast<double>((*this)(horizon)) / static_cast<double>(horizon);
        double head = static_cast<double>((*this)(horizon / 10)) /
                      static_cast<double>(horizon / 10);
        if (tail > head + 1e-12 && tail > 0.5)
            throw InvalidInput("mistake function does not look sublinear on the horizon");
    }
}

bool bowen_ball_membership(const Word& x, const Word& y, long long n, double eps,
                           const MistakeFunction& g) {
    if (eps <= 0.5 || eps >= 1.0)
        throw InvalidInput("eps must lie in (1/2, 1), the coordinatewise regime");
    if (static_cast<long long>(x.size()) < n || static_cast<long long>(y.size()) < n)
        throw WordTooShort("both words must have at least n symbols");
    long long mismatches = 0;
    for (long long i = 0; i < n; ++i)
        if (x[i] != y[i]) ++mismatches;
    return mismatches <= g(n);
}

namespace {

constexpr int kExhaustiveCap = 20;
constexpr std::size_t kCliqueCandidateCap = 2000;
constexpr unsigned long long kEnumerationCap = 1ull << 22;

template <typename Fn>
void enumerate_admissible(const SymbolicSystem& sys, int n, unsigned long long cap, Fn&& fn) {
    Word cur;
    unsigned long long seen = 0;
    bool stop = false;
    auto dfs = [&](auto&& self) -> void {
        if (stop) return;
        if (static_cast<int>(cur.size()) == n) {
            ++seen;
            if (!fn(cur) || seen >= cap) stop = true;
            return;
        }
        for (Symbol s = 0; s < sys.alphabet_size() && !stop; ++s) {
            if (!cur.empty() && sys.is_shift_of_finite_type() && !sys.allows(cur.back(), s))
                continue;
            cur.push_back(s);
            if (sys.kind() == SystemKind::Beta && !sys.is_admissible(cur)) {
                cur.pop_back();
                continue;
            }
            self(self);
            cur.pop_back();
        }
    };
    dfs(dfs);
}

int hamming(const Word& a, const Word& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++d;
    return d;
}

// branch-and-bound maximum clique with greedy-coloring bounds
struct CliqueSolver {
    const std::vector<std::vector<bool>>& adj;
    int best = 0;

    explicit CliqueSolver(const std::vector<std::vector<bool>>& a) : adj(a) {}

    void expand(std::vector<int>& candidates, int size) {
        if (candidates.empty()) {
            best = std::max(best, size);
            return;
        }
        // greedy coloring upper bound; vertices ordered by color
        std::vector<int> color(candidates.size());
        std::vector<int> order;
        order.reserve(candidates.size());
        {
            std::vector<std::vector<int>> classes;
            for (int v : candidates) {
                bool placed = false;
                for (std::size_t c = 0; c < classes.size() && !placed; ++c) {
                    bool ok = true;
                    for (int u : classes[c]) ok = ok && !adj[u][v];
                    if (ok) {
                        classes[c].push_back(v);
                        placed = true;
                    }
                }
                if (!placed) classes.push_back({v});
            }
            for (std::size_t c = 0; c < classes.size(); ++c)
                for (int v : classes[c]) {
                    order.push_back(v);
                    color[order.size() - 1] = static_cast<int>(c) + 1;
                }
        }
        for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
            if (size + color[i] <= best) return;
            int v = order[i];
            std::vector<int> next;
            for (int j = 0; j < i; ++j)
                if (adj[v][order[j]]) next.push_back(order[j]);
            expand(next, size + 1);
        }
    }
};

}  // namespace

SeparatedCount count_separated(const SymbolicSystem& sys, const EmpiricalMeasure& center,
                               double radius, double delta, int n, double eps,
                               SeparatedMode mode) {
    if (eps <= 0.5 || eps >= 1.0)
        throw InvalidInput("eps must lie in (1/2, 1), the coordinatewise regime");
    if (delta < 0 || delta > 1) throw InvalidInput("delta must lie in [0, 1]");
    if (n < center.depth) throw WordTooShort("n must be at least the empirical depth");
    if (mode == SeparatedMode::Exact && n > kExhaustiveCap)
        throw ExhaustiveTooLarge("exact mode is capped at n = 20; use the greedy mode");

    const int m = static_cast<int>(std::ceil(delta * n));
    auto in_ball = [&](const Word& w) {
        if (radius >= 2.0) return true;  // the whole space: distances never exceed 2
        EmpiricalMeasure e = empirical_measure(w, center.depth, center.alphabet_size);
        return weakstar_distance(e, center) < radius;
    };

    if (mode == SeparatedMode::GreedyLowerBound) {
        std::vector<Word> chosen;
        bool truncated = false;
        enumerate_admissible(sys, n, kEnumerationCap, [&](const Word& w) {
            if (!in_ball(w)) return true;
            for (const Word& c : chosen)
                if (hamming(c, w) < m) return true;
            chosen.push_back(w);
            return true;
        });
        (void)truncated;
        return {chosen.size(), false};
    }

    if (m <= 1) {
        // distinct words differ somewhere; the count is |X_{n,F}|
        unsigned long long count = 0;
        enumerate_admissible(sys, n, kEnumerationCap, [&](const Word& w) {
            if (in_ball(w)) ++count;
            return true;
        });
        return {count, true};
    }

    std::vector<Word> candidates;
    enumerate_admissible(sys, n, kEnumerationCap, [&](const Word& w) {
        if (in_ball(w)) candidates.push_back(w);
        return true;
    });
    if (candidates.size() > kCliqueCandidateCap)
        throw ExhaustiveTooLarge("too many candidate words for the exact clique search");

    std::vector<std::vector<bool>> adj(candidates.size(),
                                       std::vector<bool>(candidates.size(), false));
    for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            bool sep = hamming(candidates[i], candidates[j]) >= m;
            adj[i][j] = adj[j][i] = sep;
        }
    CliqueSolver solver(adj);
    std::vector<int> all(candidates.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    solver.expand(all, 0);
    return {static_cast<unsigned long long>(solver.best), true};
}

}  // namespace birkhoff
