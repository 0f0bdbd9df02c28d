#include "birkhoff/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace birkhoff {

namespace {

std::size_t power_size(int alphabet, int depth) {
    std::size_t n = 1;
    for (int i = 0; i < depth; ++i) {
        n *= static_cast<std::size_t>(alphabet);
        if (n > (1u << 26))
            throw InvalidInput("observable table too large (alphabet^depth)");
    }
    return n;
}

// enumerate admissible depth-words of an SFT/full system
template <typename Fn>
void for_each_admissible(const SymbolicSystem& sys, int depth, Fn&& fn) {
    Word cur;
    auto dfs = [&](auto&& self) -> void {
        if (static_cast<int>(cur.size()) == depth) {
            fn(cur);
            return;
        }
        for (Symbol s = 0; s < sys.alphabet_size(); ++s) {
            if (!cur.empty() && sys.is_shift_of_finite_type() &&
                !sys.allows(cur.back(), s))
                continue;
            cur.push_back(s);
            if (!sys.is_shift_of_finite_type() && !sys.is_admissible(cur)) {
                cur.pop_back();
                continue;
            }
            self(self);
            cur.pop_back();
        }
    };
    dfs(dfs);
}

}  // namespace

Observable::Observable(int alphabet_size, int depth, std::vector<Rational> table)
    : alphabet_(alphabet_size), depth_(depth), table_(std::move(table)) {
    if (alphabet_ <= 0) throw EmptyAlphabet();
    if (depth_ <= 0) throw InvalidInput("observable depth must be positive");
    if (table_.size() != power_size(alphabet_, depth_))
        throw InvalidInput("observable table size must be alphabet^depth");
    long long d = 1;
    for (const auto& v : table_) {
        long long g = std::gcd(d, v.den());
        __int128 nd = static_cast<__int128>(d) / g * v.den();
        if (nd > INT64_MAX) throw ArithmeticOverflow("common denominator overflow");
        d = static_cast<long long>(nd);
    }
    den_ = d;
    scaled_.reserve(table_.size());
    for (const auto& v : table_) scaled_.push_back(v.num() * (den_ / v.den()));
}

Observable Observable::from_entries(const SymbolicSystem& sys, int depth,
                                    const std::vector<std::pair<Word, Rational>>& entries) {
    std::size_t n = power_size(sys.alphabet_size(), depth);
    std::vector<Rational> table(n, Rational(0));
    std::vector<bool> given(n, false);
    Observable probe(sys.alphabet_size(), depth, table);  // for rank()
    for (const auto& [w, v] : entries) {
        if (static_cast<int>(w.size()) != depth)
            throw InvalidInput("observable entry word length must equal the depth");
        for (Symbol s : w)
            if (s < 0 || s >= sys.alphabet_size())
                throw InvalidInput("observable entry uses a symbol outside the alphabet");
        std::size_t r = probe.rank(w.data());
        table[r] = v;
        given[r] = true;
    }
    for_each_admissible(sys, depth, [&](const Word& w) {
        std::size_t r = probe.rank(w.data());
        if (!given[r])
            throw InvalidInput("observable is missing a value for an admissible word");
    });
    return Observable(sys.alphabet_size(), depth, std::move(table));
}

Observable Observable::indicator(int alphabet_size, const Word& pattern) {
    if (pattern.empty()) throw InvalidInput("indicator pattern must be non-empty");
    int depth = static_cast<int>(pattern.size());
    std::size_t n = power_size(alphabet_size, depth);
    std::vector<Rational> table(n, Rational(0));
    std::size_t r = 0;
    for (Symbol s : pattern) {
        if (s < 0 || s >= alphabet_size)
            throw InvalidInput("indicator pattern uses a symbol outside the alphabet");
        r = r * alphabet_size + static_cast<std::size_t>(s);
    }
    table[r] = Rational(1);
    return Observable(alphabet_size, depth, std::move(table));
}

Observable Observable::constant(int alphabet_size, const Rational& value) {
    return Observable(alphabet_size, 1,
                      std::vector<Rational>(static_cast<std::size_t>(alphabet_size), value));
}

std::size_t Observable::rank(const Symbol* w) const {
    std::size_t r = 0;
    for (int i = 0; i < depth_; ++i) r = r * alphabet_ + static_cast<std::size_t>(w[i]);
    return r;
}

Rational Observable::value(const Word& w, std::size_t pos) const {
    if (pos + depth_ > w.size()) throw WordTooShort("window exceeds word length");
    return table_[rank(w.data() + pos)];
}

Rational Observable::min_value(const SymbolicSystem& sys) const {
    bool first = true;
    Rational best;
    for_each_admissible(sys, depth_, [&](const Word& w) {
        const Rational& v = table_[rank(w.data())];
        if (first || v < best) best = v;
        first = false;
    });
    if (first) throw InvalidInput("system has no admissible word at this depth");
    return best;
}

Rational Observable::max_value(const SymbolicSystem& sys) const {
    bool first = true;
    Rational best;
    for_each_admissible(sys, depth_, [&](const Word& w) {
        const Rational& v = table_[rank(w.data())];
        if (first || best < v) best = v;
        first = false;
    });
    if (first) throw InvalidInput("system has no admissible word at this depth");
    return best;
}

bool Observable::same_table(const Observable& other) const {
    return alphabet_ == other.alphabet_ && depth_ == other.depth_ && table_ == other.table_;
}

Observable Observable::promote(int new_depth) const {
    if (new_depth < depth_) throw InvalidInput("cannot promote to a smaller depth");
    if (new_depth == depth_) return *this;
    std::size_t n = power_size(alphabet_, new_depth);
    std::size_t tail = 1;
    for (int i = 0; i < depth_; ++i) tail *= alphabet_;
    std::vector<Rational> table(n);
    for (std::size_t r = 0; r < n; ++r) table[r] = table_[r % tail];
    return Observable(alphabet_, new_depth, std::move(table));
}

Observable linear_combination(const std::vector<std::pair<Rational, Observable>>& terms) {
    if (terms.empty()) throw InvalidInput("linear combination needs at least one term");
    int alphabet = terms[0].second.alphabet_size();
    int depth = 1;
    for (const auto& [c, f] : terms) {
        if (f.alphabet_size() != alphabet)
            throw DepthMismatch("linear combination over mismatched alphabets");
        depth = std::max(depth, f.depth());
    }
    std::size_t n = 1;
    for (int i = 0; i < depth; ++i) n *= static_cast<std::size_t>(alphabet);
    std::vector<Rational> table(n, Rational(0));
    for (const auto& [c, f] : terms) {
        Observable g = f.promote(depth);
        for (std::size_t r = 0; r < n; ++r) table[r] += c * g.value_at(r);
    }
    return Observable(alphabet, depth, std::move(table));
}

long long birkhoff_sum_scaled(const Word& w, const Observable& f) {
    const int k = f.depth();
    if (static_cast<int>(w.size()) < k)
        throw WordTooShort("word shorter than the observable depth");
    long long sum = 0;
    for (std::size_t i = 0; i + k <= w.size(); ++i) sum += f.scaled_at(f.rank(w.data() + i));
    return sum;
}

Rational birkhoff_average(const Word& w, const Observable& f) {
    const int k = f.depth();
    if (static_cast<int>(w.size()) < k)
        throw WordTooShort("word shorter than the observable depth");
    long long windows = static_cast<long long>(w.size()) - k + 1;
    long long sum = birkhoff_sum_scaled(w, f);
    // sum/(D*windows); den fits: D*windows <= 2^62 guarded by Rational
    __int128 den = static_cast<__int128>(f.common_denominator()) * windows;
    if (den > INT64_MAX) throw ArithmeticOverflow("birkhoff average denominator overflow");
    return Rational(sum, static_cast<long long>(den));
}

BirkhoffStats birkhoff_stats(const Word& w, const Observable& f,
                             const std::vector<long long>& checkpoints,
                             double burn_in_fraction) {
    const int k = f.depth();
    if (checkpoints.empty()) throw BadCheckpoints("no checkpoints given");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < k)
            throw BadCheckpoints("checkpoint shorter than the observable depth");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw BadCheckpoints("checkpoints must be strictly increasing");
    }
    if (checkpoints.back() > static_cast<long long>(w.size()))
        throw BadCheckpoints("checkpoint beyond the word length");

    BirkhoffStats stats;
    stats.checkpoints = checkpoints;
    stats.window = static_cast<long long>(w.size());
    stats.averages.reserve(checkpoints.size());

    const double d = static_cast<double>(f.common_denominator());
    long long sum = 0;
    std::size_t windows_done = 0;
    for (long long c : checkpoints) {
        std::size_t target = static_cast<std::size_t>(c) - k + 1;
        for (; windows_done < target; ++windows_done)
            sum += f.scaled_at(f.rank(w.data() + windows_done));
        stats.averages.push_back(static_cast<double>(sum) / (d * static_cast<double>(target)));
    }

    std::size_t burn = static_cast<std::size_t>(burn_in_fraction *
                                                static_cast<double>(checkpoints.size()));
    if (burn >= checkpoints.size()) burn = checkpoints.size() - 1;
    stats.liminf_estimate = *std::min_element(stats.averages.begin() + burn, stats.averages.end());
    stats.limsup_estimate = *std::max_element(stats.averages.begin() + burn, stats.averages.end());
    return stats;
}

}  // namespace birkhoff
