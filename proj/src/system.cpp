#include "birkhoff/system.hpp"

#include <algorithm>
#include <deque>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace birkhoff {

namespace {

constexpr int kMaxAlphabet = 64;  // adjacency rows are single 64-bit masks

// Minimal m with A^m entrywise positive, or 0 if none up to the bound.
// The search bound n^2 covers the Wielandt bound (n-1)^2 + 1.
int minimal_positive_power(const std::vector<std::uint64_t>& adj, int n) {
    const std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
    std::vector<std::uint64_t> power = adj;
    for (int m = 1; m <= n * n; ++m) {
        bool all = true;
        for (int i = 0; i < n; ++i) all = all && (power[i] == full);
        if (all) return m;
        std::vector<std::uint64_t> next(n, 0);
        for (int i = 0; i < n; ++i) {
            std::uint64_t acc = 0;
            std::uint64_t row = power[i];
            while (row) {
                int j = __builtin_ctzll(row);
                row &= row - 1;
                acc |= adj[j];
            }
            next[i] = acc;
        }
        power = std::move(next);
    }
    return 0;
}

void check_degrees(const std::vector<std::uint64_t>& adj, int n) {
    std::uint64_t incoming = 0;
    for (int i = 0; i < n; ++i) {
        if (adj[i] == 0)
            throw NonPrimitive("symbol " + std::to_string(i) + " has no outgoing transition");
        incoming |= adj[i];
    }
    for (int i = 0; i < n; ++i)
        if (!((incoming >> i) & 1u))
            throw NonPrimitive("symbol " + std::to_string(i) + " has no incoming transition");
}

bool suffix_leq(const Word& b, int from, const Word& limit) {
    // b[from..] <= limit[0..] lexicographically, compared over the suffix length
    for (std::size_t j = 0; from + static_cast<int>(j) < static_cast<int>(b.size()); ++j) {
        if (b[from + j] < limit[j]) return true;
        if (b[from + j] > limit[j]) return false;
    }
    return true;
}

}  // namespace

SymbolicSystem SymbolicSystem::full_shift(int alphabet_size) {
    if (alphabet_size <= 0) throw EmptyAlphabet();
    if (alphabet_size > kMaxAlphabet)
        throw InvalidInput("alphabet size exceeds the supported maximum of 64");
    SymbolicSystem s;
    s.kind_ = SystemKind::Full;
    s.alphabet_ = alphabet_size;
    const std::uint64_t full =
        (alphabet_size == 64) ? ~0ull : ((1ull << alphabet_size) - 1);
    s.adjacency_.assign(alphabet_size, full);
    s.gap_ = 1;
    return s;
}

SymbolicSystem SymbolicSystem::sft(int alphabet_size,
                                   const std::vector<std::pair<Symbol, Symbol>>& allowed) {
    if (alphabet_size <= 0) throw EmptyAlphabet();
    if (alphabet_size > kMaxAlphabet)
        throw InvalidInput("alphabet size exceeds the supported maximum of 64");
    SymbolicSystem s;
    s.kind_ = SystemKind::Sft;
    s.alphabet_ = alphabet_size;
    s.adjacency_.assign(alphabet_size, 0);
    for (auto [a, b] : allowed) {
        if (a < 0 || a >= alphabet_size || b < 0 || b >= alphabet_size)
            throw InvalidInput("transition references a symbol outside the alphabet");
        s.adjacency_[a] |= (1ull << b);
    }
    check_degrees(s.adjacency_, alphabet_size);
    s.gap_ = minimal_positive_power(s.adjacency_, alphabet_size);
    if (s.gap_ == 0)
        throw NonPrimitive("transition matrix is not primitive (system is not mixing)");
    return s;
}

SymbolicSystem SymbolicSystem::beta(Word expansion, int expansion_depth) {
    if (expansion.empty() || expansion_depth <= 0)
        throw BadBetaExpansion("empty beta expansion");
    if (static_cast<int>(expansion.size()) != expansion_depth)
        throw BadBetaExpansion("expansion_depth must equal the expansion length");
    if (expansion[0] < 1) throw BadBetaExpansion("expansion of 1 must start with a digit >= 1");
    const int alphabet = expansion[0] + 1;
    for (Symbol d : expansion)
        if (d < 0 || d >= alphabet)
            throw BadBetaExpansion("digit outside the alphabet determined by the leading digit");
    // Parry self-admissibility of the expansion itself
    for (std::size_t k = 1; k < expansion.size(); ++k)
        if (!suffix_leq(expansion, static_cast<int>(k), expansion))
            throw BadBetaExpansion("expansion violates self-admissibility at offset " +
                                   std::to_string(k));
    SymbolicSystem s;
    s.kind_ = SystemKind::Beta;
    s.alphabet_ = alphabet;
    s.beta_expansion_ = std::move(expansion);
    s.expansion_depth_ = expansion_depth;
    return s;
}

std::vector<std::pair<Symbol, Symbol>> SymbolicSystem::edges() const {
    std::vector<std::pair<Symbol, Symbol>> out;
    for (int i = 0; i < alphabet_; ++i)
        for (int j = 0; j < alphabet_; ++j)
            if (allows(i, j)) out.emplace_back(i, j);
    return out;
}

TransitionGap SymbolicSystem::transition_gap() const {
    if (kind_ == SystemKind::Beta)
        throw InvalidInput("transition gap is defined for full shifts and SFTs only");
    return TransitionGap{gap_};
}

bool SymbolicSystem::is_admissible(const Word& w) const {
    if (kind_ == SystemKind::Beta) return beta_admissible(*this, w);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i] < 0 || w[i] >= alphabet_) return false;
        if (!allows(w[i], w[i + 1])) return false;
    }
    if (!w.empty() && (w.back() < 0 || w.back() >= alphabet_)) return false;
    return true;
}

std::string SymbolicSystem::describe() const {
    switch (kind_) {
        case SystemKind::Full:
            return "full shift on " + std::to_string(alphabet_) + " symbols";
        case SystemKind::Sft:
            return "SFT on " + std::to_string(alphabet_) + " symbols, gap " +
                   std::to_string(gap_);
        case SystemKind::Beta:
            return "beta-shift, alphabet " + std::to_string(alphabet_) + ", depth " +
                   std::to_string(expansion_depth_);
    }
    return "";
}

SymbolicSystem validate_system(const RawSystem& raw) {
    if (raw.kind == "full") return SymbolicSystem::full_shift(raw.alphabet_size);
    if (raw.kind == "sft") return SymbolicSystem::sft(raw.alphabet_size, raw.transitions);
    if (raw.kind == "beta") return SymbolicSystem::beta(raw.beta_expansion, raw.expansion_depth);
    throw InvalidInput("unknown system kind '" + raw.kind + "'");
}

Word connector_word(const SymbolicSystem& sys, Symbol from, Symbol to) {
    if (!sys.is_shift_of_finite_type())
        throw InvalidInput("connector words are defined for full shifts and SFTs only");
    const int n = sys.alphabet_size();
    if (from < 0 || from >= n || to < 0 || to >= n)
        throw InvalidInput("connector endpoint outside the alphabet");
    if (sys.allows(from, to)) return {};

    // distance from each symbol to `to`
    std::vector<int> dist(n, -1);
    dist[to] = 0;
    std::deque<Symbol> queue{to};
    while (!queue.empty()) {
        Symbol v = queue.front();
        queue.pop_front();
        for (Symbol u = 0; u < n; ++u)
            if (sys.allows(u, v) && dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    // smallest-symbol greedy walk along shortest paths
    Word w;
    Symbol cur = from;
    int remaining = 0;
    for (Symbol s = 0; s < n; ++s)
        if (sys.allows(from, s) && dist[s] >= 0 && (remaining == 0 || dist[s] + 1 < remaining))
            remaining = dist[s] + 1;
    while (remaining > 1) {
        for (Symbol s = 0; s < n; ++s) {
            if (sys.allows(cur, s) && dist[s] == remaining - 1) {
                w.push_back(s);
                cur = s;
                --remaining;
                break;
            }
        }
    }
    return w;
}

Symbol Recoding::symbol_of(const Word& block) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), block);
    if (it == blocks.end() || *it != block)
        throw InvalidInput("block is not an admissible recoded symbol");
    return static_cast<Symbol>(it - blocks.begin());
}

Word Recoding::expand(const Word& recoded) const {
    if (recoded.empty()) return {};
    Word out = blocks[recoded[0]];
    for (std::size_t i = 1; i < recoded.size(); ++i)
        out.push_back(blocks[recoded[i]].back());
    return out;
}

Recoding higher_block_recode(const SymbolicSystem& sys, int k) {
    if (!sys.is_shift_of_finite_type())
        throw InvalidInput("higher-block recoding is defined for full shifts and SFTs only");
    if (k < 2) throw InvalidInput("recoding block length must be at least 2");
    const int m = k - 1;

    // admissible m-words in lex order
    std::vector<Word> blocks;
    Word cur;
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == m) {
            blocks.push_back(cur);
            return;
        }
        for (Symbol s = 0; s < sys.alphabet_size(); ++s) {
            if (!cur.empty() && !sys.allows(cur.back(), s)) continue;
            cur.push_back(s);
            self(self, depth + 1);
            cur.pop_back();
        }
    };
    dfs(dfs, 0);

    if (static_cast<int>(blocks.size()) > kMaxAlphabet)
        throw InvalidInput("recoded alphabet exceeds the supported maximum of 64");

    std::vector<std::pair<Symbol, Symbol>> edges;
    for (std::size_t a = 0; a < blocks.size(); ++a) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            bool overlap = true;
            for (int i = 0; i + 1 < m; ++i)
                overlap = overlap && blocks[a][i + 1] == blocks[b][i];
            if (overlap && sys.allows(blocks[a][m - 1], blocks[b][m - 1]))
                edges.emplace_back(static_cast<Symbol>(a), static_cast<Symbol>(b));
        }
    }

    return Recoding{SymbolicSystem::sft(static_cast<int>(blocks.size()), edges),
                    std::move(blocks), k};
}

bool beta_admissible(const SymbolicSystem& sys, const Word& w) {
    if (sys.kind() != SystemKind::Beta)
        throw InvalidInput("beta admissibility requires a beta system");
    if (static_cast<int>(w.size()) > sys.expansion_depth())
        throw WordTooLong("word longer than the stored expansion depth");
    const Word& b = sys.beta_expansion();
    for (std::size_t i = 0; i < w.size(); ++i) {
        // compare w[i..] against the expansion prefix
        for (std::size_t j = 0; i + j < w.size(); ++j) {
            if (w[i + j] < b[j]) break;
            if (w[i + j] > b[j]) return false;
        }
    }
    return true;
}

namespace {

using BigRational = boost::multiprecision::cpp_rational;

// sign of a + b*beta where beta = (p + sqrt(p^2+4q))/2
int sign_linear_in_beta(const BigRational& a, const BigRational& b, long long p, long long q) {
    if (b == 0) return a == 0 ? 0 : (a < 0 ? -1 : 1);
    // a + b*beta >= 0  <=>  beta >= -a/b (b>0)  or  beta <= -a/b (b<0)
    BigRational r = -a / b;
    // compare beta with r: beta - r has the sign of sqrt(D) - (2r - p)
    BigRational t = 2 * r - p;
    BigRational d = BigRational(p) * p + 4 * BigRational(q);
    int cmp;  // sign of beta - r
    if (t < 0) {
        cmp = 1;
    } else {
        BigRational diff = d - t * t;
        cmp = diff == 0 ? 0 : (diff < 0 ? -1 : 1);
    }
    if (b < 0) cmp = -cmp;
    if (cmp != 0) return cmp;
    return 0;
}

}  // namespace

Word quasi_greedy_expansion_quadratic(long long p, long long q, int depth) {
    if (depth <= 0) throw InvalidInput("expansion depth must be positive");
    // beta = (p + sqrt(p^2+4q))/2 must be a real number > 1
    const double disc = static_cast<double>(p) * p + 4.0 * static_cast<double>(q);
    if (disc <= 0) throw InvalidInput("x^2 = p x + q has no real root");
    const double beta_approx = (p + std::sqrt(disc)) / 2.0;
    if (beta_approx <= 1.0) throw InvalidInput("beta must exceed 1");

    // greedy expansion of 1: x_0 = 1, d_i = floor(beta * x_{i-1}), x_i = beta x_{i-1} - d_i,
    // carried out on exact coefficients of 1 and beta (beta^2 = p beta + q)
    std::vector<Symbol> greedy;
    BigRational a = 1, b = 0;  // value = a + b*beta
    const int digit_cap = static_cast<int>(beta_approx) + 1;
    bool finite = false;
    for (int i = 0; i < depth && !finite; ++i) {
        // multiply by beta
        BigRational na = BigRational(q) * b;
        BigRational nb = a + BigRational(p) * b;
        a = na, b = nb;
        int d = digit_cap;
        while (d > 0 && sign_linear_in_beta(a - d, b, p, q) < 0) --d;
        greedy.push_back(d);
        a -= d;
        finite = (b == 0 && a == 0) || sign_linear_in_beta(a, b, p, q) == 0;
    }

    Word out;
    out.reserve(depth);
    if (finite) {
        // finite greedy expansion d_1..d_m: quasi-greedy is (d_1..d_{m-1}(d_m - 1))^inf
        Word period(greedy.begin(), greedy.end());
        period.back() -= 1;
        for (int i = 0; i < depth; ++i) out.push_back(period[i % period.size()]);
    } else {
        out = greedy;
    }
    return out;
}

Word quasi_greedy_expansion_decimal(const std::string& beta, int depth) {
    using Real = boost::multiprecision::cpp_dec_float_100;
    if (depth <= 0) throw InvalidInput("expansion depth must be positive");
    Real b(beta);
    if (b <= 1) throw InvalidInput("beta must exceed 1");
    std::vector<Symbol> greedy;
    Real x = 1;
    // termination threshold: decimal inputs carry limited precision, and the
    // residual error grows by a factor beta per digit
    const Real eps = Real("1e-30");
    bool finite = false;
    for (int i = 0; i < depth && !finite; ++i) {
        x *= b;
        auto d = static_cast<long long>(x);  // truncation = floor for x >= 0
        greedy.push_back(static_cast<Symbol>(d));
        x -= d;
        finite = x < eps;
    }
    Word out;
    out.reserve(depth);
    if (finite) {
        Word period(greedy.begin(), greedy.end());
        period.back() -= 1;
        for (int i = 0; i < depth; ++i) out.push_back(period[i % period.size()]);
    } else {
        out = greedy;
    }
    return out;
}

}  // namespace birkhoff
