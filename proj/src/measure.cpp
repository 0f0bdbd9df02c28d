#include "birkhoff/measure.hpp"

#include <algorithm>
#include <cmath>

namespace birkhoff {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kStationaryTol = 1e-10;

// strongly connected components of the support graph, Tarjan
struct SccResult {
    std::vector<int> component;  // node -> scc id
    int count = 0;
};

SccResult strongly_connected(const std::vector<std::vector<int>>& out, int n) {
    SccResult res;
    res.component.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    int next_index = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, e] = frames.back();
            if (e < out[v].size()) {
                int w = out[v][e++];
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                if (low[v] == index[v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        res.component[w] = res.count;
                        if (w == v) break;
                    }
                    ++res.count;
                }
                int finished = v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
            }
        }
    }
    return res;
}

// Solve pi P = pi, sum(pi) = 1 restricted to the states of the unique
// recurrent class; Gaussian elimination on (P^T - I) with the normalization
// row substituted in.
std::vector<double> stationary_distribution(const std::vector<double>& p, int n) {
    std::vector<std::vector<int>> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p[i * n + j] > 0) out[i].push_back(j);
    SccResult scc = strongly_connected(out, n);
    std::vector<bool> exits(scc.count, false);
    for (int i = 0; i < n; ++i)
        for (int j : out[i])
            if (scc.component[i] != scc.component[j]) exits[scc.component[i]] = true;
    int recurrent = -1;
    for (int c = 0; c < scc.count; ++c) {
        if (exits[c]) continue;
        if (recurrent >= 0)
            throw BadMeasure("transition matrix has more than one recurrent class");
        recurrent = c;
    }
    std::vector<int> states;
    for (int i = 0; i < n; ++i)
        if (scc.component[i] == recurrent) states.push_back(i);
    const int m = static_cast<int>(states.size());

    // rows: (P^T - I) restricted, last row replaced by ones
    std::vector<double> a(m * (m + 1), 0.0);
    for (int r = 0; r < m - 1; ++r) {
        for (int c = 0; c < m; ++c)
            a[r * (m + 1) + c] = p[states[c] * n + states[r]] - (r == c ? 1.0 : 0.0);
    }
    for (int c = 0; c < m; ++c) a[(m - 1) * (m + 1) + c] = 1.0;
    a[(m - 1) * (m + 1) + m] = 1.0;

    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[r * (m + 1) + col]) > std::abs(a[pivot * (m + 1) + col])) pivot = r;
        if (std::abs(a[pivot * (m + 1) + col]) < 1e-14)
            throw BadMeasure("stationary distribution is numerically singular");
        for (int c = 0; c <= m; ++c) std::swap(a[col * (m + 1) + c], a[pivot * (m + 1) + c]);
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            double f = a[r * (m + 1) + col] / a[col * (m + 1) + col];
            if (f == 0) continue;
            for (int c = col; c <= m; ++c) a[r * (m + 1) + c] -= f * a[col * (m + 1) + c];
        }
    }
    std::vector<double> pi(n, 0.0);
    for (int r = 0; r < m; ++r) {
        double v = a[r * (m + 1) + m] / a[r * (m + 1) + r];
        pi[states[r]] = std::max(v, 0.0);
    }
    double total = 0;
    for (double v : pi) total += v;
    for (double& v : pi) v /= total;
    return pi;
}

}  // namespace

MarkovMeasure MarkovMeasure::from_transitions(const SymbolicSystem& sys,
                                              const std::vector<std::vector<double>>& rows) {
    const int n = sys.alphabet_size();
    if (static_cast<int>(rows.size()) != n)
        throw BadMeasure("transition matrix must have one row per symbol");
    std::vector<double> p(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw BadMeasure("transition matrix row has wrong length");
        double sum = 0;
        for (int j = 0; j < n; ++j) {
            double v = rows[i][j];
            if (v < 0) throw BadMeasure("negative transition probability");
            if (v > 0 && sys.is_shift_of_finite_type() && !sys.allows(i, j))
                throw BadMeasure("transition probability on a forbidden pair");
            p[i * n + j] = v;
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowTol)
            throw BadMeasure("transition matrix row does not sum to 1");
    }
    std::vector<double> pi = stationary_distribution(p, n);

    MarkovMeasure m;
    m.alphabet_ = n;
    m.transition_ = p;
    m.stationary_ = pi;
    m.edge_freq_.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.edge_freq_[i * n + j] = pi[i] * p[i * n + j];

    // pi P = pi within tolerance, by construction
    for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int i = 0; i < n; ++i) acc += pi[i] * p[i * n + j];
        if (std::abs(acc - pi[j]) > kStationaryTol)
            throw BadMeasure("stationary equation violated beyond tolerance");
    }
    return m;
}

MarkovMeasure MarkovMeasure::from_edge_frequencies(const SymbolicSystem& sys,
                                                   const std::vector<double>& edge_freq) {
    const int n = sys.alphabet_size();
    if (static_cast<int>(edge_freq.size()) != n * n)
        throw BadMeasure("edge frequency table must be alphabet^2");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (edge_freq[i * n + j] > 0 && sys.is_shift_of_finite_type() && !sys.allows(i, j))
                throw BadMeasure("edge frequency on a forbidden pair");
    MarkovMeasure m = make_from_edges(n, edge_freq);
    m.finish_from_edges(&sys);
    return m;
}

MarkovMeasure MarkovMeasure::from_edge_frequencies(int alphabet_size,
                                                   const std::vector<double>& edge_freq) {
    if (static_cast<int>(edge_freq.size()) != alphabet_size * alphabet_size)
        throw BadMeasure("edge frequency table must be alphabet^2");
    MarkovMeasure m = make_from_edges(alphabet_size, edge_freq);
    m.finish_from_edges(nullptr);
    return m;
}

MarkovMeasure MarkovMeasure::make_from_edges(int n, const std::vector<double>& edge_freq) {
    double total = 0;
    for (double v : edge_freq) {
        if (v < -1e-15) throw BadMeasure("negative edge frequency");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw BadMeasure("edge frequencies must sum to 1");
    MarkovMeasure m;
    m.alphabet_ = n;
    m.edge_freq_ = edge_freq;
    for (double& v : m.edge_freq_) v = std::max(v, 0.0) / total;
    return m;
}

void MarkovMeasure::finish_from_edges(const SymbolicSystem* sys) {
    const int n = alphabet_;
    stationary_.assign(n, 0.0);
    std::vector<double> col(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            stationary_[i] += edge_freq_[i * n + j];
            col[j] += edge_freq_[i * n + j];
        }
    for (int i = 0; i < n; ++i)
        if (std::abs(stationary_[i] - col[i]) > kStationaryTol)
            throw BadMeasure("edge frequencies are not stationary (row/column sums differ)");
    transition_.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (stationary_[i] > 0) {
            for (int j = 0; j < n; ++j)
                transition_[i * n + j] = edge_freq_[i * n + j] / stationary_[i];
        } else if (sys != nullptr && sys->is_shift_of_finite_type()) {
            // zero-mass state: any stochastic row supported on allowed pairs
            int deg = 0;
            for (int j = 0; j < n; ++j)
                if (sys->allows(i, j)) ++deg;
            for (int j = 0; j < n; ++j)
                if (sys->allows(i, j)) transition_[i * n + j] = 1.0 / deg;
        } else {
            transition_[i * n + i] = 1.0;
        }
    }
}

double MarkovMeasure::entropy() const {
    double h = 0;
    for (int i = 0; i < alphabet_; ++i)
        for (int j = 0; j < alphabet_; ++j) {
            double x = edge_freq_[i * alphabet_ + j];
            if (x > 0) h -= x * std::log(transition_[i * alphabet_ + j]);
        }
    return h;
}

double MarkovMeasure::integrate(const Observable& f) const {
    if (f.alphabet_size() != alphabet_)
        throw DepthMismatch("observable alphabet does not match the measure");
    if (f.depth() == 1) {
        double acc = 0;
        for (int j = 0; j < alphabet_; ++j) {
            Symbol s = j;
            acc += stationary_[j] * f.value_at(f.rank(&s)).to_double();
        }
        return acc;
    }
    if (f.depth() == 2) {
        double acc = 0;
        for (int i = 0; i < alphabet_; ++i)
            for (int j = 0; j < alphabet_; ++j) {
                double x = edge_freq_[i * alphabet_ + j];
                if (x == 0) continue;
                Symbol w[2] = {i, j};
                acc += x * f.value_at(f.rank(w)).to_double();
            }
        return acc;
    }
    throw DepthMismatch("integrate requires depth <= 2 (recode deeper observables)");
}

std::vector<double> MarkovMeasure::marginal(int depth) const {
    if (depth < 1) throw InvalidInput("marginal depth must be positive");
    std::size_t size = 1;
    for (int i = 0; i < depth; ++i) {
        size *= alphabet_;
        if (size > (1u << 26)) throw InvalidInput("marginal table too large");
    }
    std::vector<double> cur(alphabet_);
    for (int i = 0; i < alphabet_; ++i) cur[i] = stationary_[i];
    for (int d = 2; d <= depth; ++d) {
        std::size_t sz = cur.size() * alphabet_;
        std::vector<double> next(sz, 0.0);
        for (std::size_t r = 0; r < cur.size(); ++r) {
            if (cur[r] == 0) continue;
            int last = static_cast<int>(r % alphabet_);
            for (int j = 0; j < alphabet_; ++j)
                next[r * alphabet_ + j] = cur[r] * transition_[last * alphabet_ + j];
        }
        cur = std::move(next);
    }
    return cur;
}

MarkovMixtureMeasure::MarkovMixtureMeasure(
    std::vector<std::pair<double, MarkovMeasure>> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw BadWeights("mixture needs at least one component");
    double sum = 0;
    for (const auto& [w, m] : components_) {
        if (w < 0) throw BadWeights("mixture weights must be non-negative");
        if (m.alphabet_size() != components_.front().second.alphabet_size())
            throw BadWeights("mixture components over mismatched alphabets");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw BadWeights("mixture weights must sum to 1");
}

MarkovMixtureMeasure::MarkovMixtureMeasure(const MarkovMeasure& single)
    : components_{{1.0, single}} {}

double MarkovMixtureMeasure::entropy() const {
    double h = 0;
    for (const auto& [w, m] : components_) h += w * m.entropy();
    return h;
}

double MarkovMixtureMeasure::integrate(const Observable& f) const {
    double acc = 0;
    for (const auto& [w, m] : components_) acc += w * m.integrate(f);
    return acc;
}

std::vector<double> MarkovMixtureMeasure::marginal(int depth) const {
    std::vector<double> out;
    for (const auto& [w, m] : components_) {
        std::vector<double> part = m.marginal(depth);
        if (out.empty()) out.assign(part.size(), 0.0);
        for (std::size_t i = 0; i < part.size(); ++i) out[i] += w * part[i];
    }
    return out;
}

double markov_entropy(const MarkovMixtureMeasure& m) { return m.entropy(); }

double integrate(const MarkovMixtureMeasure& m, const Observable& f) { return m.integrate(f); }

MarkovMixtureMeasure convex_combine(const std::vector<MarkovMixtureMeasure>& measures,
                                    const std::vector<double>& weights) {
    if (measures.size() != weights.size() || measures.empty())
        throw BadWeights("convex_combine needs matching non-empty measures and weights");
    double sum = 0;
    for (double w : weights) {
        if (w < 0) throw BadWeights("combination weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw BadWeights("combination weights must sum to 1");
    std::vector<std::pair<double, MarkovMeasure>> flat;
    for (std::size_t i = 0; i < measures.size(); ++i)
        for (const auto& [w, m] : measures[i].components())
            if (weights[i] * w > 0) flat.emplace_back(weights[i] * w, m);
    if (flat.empty()) flat.emplace_back(1.0, measures.front().components().front().second);
    // renormalize away accumulated rounding
    double total = 0;
    for (auto& [w, m] : flat) total += w;
    for (auto& [w, m] : flat) w /= total;
    return MarkovMixtureMeasure(std::move(flat));
}

EmpiricalMeasure empirical_measure(const Word& w, int depth, int alphabet_size) {
    if (depth < 1) throw InvalidInput("empirical depth must be positive");
    if (static_cast<int>(w.size()) < depth)
        throw WordTooShort("word shorter than the empirical depth");
    std::size_t size = 1;
    for (int i = 0; i < depth; ++i) {
        size *= alphabet_size;
        if (size > (1u << 26)) throw InvalidInput("empirical table too large");
    }
    EmpiricalMeasure e;
    e.alphabet_size = alphabet_size;
    e.depth = depth;
    e.frequencies.assign(size, 0.0);
    const std::size_t windows = w.size() - depth + 1;
    std::size_t r = 0;
    const std::size_t mod = size / alphabet_size;
    for (int i = 0; i < depth; ++i) r = r * alphabet_size + static_cast<std::size_t>(w[i]);
    e.frequencies[r] += 1.0;
    for (std::size_t i = depth; i < w.size(); ++i) {
        r = (r % mod) * alphabet_size + static_cast<std::size_t>(w[i]);
        e.frequencies[r] += 1.0;
    }
    for (double& f : e.frequencies) f /= static_cast<double>(windows);
    return e;
}

EmpiricalMeasure to_empirical(const MarkovMixtureMeasure& m, int depth) {
    EmpiricalMeasure e;
    e.alphabet_size = m.alphabet_size();
    e.depth = depth;
    e.frequencies = m.marginal(depth);
    return e;
}

double weakstar_distance(const EmpiricalMeasure& p, const EmpiricalMeasure& q) {
    if (p.alphabet_size != q.alphabet_size || p.depth != q.depth)
        throw DepthMismatch("weak* distance requires a common alphabet and depth");
    const int k = p.alphabet_size;
    const int L = p.depth;

    // depth-l marginals for l = 1..L from the depth-L vectors
    std::vector<std::vector<double>> pm(L + 1), qm(L + 1);
    pm[L] = p.frequencies;
    qm[L] = q.frequencies;
    for (int l = L - 1; l >= 1; --l) {
        std::size_t sz = pm[l + 1].size() / k;
        pm[l].assign(sz, 0.0);
        qm[l].assign(sz, 0.0);
        for (std::size_t r = 0; r < pm[l + 1].size(); ++r) {
            pm[l][r / k] += pm[l + 1][r];
            qm[l][r / k] += qm[l + 1][r];
        }
    }

    double dist = 0;
    double weight = 1.0;  // 2^{-j}, j starting at 1
    for (int l = 1; l <= L; ++l) {
        for (std::size_t r = 0; r < pm[l].size(); ++r) {
            weight *= 0.5;
            dist += weight * std::abs(pm[l][r] - qm[l][r]);
        }
    }
    return dist;
}

Word sample_path(const MarkovMeasure& m, long long length, std::mt19937_64& rng) {
    if (length <= 0) return {};
    const int n = m.alphabet_size();
    auto draw = [&](auto probe) -> Symbol {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double acc = 0;
        for (int j = 0; j < n; ++j) {
            acc += probe(j);
            if (u < acc) return j;
        }
        // numerical slack: fall back to the last positive entry
        for (int j = n - 1; j >= 0; --j)
            if (probe(j) > 0) return j;
        return 0;
    };
    Word w;
    w.reserve(length);
    w.push_back(draw([&](int j) { return m.stationary(j); }));
    for (long long i = 1; i < length; ++i) {
        Symbol prev = w.back();
        w.push_back(draw([&](int j) { return m.transition(prev, j); }));
    }
    return w;
}

}  // namespace birkhoff
