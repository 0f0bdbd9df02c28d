#include "birkhoff/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace birkhoff {

namespace {

constexpr long long kPowerIterationCap = 1000000;

void require_sft(const SymbolicSystem& sys, const char* what) {
    if (!sys.is_shift_of_finite_type())
        throw InvalidInput(std::string(what) + " is defined for full shifts and SFTs only");
}

void require_edge_observable(int n, const Observable& f) {
    if (f.alphabet_size() != n)
        throw DepthMismatch("observable alphabet does not match the system");
    if (f.depth() > 2)
        throw DepthMismatch("depth exceeds 2; recode the system and observables first");
}

// log-weights on edges: depth-1 potentials contribute f(j) (columnwise)
std::vector<double> edge_log_weights(int n, const Observable& f) {
    require_edge_observable(n, f);
    std::vector<double> w(n * n, 0.0);
    for (Symbol i = 0; i < n; ++i)
        for (Symbol j = 0; j < n; ++j) {
            if (f.depth() == 1) {
                w[i * n + j] = f.value_at(static_cast<std::size_t>(j)).to_double();
            } else {
                Symbol e[2] = {i, j};
                w[i * n + j] = f.value_at(f.rank(e)).to_double();
            }
        }
    return w;
}

struct IntWeights {
    std::vector<long long> w;  // D-scaled integer weight per edge
    long long den = 1;
};

IntWeights integer_edge_weights(int n, const Observable& f) {
    require_edge_observable(n, f);
    IntWeights iw;
    iw.den = f.common_denominator();
    iw.w.assign(n * n, 0);
    for (Symbol i = 0; i < n; ++i)
        for (Symbol j = 0; j < n; ++j) {
            if (f.depth() == 1) {
                iw.w[i * n + j] = f.scaled_at(static_cast<std::size_t>(j));
            } else {
                Symbol e[2] = {i, j};
                iw.w[i * n + j] = f.scaled_at(f.rank(e));
            }
        }
    return iw;
}

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

// Karp: minimum mean cycle, exact on the D-scaled integer lattice. A virtual
// super-source reaches every vertex, so the formula covers restricted masks.
Rational karp_min_mean(const EdgeMask& mask, const IntWeights& iw) {
    const int n = mask.n;
    const int steps = n + 1;
    std::vector<std::vector<long long>> d(steps + 1, std::vector<long long>(n, kInf));
    for (int v = 0; v < n; ++v) d[0][v] = 0;  // super-source edges of weight 0
    for (int k = 1; k <= steps; ++k) {
        for (int u = 0; u < n; ++u) {
            if (d[k - 1][u] == kInf) continue;
            std::uint64_t row = mask.rows[u];
            while (row) {
                int v = __builtin_ctzll(row);
                row &= row - 1;
                long long cand = d[k - 1][u] + iw.w[u * n + v];
                if (cand < d[k][v]) d[k][v] = cand;
            }
        }
    }
    bool found = false;
    long long best_num = 0;
    int best_den = 1;  // mean = best_num / (best_den * D)
    for (int v = 0; v < n; ++v) {
        if (d[steps][v] == kInf) continue;
        long long num = 0;
        int den = 1;
        bool have = false;
        for (int k = 0; k < steps; ++k) {
            if (d[k][v] == kInf) continue;
            long long cnum = d[steps][v] - d[k][v];
            int cden = steps - k;
            if (!have || static_cast<__int128>(cnum) * den > static_cast<__int128>(num) * cden) {
                num = cnum;
                den = cden;
                have = true;
            }
        }
        if (!have) continue;
        if (!found ||
            static_cast<__int128>(num) * best_den < static_cast<__int128>(best_num) * den) {
            best_num = num;
            best_den = den;
            found = true;
        }
    }
    if (!found) throw InvalidInput("graph has no cycle; mean cycle undefined");
    return Rational(best_num, static_cast<long long>(best_den) * iw.den);
}

Rational karp_extreme(const EdgeMask& mask, const IntWeights& iw, bool maximize) {
    if (!maximize) return karp_min_mean(mask, iw);
    IntWeights neg = iw;
    for (long long& x : neg.w) x = -x;
    return -karp_min_mean(mask, neg);
}

struct PowerResult {
    double lambda = 0;
    std::vector<double> vec;
    int iterations = 0;
    bool converged = false;
};

// Collatz-Wielandt power iteration (two-sided bounds, unshifted). Returns an
// unconverged result instead of throwing: near-periodic matrices stall here
// and are handled by the squaring/inverse-iteration fallback below.
PowerResult collatz_iterate(const std::vector<double>& m, int n, const std::vector<int>& nodes,
                            bool transpose, double tol, int cap) {
    PowerResult res;
    const std::size_t sz = nodes.size();
    std::vector<double> v(sz, 1.0 / static_cast<double>(sz));
    std::vector<double> w(sz);
    for (int it = 1; it <= cap; ++it) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0, norm = 0;
        for (std::size_t a = 0; a < sz; ++a) {
            double acc = 0;
            for (std::size_t b = 0; b < sz; ++b) {
                double entry = transpose ? m[nodes[b] * n + nodes[a]] : m[nodes[a] * n + nodes[b]];
                acc += entry * v[b];
            }
            w[a] = acc;
            double ratio = acc / v[a];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            norm += acc;
        }
        res.iterations = it;
        if (norm == 0) break;  // no cycle through these nodes
        if (hi - lo <= tol * std::max(lo, 1e-300)) {
            res.lambda = 0.5 * (lo + hi);
            for (double& x : w) x /= norm;
            res.vec = w;
            res.converged = true;
            return res;
        }
        for (std::size_t a = 0; a < sz; ++a) v[a] = w[a] / norm;
    }
    return res;
}

// ln of the spectral radius by repeated squaring with renormalization:
// ln rho = sum_k 2^{-k} ln(norm_k) + 2^{-K} ln rho(B_K), and rho(B_K) is
// bracketed by its min/max row sums. Gap-independent.
double log_rho_by_squaring(const std::vector<double>& m, int n, const std::vector<int>& nodes) {
    const int sz = static_cast<int>(nodes.size());
    std::vector<double> b(sz * sz);
    double top = 0;
    for (int a = 0; a < sz; ++a)
        for (int c = 0; c < sz; ++c) top = std::max(top, m[nodes[a] * n + nodes[c]]);
    if (top == 0) throw InvalidInput("spectral radius of an empty component");
    double acc = std::log(top);
    for (int a = 0; a < sz; ++a)
        for (int c = 0; c < sz; ++c) b[a * sz + c] = m[nodes[a] * n + nodes[c]] / top;

    std::vector<double> sq(sz * sz);
    double weight = 1.0;
    for (int k = 1; k <= 50; ++k) {
        weight *= 0.5;
        double norm = 0;
        for (int a = 0; a < sz; ++a)
            for (int c = 0; c < sz; ++c) {
                double accu = 0;
                for (int e = 0; e < sz; ++e) accu += b[a * sz + e] * b[e * sz + c];
                sq[a * sz + c] = accu;
                norm = std::max(norm, accu);
            }
        if (norm == 0) throw InvalidInput("component is nilpotent; no cycle");
        for (double& x : sq) x /= norm;
        std::swap(b, sq);
        acc += weight * std::log(norm);
    }
    double rs_min = std::numeric_limits<double>::infinity(), rs_max = 0;
    for (int a = 0; a < sz; ++a) {
        double rs = 0;
        for (int c = 0; c < sz; ++c) rs += b[a * sz + c];
        rs_min = std::min(rs_min, rs);
        rs_max = std::max(rs_max, rs);
    }
    rs_min = std::max(rs_min, 1e-300);
    return acc + weight * 0.5 * (std::log(rs_min) + std::log(rs_max));
}

// Perron vector by inverse iteration at a slightly shifted accurate lambda.
std::vector<double> inverse_iteration(const std::vector<double>& m, int n,
                                      const std::vector<int>& nodes, double lambda,
                                      bool transpose) {
    const int sz = static_cast<int>(nodes.size());
    if (sz == 1) return {1.0};
    for (double offset : {1e-6, 1e-4, 1e-2}) {
        double shifted = lambda * (1.0 + offset);
        // LU factorization of (M - shifted I) with partial pivoting
        std::vector<double> lu(sz * sz);
        for (int a = 0; a < sz; ++a)
            for (int c = 0; c < sz; ++c) {
                double entry = transpose ? m[nodes[c] * n + nodes[a]] : m[nodes[a] * n + nodes[c]];
                lu[a * sz + c] = entry - (a == c ? shifted : 0.0);
            }
        std::vector<int> piv(sz);
        bool singular = false;
        for (int col = 0; col < sz && !singular; ++col) {
            int p = col;
            for (int r = col + 1; r < sz; ++r)
                if (std::abs(lu[r * sz + col]) > std::abs(lu[p * sz + col])) p = r;
            piv[col] = p;
            if (std::abs(lu[p * sz + col]) < 1e-300) {
                singular = true;
                break;
            }
            if (p != col)
                for (int c = 0; c < sz; ++c) std::swap(lu[col * sz + c], lu[p * sz + c]);
            for (int r = col + 1; r < sz; ++r) {
                double f = lu[r * sz + col] / lu[col * sz + col];
                lu[r * sz + col] = f;
                for (int c = col + 1; c < sz; ++c) lu[r * sz + c] -= f * lu[col * sz + c];
            }
        }
        if (singular) continue;

        std::vector<double> v(sz, 1.0);
        for (int it = 0; it < 200; ++it) {
            // solve (M - shifted I) x = v in place
            std::vector<double> x = v;
            for (int col = 0; col < sz; ++col) {
                if (piv[col] != col) std::swap(x[col], x[piv[col]]);
                for (int r = col + 1; r < sz; ++r) x[r] -= lu[r * sz + col] * x[col];
            }
            for (int r = sz - 1; r >= 0; --r) {
                for (int c = r + 1; c < sz; ++c) x[r] -= lu[r * sz + c] * x[c];
                x[r] /= lu[r * sz + r];
            }
            double norm = 0;
            for (double e : x) norm = std::max(norm, std::abs(e));
            if (norm == 0) break;
            double sign = 0;
            for (double e : x) sign += e;
            double scale = (sign < 0 ? -norm : norm);
            for (double& e : x) e /= scale;
            v = x;
            // residual check against the unshifted matrix
            double resid = 0, vmax = 0;
            for (int a = 0; a < sz; ++a) {
                double acc = 0;
                for (int c = 0; c < sz; ++c) {
                    double entry =
                        transpose ? m[nodes[c] * n + nodes[a]] : m[nodes[a] * n + nodes[c]];
                    acc += entry * v[c];
                }
                resid = std::max(resid, std::abs(acc - lambda * v[a]));
                vmax = std::max(vmax, std::abs(v[a]));
            }
            if (resid <= 1e-10 * std::max(lambda, 1e-300) * vmax) {
                double total = 0;
                for (double& e : v) {
                    e = std::max(e, 0.0);
                    total += e;
                }
                if (total > 0) {
                    for (double& e : v) e /= total;
                    return v;
                }
            }
        }
    }
    throw NoConvergence("inverse iteration failed to produce a Perron vector");
}

struct SccPerron {
    double log_rho = 0;
    std::vector<double> left, right;
    int iterations = 0;
};

constexpr int kCollatzCap = 5000;

SccPerron solve_scc(const std::vector<double>& m, int n, const std::vector<int>& nodes,
                    bool need_vectors) {
    SccPerron out;
    PowerResult right = collatz_iterate(m, n, nodes, false, 1e-13, kCollatzCap);
    out.iterations = right.iterations;
    if (right.converged) {
        out.log_rho = std::log(right.lambda);
        if (need_vectors) {
            out.right = right.vec;
            PowerResult left = collatz_iterate(m, n, nodes, true, 1e-13, kCollatzCap);
            out.iterations += left.iterations;
            if (left.converged) {
                out.left = left.vec;
                return out;
            }
            out.left = inverse_iteration(m, n, nodes, right.lambda, true);
        }
        return out;
    }
    out.log_rho = log_rho_by_squaring(m, n, nodes);
    if (need_vectors) {
        double lambda = std::exp(out.log_rho);
        out.right = inverse_iteration(m, n, nodes, lambda, false);
        out.left = inverse_iteration(m, n, nodes, lambda, true);
    }
    return out;
}

// scaled transfer entries exp(pot - pot_max) on mask edges
struct ScaledTransfer {
    std::vector<double> m;
    double log_scale = 0;
};

ScaledTransfer scaled_transfer(const EdgeMask& mask, const std::vector<double>& pot) {
    const int n = mask.n;
    double pmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask.allows(i, j)) pmax = std::max(pmax, pot[i * n + j]);
    if (!std::isfinite(pmax)) throw InvalidInput("edge mask has no edges");
    ScaledTransfer st;
    st.log_scale = pmax;
    st.m.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask.allows(i, j)) {
                double e = std::exp(pot[i * n + j] - pmax);
                if (e == 0)
                    throw NoConvergence("transfer entry underflowed; potential too extreme");
                st.m[i * n + j] = e;
            }
    return st;
}

std::vector<std::vector<int>> mask_sccs(const EdgeMask& mask) {
    const int n = mask.n;
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int next = 0, count = 0;
    struct Frame {
        int v;
        int edge;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, e] = frames.back();
            bool descended = false;
            while (e < n) {
                int w = e++;
                if (!mask.allows(v, w)) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                    if (w == v) break;
                }
                ++count;
            }
            int finished = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
        }
    }
    std::vector<std::vector<int>> groups(count);
    for (int v = 0; v < n; ++v) groups[comp[v]].push_back(v);
    return groups;
}

bool scc_has_edge(const EdgeMask& mask, const std::vector<int>& nodes) {
    for (int a : nodes)
        for (int b : nodes)
            if (mask.allows(a, b)) return true;
    return false;
}

double scc_shift(const std::vector<double>& m, int n, const std::vector<int>& nodes) {
    double mx = 0;
    for (int a : nodes) {
        double row = 0;
        for (int b : nodes) row += m[a * n + b];
        mx = std::max(mx, row);
    }
    return mx;
}

struct MaskPressure {
    double value = 0;
    std::vector<int> dominant;  // nodes of the SCC attaining the spectral radius
    ScaledTransfer st;
};

MaskPressure mask_pressure(const EdgeMask& mask, const std::vector<double>& pot) {
    MaskPressure out;
    out.st = scaled_transfer(mask, pot);
    const int n = mask.n;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& nodes : mask_sccs(mask)) {
        if (!scc_has_edge(mask, nodes)) continue;
        double shift = scc_shift(out.st.m, n, nodes);
        PowerResult pr = power_iterate(out.st.m, n, nodes, false, shift, 1e-13);
        double lam = std::log(pr.lambda) + out.st.log_scale;
        if (lam > best) {
            best = lam;
            out.dominant = nodes;
        }
    }
    if (out.dominant.empty()) throw InvalidInput("edge mask supports no cycle");
    out.value = best;
    return out;
}

MarkovMeasure equilibrium_from(const EdgeMask& mask, const MaskPressure& mp) {
    const int n = mask.n;
    const auto& nodes = mp.dominant;
    double shift = scc_shift(mp.st.m, n, nodes);
    PowerResult right = power_iterate(mp.st.m, n, nodes, false, shift, 1e-13);
    PowerResult left = power_iterate(mp.st.m, n, nodes, true, shift, 1e-13);
    std::vector<double> x(n * n, 0.0);
    double total = 0;
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = 0; b < nodes.size(); ++b) {
            double v = left.vec[a] * mp.st.m[nodes[a] * n + nodes[b]] * right.vec[b];
            x[nodes[a] * n + nodes[b]] = v;
            total += v;
        }
    for (double& v : x) v /= total;
    return MarkovMeasure::from_edge_frequencies(n, x);
}

// ---- dual solver ----

struct DualEvaluation {
    double dual = 0;  // pressure - q.a
    double pressure = 0;
    std::vector<double> gradient;  // integral phi_i - a_i
    MarkovMeasure measure;
};

struct DualProblem {
    const EdgeMask& mask;
    std::vector<std::vector<double>> constraint_edges;  // log-weight tables
    std::vector<double> targets;
    std::vector<const Observable*> constraint_obs;
    std::vector<double> objective_edges;

    DualEvaluation eval(const std::vector<double>& q) const {
        const int n = mask.n;
        std::vector<double> pot = objective_edges;
        for (std::size_t c = 0; c < constraint_edges.size(); ++c)
            for (int e = 0; e < n * n; ++e) pot[e] += q[c] * constraint_edges[c][e];
        MaskPressure mp = mask_pressure(mask, pot);
        MarkovMeasure mu = equilibrium_from(mask, mp);
        DualEvaluation de{mp.value, mp.value, {}, mu};
        de.gradient.resize(q.size());
        for (std::size_t c = 0; c < q.size(); ++c) {
            de.gradient[c] = mu.integrate(*constraint_obs[c]) - targets[c];
            de.dual -= q[c] * targets[c];
        }
        return de;
    }
};

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// solve H d = -g, small dense system; returns false when singular
bool solve_newton_step(std::vector<double> h, std::vector<double> g, std::vector<double>& d) {
    const int k = static_cast<int>(g.size());
    d.assign(k, 0.0);
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(h[r * k + col]) > std::abs(h[pivot * k + col])) pivot = r;
        if (std::abs(h[pivot * k + col]) < 1e-12) return false;
        for (int c = 0; c < k; ++c) std::swap(h[col * k + c], h[pivot * k + c]);
        std::swap(g[col], g[pivot]);
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = h[r * k + col] / h[col * k + col];
            if (f == 0) continue;
            for (int c = col; c < k; ++c) h[r * k + c] -= f * h[col * k + c];
            g[r] -= f * g[col];
        }
    }
    for (int i = 0; i < k; ++i) d[i] = -g[i] / h[i * k + i];
    return true;
}

ConstrainedResult solve_dual(const DualProblem& problem, const ThermoOptions& opt) {
    const int k = static_cast<int>(problem.targets.size());
    std::vector<double> q(k, 0.0);
    DualEvaluation cur = problem.eval(q);
    int iterations = 0;

    auto diverged = [&](const std::vector<double>& qq, double dual) {
        return inf_norm(qq) > opt.q_max || dual < opt.dual_floor;
    };

    auto hessian = [&](const std::vector<double>& qq) {
        std::vector<double> h(k * k, 0.0);
        for (int c = 0; c < k; ++c) {
            double step = opt.fd_step * std::max(1.0, std::abs(qq[c]));
            std::vector<double> qp = qq, qm = qq;
            qp[c] += step;
            qm[c] -= step;
            DualEvaluation ep = problem.eval(qp), em = problem.eval(qm);
            for (int r = 0; r < k; ++r)
                h[r * k + c] = (ep.gradient[r] - em.gradient[r]) / (2 * step);
        }
        for (int r = 0; r < k; ++r)
            for (int c = r + 1; c < k; ++c) {
                double s = 0.5 * (h[r * k + c] + h[c * k + r]);
                h[r * k + c] = h[c * k + r] = s;
            }
        return h;
    };

    // damped Newton
    for (int it = 0; it < opt.max_newton_iterations; ++it) {
        ++iterations;
        if (inf_norm(cur.gradient) <= opt.gradient_tol)
            return {cur.dual, q, cur.measure, true, iterations, false};
        if (diverged(q, cur.dual))
            throw Infeasible("dual diverged; target outside or on the boundary of the feasible set");
        std::vector<double> h = hessian(q);
        std::vector<double> d;
        bool ok = solve_newton_step(h, cur.gradient, d);
        if (ok) {
            double dn = inf_norm(d);
            if (dn > 10.0)  // trust region: keeps trial potentials representable
                for (double& x : d) x *= 10.0 / dn;
        }
        double slope = 0;
        if (ok)
            for (int c = 0; c < k; ++c) slope += cur.gradient[c] * d[c];
        if (!ok || slope >= 0) {
            d.assign(k, 0.0);
            for (int c = 0; c < k; ++c) d[c] = -cur.gradient[c];
            slope = 0;
            for (int c = 0; c < k; ++c) slope += cur.gradient[c] * d[c];
        }
        double t = 1.0;
        bool stepped = false;
        for (int half = 0; half < 60; ++half) {
            std::vector<double> qn = q;
            for (int c = 0; c < k; ++c) qn[c] += t * d[c];
            DualEvaluation en = problem.eval(qn);
            if (en.dual <= cur.dual + 1e-4 * t * slope) {
                q = qn;
                cur = en;
                stepped = true;
                break;
            }
            t *= 0.5;
        }
        if (!stepped) break;  // no progress at the smallest step: try the gradient phase
    }

    // gradient-descent fallback with a 1/L step
    std::vector<double> h = hessian(q);
    double lip = 0;
    for (int r = 0; r < k; ++r) {
        double row = 0;
        for (int c = 0; c < k; ++c) row += std::abs(h[r * k + c]);
        lip = std::max(lip, row);
    }
    double step = lip > 0 ? 1.0 / lip : 1.0;
    for (int it = 0; it < opt.max_gradient_iterations; ++it) {
        ++iterations;
        if (inf_norm(cur.gradient) <= opt.gradient_tol)
            return {cur.dual, q, cur.measure, true, iterations, false};
        if (diverged(q, cur.dual))
            throw Infeasible("dual diverged; target outside or on the boundary of the feasible set");
        std::vector<double> qn = q;
        for (int c = 0; c < k; ++c) qn[c] -= step * cur.gradient[c];
        DualEvaluation en = problem.eval(qn);
        if (en.dual <= cur.dual) {
            q = qn;
            cur = en;
        } else {
            step *= 0.5;
            if (step < 1e-18) break;
        }
    }
    if (inf_norm(cur.gradient) <= opt.gradient_tol)
        return {cur.dual, q, cur.measure, true, iterations, false};
    throw NoConvergence("dual optimization stalled after " + std::to_string(iterations) +
                        " iterations; gradient norm " + std::to_string(inf_norm(cur.gradient)));
}

}  // namespace

EdgeMask EdgeMask::of(const SymbolicSystem& sys) {
    require_sft(sys, "edge mask");
    EdgeMask m;
    m.n = sys.alphabet_size();
    m.rows.resize(m.n);
    for (int i = 0; i < m.n; ++i) m.rows[i] = sys.row_mask(i);
    return m;
}

bool EdgeMask::empty() const {
    for (auto r : rows)
        if (r) return false;
    return true;
}

std::vector<double> transfer_matrix(const SymbolicSystem& sys, const Observable& potential) {
    require_sft(sys, "transfer matrix");
    const int n = sys.alphabet_size();
    std::vector<double> pot = edge_log_weights(n, potential);
    std::vector<double> m(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (sys.allows(i, j)) m[i * n + j] = std::exp(pot[i * n + j]);
    return m;
}

double pressure(const SymbolicSystem& sys, const Observable& potential) {
    require_sft(sys, "pressure");
    return pressure_masked(EdgeMask::of(sys), potential);
}

MarkovMeasure equilibrium_state(const SymbolicSystem& sys, const Observable& potential) {
    require_sft(sys, "equilibrium state");
    return equilibrium_masked(EdgeMask::of(sys), potential);
}

double pressure_masked(const EdgeMask& mask, const Observable& potential) {
    return mask_pressure(mask, edge_log_weights(mask.n, potential)).value;
}

MarkovMeasure equilibrium_masked(const EdgeMask& mask, const Observable& potential) {
    MaskPressure mp = mask_pressure(mask, edge_log_weights(mask.n, potential));
    return equilibrium_from(mask, mp);
}

PressureEvaluation evaluate_pressure(const SymbolicSystem& sys,
                                     const std::vector<Observable>& constraints,
                                     const std::vector<double>& q,
                                     const Observable& objective) {
    require_sft(sys, "pressure evaluation");
    if (constraints.size() != q.size())
        throw InvalidInput("one dual variable per constraint observable required");
    EdgeMask mask = EdgeMask::of(sys);
    const int n = mask.n;
    std::vector<double> pot = edge_log_weights(n, objective);
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        std::vector<double> t = edge_log_weights(n, constraints[c]);
        for (int e = 0; e < n * n; ++e) pot[e] += q[c] * t[e];
    }
    MaskPressure mp = mask_pressure(mask, pot);
    MarkovMeasure mu = equilibrium_from(mask, mp);
    PressureEvaluation pe{q, mp.value, {}, mu};
    pe.gradient.reserve(constraints.size());
    for (const Observable& f : constraints) pe.gradient.push_back(mu.integrate(f));
    return pe;
}

ValueRange average_range(const SymbolicSystem& sys, const Observable& f) {
    require_sft(sys, "average range");
    return average_range_masked(EdgeMask::of(sys), f);
}

ValueRange average_range_masked(const EdgeMask& mask, const Observable& f) {
    IntWeights iw = integer_edge_weights(mask.n, f);
    return ValueRange{karp_extreme(mask, iw, false), karp_extreme(mask, iw, true)};
}

EdgeMask critical_edge_mask(const EdgeMask& mask, const Observable& f, bool maximize) {
    const int n = mask.n;
    IntWeights iw = integer_edge_weights(n, f);
    Rational extreme = karp_extreme(mask, iw, maximize);
    const long long p = extreme.num(), q = extreme.den();

    // s(e): cycle sums are <= 0, and exactly 0 on extreme-mean cycles
    std::vector<__int128> s(n * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask.allows(i, j)) {
                __int128 scaled = static_cast<__int128>(q) * iw.w[i * n + j] -
                                  static_cast<__int128>(p) * iw.den;
                s[i * n + j] = maximize ? scaled : -scaled;
            }

    constexpr __int128 kNegInf = -(static_cast<__int128>(1) << 100);
    std::vector<__int128> longest(n * n, kNegInf);  // max-weight walk of length >= 1
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask.allows(i, j)) longest[i * n + j] = s[i * n + j];
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i) {
            if (longest[i * n + m] == kNegInf) continue;
            for (int j = 0; j < n; ++j) {
                if (longest[m * n + j] == kNegInf) continue;
                __int128 cand = longest[i * n + m] + longest[m * n + j];
                if (cand > longest[i * n + j]) longest[i * n + j] = cand;
            }
        }

    EdgeMask out;
    out.n = n;
    out.rows.assign(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!mask.allows(i, j)) continue;
            bool critical;
            if (i == j) {
                critical = s[i * n + j] == 0;
            } else {
                critical =
                    longest[j * n + i] != kNegInf && s[i * n + j] + longest[j * n + i] == 0;
            }
            if (critical) out.rows[i] |= (1ull << j);
        }
    return out;
}

double max_mean_cycle(const EdgeMask& mask, const std::vector<double>& edge_weights) {
    const int n = mask.n;
    const int steps = n + 1;
    const double kNegInfD = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(steps + 1, std::vector<double>(n, kNegInfD));
    for (int v = 0; v < n; ++v) d[0][v] = 0;
    for (int k = 1; k <= steps; ++k)
        for (int u = 0; u < n; ++u) {
            if (d[k - 1][u] == kNegInfD) continue;
            std::uint64_t row = mask.rows[u];
            while (row) {
                int v = __builtin_ctzll(row);
                row &= row - 1;
                double cand = d[k - 1][u] + edge_weights[u * n + v];
                if (cand > d[k][v]) d[k][v] = cand;
            }
        }
    double best = kNegInfD;
    for (int v = 0; v < n; ++v) {
        if (d[steps][v] == kNegInfD) continue;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < steps; ++k) {
            if (d[k][v] == kNegInfD) continue;
            worst = std::min(worst, (d[steps][v] - d[k][v]) / static_cast<double>(steps - k));
        }
        best = std::max(best, worst);
    }
    if (best == kNegInfD) throw InvalidInput("graph has no cycle; mean cycle undefined");
    return best;
}

ConstrainedResult constrained_value(const SymbolicSystem& sys,
                                    const std::vector<std::pair<Observable, Rational>>& constraints,
                                    const Observable& objective,
                                    const ThermoOptions& options) {
    require_sft(sys, "constrained value");
    if (constraints.size() > 4)
        throw InvalidInput("at most 4 simultaneous constraints are supported");
    return constrained_value_masked(EdgeMask::of(sys), constraints, objective, options);
}

ConstrainedResult constrained_value_masked(
    const EdgeMask& mask, const std::vector<std::pair<Observable, Rational>>& constraints,
    const Observable& objective, const ThermoOptions& options) {
    // deduplicate identical constraint observables
    std::vector<std::pair<Observable, Rational>> work;
    for (const auto& [f, a] : constraints) {
        bool dup = false;
        for (const auto& [g, b] : work) {
            if (f.same_table(g)) {
                if (!(a == b)) throw Infeasible("contradictory targets for one observable");
                dup = true;
                break;
            }
        }
        if (!dup) work.emplace_back(f, a);
    }

    // degenerate and boundary constraints route through exact range analysis
    for (std::size_t c = 0; c < work.size(); ++c) {
        const auto& [f, a] = work[c];
        ValueRange range = average_range_masked(mask, f);
        if (range.width().to_double() < options.degenerate_width) {
            if (!(a == range.lo))
                throw Infeasible("constraint observable is constant with a different value");
            std::vector<std::pair<Observable, Rational>> rest;
            for (std::size_t i = 0; i < work.size(); ++i)
                if (i != c) rest.push_back(work[i]);
            return constrained_value_masked(mask, rest, objective, options);
        }
        if (a < range.lo || range.hi < a)
            throw Infeasible("target outside the achievable average range");
        if (a == range.lo || a == range.hi) {
            EdgeMask critical = critical_edge_mask(mask, f, a == range.hi);
            std::vector<std::pair<Observable, Rational>> rest;
            for (std::size_t i = 0; i < work.size(); ++i)
                if (i != c) rest.push_back(work[i]);
            ConstrainedResult res = constrained_value_masked(critical, rest, objective, options);
            res.boundary_reduced = true;
            return res;
        }
    }

    if (work.empty()) {
        MaskPressure mp = mask_pressure(mask, edge_log_weights(mask.n, objective));
        return {mp.value, {}, equilibrium_from(mask, mp), true, 0, false};
    }

    DualProblem problem{mask, {}, {}, {}, edge_log_weights(mask.n, objective)};
    for (const auto& [f, a] : work) {
        problem.constraint_edges.push_back(edge_log_weights(mask.n, f));
        problem.targets.push_back(a.to_double());
        problem.constraint_obs.push_back(&f);
    }
    return solve_dual(problem, options);
}

}  // namespace birkhoff
