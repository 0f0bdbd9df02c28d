#include "birkhoff/lattice_dp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace birkhoff {

namespace {

constexpr int kMaxWindows = 8;
constexpr long long kPlaneCellCap = 8000000;

struct Spec {
    int depth = 1;
    std::vector<long long> inc;   // depth 1: inc[t]; depth 2: inc[s*k+t]
    std::vector<long long> init;  // contribution of the first symbol
    long long final_lo = 0, final_hi = 0;
    long long min_step = 0, max_step = 0;
    long long total_windows = 0;
    std::vector<long long> lob, hib;  // reachable-and-useful sum bounds per prefix length
};

long long checked(__int128 v) {
    if (v > (static_cast<__int128>(1) << 62) || v < -(static_cast<__int128>(1) << 62))
        throw ArithmeticOverflow("lattice sum bound exceeds 62 bits");
    return static_cast<long long>(v);
}

long long ceil_div(__int128 num, long long den) {
    __int128 q = num / den;
    if (num % den != 0 && num > 0) ++q;
    return checked(q);
}

long long floor_div(__int128 num, long long den) {
    __int128 q = num / den;
    if (num % den != 0 && num < 0) --q;
    return checked(q);
}

// Per-window DP metadata. A state with scaled sum v at prefix length L stays
// live iff v is reachable (within L windows of min/max step) and some
// completion can still land in the final window.
std::vector<Spec> build_specs(const SymbolicSystem& sys,
                              const std::vector<LatticeWindow>& windows, long long n,
                              bool& impossible) {
    const int k = sys.alphabet_size();
    impossible = false;
    if (static_cast<int>(windows.size()) > kMaxWindows)
        throw InvalidInput("too many simultaneous lattice windows");
    std::vector<Spec> specs;
    specs.reserve(windows.size());
    for (const auto& win : windows) {
        const Observable& f = win.f;
        if (f.alphabet_size() != k)
            throw DepthMismatch("window observable alphabet does not match the system");
        if (f.depth() > 2)
            throw DepthMismatch("window observable depth exceeds 2; recode first");
        if (win.hi < win.lo) throw InvalidInput("window with hi < lo");
        Spec sp;
        sp.depth = f.depth();
        const long long d = f.common_denominator();
        sp.total_windows = std::max(0LL, n - sp.depth + 1);

        sp.final_lo =
            ceil_div(static_cast<__int128>(win.lo.num()) * d * sp.total_windows, win.lo.den());
        sp.final_hi =
            floor_div(static_cast<__int128>(win.hi.num()) * d * sp.total_windows, win.hi.den());
        if (sp.final_lo > sp.final_hi)
            throw DegenerateWindow("scaled window contains no lattice point");

        sp.init.assign(k, 0);
        bool first = true;
        if (sp.depth == 1) {
            sp.inc.assign(k, 0);
            for (Symbol t = 0; t < k; ++t) {
                long long v = f.scaled_at(static_cast<std::size_t>(t));
                sp.inc[t] = v;
                sp.init[t] = v;
                if (first || v < sp.min_step) sp.min_step = v;
                if (first || v > sp.max_step) sp.max_step = v;
                first = false;
            }
        } else {
            sp.inc.assign(k * k, 0);
            for (Symbol s = 0; s < k; ++s)
                for (Symbol t = 0; t < k; ++t) {
                    if (!sys.allows(s, t)) continue;
                    Symbol e[2] = {s, t};
                    long long v = f.scaled_at(f.rank(e));
                    sp.inc[s * k + t] = v;
                    if (first || v < sp.min_step) sp.min_step = v;
                    if (first || v > sp.max_step) sp.max_step = v;
                    first = false;
                }
        }

        sp.lob.assign(n + 1, 0);
        sp.hib.assign(n + 1, 0);
        for (long long length = 1; length <= n; ++length) {
            long long w = std::max(0LL, length - sp.depth + 1);
            long long fut = sp.total_windows - w;
            long long lo =
                std::max(checked(static_cast<__int128>(w) * sp.min_step),
                         checked(static_cast<__int128>(sp.final_lo) -
                                 static_cast<__int128>(fut) * sp.max_step));
            long long hi =
                std::min(checked(static_cast<__int128>(w) * sp.max_step),
                         checked(static_cast<__int128>(sp.final_hi) -
                                 static_cast<__int128>(fut) * sp.min_step));
            sp.lob[length] = lo;
            sp.hib[length] = hi;
            if (lo > hi) impossible = true;
        }
        specs.push_back(std::move(sp));
    }
    return specs;
}

void require_countable(const SymbolicSystem& sys, long long n) {
    if (n < 1) throw InvalidInput("word length must be positive");
    if (!sys.is_shift_of_finite_type())
        throw InvalidInput("lattice counting runs on full shifts and SFTs only");
}

struct PlaneShape {
    std::array<long long, kMaxWindows> dims{};
    long long cells_per_symbol = 1;

    static PlaneShape at(const std::vector<Spec>& specs, long long length) {
        PlaneShape sh;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            long long d = specs[i].hib[length] - specs[i].lob[length] + 1;
            sh.dims[i] = d;
            sh.cells_per_symbol *= d;
        }
        return sh;
    }
};

// Flat double-buffered DP over (symbol, window offsets). Each destination
// cell is written by exactly one loop index, so the row loop parallelizes
// without synchronization and the result is identical to the serial order.
//
// Init(cell, symbol) seeds length-1 states; Accumulate(dst, src, s, t, first)
// folds one predecessor in; PostStep(plane, live, length) runs after each
// step (the weighted kernel renormalizes there).
template <typename Cell, typename Init, typename Accumulate, typename PostStep>
void run_flat_dp(const SymbolicSystem& sys, const std::vector<Spec>& specs, long long n,
                 std::vector<Cell>& cur, std::vector<Cell>& next, const Init& init,
                 const Accumulate& accumulate, const PostStep& post_step) {
    const int k = sys.alphabet_size();
    const int m = static_cast<int>(specs.size());

    long long max_cells = 0;
    for (long long length = 1; length <= n; ++length) {
        PlaneShape sh = PlaneShape::at(specs, length);
        max_cells = std::max(max_cells, k * sh.cells_per_symbol);
    }
    if (max_cells > kPlaneCellCap)
        throw InvalidInput("lattice plane too large; tighten the windows or reduce n");

    cur.assign(max_cells, Cell{});
    next.assign(max_cells, Cell{});

    PlaneShape cur_shape = PlaneShape::at(specs, 1);
    for (Symbol s = 0; s < k; ++s) {
        bool ok = true;
        long long idx = s;
        for (int i = 0; i < m; ++i) {
            long long off = specs[i].init[s] - specs[i].lob[1];
            ok = ok && off >= 0 && off < cur_shape.dims[i];
            idx = idx * cur_shape.dims[i] + off;
        }
        if (ok) init(cur[idx], s);
    }
    post_step(cur, k * cur_shape.cells_per_symbol, 1LL);

    for (long long length = 1; length < n; ++length) {
        const PlaneShape next_shape = PlaneShape::at(specs, length + 1);
        const PlaneShape src_shape = cur_shape;
        const long long inner = m > 0 ? next_shape.dims[m - 1] : 1;
        const long long rows = k * (next_shape.cells_per_symbol / inner);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long row = 0; row < rows; ++row) {
            std::array<long long, kMaxWindows> voff{};
            long long rest = row;
            for (int i = m - 2; i >= 0; --i) {
                voff[i] = rest % next_shape.dims[i];
                rest /= next_shape.dims[i];
            }
            const Symbol t = static_cast<Symbol>(rest);
            for (long long last = 0; last < inner; ++last) {
                if (m > 0) voff[m - 1] = last;
                const long long dst = row * inner + last;
                bool first = true;
                for (Symbol s = 0; s < k; ++s) {
                    if (!sys.allows(s, t)) continue;
                    long long src = s;
                    bool ok = true;
                    for (int i = 0; i < m; ++i) {
                        const Spec& sp = specs[i];
                        long long inc = sp.depth == 1 ? sp.inc[t] : sp.inc[s * k + t];
                        long long v = voff[i] + sp.lob[length + 1] - inc;
                        long long off = v - sp.lob[length];
                        if (off < 0 || off >= src_shape.dims[i]) {
                            ok = false;
                            break;
                        }
                        src = src * src_shape.dims[i] + off;
                    }
                    if (!ok) continue;
                    accumulate(next[dst], cur[src], s, t, first);
                    first = false;
                }
                if (first) next[dst] = Cell{};
            }
        }
        std::swap(cur, next);
        cur_shape = next_shape;
        post_step(cur, k * cur_shape.cells_per_symbol, length + 1);
    }
}

}  // namespace

BigInt lattice_count_serial(const SymbolicSystem& sys, const std::vector<LatticeWindow>& windows,
                            long long n) {
    require_countable(sys, n);
    bool impossible = false;
    std::vector<Spec> specs = build_specs(sys, windows, n, impossible);
    if (impossible) return BigInt(0);
    const int k = sys.alphabet_size();
    const int m = static_cast<int>(specs.size());

    using State = std::vector<long long>;  // [symbol, v_1..v_m]
    std::map<State, BigInt> cur;
    for (Symbol s = 0; s < k; ++s) {
        State st(m + 1);
        st[0] = s;
        bool ok = true;
        for (int i = 0; i < m; ++i) {
            st[i + 1] = specs[i].init[s];
            ok = ok && st[i + 1] >= specs[i].lob[1] && st[i + 1] <= specs[i].hib[1];
        }
        if (ok) cur[st] += 1;
    }
    for (long long length = 1; length < n; ++length) {
        std::map<State, BigInt> next;
        for (const auto& [st, cnt] : cur) {
            Symbol s = static_cast<Symbol>(st[0]);
            for (Symbol t = 0; t < k; ++t) {
                if (!sys.allows(s, t)) continue;
                State ns(m + 1);
                ns[0] = t;
                bool ok = true;
                for (int i = 0; i < m; ++i) {
                    long long inc =
                        specs[i].depth == 1 ? specs[i].inc[t] : specs[i].inc[s * k + t];
                    ns[i + 1] = st[i + 1] + inc;
                    ok = ok && ns[i + 1] >= specs[i].lob[length + 1] &&
                         ns[i + 1] <= specs[i].hib[length + 1];
                }
                if (ok) next[ns] += cnt;
            }
        }
        cur = std::move(next);
    }
    BigInt total = 0;
    for (const auto& [st, cnt] : cur) total += cnt;
    return total;
}

BigInt lattice_count(const SymbolicSystem& sys, const std::vector<LatticeWindow>& windows,
                     long long n) {
    require_countable(sys, n);
    bool impossible = false;
    std::vector<Spec> specs = build_specs(sys, windows, n, impossible);
    if (impossible) return BigInt(0);
    const int k = sys.alphabet_size();

    std::vector<BigInt> cur, next;
    run_flat_dp<BigInt>(
        sys, specs, n, cur, next, [](BigInt& cell, Symbol) { cell = 1; },
        [](BigInt& dst, const BigInt& src, Symbol, Symbol, bool first) {
            if (first)
                mpz_set(dst.get_mpz_t(), src.get_mpz_t());
            else
                mpz_add(dst.get_mpz_t(), dst.get_mpz_t(), src.get_mpz_t());
        },
        [](std::vector<BigInt>&, long long, long long) {});

    PlaneShape final_shape = PlaneShape::at(specs, n);
    BigInt total = 0;
    for (long long idx = 0; idx < k * final_shape.cells_per_symbol; ++idx) total += cur[idx];
    return total;
}

double lattice_weighted_rate(const SymbolicSystem& sys, const Observable& psi,
                             const std::vector<LatticeWindow>& windows, long long n) {
    require_countable(sys, n);
    const int k = sys.alphabet_size();
    if (psi.alphabet_size() != k)
        throw DepthMismatch("potential alphabet does not match the system");
    if (psi.depth() > 2) throw DepthMismatch("potential depth exceeds 2; recode first");

    bool impossible = false;
    std::vector<Spec> specs = build_specs(sys, windows, n, impossible);
    if (impossible) return -std::numeric_limits<double>::infinity();

    std::vector<double> factor(k * k, 0.0);
    std::vector<double> start(k, 1.0);
    for (Symbol s = 0; s < k; ++s) {
        if (psi.depth() == 1)
            start[s] = std::exp(psi.value_at(static_cast<std::size_t>(s)).to_double());
        for (Symbol t = 0; t < k; ++t) {
            if (!sys.allows(s, t)) continue;
            double v;
            if (psi.depth() == 1) {
                v = psi.value_at(static_cast<std::size_t>(t)).to_double();
            } else {
                Symbol e[2] = {s, t};
                v = psi.value_at(psi.rank(e)).to_double();
            }
            factor[s * k + t] = std::exp(v);
        }
    }

    double log_norm = 0;
    std::vector<double> cur, next;
    run_flat_dp<double>(
        sys, specs, n, cur, next, [&](double& cell, Symbol s) { cell = start[s]; },
        [&](double& dst, const double& src, Symbol s, Symbol t, bool first) {
            double add = src * factor[s * k + t];
            dst = first ? add : dst + add;
        },
        [&](std::vector<double>& plane, long long live, long long) {
            double mx = 0;
            for (long long i = 0; i < live; ++i) mx = std::max(mx, plane[i]);
            if (mx > 0) {
                for (long long i = 0; i < live; ++i) plane[i] /= mx;
                log_norm += std::log(mx);
            }
        });

    PlaneShape final_shape = PlaneShape::at(specs, n);
    double total = 0;
    for (long long idx = 0; idx < k * final_shape.cells_per_symbol; ++idx) total += cur[idx];
    if (total == 0 || !std::isfinite(log_norm))
        return -std::numeric_limits<double>::infinity();
    return (std::log(total) + log_norm) / static_cast<double>(n);
}

}  // namespace birkhoff
