#pragma once

#include <vector>

#include "birkhoff/bigint.hpp"
#include "birkhoff/observable.hpp"
#include "birkhoff/rational.hpp"
#include "birkhoff/system.hpp"

namespace birkhoff {

// Window on the Birkhoff average of one observable: the D-scaled window sum
// of f over a length-n word must land in [ceil(lo*D*(n-k+1)), floor(hi*D*(n-k+1))].
struct LatticeWindow {
    Observable f;
    Rational lo;
    Rational hi;
};

// Exact count of admissible n-words whose Birkhoff averages satisfy every
// window simultaneously. DP state = (last symbol, one scaled sum per window),
// pruned per step to sums that can still reach the final windows.
//
// `lattice_count` is the production kernel: flat double-buffered planes, the
// per-step destination cells are independent and run under OpenMP.
// `lattice_count_serial` is the reference implementation (ordered map of
// sparse states, single pass); the two must agree exactly.
BigInt lattice_count(const SymbolicSystem& sys, const std::vector<LatticeWindow>& windows,
                     long long n);
BigInt lattice_count_serial(const SymbolicSystem& sys, const std::vector<LatticeWindow>& windows,
                            long long n);

// Weighted variant: (1/n) ln sum_{w admissible, in all windows} exp(S_n psi(w)),
// with per-step renormalization; psi is locally constant of depth <= 2.
double lattice_weighted_rate(const SymbolicSystem& sys, const Observable& psi,
                             const std::vector<LatticeWindow>& windows, long long n);

}  // namespace birkhoff
