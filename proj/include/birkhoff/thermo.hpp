#pragma once

#include <cstdint>
#include <vector>

#include "birkhoff/measure.hpp"
#include "birkhoff/observable.hpp"
#include "birkhoff/rational.hpp"
#include "birkhoff/system.hpp"

namespace birkhoff {

// Subset of the allowed transitions of a system; the thermodynamic routines
// run on masks so that boundary-constrained problems can restrict to critical
// subgraphs and recurse.
struct EdgeMask {
    int n = 0;
    std::vector<std::uint64_t> rows;

    static EdgeMask of(const SymbolicSystem& sys);
    bool allows(Symbol a, Symbol b) const { return (rows[a] >> b) & 1u; }
    bool empty() const;
};

struct ValueRange {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
};

struct PerronData {
    double lambda = 0;           // Perron root of the scaled matrix
    double log_scale = 0;        // subtracted potential maximum
    std::vector<double> left;    // u
    std::vector<double> right;   // v
    int iterations = 0;
};

struct PressureEvaluation {
    std::vector<double> q;
    double pressure = 0;               // nats
    std::vector<double> gradient;      // integral of each constraint observable
    MarkovMeasure equilibrium;
};

struct ThermoOptions {
    double gradient_tol = 1e-9;
    int max_newton_iterations = 200;
    int max_gradient_iterations = 2000;
    double q_max = 50.0;        // dual divergence heuristic
    double dual_floor = -1e6;   // dual divergence heuristic
    double fd_step = 1e-4;      // Hessian finite differences
    double degenerate_width = 1e-12;
};

struct ConstrainedResult {
    double value = 0;
    std::vector<double> q;       // dual certificate, one entry per surviving constraint
    MarkovMeasure measure;       // attaining equilibrium measure
    bool converged = true;
    int iterations = 0;
    bool boundary_reduced = false;
};

// M_ij = A_ij * exp(potential(ij)); depth-1 potentials apply exp(f(j))
// columnwise. Row-major, dense.
std::vector<double> transfer_matrix(const SymbolicSystem& sys, const Observable& potential);

// ln of the Perron root of the transfer matrix, power iteration with
// two-sided Collatz-Wielandt bounds to relative tolerance 1e-12.
double pressure(const SymbolicSystem& sys, const Observable& potential);

// Equilibrium measure from the left/right Perron vectors:
// x_ij = u_i M_ij v_j / (lambda u.v). Satisfies h + integral = pressure.
MarkovMeasure equilibrium_state(const SymbolicSystem& sys, const Observable& potential);

// Pressure, gradient and equilibrium of objective + sum_i q_i phi_i.
PressureEvaluation evaluate_pressure(const SymbolicSystem& sys,
                                     const std::vector<Observable>& constraints,
                                     const std::vector<double>& q,
                                     const Observable& objective);

// Achievable averages {integral f dmu : mu invariant} = [min,max] mean cycle,
// computed exactly by Karp's algorithm on the D-scaled integer lattice.
ValueRange average_range(const SymbolicSystem& sys, const Observable& f);

// sup{ h_mu + integral objective dmu : integral phi_i dmu = a_i } by convex
// duality: inf_q [pressure(objective + sum q_i phi_i) - q.a], damped Newton
// with gradient-descent fallback. Targets on the boundary of their achievable
// interval are routed through the critical-subgraph reduction.
ConstrainedResult constrained_value(const SymbolicSystem& sys,
                                    const std::vector<std::pair<Observable, Rational>>& constraints,
                                    const Observable& objective,
                                    const ThermoOptions& options = {});

// Masked building blocks (used by the spectra and suspension modules).
ValueRange average_range_masked(const EdgeMask& mask, const Observable& f);

// Edges lying on cycles whose f-mean equals the range endpoint (hi if
// `maximize`, else lo). Exact arithmetic throughout.
EdgeMask critical_edge_mask(const EdgeMask& mask, const Observable& f, bool maximize);

double pressure_masked(const EdgeMask& mask, const Observable& potential);
MarkovMeasure equilibrium_masked(const EdgeMask& mask, const Observable& potential);

ConstrainedResult constrained_value_masked(
    const EdgeMask& mask, const std::vector<std::pair<Observable, Rational>>& constraints,
    const Observable& objective, const ThermoOptions& options = {});

// Maximum mean cycle of real edge weights w(i,j) = base(i,j) + t*shift(i,j);
// Karp's recurrence on doubles (used by the rotation-set slice search).
double max_mean_cycle(const EdgeMask& mask, const std::vector<double>& edge_weights);

}  // namespace birkhoff
