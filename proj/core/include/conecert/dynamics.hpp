#pragma once

#include "conecert/graph.hpp"
#include "conecert/models.hpp"
#include "conecert/types.hpp"

#include <functional>
#include <vector>

namespace conecert {

enum class Scheme { euler, rk4 };

struct StepDiagnostics {
    double hilbert_to_ones; ///< d(x, 1); +inf off the positive orthant
    double spread;          ///< max_i x_i - min_i x_i
    double min_gamma;       ///< minimal cone parameter; NaN when x has negative entries
};

/// Time-stamped solution samples with per-step disagreement diagnostics.
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<StepDiagnostics> diagnostics;

    [[nodiscard]] int samples() const { return static_cast<int>(times.size()); }
    [[nodiscard]] int dimension() const {
        return states.empty() ? 0 : static_cast<int>(states.front().size());
    }
    [[nodiscard]] double spread_initial() const { return diagnostics.front().spread; }
    [[nodiscard]] double spread_final() const { return diagnostics.back().spread; }
};

[[nodiscard]] StepDiagnostics compute_diagnostics(const StateVector& x);

/// One integration step. In euler strict mode, h * max|diag(A)| > 1 is an
/// error: beyond that the update stops being a nonnegative combination and
/// the transition factorization loses positivity.
[[nodiscard]] StateVector step(const SystemModel& model, double t, const StateVector& x, double h,
                               Scheme scheme);

/// Integration grid from t0 to t_end with target step h, refined at the
/// model's switching breakpoints so piecewise-constant signals are
/// integrated exactly. Shared by simulate() and factorize_transition().
[[nodiscard]] std::vector<double> build_step_grid(const SystemModel& model, double t0,
                                                  double t_end, double h);

[[nodiscard]] Trajectory simulate(const SystemModel& model, const StateVector& x0, double t0,
                                  double t_end, double h, Scheme scheme);

/// Row-stochastic nonnegative factor mapping the state across a checkpoint
/// interval, accumulated as the ordered product of Euler factors
/// (I + h*A(t_i, x_i)). endpoint is the state propagated through the exact
/// same arithmetic as simulate() on the same grid (bitwise identical);
/// accumulated_offdiag is the left-rectangle integral of the coupling along
/// the sweep, kept so the lower-bound check can detect grid mismatches.
struct TransitionFactor {
    Matrix p;
    double t_begin;
    double t_end;
    StateVector anchor_state;
    StateVector endpoint;
    Matrix accumulated_offdiag;
    double max_diag_magnitude;
    int steps;

    /// Shift making A + lambda*I nonnegative on the sampled interval, with
    /// a 1% headroom.
    [[nodiscard]] double suggested_lambda() const { return 1.01 * max_diag_magnitude; }
};

[[nodiscard]] TransitionFactor factorize_transition(const SystemModel& model, double t_k,
                                                    double t_k1, const StateVector& x, int steps);

/// Verifies P >= e^{-lambda*(t1-t0)} (I + integral of (A + lambda I))
/// elementwise within slack, reconstructing the integral's diagonal from
/// the accumulated off-diagonal graph (rows of A sum to zero). The supplied
/// accumulated graph must match the factor's own sweep accumulation; a
/// disagreement means the grids differ and is an error.
struct LowerBoundCheck {
    bool holds;
    double worst_slack; ///< min over entries of P - rhs (negative = violated)
    int worst_i;
    int worst_j;
};
[[nodiscard]] LowerBoundCheck lower_bound_transition(const TransitionFactor& factor,
                                                     const WeightedDigraph& accumulated,
                                                     double lambda, double slack = 1e-6);

/// Change of coordinates removing bounded internal dynamics
/// dx_i/dt = a(t) x_i + b(t) + coupling: y = e^{int a} x - (int e^{int a} b) 1.
/// Consensus of y is equivalent to consensus of x; the spread scales by
/// e^{int a}. Integrals run from the trajectory start via trapezoid.
[[nodiscard]] Trajectory internal_dynamics_transform(const std::function<double(double)>& a,
                                                     const std::function<double(double)>& b,
                                                     const Trajectory& x_traj);

/// Uniform shift y = x + alpha*1 placing the state in the positive orthant
/// with the given margin: alpha = margin + max(0, -min_i x_i).
struct ShiftResult {
    double alpha;
    StateVector shifted;
};
[[nodiscard]] ShiftResult shift_to_positive(const StateVector& x0, double margin);
/// Box variant: alpha for the worst point of [lo, hi]^n.
[[nodiscard]] double shift_to_positive(double box_lo, double margin);

/// Undo a shift on a whole trajectory, recomputing diagnostics in the
/// original coordinates.
[[nodiscard]] Trajectory unshift_trajectory(const Trajectory& traj, double alpha);

} // namespace conecert
