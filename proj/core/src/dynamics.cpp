#include "conecert/dynamics.hpp"

#include "conecert/hilbert.hpp"
#include "conecert/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conecert {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Model field f(t, x) = A(t, x) x; keeps the last evaluated matrix so
/// callers can reuse it for positivity checks and factor accumulation.
struct ModelField {
    const SystemModel& model;
    Matrix last;

    StateVector operator()(double t, const StateVector& x) {
        last = model.evaluate(t, x).entries();
        return last * x;
    }
};

void check_euler_positivity(const SystemModel& model, const Matrix& a, double t, double h) {
    if (model.validation() != ValidationMode::strict) return;
    const double lambda = a.diagonal().cwiseAbs().maxCoeff();
    if (h * lambda > 1.0 + 1e-12) {
        throw std::invalid_argument("euler step violates positivity: h*lambda = " +
                                    std::to_string(h * lambda) + " > 1 at t=" + std::to_string(t));
    }
}

} // namespace

StepDiagnostics compute_diagnostics(const StateVector& x) {
    StepDiagnostics d;
    d.hilbert_to_ones = distance_to_consensus(x);
    d.spread = x.maxCoeff() - x.minCoeff();
    if (x.minCoeff() >= 0.0 && x.norm() > 0.0) {
        d.min_gamma = minimal_gamma(x);
    } else {
        d.min_gamma = kNan;
    }
    return d;
}

StateVector step(const SystemModel& model, double t, const StateVector& x, double h,
                 Scheme scheme) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (scheme == Scheme::euler) {
        ModelField f{model, {}};
        StateVector dx = f(t, x);
        check_euler_positivity(model, f.last, t, h);
        return x + h * dx;
    }
    ModelField f{model, {}};
    return rk4_step<double>(f, t, x, h);
}

std::vector<double> build_step_grid(const SystemModel& model, double t0, double t_end, double h) {
    if (!(t_end > t0)) throw std::invalid_argument("need t_end > t0");
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    const auto count = static_cast<long>(std::ceil((t_end - t0) / h - 1e-9));
    std::vector<double> grid;
    grid.reserve(count + 1 + model.breakpoints().size());
    for (long i = 0; i < count; ++i) grid.push_back(t0 + h * static_cast<double>(i));
    grid.push_back(t_end);
    for (const double b : model.breakpoints()) {
        if (b > t0 && b < t_end) grid.push_back(b);
    }
    std::sort(grid.begin(), grid.end());
    // drop near-duplicates so a breakpoint sitting on a grid point does not
    // create a zero-length step
    const double tol = 1e-9 * h;
    std::vector<double> out;
    out.reserve(grid.size());
    for (const double t : grid) {
        if (out.empty() || t - out.back() > tol) out.push_back(t);
    }
    out.back() = t_end;
    return out;
}

Trajectory simulate(const SystemModel& model, const StateVector& x0, double t0, double t_end,
                    double h, Scheme scheme) {
    if (x0.size() != model.size()) throw std::invalid_argument("model/state dimension mismatch");
    const std::vector<double> grid = build_step_grid(model, t0, t_end, h);
    Trajectory traj;
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    traj.diagnostics.reserve(grid.size());

    StateVector x = x0;
    traj.times.push_back(grid.front());
    traj.states.push_back(x);
    traj.diagnostics.push_back(compute_diagnostics(x));

    ModelField f{model, {}};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double t = grid[i];
        const double hi = grid[i + 1] - grid[i];
        if (scheme == Scheme::euler) {
            StateVector dx = f(t, x);
            check_euler_positivity(model, f.last, t, hi);
            x = x + hi * dx;
        } else {
            x = rk4_step<double>(f, t, x, hi);
        }
        traj.times.push_back(grid[i + 1]);
        traj.states.push_back(x);
        traj.diagnostics.push_back(compute_diagnostics(x));
    }
    return traj;
}

TransitionFactor factorize_transition(const SystemModel& model, double t_k, double t_k1,
                                      const StateVector& x, int steps) {
    if (steps < 1) throw std::invalid_argument("factorize_transition: need at least one step");
    if (x.size() != model.size()) throw std::invalid_argument("model/state dimension mismatch");
    const double h = (t_k1 - t_k) / static_cast<double>(steps);
    const std::vector<double> grid = build_step_grid(model, t_k, t_k1, h);

    const int n = model.size();
    TransitionFactor factor;
    factor.t_begin = t_k;
    factor.t_end = t_k1;
    factor.anchor_state = x;
    factor.p = Matrix::Identity(n, n);
    factor.accumulated_offdiag = Matrix::Zero(n, n);
    factor.max_diag_magnitude = 0.0;
    factor.steps = static_cast<int>(grid.size()) - 1;

    StateVector state = x;
    ModelField f{model, {}};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double t = grid[i];
        const double hi = grid[i + 1] - grid[i];
        StateVector dx = f(t, state);
        const Matrix& a = f.last;
        const double lambda = a.diagonal().cwiseAbs().maxCoeff();
        factor.max_diag_magnitude = std::max(factor.max_diag_magnitude, lambda);
        if (hi * lambda >= 1.0) {
            throw std::invalid_argument(
                "factorize_transition: h*lambda >= 1, factor positivity breaks (need more steps)");
        }
        Matrix offdiag = a;
        offdiag.diagonal().setZero();
        factor.accumulated_offdiag += hi * offdiag;
        factor.p = (Matrix::Identity(n, n) + hi * a) * factor.p;
        state = state + hi * dx; // same arithmetic as simulate()'s euler path
    }
    factor.endpoint = state;
    return factor;
}

LowerBoundCheck lower_bound_transition(const TransitionFactor& factor,
                                       const WeightedDigraph& accumulated, double lambda,
                                       double slack) {
    const int n = static_cast<int>(factor.p.rows());
    if (accumulated.size() != n) {
        throw std::invalid_argument("lower_bound_transition: grid mismatch (dimension)");
    }
    const double grid_tol = 1e-9 * std::max(1.0, factor.accumulated_offdiag.cwiseAbs().maxCoeff());
    if ((accumulated.weights() - factor.accumulated_offdiag).cwiseAbs().maxCoeff() > grid_tol) {
        throw std::invalid_argument(
            "lower_bound_transition: accumulated graph disagrees with the factor's grid");
    }

    const double span = factor.t_end - factor.t_begin;
    // integral of (A + lambda I): off-diagonal is the accumulated graph, the
    // diagonal restores zero row sums plus the lambda shift
    Matrix integral = accumulated.weights();
    for (int i = 0; i < n; ++i) {
        integral(i, i) = -accumulated.weights().row(i).sum() + lambda * span;
    }
    const Matrix rhs = std::exp(-lambda * span) * (Matrix::Identity(n, n) + integral);

    LowerBoundCheck check;
    check.worst_slack = std::numeric_limits<double>::infinity();
    check.worst_i = check.worst_j = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double margin = factor.p(i, j) - rhs(i, j);
            if (margin < check.worst_slack) {
                check.worst_slack = margin;
                check.worst_i = i;
                check.worst_j = j;
            }
        }
    }
    check.holds = check.worst_slack >= -slack;
    return check;
}

Trajectory internal_dynamics_transform(const std::function<double(double)>& a,
                                       const std::function<double(double)>& b,
                                       const Trajectory& x_traj) {
    if (x_traj.samples() == 0) throw std::invalid_argument("empty trajectory");
    Trajectory out;
    out.times = x_traj.times;
    out.states.reserve(x_traj.states.size());
    out.diagnostics.reserve(x_traj.states.size());

    double int_a = 0.0;  // integral of a from the trajectory start
    double int_eb = 0.0; // integral of e^{int a} * b
    double prev_t = x_traj.times.front();
    double prev_a = a(prev_t);
    double prev_eb = std::exp(int_a) * b(prev_t);
    for (int k = 0; k < x_traj.samples(); ++k) {
        const double t = x_traj.times[k];
        if (k > 0) {
            const double dt = t - prev_t;
            const double cur_a = a(t);
            int_a += 0.5 * dt * (prev_a + cur_a);
            const double cur_eb = std::exp(int_a) * b(t);
            int_eb += 0.5 * dt * (prev_eb + cur_eb);
            prev_t = t;
            prev_a = cur_a;
            prev_eb = cur_eb;
        }
        StateVector y = std::exp(int_a) * x_traj.states[k];
        y.array() -= int_eb;
        out.states.push_back(y);
        out.diagnostics.push_back(compute_diagnostics(out.states.back()));
    }
    return out;
}

ShiftResult shift_to_positive(const StateVector& x0, double margin) {
    if (!(margin > 0.0)) throw std::invalid_argument("shift margin must be positive");
    ShiftResult r;
    r.alpha = margin + std::max(0.0, -x0.minCoeff());
    r.shifted = x0.array() + r.alpha;
    return r;
}

double shift_to_positive(double box_lo, double margin) {
    if (!(margin > 0.0)) throw std::invalid_argument("shift margin must be positive");
    return margin + std::max(0.0, -box_lo);
}

Trajectory unshift_trajectory(const Trajectory& traj, double alpha) {
    Trajectory out;
    out.times = traj.times;
    out.states.reserve(traj.states.size());
    out.diagnostics.reserve(traj.states.size());
    for (const auto& y : traj.states) {
        out.states.push_back(y.array() - alpha);
        out.diagnostics.push_back(compute_diagnostics(out.states.back()));
    }
    return out;
}

} // namespace conecert
