#include "conecert/topology.hpp"

#include "conecert/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conecert {

SwitchingSignal dwell_time_signal(std::vector<WeightedDigraph> graphs, double tau_d,
                                  double horizon, std::uint64_t seed) {
    if (graphs.empty()) throw std::invalid_argument("dwell_time_signal: empty graph family");
    if (!(tau_d > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("dwell_time_signal: need positive dwell time and horizon");
    }
    SplitRng rng = SplitRng(seed).stream("dwell-time-signal");
    SwitchingSignal signal;
    signal.library = std::move(graphs);
    signal.dwell_time = tau_d;
    signal.edges.push_back(0.0);
    while (signal.edges.back() < horizon) {
        const double len = rng.uniform(tau_d, 2.0 * tau_d);
        signal.edges.push_back(signal.edges.back() + len);
        signal.index.push_back(rng.uniform_int(0, static_cast<int>(signal.library.size()) - 1));
    }
    signal.validate();
    return signal;
}

SwitchingSignal chain_random_activation(int n, double delta, double horizon, std::uint64_t seed,
                                        const ChainActivationConfig& config) {
    if (n < 2) throw std::invalid_argument("chain_random_activation: n must be >= 2");
    if (!(delta > 0.0)) throw std::invalid_argument("chain_random_activation: delta must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("chain_random_activation: bad horizon");
    if (config.edges_per_step < 1 || config.pieces_min < 1 ||
        config.pieces_max < config.pieces_min || !(config.outer_min > 0.0) ||
        config.outer_max < config.outer_min || config.weight_factor < 1.0) {
        throw std::invalid_argument("chain_random_activation: bad configuration");
    }

    SplitRng rng = SplitRng(seed).stream("chain-activation");
    SwitchingSignal signal;
    signal.edges.push_back(0.0);
    while (signal.edges.back() < horizon) {
        const double outer_len = rng.uniform(config.outer_min, config.outer_max);
        const int pieces = rng.uniform_int(config.pieces_min, config.pieces_max);
        // random interior cuts of the outer interval
        std::vector<double> cuts;
        cuts.reserve(pieces + 1);
        cuts.push_back(0.0);
        for (int i = 0; i < pieces - 1; ++i) cuts.push_back(rng.uniform(0.0, outer_len));
        cuts.push_back(outer_len);
        std::sort(cuts.begin(), cuts.end());

        const double outer_begin = signal.edges.back();
        for (int piece = 0; piece < pieces; ++piece) {
            if (cuts[piece + 1] - cuts[piece] < 1e-12) continue;
            WeightedDigraph g(n);
            for (int e = 0; e < config.edges_per_step; ++e) {
                const int p = rng.uniform_int(0, n - 2); // link (p, p+1): p listens to p+1
                g.set_weight(p, p + 1, rng.uniform(delta, config.weight_factor * delta));
            }
            signal.edges.push_back(outer_begin + cuts[piece + 1]);
            signal.index.push_back(static_cast<int>(signal.library.size()));
            signal.library.push_back(std::move(g));
        }
    }
    signal.validate();
    return signal;
}

namespace {

/// Left-rectangle integral of the off-diagonal coupling along stored
/// trajectory samples between two times (which must lie on the grid).
Matrix accumulate_along_trajectory(const SystemModel& model, const Trajectory& traj,
                                   std::size_t begin_idx, std::size_t end_idx) {
    Matrix total = Matrix::Zero(model.size(), model.size());
    for (std::size_t i = begin_idx; i < end_idx; ++i) {
        const double h = traj.times[i + 1] - traj.times[i];
        Matrix a = model.evaluate(traj.times[i], traj.states[i]).entries();
        a.diagonal().setZero();
        total += h * a;
    }
    return total;
}

/// Integral of the coupling with the state frozen, on a grid refined at the
/// model's breakpoints.
Matrix accumulate_frozen_state(const SystemModel& model, const StateVector& x, double t0,
                               double t1) {
    const double h = std::max((t1 - t0) / 256.0, 1e-9);
    const std::vector<double> grid = build_step_grid(model, t0, t1, h);
    Matrix total = Matrix::Zero(model.size(), model.size());
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        Matrix a = model.evaluate(grid[i], x).entries();
        a.diagonal().setZero();
        total += (grid[i + 1] - grid[i]) * a;
    }
    return total;
}

std::size_t grid_index_of(const Trajectory& traj, double t, double tol) {
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t - tol);
    if (it == traj.times.end() || std::abs(*it - t) > tol) {
        throw std::invalid_argument("checkpoint time " + std::to_string(t) +
                                    " is not covered by the trajectory grid");
    }
    return static_cast<std::size_t>(it - traj.times.begin());
}

IntervalCheck check_against_bound(const Matrix& accumulated, const WeightedDigraph& bound, int k,
                                  double t0, double t1) {
    IntervalCheck check;
    check.k = k;
    check.t_begin = t0;
    check.t_end = t1;
    check.pass = true;
    check.margin = std::numeric_limits<double>::infinity();
    check.binding_i = check.binding_j = 0;
    const int n = bound.size();
    bool any_positive = false;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double slack = accumulated(i, j) - bound.weight(i, j);
            if (slack < 0.0) check.pass = false;
            // margins are reported against the entries the bound actually
            // constrains; zero-bound entries are vacuous
            if (bound.weight(i, j) > 0.0 || slack < 0.0) {
                any_positive = true;
                if (slack < check.margin) {
                    check.margin = slack;
                    check.binding_i = i;
                    check.binding_j = j;
                }
            }
        }
    }
    if (!any_positive) check.margin = 0.0;
    return check;
}

} // namespace

AccumulatedBoundReport verify_accumulated_lower_bound(const SystemModel& model,
                                                      const Trajectory& traj,
                                                      const CheckpointSequence& checkpoints,
                                                      const WeightedDigraph& bound, BoundForm form,
                                                      int extra_state_samples) {
    checkpoints.validate();
    if (bound.size() != model.size()) {
        throw std::invalid_argument("bound graph dimension mismatch");
    }
    if (traj.samples() < 2) throw std::invalid_argument("trajectory too short");
    const double tol =
        1e-9 * std::max(1.0, std::abs(traj.times.back() - traj.times.front()));
    if (checkpoints.times.front() < traj.times.front() - tol ||
        checkpoints.times.back() > traj.times.back() + tol) {
        throw std::invalid_argument("trajectory does not cover the checkpoint span");
    }

    AccumulatedBoundReport report;
    report.form = form;
    report.verdict_label = (form == BoundForm::along_trajectory) ? "verified" : "sampled";
    report.bound_qsc = is_qsc(bound, 0.0);
    report.pass = true;
    report.worst_margin = std::numeric_limits<double>::infinity();
    report.worst_interval = -1;

    // pointwise mode samples the realized states (plus an optional grid of
    // the model's declared box); "for all x in D" is only ever sampled
    std::vector<StateVector> frozen_states;
    if (form == BoundForm::pointwise_sampled) {
        const int stride = std::max(1, traj.samples() / 16);
        for (int i = 0; i < traj.samples(); i += stride) frozen_states.push_back(traj.states[i]);
        if (extra_state_samples > 0 && model.domain_box()) {
            const auto [lo, hi] = *model.domain_box();
            SplitRng rng = SplitRng(0x626f78).stream("bound-domain-grid");
            for (int s = 0; s < extra_state_samples; ++s) {
                StateVector x(model.size());
                for (int i = 0; i < model.size(); ++i) x[i] = rng.uniform(lo, hi);
                frozen_states.push_back(x);
            }
        }
    }

    for (int k = 0; k + 1 < static_cast<int>(checkpoints.times.size()); ++k) {
        const double t0 = checkpoints.times[k];
        const double t1 = checkpoints.times[k + 1];
        IntervalCheck worst_for_interval;
        if (form == BoundForm::along_trajectory) {
            const std::size_t b = grid_index_of(traj, t0, tol);
            const std::size_t e = grid_index_of(traj, t1, tol);
            const Matrix acc = accumulate_along_trajectory(model, traj, b, e);
            worst_for_interval = check_against_bound(acc, bound, k, t0, t1);
        } else {
            worst_for_interval.margin = std::numeric_limits<double>::infinity();
            worst_for_interval.pass = true;
            for (const auto& x : frozen_states) {
                const Matrix acc = accumulate_frozen_state(model, x, t0, t1);
                const IntervalCheck c = check_against_bound(acc, bound, k, t0, t1);
                if (c.margin < worst_for_interval.margin) worst_for_interval = c;
                worst_for_interval.pass = worst_for_interval.pass && c.pass;
            }
        }
        report.pass = report.pass && worst_for_interval.pass;
        if (worst_for_interval.margin < report.worst_margin) {
            report.worst_margin = worst_for_interval.margin;
            report.worst_interval = k;
        }
        report.intervals.push_back(worst_for_interval);
    }
    return report;
}

} // namespace conecert
