#pragma once

#include "conecert/dynamics.hpp"
#include "conecert/graph.hpp"
#include "conecert/signal.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conecert {

/// Random piecewise-constant switching among a graph family with interval
/// lengths uniform in [tau_d, 2*tau_d] and uniform indices; reproducible
/// from the seed. The generated signal covers at least [0, horizon].
[[nodiscard]] SwitchingSignal dwell_time_signal(std::vector<WeightedDigraph> graphs, double tau_d,
                                                double horizon, std::uint64_t seed);

/// Tunables of the chain activation protocol. The interval and weight
/// distributions are free choices; these defaults are recorded in run
/// metadata and can be overridden per scenario.
struct ChainActivationConfig {
    double outer_min = 0.5;     ///< outer interval length, uniform in [outer_min, outer_max]
    double outer_max = 1.5;
    int pieces_min = 5;         ///< subdivisions per outer interval, uniform integer
    int pieces_max = 15;
    double weight_factor = 2.0; ///< active weights uniform in [delta, weight_factor*delta]
    int edges_per_step = 3;     ///< chain links drawn per integration piece
};

/// Sparse random activation on a chain of n nodes: random outer intervals,
/// each subdivided into random pieces; on each piece, edges_per_step chain
/// links (p, p+1) receive random weights >= delta and every other link is
/// exactly zero. Links point up the chain (node i listens to i+1), so the
/// information center is the last node.
[[nodiscard]] SwitchingSignal chain_random_activation(int n, double delta, double horizon,
                                                      std::uint64_t seed,
                                                      const ChainActivationConfig& config = {});

/// Which side of the accumulated-graph hypothesis is being checked:
/// along_trajectory integrates A(t, x(t)) over the realized solution;
/// pointwise_sampled freezes x on a sample of the domain (labeled
/// "sampled" in reports since the domain is only sampled, never swept).
enum class BoundForm { along_trajectory, pointwise_sampled };

struct IntervalCheck {
    int k;
    double t_begin;
    double t_end;
    double margin;     ///< min over bound-positive entries of accumulated - B
    int binding_i;
    int binding_j;
    bool pass;
};

struct AccumulatedBoundReport {
    BoundForm form;
    bool pass;
    std::string verdict_label; ///< "verified" or "sampled"
    std::vector<IntervalCheck> intervals;
    std::optional<ConnectivityCertificate> bound_qsc;
    double worst_margin;
    int worst_interval;
};

/// Checks the accumulated graph over every checkpoint interval against the
/// lower-bound graph B: along the realized trajectory, or pointwise in x
/// over the trajectory's own states plus an optional uniform grid of the
/// state box. Reports per-interval margins, the binding entry and whether
/// B is quasi-strongly connected.
[[nodiscard]] AccumulatedBoundReport verify_accumulated_lower_bound(
    const SystemModel& model, const Trajectory& traj, const CheckpointSequence& checkpoints,
    const WeightedDigraph& bound, BoundForm form = BoundForm::along_trajectory,
    int extra_state_samples = 0);

} // namespace conecert
