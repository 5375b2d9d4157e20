#pragma once

#include "conecert/graph.hpp"

#include <vector>

namespace conecert {

/// Piecewise-constant switching signal: interval i is [edges[i], edges[i+1])
/// and carries payload index[i]. When the payload is graph-valued, index[i]
/// points into library; models with state-dependent families interpret the
/// index themselves. The signal extends its last value to +infinity.
struct SwitchingSignal {
    std::vector<double> edges;          ///< interval boundaries, strictly increasing, size m+1
    std::vector<int> index;             ///< payload index per interval, size m
    std::vector<WeightedDigraph> library; ///< optional graph payloads
    double dwell_time = 0.0;            ///< declared minimum dwell time, 0 = none

    void validate() const;

    [[nodiscard]] int intervals() const { return static_cast<int>(index.size()); }
    [[nodiscard]] double begin() const { return edges.front(); }
    [[nodiscard]] double end() const { return edges.back(); }

    /// Interval containing t (clamped to the first/last interval).
    [[nodiscard]] int interval_at(double t) const;
    [[nodiscard]] int index_at(double t) const { return index[interval_at(t)]; }
    [[nodiscard]] const WeightedDigraph& graph_at(double t) const;

    /// Left-endpoint samples of the graph-valued signal, as consumed by
    /// accumulate().
    [[nodiscard]] std::vector<GraphSample> graph_samples() const;

    /// Switching instants interior to the signal (everything except the
    /// outer boundaries); integration grids are refined at these.
    [[nodiscard]] std::vector<double> breakpoints() const;

    /// Constant signal holding one graph forever.
    static SwitchingSignal constant(WeightedDigraph g, double t_begin = 0.0);
};

/// Increasing checkpoint times with uniformly bounded gaps; the verification
/// of accumulated-graph lower bounds runs interval by interval over these.
struct CheckpointSequence {
    std::vector<double> times;
    double sup_gap = 0.0;

    static CheckpointSequence uniform(double t0, double t_end, double spacing);
    void validate() const;
    [[nodiscard]] int intervals() const { return static_cast<int>(times.size()) - 1; }
};

} // namespace conecert
