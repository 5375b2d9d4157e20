#pragma once

#include "conecert/analysis.hpp"
#include "conecert/dynamics.hpp"
#include "conecert/graph.hpp"
#include "conecert/signal.hpp"
#include "conecert/topology.hpp"

#include <filesystem>
#include <string>

namespace conecert {

/// Formats a double with 17 significant digits (round-trip exact).
[[nodiscard]] std::string format_full(double v);

/// First '#' comment line of an artifact (without the marker), or "".
/// Artifacts carry their scenario name/hash there.
[[nodiscard]] std::string read_artifact_comment(const std::filesystem::path& path);

/// Trajectory CSV: optional leading '#' comment lines, then the header
/// "t,x_1,...,x_n,d_hilbert,spread,gamma" and one row per accepted step in
/// full double precision. Infinities print as "inf", undefined gamma as
/// "nan".
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::string& comment = "");
[[nodiscard]] Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Signal trace CSV: "t_start,t_end,i,j,weight" rows, sparse interval-edge
/// format, 1-based node indices.
void write_signal_trace(const std::filesystem::path& path, const SwitchingSignal& signal,
                        const std::string& comment = "");
[[nodiscard]] SwitchingSignal read_signal_trace(const std::filesystem::path& path);

/// Graph snapshot: one header line "n=<int>" followed by n whitespace-
/// separated matrix rows.
void write_graph_snapshot(const std::filesystem::path& path, const WeightedDigraph& g);
[[nodiscard]] WeightedDigraph read_graph_snapshot(const std::filesystem::path& path);

/// Report rendering: flat "key = value" text and a JSON document with the
/// same keys. Deterministic for identical inputs.
[[nodiscard]] std::string render_report_text(const ConsensusReport& report);
[[nodiscard]] std::string render_report_json(const ConsensusReport& report);
[[nodiscard]] std::string render_bound_report_text(const AccumulatedBoundReport& report);
[[nodiscard]] std::string render_bound_report_json(const AccumulatedBoundReport& report);

} // namespace conecert
