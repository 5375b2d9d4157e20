#pragma once

#include "conecert/dynamics.hpp"
#include "conecert/signal.hpp"

#include <filesystem>

namespace conecert {

/// Self-contained SVG emission; no display or toolkit dependency, so runs
/// stay headless. states: all x_i(t) overlaid; metric: ln d(x(t), 1) with
/// the fitted decay line; signal: one edge weight against time (step plot).
/// A nonempty comment (scenario name/hash) is embedded as an SVG comment.
void plot_states_svg(const std::filesystem::path& path, const Trajectory& traj,
                     const std::string& title = "", const std::string& comment = "");
void plot_metric_svg(const std::filesystem::path& path, const Trajectory& traj,
                     double fit_rate, double fit_prefactor, const std::string& title = "",
                     const std::string& comment = "");
void plot_signal_svg(const std::filesystem::path& path, const SwitchingSignal& signal, int i,
                     int j, const std::string& title = "", const std::string& comment = "");

} // namespace conecert
