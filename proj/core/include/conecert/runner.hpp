#pragma once

#include "conecert/analysis.hpp"
#include "conecert/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace conecert {

/// Stable exit-code contract for scripting.
inline constexpr int kExitOk = 0;          ///< all checks passed
inline constexpr int kExitCheckFailed = 1; ///< checks ran and failed
inline constexpr int kExitConfigError = 2; ///< configuration or input error

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed_override;
};

/// Simulation products. The reported trajectory is in original coordinates;
/// when a positivity shift was applied, `certified` holds the shifted
/// trajectory whose Hilbert diagnostics stay finite, and alpha records the
/// shift.
struct SimulationProduct {
    Scenario scenario;
    Trajectory reported;
    Trajectory certified;
    double alpha = 0.0;
};

[[nodiscard]] SimulationProduct execute_simulation(Scenario scenario);

/// simulate: trajectory CSV + run metadata (+ signal trace when the
/// scenario generated one).
int run_simulate(const std::filesystem::path& scenario_file, const RunOptions& options,
                 std::ostream& log);

/// certify: report document (text and JSON) with the consensus verdict and,
/// when the scenario declares a bound graph, the accumulated lower-bound
/// check and the bound's QSC status.
int run_certify(const std::filesystem::path& scenario_or_csv, const RunOptions& options,
                std::ostream& log);

struct VerifyOptions {
    std::string suite = "all"; ///< contraction | diameter | sandwich | two_cone | all
    int n_begin = 2;
    int n_end = 6;
    long samples = 10000;
    std::uint64_t seed = 1;
};

/// verify: numerical verification suites; exit 0 iff zero violations.
int run_verify(const VerifyOptions& options, std::ostream& log);

struct SweepResultRow {
    double value;
    std::string verdict;
    double rate;
};

/// sweep: one simulate+certify per value of a flat scenario key path;
/// aggregated table written to sweep.csv under the output directory.
int run_sweep(const std::filesystem::path& scenario_file, const std::string& parameter,
              const std::vector<double>& values, const RunOptions& options, std::ostream& log,
              std::vector<SweepResultRow>* table_out = nullptr);

/// plot: vector-graphics emission from a trajectory CSV (states | metric)
/// or a signal trace CSV (signal).
int run_plot(const std::filesystem::path& input, const std::string& kind,
             const std::filesystem::path& out_file, std::ostream& log, int edge_i = 1,
             int edge_j = 2);

/// Maps the in-flight exception onto the exit-code contract; call from a
/// catch block.
int exit_code_for_current_exception(std::ostream& log);

} // namespace conecert
