#pragma once

#include "conecert/dynamics.hpp"
#include "conecert/graph.hpp"
#include "conecert/models.hpp"
#include "conecert/signal.hpp"
#include "conecert/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace conecert {

/// Scenario files are a TOML subset: [section] headers, key = value lines,
/// '#' comments, and values that are numbers, booleans, quoted strings,
/// number arrays or nested number arrays (matrices). Keys flatten to
/// "section.key" paths, which is also how sweeps address parameters.
struct ConfigValue {
    using Variant = std::variant<double, bool, std::string, std::vector<double>,
                                 std::vector<std::vector<double>>>;
    Variant value;

    [[nodiscard]] double as_number() const;
    [[nodiscard]] long as_integer() const;
    [[nodiscard]] bool as_bool() const;
    [[nodiscard]] const std::string& as_string() const;
    [[nodiscard]] const std::vector<double>& as_array() const;
    [[nodiscard]] Matrix as_matrix() const;
    [[nodiscard]] std::string render() const; ///< value as scenario-file text
};

class ConfigDoc {
public:
    static ConfigDoc parse_file(const std::filesystem::path& path);
    static ConfigDoc parse_string(const std::string& text, const std::string& origin = "<string>");

    [[nodiscard]] bool has(const std::string& path) const;
    [[nodiscard]] const ConfigValue& at(const std::string& path) const;
    void set(const std::string& path, ConfigValue value);

    [[nodiscard]] double number_or(const std::string& path, double fallback) const;
    [[nodiscard]] long integer_or(const std::string& path, long fallback) const;
    [[nodiscard]] std::string string_or(const std::string& path, const std::string& fallback) const;
    [[nodiscard]] bool bool_or(const std::string& path, bool fallback) const;

    /// Canonical rendering: sorted flat paths, one "path = value" per line.
    /// The scenario hash is the FNV-1a digest of this text.
    [[nodiscard]] std::string canonical_text() const;
    [[nodiscard]] std::uint64_t hash() const;

    [[nodiscard]] const std::map<std::string, ConfigValue>& entries() const { return entries_; }

private:
    std::map<std::string, ConfigValue> entries_;
};

/// Fully resolved run description (model, initial state, integrator,
/// horizon, certification knobs, outputs). Construction validates the
/// document and fills defaults; resolved() returns the document with every
/// default made explicit, which is what gets hashed and recorded.
struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    SystemModel model;
    StateVector x0;
    double shift_margin = 0.0; ///< 0 = no shift
    Scheme scheme = Scheme::euler;
    double step_h = 1e-2;
    double t0 = 0.0;
    double t_end = 1.0;
    double checkpoint_spacing = 0.0; ///< 0 = single interval [t0, t_end]
    double fit_window_fraction = 0.5;
    double residual_tol = 0.05;
    std::optional<WeightedDigraph> bound; ///< lower-bound graph B, when declared
    std::string csv_name = "trajectory.csv";
    std::string report_name = "report";
    std::string plots_name = "plots";
    std::optional<SwitchingSignal> topology_signal; ///< generated signal, when any

    static Scenario resolve(const ConfigDoc& doc);
    [[nodiscard]] const ConfigDoc& resolved() const { return resolved_; }
    [[nodiscard]] std::string hash_hex() const;
    [[nodiscard]] CheckpointSequence checkpoints() const;

private:
    Scenario() : model(SystemModel::ltv_constant(Matrix::Zero(2, 2))) {}
    ConfigDoc resolved_;
};

} // namespace conecert
