#pragma once

#include "conecert/graph.hpp"
#include "conecert/signal.hpp"
#include "conecert/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conecert {

enum class ModelKind {
    ltv,
    kuramoto,
    cucker_smale_velocity,
    hegselmann_krause,
    animal_group,
    custom_switching,
    custom,
};

/// strict rejects evaluations that break the Metzler contract (negative
/// coupling); permissive clamps them to zero and counts the clamps, for
/// exploratory use only.
enum class ValidationMode { strict, permissive };

/// Piecewise-constant scalar signal (used for confidence radii and the
/// internal-dynamics coefficients). Extends its last value forever.
struct ScalarSignal {
    std::vector<double> breakpoints; ///< strictly increasing, size m+1 boundaries or empty
    std::vector<double> values;      ///< size m (or 1 for a constant signal)

    static ScalarSignal constant(double v) { return {{}, {v}}; }
    [[nodiscard]] double at(double t) const;
    void validate() const;
};

/// Time/state-dependent Metzler matrix field A(t, x) defining
/// dx/dt = A(t, x) x, realized by the built-in model families.
/// Models are immutable after construction and cheap to copy.
class SystemModel {
public:
    /// Evaluates A(t, x), validated per the model's mode: off-diagonal
    /// nonnegative and zero row sums. In strict mode a violated entry
    /// throws ModelContractError naming (t, i, j).
    [[nodiscard]] MetzlerMatrix evaluate(double t, const StateVector& x) const;

    [[nodiscard]] int size() const;
    [[nodiscard]] ModelKind kind() const;
    [[nodiscard]] const std::string& name() const;
    /// Switching instants; integration grids are refined at these so
    /// piecewise-constant signals are integrated exactly.
    [[nodiscard]] const std::vector<double>& breakpoints() const;
    [[nodiscard]] ValidationMode validation() const;
    [[nodiscard]] SystemModel with_validation(ValidationMode mode) const;
    /// Number of entries clamped to zero so far (permissive mode only).
    [[nodiscard]] long clamped_entries() const;
    /// Declared compact state box, when the family needs one (Kuramoto).
    [[nodiscard]] std::optional<std::pair<double, double>> domain_box() const;
    [[nodiscard]] SystemModel with_domain_box(double lo, double hi) const;

    // -- families ---------------------------------------------------------

    /// Constant-coefficient linear system.
    static SystemModel ltv_constant(Matrix a);
    /// Piecewise-constant linear time-varying system; signal indices select
    /// from the family.
    static SystemModel ltv_switching(std::vector<Matrix> family, SwitchingSignal signal);
    /// Kuramoto network with identical frequencies: coupling
    /// a_ij(t) * sin(x_j - x_i)/(x_j - x_i), the removable singularity
    /// evaluated as 1. Edge weights come from a graph-valued signal.
    /// Strict mode rejects active couplings with spread >= pi.
    static SystemModel kuramoto(SwitchingSignal weights);
    static SystemModel kuramoto_constant(WeightedDigraph weights);
    /// Velocity block of the flocking model: a_ij = (gain/n) * psi_ij.
    static SystemModel cucker_smale_velocity(Matrix psi, double gain);
    static SystemModel cucker_smale_velocity(
        int n, std::function<double(int, int, const StateVector&)> psi, double gain);
    /// Bounded-confidence opinion dynamics: a_ij = 1 when
    /// |x_i - x_j| <= eps(t) (closed condition), else 0.
    static SystemModel hegselmann_krause(int n, ScalarSignal confidence_radius);
    /// Attraction/repulsion swarm model. Couplings are
    /// phi/|x_i - x_j| gated by the membership graphs; the repulsion term
    /// enters negatively and breaks the Metzler contract, so strict mode
    /// rejects any evaluation with active repulsion.
    static SystemModel animal_group(SwitchingSignal attraction, SwitchingSignal repulsion,
                                    std::function<double(double, double)> phi_attract,
                                    std::function<double(double, double)> phi_repel,
                                    double distance_floor = 1e-9);
    /// Finite family of state-dependent Metzler fields selected by a
    /// measurable switching signal.
    static SystemModel custom_switching(
        std::vector<std::function<Matrix(const StateVector&)>> family, SwitchingSignal signal,
        int n);
    /// Escape hatch: arbitrary field, still validated on evaluation.
    static SystemModel custom(int n, std::function<Matrix(double, const StateVector&)> field,
                              std::vector<double> breakpoints = {}, std::string name = "custom");

    /// evaluate(t, y) = original.evaluate(t, y - alpha * 1); used with
    /// shift_to_positive so trajectories live in the positive orthant.
    static SystemModel shifted(SystemModel base, double alpha);

private:
    struct Impl;
    explicit SystemModel(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// sin(d)/d with the removable singularity handled by a series expansion
/// below |d| < 1e-4 to avoid cancellation.
[[nodiscard]] double sinc_coupling(double d);

} // namespace conecert
