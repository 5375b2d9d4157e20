#pragma once

#include "conecert/dynamics.hpp"
#include "conecert/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace conecert {

enum class ConsensusVerdict { exponential, asymptotic, undecided, diverging };

[[nodiscard]] std::string to_string(ConsensusVerdict v);

/// Outcome of fitting the disagreement decay of a trajectory.
/// rate_lambda/prefactor come from a least-squares line through
/// ln d(x(t), 1) over the trailing fit window; the spread-based numbers are
/// reported alongside (the two are equivalent on proper subcones). A
/// perfect-consensus trajectory short-circuits to an exponential verdict
/// with an infinite sentinel rate.
struct ConsensusReport {
    ConsensusVerdict verdict = ConsensusVerdict::undecided;
    double rate_lambda = 0.0;     ///< fitted decay exponent of d(x(t), 1), 1/time
    double prefactor_k = 0.0;     ///< fitted d(0) intercept
    double fit_residual = 0.0;    ///< 1 - R^2 of the log-linear fit
    double spread_initial = 0.0;
    double spread_final = 0.0;
    double spread_rate_lambda = 0.0; ///< same fit on ln(spread)
    double window_begin = 0.0;
    double window_end = 0.0;
    int samples_used = 0;
    bool degenerate_consensus = false;
};

[[nodiscard]] ConsensusReport certify_consensus(const Trajectory& traj,
                                                double fit_window_fraction = 0.5,
                                                double residual_tol = 0.05);

/// Empirical check of one-step cone contraction by random row-stochastic
/// matrices with a delta-heavy column. Samples (A, x) pairs with x drawn
/// from the cone's box section (interior, edges and corners) and verifies
/// minimal_gamma(A x) <= C * epsilon with the closed-form constant.
struct ContractionReport {
    int n = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    double c_theoretical = 0.0;
    double c_observed = 0.0; ///< max over samples of minimal_gamma(Ax)/epsilon
    long samples = 0;
    long violations = 0;
};

[[nodiscard]] ContractionReport verify_lemma_contraction(int n, double delta, double epsilon,
                                                         long samples, std::uint64_t seed);

/// Iterated cone-image diameters under powers of a fixed row-stochastic
/// matrix, against the certified geometric envelope decay_factor^m * alpha.
struct DiameterDecayRow {
    int m;
    double diameter_estimate;
    double bound;
};
struct DiameterDecayReport {
    double measured_delta = 0.0;
    double contraction = 0.0;  ///< C from the measured delta
    double decay_factor = 0.0; ///< certified per-step envelope ratio
    long violations = 0;
    std::vector<DiameterDecayRow> rows;
};
[[nodiscard]] DiameterDecayReport verify_diameter_decay(const Matrix& a, double epsilon, int m_max,
                                                        long sample_pairs = 100000,
                                                        std::uint64_t seed = 0x646563);

/// The two-cone phenomenon on dx1/dt = 0, dx2/dt = x1 - x2: the orthant
/// boundary ray (0, 1) stays on the boundary for all time, while the flow
/// at t = 1 maps every K(gamma) strictly inside itself.
struct TwoConeReport {
    bool boundary_preserved = false;
    double boundary_gamma = 0.0; ///< minimal_gamma along the boundary ray (stays at 1/sqrt(2))
    struct PerCone {
        double gamma;
        double max_gamma_after; ///< max minimal_gamma over flowed sample rays
        bool contracted;
    };
    std::vector<PerCone> cones;
    bool pass = false;
};
[[nodiscard]] TwoConeReport two_cone_demo();

/// Per-step consistency of the metric with the disagreement quadratics:
/// the n*A_n <= B_n <= 2n*A_n sandwich plus the calibrated norm-metric
/// bounds against the distance to the consensus ray.
struct MetricNormReport {
    long samples = 0;
    long violations = 0;
    double worst_sandwich_slack = 0.0; ///< most negative sandwich margin observed
    double worst_lower_slack = 0.0;
    double worst_upper_slack = 0.0;
    double comparison_constant = 0.0;
};
[[nodiscard]] MetricNormReport metric_norm_consistency(const Trajectory& traj);

} // namespace conecert
