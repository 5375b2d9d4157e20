#pragma once

#include "conecert/rng.hpp"
#include "conecert/types.hpp"

#include <cstdint>
#include <vector>

namespace conecert {

/// Member of the shrinking cone family around the consensus ray:
/// K(gamma) = { x : x_i / |x|_2 >= 1/sqrt(n) - gamma for all i }.
/// gamma = 0 is the ray through the all-ones vector; gamma must stay
/// strictly below 1/sqrt(n), with a small safety margin so the diameter
/// formula never runs into the (1 - sqrt(n)*gamma)^2 cancellation.
struct Cone {
    Cone(int n, double gamma);

    int n;
    double gamma;

    /// Open upper bound of the admissible gamma range, 1/sqrt(n).
    static double gamma_limit(int n);
    /// Largest gamma accepted by the constructor: (1 - 1e-9)/sqrt(n).
    static double gamma_validity_margin(int n);

    /// Per-coordinate lower bound on normalized entries: 1/sqrt(n) - gamma.
    [[nodiscard]] double threshold() const;
};

/// Hilbert projective metric on the positive orthant:
/// d(x, y) = ln( max_i(x_i/y_i) / min_i(x_i/y_i) ).
/// Returns +infinity when any entry of either vector is nonpositive (the
/// ratio formula degenerates); this is a value, not an error, so trajectory
/// diagnostics stay total. Dimension mismatch throws.
[[nodiscard]] double hilbert_distance(const StateVector& x, const StateVector& y);

/// d(x, 1) = ln(max_i x_i / min_i x_i); the per-step disagreement measure.
[[nodiscard]] double distance_to_consensus(const StateVector& x);

/// True iff x_i/|x|_2 >= 1/sqrt(n) - gamma for every i.
/// The zero vector is a member of every cone by convention.
[[nodiscard]] bool cone_membership(const StateVector& x, const Cone& cone);

/// Smallest gamma whose cone contains x:
/// gamma* = max(0, 1/sqrt(n) - min_i x_i/|x|_2).
/// Values >= Cone::gamma_limit(n) mean no admissible cone contains x
/// (the point touches the orthant boundary). Requires x nonzero with
/// nonnegative entries; negative entries throw.
[[nodiscard]] double minimal_gamma(const StateVector& x);

/// Cone diameter in the Hilbert metric:
/// alpha(gamma) = ln(1 - n + n / (1 - sqrt(n)*gamma)^2).
/// alpha(0) = 0 and alpha is strictly increasing, diverging at 1/sqrt(n).
[[nodiscard]] double cone_diameter(const Cone& cone);

/// One-step cone contraction factor of a row-stochastic matrix whose
/// column k is bounded below by delta:
/// C = (1 - delta) / (1 - sqrt(n)*epsilon*delta), in [0, 1).
[[nodiscard]] double contraction_constant(int n, double delta, double epsilon);

/// Two-sided comparison between Euclidean distance and Hilbert distance for
/// unit vectors: constant*tanh(d/2) <= |x - w|_2 <= exp(d) - 1.
/// Inputs are normalized internally; the applied scales are recorded.
/// The comparison constant is empirical (see calibrate_norm_metric_constant);
/// the upper bound needs none.
struct NormMetricBounds {
    double lower;
    double upper;
    double distance;
    double constant;
    double scale_x; ///< factor applied to x during normalization
    double scale_w; ///< factor applied to w during normalization
};
[[nodiscard]] NormMetricBounds norm_metric_bounds(const StateVector& x, const StateVector& w,
                                                  double comparison_constant);

/// Calibrates the comparison constant for a cone as the infimum of
/// |x - w| / tanh(d(x, w)/2) over sampled unit-norm pairs in the cone
/// (section vertices included). Empirical by construction: the returned
/// constant certifies the lower bound only against pairs from this cone.
[[nodiscard]] double calibrate_norm_metric_constant(const Cone& cone, int samples = 100000,
                                                    std::uint64_t seed = 0x636f6e65);

/// Disagreement quadratics of the appendix sandwich:
/// a_n = |x - (|x|/sqrt(n)) * 1|^2,  b_n = sum_{i,j} (x_i - x_j)^2,
/// with n*a_n <= b_n <= 2n*a_n for x >= 0.
struct AnBn {
    double a_n;
    double b_n;
};
[[nodiscard]] AnBn an_bn(const StateVector& x);

/// Point of the cone's box section 1/sqrt(n)*1 - etilde, etilde in [0, gamma]^n.
/// Every such point is a cone member; this is the parameterization the
/// contraction results are stated over.
[[nodiscard]] StateVector cone_section_point(const Cone& cone, const Eigen::VectorXd& etilde);

/// Random member of the cone's box section (uniform etilde).
[[nodiscard]] StateVector sample_cone_box(const Cone& cone, SplitRng& rng);

/// Random unit ray of the full cone (rejection sampling on the sphere).
[[nodiscard]] StateVector sample_cone_ray(const Cone& cone, SplitRng& rng);

/// The n extreme rays of the cone section where n-1 constraints are active:
/// u = (tau, ..., tau, sqrt(1-(n-1)tau^2), tau, ...). Pairwise Hilbert
/// distances between them attain the diameter formula exactly.
[[nodiscard]] std::vector<StateVector> cone_section_vertices(const Cone& cone);

/// Sampling estimate of the cone diameter: max pairwise Hilbert distance
/// over random rays plus (optionally) the enumerated section vertices.
/// worst_excess reports by how much any sampled pair exceeded the closed
/// form (should be <= ~1e-9; the vertices reach it exactly).
struct DiameterEstimate {
    double sup;
    long pairs;
    double formula;
    double worst_excess;
};
[[nodiscard]] DiameterEstimate estimate_cone_diameter(const Cone& cone, long target_pairs,
                                                      std::uint64_t seed,
                                                      bool include_vertices = true);

/// Grid-certified constants for the diameter function on (0, eps0]:
/// k1*gamma <= alpha(gamma) <= k2*gamma at every grid point, and
/// alpha_prime_min lower-bounds alpha' on the grid. The constants have no
/// closed forms, so they are computed on a fine grid with the gamma->0
/// endpoint handled by alpha'(0) = 2n^(3/2).
struct DiameterLinearBounds {
    double k1;
    double k2;
    double alpha_prime_min;
    double eps0;
    int grid_points;
};
[[nodiscard]] DiameterLinearBounds diameter_linear_bounds(int n, double eps0,
                                                          int grid_points = 20000);

/// Derivative of the diameter function alpha at gamma.
[[nodiscard]] double cone_diameter_derivative(int n, double gamma);

/// Decay factor k < 1 with alpha(C*gamma) <= k*alpha(gamma) on (0, eps0]:
/// k = 1 / (1 + c/(k2*C)) with c = (1-C)*inf alpha'.
[[nodiscard]] double diameter_decay_factor(int n, double contraction, double eps0);

} // namespace conecert
