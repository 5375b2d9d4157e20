#include "conecert/analysis.hpp"

#include "conecert/hilbert.hpp"
#include "conecert/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conecert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 1.0; ///< 1 - R^2
    int points = 0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    LineFit fit;
    fit.points = static_cast<int>(t.size());
    if (fit.points < 2) return fit;
    double mt = 0.0, my = 0.0;
    for (int i = 0; i < fit.points; ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= fit.points;
    my /= fit.points;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (int i = 0; i < fit.points; ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (stt == 0.0) return fit;
    fit.slope = sty / stt;
    fit.intercept = my - fit.slope * mt;
    if (syy == 0.0) {
        fit.residual = 0.0; // perfectly flat data is perfectly fit by a flat line
    } else {
        fit.residual = std::max(0.0, 1.0 - (sty * sty) / (stt * syy));
    }
    return fit;
}

/// Random row-stochastic matrix with column k blended toward weight delta:
/// A = (1 - delta) * R + delta * 1 e_k^T with R random row-stochastic.
Matrix random_contraction_matrix(int n, double delta, int k, SplitRng& rng) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            a(i, j) = rng.uniform01();
            row_sum += a(i, j);
        }
        for (int j = 0; j < n; ++j) a(i, j) = (1.0 - delta) * a(i, j) / row_sum;
        a(i, k) += delta;
    }
    return a;
}

} // namespace

std::string to_string(ConsensusVerdict v) {
    switch (v) {
    case ConsensusVerdict::exponential: return "exponential";
    case ConsensusVerdict::asymptotic: return "asymptotic";
    case ConsensusVerdict::diverging: return "diverging";
    case ConsensusVerdict::undecided: return "undecided";
    }
    return "undecided";
}

ConsensusReport certify_consensus(const Trajectory& traj, double fit_window_fraction,
                                  double residual_tol) {
    if (traj.samples() < 10) {
        throw std::invalid_argument("certify_consensus: need at least 10 samples");
    }
    if (!(fit_window_fraction > 0.0) || fit_window_fraction > 1.0) {
        throw std::invalid_argument("certify_consensus: fit window fraction must be in (0, 1]");
    }

    ConsensusReport report;
    report.spread_initial = traj.diagnostics.front().spread;
    report.spread_final = traj.diagnostics.back().spread;

    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    report.window_begin = t1 - fit_window_fraction * (t1 - t0);
    report.window_end = t1;

    // perfect consensus never leaves d == 0; the log fit is degenerate, so
    // report the sentinel rate instead of log(0)
    bool all_zero = true;
    for (const auto& d : traj.diagnostics) {
        if (d.hilbert_to_ones != 0.0) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) {
        report.verdict = ConsensusVerdict::exponential;
        report.degenerate_consensus = true;
        report.rate_lambda = kInf;
        report.spread_rate_lambda = kInf;
        report.prefactor_k = 0.0;
        report.fit_residual = 0.0;
        return report;
    }

    std::vector<double> ts, log_d, log_spread;
    int finite = 0;
    for (int i = 0; i < traj.samples(); ++i) {
        const double d = traj.diagnostics[i].hilbert_to_ones;
        if (std::isfinite(d)) ++finite;
        if (traj.times[i] < report.window_begin) continue;
        if (!std::isfinite(d) || d <= 0.0) continue; // converged-to-zero tail or boundary states
        ts.push_back(traj.times[i]);
        log_d.push_back(std::log(d));
        const double s = traj.diagnostics[i].spread;
        log_spread.push_back(s > 0.0 ? std::log(s) : std::log(d));
    }
    if (finite < 10) {
        throw std::invalid_argument(
            "certify_consensus: fewer than 10 samples with finite d(x, 1); shift the "
            "trajectory into the positive orthant first");
    }

    const LineFit fit = fit_line(ts, log_d);
    const LineFit spread_fit = fit_line(ts, log_spread);
    report.rate_lambda = -fit.slope;
    report.prefactor_k = std::exp(fit.intercept);
    report.fit_residual = fit.residual;
    report.spread_rate_lambda = -spread_fit.slope;
    report.samples_used = fit.points;

    if (report.spread_final > report.spread_initial) {
        report.verdict = ConsensusVerdict::diverging;
        return report;
    }
    if (fit.points >= 2 && fit.slope < 0.0 && fit.residual <= residual_tol) {
        report.verdict = ConsensusVerdict::exponential;
        return report;
    }
    // monotone decrease of the metric (within jitter) without a clean
    // exponential fit; spread stands in wherever d is infinite
    bool monotone = true;
    for (int i = 1; i < traj.samples(); ++i) {
        const double prev_d = traj.diagnostics[i - 1].hilbert_to_ones;
        const double cur_d = traj.diagnostics[i].hilbert_to_ones;
        const bool use_metric = std::isfinite(prev_d) && std::isfinite(cur_d);
        const double prev = use_metric ? prev_d : traj.diagnostics[i - 1].spread;
        const double cur = use_metric ? cur_d : traj.diagnostics[i].spread;
        if (cur > prev * (1.0 + 1e-9) + 1e-15) {
            monotone = false;
            break;
        }
    }
    report.verdict = monotone && report.spread_final < report.spread_initial
                         ? ConsensusVerdict::asymptotic
                         : ConsensusVerdict::undecided;
    return report;
}

ContractionReport verify_lemma_contraction(int n, double delta, double epsilon, long samples,
                                           std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("verify_lemma_contraction: need samples >= 1");
    const double c = contraction_constant(n, delta, epsilon); // validates n, delta, epsilon
    SplitRng rng = SplitRng(seed).stream("lemma-contraction");

    ContractionReport report;
    report.n = n;
    report.delta = delta;
    report.epsilon = epsilon;
    report.c_theoretical = c;
    report.samples = samples;

    const double center = Cone::gamma_limit(n);
    Eigen::VectorXd etilde(n);
    for (long s = 0; s < samples; ++s) {
        const int k = rng.uniform_int(0, n - 1);
        const Matrix a = random_contraction_matrix(n, delta, k, rng);
        // box-section sample; every fourth draw snaps coordinates to the
        // section boundary so edges and corners are exercised
        for (int i = 0; i < n; ++i) {
            double e = rng.uniform(0.0, epsilon);
            if (s % 4 == 1) e = rng.uniform01() < 0.5 ? 0.0 : epsilon;
            etilde[i] = e;
        }
        StateVector x(n);
        for (int i = 0; i < n; ++i) x[i] = center - etilde[i];
        x *= rng.uniform(0.25, 4.0); // scale invariance of the cone
        const double gamma_image = minimal_gamma(a * x);
        report.c_observed = std::max(report.c_observed, gamma_image / epsilon);
        if (gamma_image > c * epsilon + 1e-9) ++report.violations;
    }
    return report;
}

DiameterDecayReport verify_diameter_decay(const Matrix& a, double epsilon, int m_max,
                                          long sample_pairs, std::uint64_t seed) {
    if (a.rows() != a.cols() || a.rows() < 2) {
        throw std::invalid_argument("verify_diameter_decay: matrix must be square, n >= 2");
    }
    const int n = static_cast<int>(a.rows());
    if (((a * StateVector::Ones(n)) - StateVector::Ones(n)).cwiseAbs().maxCoeff() > 1e-9 ||
        a.minCoeff() < 0.0) {
        throw std::invalid_argument("verify_diameter_decay: matrix must be row-stochastic");
    }
    DiameterDecayReport report;
    // measured single-hop delta: best column floor
    report.measured_delta = 0.0;
    for (int k = 0; k < n; ++k) {
        double col_min = kInf;
        for (int i = 0; i < n; ++i) col_min = std::min(col_min, a(i, k));
        report.measured_delta = std::max(report.measured_delta, col_min);
    }
    if (!(report.measured_delta > 0.0)) {
        throw std::invalid_argument(
            "verify_diameter_decay: no strictly positive column (hypotheses fail)");
    }
    const Cone cone(n, epsilon);
    report.contraction = contraction_constant(n, report.measured_delta, epsilon);
    const double eps0 = std::min(std::max(epsilon, 0.8 / std::sqrt(static_cast<double>(n))),
                                 0.999 * Cone::gamma_limit(n));
    // a full blend collapses every ray onto the consensus direction in one
    // application; the envelope degenerates with it
    report.decay_factor =
        report.contraction == 0.0 ? 0.0 : diameter_decay_factor(n, report.contraction, eps0);

    // sample rays of the cone section: enumerated corners for small n plus
    // random box members
    SplitRng rng = SplitRng(seed).stream("diameter-decay");
    std::vector<StateVector> rays;
    if (n <= 4) {
        const double center = Cone::gamma_limit(n);
        for (int mask = 0; mask < (1 << n); ++mask) {
            StateVector x(n);
            for (int i = 0; i < n; ++i) x[i] = center - ((mask >> i) & 1 ? epsilon : 0.0);
            rays.push_back(x);
        }
    }
    const long want_points =
        static_cast<long>(std::ceil((1.0 + std::sqrt(1.0 + 8.0 * sample_pairs)) / 2.0));
    while (static_cast<long>(rays.size()) < want_points) rays.push_back(sample_cone_box(cone, rng));

    const double alpha = cone_diameter(cone);
    double envelope = alpha;
    std::vector<StateVector> images = rays;
    for (int m = 0; m <= m_max; ++m) {
        double sup = 0.0;
        for (std::size_t i = 0; i < images.size(); ++i) {
            for (std::size_t j = i + 1; j < images.size(); ++j) {
                sup = std::max(sup, hilbert_distance(images[i], images[j]));
            }
        }
        report.rows.push_back({m, sup, envelope});
        if (sup > envelope + 1e-9) ++report.violations;
        envelope *= report.decay_factor;
        for (auto& x : images) x = a * x;
    }
    return report;
}

TwoConeReport two_cone_demo() {
    // dx1/dt = 0, dx2/dt = x1 - x2 has the closed-form flow
    // x(t) = (x1, x1 + (x2 - x1) e^{-t}); run it through the integrator and
    // check against the cone geometry at t = 1
    const Matrix a = (Matrix(2, 2) << 0.0, 0.0, 1.0, -1.0).finished();
    const SystemModel model = SystemModel::ltv_constant(a);

    TwoConeReport report;
    // boundary ray (0, 1): x1 = 0 is invariant, so the positive orthant is
    // never mapped into its own interior
    {
        StateVector x0(2);
        x0 << 0.0, 1.0;
        const Trajectory traj = simulate(model, x0, 0.0, 1.0, 1e-3, Scheme::rk4);
        report.boundary_preserved = true;
        report.boundary_gamma = 0.0;
        for (const auto& x : traj.states) {
            if (x[0] != 0.0) report.boundary_preserved = false;
            report.boundary_gamma = minimal_gamma(x.cwiseMax(0.0));
        }
    }
    // sampled rays of K(gamma): the t = 1 flow lands strictly inside
    for (const double gamma : {0.1, 0.2}) {
        const double tau = Cone(2, gamma).threshold();
        const double theta_lo = std::asin(tau);
        const double theta_hi = std::acos(tau);
        double max_gamma_after = 0.0;
        const int rays = 101;
        for (int i = 0; i < rays; ++i) {
            const double theta = theta_lo + (theta_hi - theta_lo) * i / (rays - 1);
            StateVector x0(2);
            x0 << std::cos(theta), std::sin(theta);
            const Trajectory traj = simulate(model, x0, 0.0, 1.0, 1e-3, Scheme::rk4);
            max_gamma_after = std::max(max_gamma_after, minimal_gamma(traj.states.back()));
        }
        report.cones.push_back({gamma, max_gamma_after, max_gamma_after < gamma});
    }
    report.pass = report.boundary_preserved &&
                  std::abs(report.boundary_gamma - Cone::gamma_limit(2)) < 1e-9;
    for (const auto& c : report.cones) report.pass = report.pass && c.contracted;
    return report;
}

MetricNormReport metric_norm_consistency(const Trajectory& traj) {
    MetricNormReport report;
    if (traj.samples() == 0) return report;
    const int n = traj.dimension();
    const StateVector consensus_dir = StateVector::Constant(n, Cone::gamma_limit(n));

    // calibrate the comparison constant on a cone wide enough for the whole
    // trajectory
    double worst_gamma = 0.0;
    for (const auto& x : traj.states) {
        if (x.minCoeff() <= 0.0) continue;
        worst_gamma = std::max(worst_gamma, minimal_gamma(x));
    }
    const double gamma_cal =
        std::min(std::max(worst_gamma * 1.05, 1e-6), 0.999 * Cone::gamma_limit(n));
    report.comparison_constant = calibrate_norm_metric_constant(Cone(n, gamma_cal), 20000);

    report.worst_sandwich_slack = kInf;
    report.worst_lower_slack = kInf;
    report.worst_upper_slack = kInf;
    for (const auto& x : traj.states) {
        ++report.samples;
        const AnBn q = an_bn(x);
        const double scale = std::max(1.0, std::abs(q.b_n));
        const double lower_gap = q.b_n - n * q.a_n;
        const double upper_gap = 2.0 * n * q.a_n - q.b_n;
        report.worst_sandwich_slack =
            std::min(report.worst_sandwich_slack, std::min(lower_gap, upper_gap) / scale);
        if (lower_gap < -1e-12 * scale || upper_gap < -1e-12 * scale) ++report.violations;

        if (x.minCoeff() <= 0.0) continue;
        const NormMetricBounds bounds =
            norm_metric_bounds(x, consensus_dir, report.comparison_constant);
        const double dist = (x / x.norm() - consensus_dir).norm();
        report.worst_lower_slack = std::min(report.worst_lower_slack, dist - bounds.lower);
        report.worst_upper_slack = std::min(report.worst_upper_slack, bounds.upper - dist);
        if (dist < bounds.lower - 1e-9 || dist > bounds.upper + 1e-9) ++report.violations;
    }
    return report;
}

} // namespace conecert
