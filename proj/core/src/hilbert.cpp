#include "conecert/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conecert {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Cone::Cone(int n_, double gamma_) : n(n_), gamma(gamma_) {
    if (n < 2) throw std::invalid_argument("cone dimension must be >= 2");
    if (!(gamma >= 0.0) || gamma >= gamma_validity_margin(n)) {
        throw std::invalid_argument("cone gamma must lie in [0, (1-1e-9)/sqrt(n))");
    }
}

double Cone::gamma_limit(int n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

double Cone::gamma_validity_margin(int n) { return (1.0 - 1e-9) * gamma_limit(n); }

double Cone::threshold() const { return gamma_limit(n) - gamma; }

double hilbert_distance(const StateVector& x, const StateVector& y) {
    require_dimension(x, y);
    require_agents(x);
    double max_ratio = -kInf;
    double min_ratio = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kInf;
        const double r = x[i] / y[i];
        max_ratio = std::max(max_ratio, r);
        min_ratio = std::min(min_ratio, r);
    }
    return std::log(max_ratio / min_ratio);
}

double distance_to_consensus(const StateVector& x) {
    require_agents(x);
    double lo = kInf, hi = -kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) return kInf;
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
    }
    return std::log(hi / lo);
}

bool cone_membership(const StateVector& x, const Cone& cone) {
    require_agents(x);
    if (x.size() != cone.n) throw std::invalid_argument("cone/vector dimension mismatch");
    const double norm = x.norm();
    if (norm == 0.0) return true; // the cones all contain {0}
    return (x / norm).minCoeff() >= cone.threshold();
}

double minimal_gamma(const StateVector& x) {
    require_agents(x);
    if (x.minCoeff() < 0.0) {
        throw std::invalid_argument("minimal_gamma: point outside the positive orthant");
    }
    const double norm = x.norm();
    if (norm == 0.0) throw std::invalid_argument("minimal_gamma: zero vector has no ray");
    const double min_ratio = (x / norm).minCoeff();
    return std::max(0.0, Cone::gamma_limit(static_cast<int>(x.size())) - min_ratio);
}

double cone_diameter(const Cone& cone) {
    const double u = 1.0 - std::sqrt(static_cast<double>(cone.n)) * cone.gamma;
    return std::log(1.0 - cone.n + cone.n / (u * u));
}

double contraction_constant(int n, double delta, double epsilon) {
    if (n < 2) throw std::invalid_argument("contraction_constant: n must be >= 2");
    if (!(delta > 0.0) || delta > 1.0) {
        throw std::invalid_argument("contraction_constant: delta must lie in (0, 1]");
    }
    if (!(epsilon > 0.0) || epsilon >= Cone::gamma_limit(n)) {
        throw std::invalid_argument("contraction_constant: epsilon must lie in (0, 1/sqrt(n))");
    }
    return (1.0 - delta) / (1.0 - std::sqrt(static_cast<double>(n)) * epsilon * delta);
}

NormMetricBounds norm_metric_bounds(const StateVector& x, const StateVector& w,
                                    double comparison_constant) {
    require_dimension(x, w);
    require_agents(x);
    const double nx = x.norm();
    const double nw = w.norm();
    if (nx == 0.0 || nw == 0.0) {
        throw std::invalid_argument("norm_metric_bounds: zero vector cannot be normalized");
    }
    NormMetricBounds out;
    out.scale_x = 1.0 / nx;
    out.scale_w = 1.0 / nw;
    out.constant = comparison_constant;
    out.distance = hilbert_distance(x * out.scale_x, w * out.scale_w);
    if (std::isinf(out.distance)) {
        out.lower = comparison_constant; // tanh saturates at 1
        out.upper = kInf;
        return out;
    }
    out.lower = comparison_constant * std::tanh(0.5 * out.distance);
    out.upper = std::exp(out.distance) - 1.0;
    return out;
}

double calibrate_norm_metric_constant(const Cone& cone, int samples, std::uint64_t seed) {
    SplitRng rng = SplitRng(seed).stream("norm-metric-calibration");
    std::vector<StateVector> points = cone_section_vertices(cone);
    const int random_points = std::max(2, static_cast<int>(std::sqrt(2.0 * samples)));
    points.reserve(points.size() + random_points);
    for (int i = 0; i < random_points; ++i) {
        points.push_back(sample_cone_ray(cone, rng));
    }
    for (auto& p : points) p.normalize();

    double inf_ratio = kInf;
    long pairs = 0;
    for (std::size_t a = 0; a < points.size() && pairs < samples; ++a) {
        for (std::size_t b = a + 1; b < points.size() && pairs < samples; ++b) {
            const double d = hilbert_distance(points[a], points[b]);
            if (!(d > 0.0) || std::isinf(d)) continue;
            const double ratio = (points[a] - points[b]).norm() / std::tanh(0.5 * d);
            inf_ratio = std::min(inf_ratio, ratio);
            ++pairs;
        }
    }
    return std::isinf(inf_ratio) ? 1.0 : inf_ratio;
}

AnBn an_bn(const StateVector& x) {
    require_agents(x);
    const auto n = static_cast<double>(x.size());
    const double norm = x.norm();
    const double total = x.sum();
    // |x - (|x|/sqrt(n)) 1|^2 = 2|x|^2 - (2/sqrt(n))|x| * sum(x)
    // sum_{i,j} (x_i - x_j)^2 = 2n|x|^2 - 2 (sum x)^2
    AnBn out;
    out.a_n = 2.0 * norm * norm - 2.0 / std::sqrt(n) * norm * total;
    out.b_n = 2.0 * n * norm * norm - 2.0 * total * total;
    return out;
}

StateVector cone_section_point(const Cone& cone, const Eigen::VectorXd& etilde) {
    if (etilde.size() != cone.n) throw std::invalid_argument("cone/etilde dimension mismatch");
    StateVector x(cone.n);
    const double center = Cone::gamma_limit(cone.n);
    for (int i = 0; i < cone.n; ++i) {
        if (etilde[i] < 0.0 || etilde[i] > cone.gamma) {
            throw std::invalid_argument("etilde entries must lie in [0, gamma]");
        }
        x[i] = center - etilde[i];
    }
    return x;
}

StateVector sample_cone_box(const Cone& cone, SplitRng& rng) {
    Eigen::VectorXd etilde(cone.n);
    for (int i = 0; i < cone.n; ++i) etilde[i] = rng.uniform(0.0, cone.gamma);
    return cone_section_point(cone, etilde);
}

StateVector sample_cone_ray(const Cone& cone, SplitRng& rng) {
    if (cone.gamma == 0.0) return StateVector::Constant(cone.n, Cone::gamma_limit(cone.n));
    const double tau = cone.threshold();
    StateVector u(cone.n);
    // uniform on the sphere patch: Gaussian direction folded into the positive
    // orthant, rejected against the cone constraint
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (int i = 0; i < cone.n; ++i) u[i] = std::abs(rng.normal());
        const double norm = u.norm();
        if (norm == 0.0) continue;
        u /= norm;
        if (u.minCoeff() >= tau) return u;
    }
    // cone too narrow for rejection; a box-section member is still a valid ray
    u = sample_cone_box(cone, rng);
    return u / u.norm();
}

std::vector<StateVector> cone_section_vertices(const Cone& cone) {
    const double tau = cone.threshold();
    const double free_coord = std::sqrt(1.0 - (cone.n - 1) * tau * tau);
    std::vector<StateVector> vertices;
    vertices.reserve(cone.n);
    for (int j = 0; j < cone.n; ++j) {
        StateVector u = StateVector::Constant(cone.n, tau);
        u[j] = free_coord;
        vertices.push_back(u);
    }
    return vertices;
}

DiameterEstimate estimate_cone_diameter(const Cone& cone, long target_pairs, std::uint64_t seed,
                                        bool include_vertices) {
    SplitRng rng = SplitRng(seed).stream("diameter-estimate");
    // all-pairs over P points gives P(P-1)/2 pairs
    const long points_needed =
        static_cast<long>(std::ceil((1.0 + std::sqrt(1.0 + 8.0 * target_pairs)) / 2.0));
    std::vector<StateVector> points;
    points.reserve(points_needed + cone.n);
    if (include_vertices) {
        for (auto& v : cone_section_vertices(cone)) points.push_back(std::move(v));
    }
    while (static_cast<long>(points.size()) < points_needed) {
        // mix full-cone rays with box-section members
        points.push_back(rng.uniform01() < 0.5 ? sample_cone_ray(cone, rng)
                                               : sample_cone_box(cone, rng));
    }

    DiameterEstimate est;
    est.formula = cone_diameter(cone);
    est.sup = 0.0;
    est.pairs = 0;
    est.worst_excess = -kInf;
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            const double d = hilbert_distance(points[a], points[b]);
            est.sup = std::max(est.sup, d);
            est.worst_excess = std::max(est.worst_excess, d - est.formula);
            ++est.pairs;
        }
    }
    return est;
}

double cone_diameter_derivative(int n, double gamma) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double u = 1.0 - rn * gamma;
    return 2.0 * n * rn / (u * (n - (n - 1) * u * u));
}

DiameterLinearBounds diameter_linear_bounds(int n, double eps0, int grid_points) {
    if (n < 2 || !(eps0 > 0.0) || eps0 >= Cone::gamma_validity_margin(n)) {
        throw std::invalid_argument("diameter_linear_bounds: bad parameters");
    }
    DiameterLinearBounds out;
    out.eps0 = eps0;
    out.grid_points = grid_points;
    // endpoint gamma -> 0: alpha(gamma)/gamma and alpha'(gamma) both tend to 2n^(3/2)
    const double at_zero = 2.0 * n * std::sqrt(static_cast<double>(n));
    out.k1 = at_zero;
    out.k2 = at_zero;
    out.alpha_prime_min = at_zero;
    for (int i = 1; i <= grid_points; ++i) {
        const double gamma = eps0 * static_cast<double>(i) / grid_points;
        const double ratio = cone_diameter(Cone(n, gamma)) / gamma;
        out.k1 = std::min(out.k1, ratio);
        out.k2 = std::max(out.k2, ratio);
        out.alpha_prime_min = std::min(out.alpha_prime_min, cone_diameter_derivative(n, gamma));
    }
    return out;
}

double diameter_decay_factor(int n, double contraction, double eps0) {
    if (!(contraction > 0.0) || contraction >= 1.0) {
        throw std::invalid_argument("diameter_decay_factor: contraction must lie in (0, 1)");
    }
    const DiameterLinearBounds bounds = diameter_linear_bounds(n, eps0);
    const double c = (1.0 - contraction) * bounds.alpha_prime_min;
    return 1.0 / (1.0 + c / (bounds.k2 * contraction));
}

} // namespace conecert
