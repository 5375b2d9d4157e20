#include "conecert/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace conecert {

WeightedDigraph::WeightedDigraph(int n) : weights_(Matrix::Zero(n, n)) {
    if (n < 1) throw std::invalid_argument("graph needs at least one node");
}

WeightedDigraph::WeightedDigraph(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols() || weights_.rows() < 1) {
        throw std::invalid_argument("graph weights must be square");
    }
    for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
        if (weights_(i, i) != 0.0) {
            throw std::invalid_argument("graph diagonal must be identically zero (no self loops)");
        }
        for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
            if (i != j && weights_(i, j) < 0.0) {
                throw std::invalid_argument("graph weights must be nonnegative");
            }
        }
    }
}

WeightedDigraph WeightedDigraph::from_offdiagonal(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
    Matrix w = m;
    w.diagonal().setZero();
    return WeightedDigraph(std::move(w));
}

void WeightedDigraph::set_weight(int i, int j, double w) {
    if (i == j) throw std::invalid_argument("self loops are not represented");
    if (w < 0.0) throw std::invalid_argument("graph weights must be nonnegative");
    weights_(i, j) = w;
}

WeightedDigraph& WeightedDigraph::operator+=(const WeightedDigraph& other) {
    if (other.size() != size()) throw std::invalid_argument("graph dimension mismatch");
    weights_ += other.weights_;
    return *this;
}

MetzlerMatrix::MetzlerMatrix(Matrix entries, double row_sum_tol) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
        throw std::invalid_argument("Metzler matrix must be square");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        double row_sum = 0.0;
        for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
            if (i != j && entries_(i, j) < 0.0) {
                throw std::invalid_argument("Metzler matrix needs nonnegative off-diagonal");
            }
            row_sum += entries_(i, j);
        }
        if (std::abs(row_sum) > row_sum_tol) {
            throw std::invalid_argument("Metzler matrix rows must sum to zero");
        }
    }
}

double MetzlerMatrix::max_diagonal_magnitude() const {
    return entries_.diagonal().cwiseAbs().maxCoeff();
}

WeightedDigraph digraph_of_metzler(const MetzlerMatrix& a) {
    return WeightedDigraph::from_offdiagonal(a.entries());
}

bool graph_geq(const WeightedDigraph& g1, const WeightedDigraph& g2) {
    if (g1.size() != g2.size()) throw std::invalid_argument("graph dimension mismatch");
    for (int i = 0; i < g1.size(); ++i) {
        for (int j = 0; j < g1.size(); ++j) {
            if (i != j && g1.weight(i, j) < g2.weight(i, j)) return false;
        }
    }
    return true;
}

WeightedDigraph accumulate(std::span<const GraphSample> samples, double t1, double t2,
                           QuadratureRule rule) {
    if (!(t1 < t2)) throw std::invalid_argument("accumulate: need t1 < t2");
    if (samples.empty() || samples.front().t > t1) {
        throw std::invalid_argument("accumulate: samples do not cover the interval start");
    }
    const int n = samples.front().graph.size();
    for (std::size_t s = 1; s < samples.size(); ++s) {
        if (samples[s].t < samples[s - 1].t) {
            throw std::invalid_argument("accumulate: timestamps must be nondecreasing");
        }
        if (samples[s].graph.size() != n) {
            throw std::invalid_argument("accumulate: graph dimensions differ across samples");
        }
    }

    Matrix total = Matrix::Zero(n, n);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const double seg_begin = samples[s].t;
        const double seg_end =
            (s + 1 < samples.size()) ? samples[s + 1].t : std::numeric_limits<double>::infinity();
        const double lo = std::max(seg_begin, t1);
        const double hi = std::min(seg_end, t2);
        if (hi <= lo) continue;
        if (rule == QuadratureRule::left_rectangle || s + 1 == samples.size()) {
            total += (hi - lo) * samples[s].graph.weights();
        } else {
            // linear interpolation of the sampled signal across the segment
            const double span = seg_end - seg_begin;
            const Matrix& a = samples[s].graph.weights();
            const Matrix& b = samples[s + 1].graph.weights();
            const double u_lo = (lo - seg_begin) / span;
            const double u_hi = (hi - seg_begin) / span;
            const double mid = 0.5 * (u_lo + u_hi);
            total += (hi - lo) * ((1.0 - mid) * a + mid * b);
        }
    }
    return WeightedDigraph(std::move(total));
}

std::optional<ConnectivityCertificate> is_delta_connected(const WeightedDigraph& g, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("is_delta_connected: delta must be positive");
    const int n = g.size();
    for (int k = 0; k < n; ++k) {
        double margin = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (i == k) continue;
            if (g.weight(i, k) < delta) ok = false;
            margin = std::min(margin, g.weight(i, k));
        }
        if (ok) {
            return ConnectivityCertificate{ConnectivityKind::delta_connected, k, margin, {}};
        }
    }
    return std::nullopt;
}

std::optional<ConnectivityCertificate> is_single_hop_qsc(const WeightedDigraph& g, double tol) {
    const int n = g.size();
    for (int k = 0; k < n; ++k) {
        double margin = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (i == k) continue;
            if (!(g.weight(i, k) > tol)) ok = false;
            margin = std::min(margin, g.weight(i, k));
        }
        if (ok) return ConnectivityCertificate{ConnectivityKind::single_hop, k, margin, {}};
    }
    return std::nullopt;
}

std::optional<ConnectivityCertificate> is_qsc(const WeightedDigraph& g, double tol) {
    if (tol < 0.0) throw std::invalid_argument("is_qsc: tol must be nonnegative");
    const int n = g.size();
    for (int k = 0; k < n; ++k) {
        // information flows from listened-to node to listener: from v to any
        // j with weight(j, v) > tol
        std::vector<int> parent(n, -2);
        parent[k] = -1;
        std::deque<int> frontier{k};
        int reached = 1;
        double margin = std::numeric_limits<double>::infinity();
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop_front();
            for (int j = 0; j < n; ++j) {
                if (parent[j] != -2 || !(g.weight(j, v) > tol)) continue;
                parent[j] = v;
                margin = std::min(margin, g.weight(j, v));
                ++reached;
                frontier.push_back(j);
            }
        }
        if (reached == n) {
            if (n == 1) margin = 0.0;
            return ConnectivityCertificate{ConnectivityKind::qsc_spanning_tree, k, margin,
                                           std::move(parent)};
        }
    }
    return std::nullopt;
}

PowerDeltaBound power_delta_bound(const WeightedDigraph& s, double lambda_floor) {
    if (!(lambda_floor > 0.0)) {
        throw std::invalid_argument("power_delta_bound: lambda_floor must be positive");
    }
    if (!is_qsc(s, 0.0)) {
        throw std::invalid_argument("power_delta_bound: graph is not quasi-strongly connected");
    }
    const int n = s.size();
    const Matrix base = lambda_floor * Matrix::Identity(n, n) + s.weights();
    Matrix power = base;
    for (int m = 1; m <= n - 1; ++m) {
        for (int k = 0; k < n; ++k) {
            double delta = std::numeric_limits<double>::infinity();
            bool positive = true;
            for (int i = 0; i < n && positive; ++i) {
                if (!(power(i, k) > 0.0)) positive = false;
                if (i != k) delta = std::min(delta, power(i, k));
            }
            if (positive) return PowerDeltaBound{m, delta, k};
        }
        power = power * base;
    }
    // unreachable: a QSC graph has paths of length <= n-1 to its center
    throw std::logic_error("power_delta_bound: no positive column up to n-1");
}

} // namespace conecert
