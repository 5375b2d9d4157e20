#pragma once

#include "conecert/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace conecert {

/// Weighted digraph given by its nonnegative weight matrix with zero
/// diagonal. weight(i, j) > 0 means a directed link from node i to node j,
/// i.e. agent i listens to agent j; information therefore flows j -> i.
class WeightedDigraph {
public:
    /// Zero graph on n nodes.
    explicit WeightedDigraph(int n);
    /// Validating constructor: off-diagonal >= 0, diagonal identically 0.
    explicit WeightedDigraph(Matrix weights);

    /// Copies the off-diagonal of any square matrix, zeroing the diagonal.
    static WeightedDigraph from_offdiagonal(const Matrix& m);

    [[nodiscard]] int size() const { return static_cast<int>(weights_.rows()); }
    [[nodiscard]] double weight(int i, int j) const { return weights_(i, j); }
    [[nodiscard]] const Matrix& weights() const { return weights_; }

    void set_weight(int i, int j, double w);

    WeightedDigraph& operator+=(const WeightedDigraph& other);
    friend WeightedDigraph operator+(WeightedDigraph lhs, const WeightedDigraph& rhs) {
        lhs += rhs;
        return lhs;
    }
    friend WeightedDigraph operator*(double s, const WeightedDigraph& g) {
        return WeightedDigraph(s * g.weights_);
    }

private:
    Matrix weights_;
};

/// Metzler matrix with zero row sums: off-diagonal entries nonnegative and
/// each row summing to zero within tolerance, so A*1 = 0 and every
/// consensus state c*1 is an equilibrium.
class MetzlerMatrix {
public:
    explicit MetzlerMatrix(Matrix entries, double row_sum_tol = 1e-12);

    [[nodiscard]] int size() const { return static_cast<int>(entries_.rows()); }
    [[nodiscard]] const Matrix& entries() const { return entries_; }
    [[nodiscard]] double max_diagonal_magnitude() const;

private:
    Matrix entries_;
};

enum class ConnectivityKind { qsc_spanning_tree, single_hop, delta_connected };

/// Witness that a graph satisfies one of the connectivity notions.
/// For the spanning-tree kind, parent[] encodes the reverse-reachability
/// tree rooted at center (parent[center] = -1) along which information from
/// the center reaches every node, and margin is the smallest link weight
/// the tree uses. For the single-hop kinds, margin is the smallest entry of
/// the center column over rows i != center.
struct ConnectivityCertificate {
    ConnectivityKind kind;
    int center;
    double margin;
    std::vector<int> parent;
};

/// Extracts the associated graph of a Metzler matrix (off-diagonal weights,
/// no self loops).
[[nodiscard]] WeightedDigraph digraph_of_metzler(const MetzlerMatrix& a);

/// Elementwise partial order on the off-diagonal weights.
[[nodiscard]] bool graph_geq(const WeightedDigraph& g1, const WeightedDigraph& g2);

struct GraphSample {
    double t;
    WeightedDigraph graph;
};

enum class QuadratureRule { left_rectangle, trapezoid };

/// Accumulated graph over [t1, t2]: the elementwise time integral of the
/// sampled graph signal. Samples are left endpoints of segments; the last
/// sample extends to +infinity. Left-rectangle (default) is exact for
/// piecewise-constant signals sampled at their breakpoints.
[[nodiscard]] WeightedDigraph accumulate(std::span<const GraphSample> samples, double t1,
                                         double t2,
                                         QuadratureRule rule = QuadratureRule::left_rectangle);

/// Single-hop connectivity at threshold delta: some column k has
/// weight(i, k) >= delta for all i != k. Returns the smallest-index center.
[[nodiscard]] std::optional<ConnectivityCertificate> is_delta_connected(const WeightedDigraph& g,
                                                                        double delta);

/// Single-hop connectivity with strict positivity above tol.
[[nodiscard]] std::optional<ConnectivityCertificate> is_single_hop_qsc(const WeightedDigraph& g,
                                                                       double tol = 0.0);

/// Quasi-strong connectivity in the spanning-tree sense: some center k can
/// reach every node along directed links carrying information from k
/// (weights <= tol are treated as absent). The search follows the
/// listening convention: node j is a neighbor of v when weight(j, v) > tol.
[[nodiscard]] std::optional<ConnectivityCertificate> is_qsc(const WeightedDigraph& g,
                                                            double tol = 0.0);

/// Bridge from the spanning-tree notion to the single-hop one: the smallest
/// m <= n-1 such that (lambda_floor*I + S)^m has a strictly positive column,
/// and the minimum entry delta of that column over off-diagonal rows. This
/// is the single-hop certificate for a product of m consecutive transition
/// factors whose diagonals are floored by lambda_floor.
struct PowerDeltaBound {
    int m;
    double delta;
    int center;
};
[[nodiscard]] PowerDeltaBound power_delta_bound(const WeightedDigraph& s, double lambda_floor);

} // namespace conecert
