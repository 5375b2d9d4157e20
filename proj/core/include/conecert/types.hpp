#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace conecert {

/// Stacked agent states at one instant. Dimension n >= 2 is enforced by the
/// operations that consume it; strict positivity is checked at call time,
/// not at construction.
using StateVector = Eigen::VectorXd;

using Matrix = Eigen::MatrixXd;

/// Thrown when a model evaluation violates its structural contract
/// (negative coupling, broken row sums, domain excursion). Carries the
/// offending time and entry so front ends can name them.
class ModelContractError : public std::runtime_error {
public:
    ModelContractError(double t, int i, int j, const std::string& detail)
        : std::runtime_error("model contract violated at t=" + std::to_string(t) +
                             ", entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                             "): " + detail),
          t(t), i(i), j(j) {}

    double t;
    int i;
    int j;
};

inline void require_dimension(const StateVector& x, const StateVector& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()));
    }
}

inline void require_agents(const StateVector& x) {
    if (x.size() < 2) {
        throw std::invalid_argument("state vector needs at least 2 agents");
    }
}

} // namespace conecert
