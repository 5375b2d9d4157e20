#include "conecert/dynamics.hpp"

#include "conecert/hilbert.hpp"
#include "conecert/rng.hpp"
#include "conecert/stepper.hpp"

#include <doctest.h>

#include <cmath>

using namespace conecert;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

StateVector vec(std::initializer_list<double> vals) {
    StateVector x(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (const double v : vals) x[i++] = v;
    return x;
}

SystemModel fig1_model() { return SystemModel::ltv_constant(mat2(0, 0, 1, -1)); }

/// x2(t) = x1 + (x2(0) - x1) e^{-t}
double fig1_exact_x2(double x1, double x20, double t) { return x1 + (x20 - x1) * std::exp(-t); }

Matrix random_metzler(int n, SplitRng& rng, double row_mass = 1.0) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i != j && rng.uniform01() < 0.6) {
                a(i, j) = rng.uniform(0.0, row_mass / n);
                row += a(i, j);
            }
        }
        a(i, i) = -row;
    }
    return a;
}

} // namespace

TEST_SUITE("dynamics.step") {

TEST_CASE("zero field leaves the state alone") {
    const SystemModel still = SystemModel::ltv_constant(Matrix::Zero(3, 3));
    const StateVector x = vec({1, 2, 3});
    CHECK(step(still, 0.0, x, 0.1, Scheme::euler) == x);
    CHECK(step(still, 0.0, x, 0.1, Scheme::rk4) == x);
}

TEST_CASE("hand-computed euler step") {
    const StateVector next = step(fig1_model(), 0.0, vec({1, 0}), 0.1, Scheme::euler);
    CHECK(next[0] == 1.0);
    CHECK(next[1] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("consensus states are fixed points") {
    const StateVector c = StateVector::Constant(2, 4.2);
    const StateVector next = step(fig1_model(), 0.0, c, 0.2, Scheme::rk4);
    CHECK(next == c); // this field is exactly zero on multiples of 1
}

TEST_CASE("euler strict mode rejects h*lambda > 1") {
    const SystemModel fast = SystemModel::ltv_constant(mat2(-3, 3, 3, -3));
    CHECK_THROWS_AS((void)step(fast, 0.0, vec({1, 2}), 0.5, Scheme::euler),
                    std::invalid_argument);
    CHECK_NOTHROW((void)step(fast, 0.0, vec({1, 2}), 1.0 / 3.0, Scheme::euler));
    const SystemModel loose = fast.with_validation(ValidationMode::permissive);
    CHECK_NOTHROW((void)step(loose, 0.0, vec({1, 2}), 0.5, Scheme::euler));
}

} // TEST_SUITE

TEST_SUITE("dynamics.simulate") {

TEST_CASE("constant initial state gives a flat trajectory") {
    const Trajectory traj = simulate(fig1_model(), StateVector::Constant(2, 3.0), 0.0, 2.0, 0.01,
                                     Scheme::euler);
    for (const auto& x : traj.states) CHECK(x == StateVector::Constant(2, 3.0));
    CHECK(traj.diagnostics.back().spread == 0.0);
    CHECK(traj.diagnostics.back().hilbert_to_ones == 0.0);
}

TEST_CASE("leader-follower matches the closed form") {
    const Trajectory traj = simulate(fig1_model(), vec({1, 2}), 0.0, 10.0, 1e-3, Scheme::rk4);
    for (int k = 0; k < traj.samples(); k += 500) {
        const double expected = fig1_exact_x2(1.0, 2.0, traj.times[k]);
        CHECK(std::abs(traj.states[k][1] - expected) <= 1e-6);
    }
    CHECK(traj.diagnostics.back().spread == doctest::Approx(std::exp(-10.0)).epsilon(1e-4));
}

TEST_CASE("grids are refined at switching breakpoints") {
    std::vector<Matrix> family{mat2(0, 0, 1, -1), mat2(-1, 1, 0, 0)};
    SwitchingSignal signal;
    signal.edges = {0.0, 0.437, 1.0};
    signal.index = {0, 1};
    const SystemModel model = SystemModel::ltv_switching(family, signal);
    const Trajectory traj = simulate(model, vec({1, 2}), 0.0, 1.0, 0.1, Scheme::euler);
    bool hit = false;
    for (const double t : traj.times) hit = hit || t == 0.437;
    CHECK(hit);
}

TEST_CASE("spread is nonincreasing and the state box invariant under euler") {
    SplitRng rng(401);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = rng.uniform_int(2, 6);
        const SystemModel model = SystemModel::ltv_constant(random_metzler(n, rng, 2.0));
        StateVector x0(n);
        for (int i = 0; i < n; ++i) x0[i] = rng.uniform(-2.0, 3.0);
        const Trajectory traj = simulate(model, x0, 0.0, 5.0, 0.05, Scheme::euler);
        double lo = x0.minCoeff(), hi = x0.maxCoeff();
        for (int k = 1; k < traj.samples(); ++k) {
            const double new_lo = traj.states[k].minCoeff();
            const double new_hi = traj.states[k].maxCoeff();
            CHECK(new_lo >= lo - 1e-12);
            CHECK(new_hi <= hi + 1e-12);
            CHECK(traj.diagnostics[k].spread <= traj.diagnostics[k - 1].spread + 1e-12);
            lo = new_lo;
            hi = new_hi;
        }
    }
}

TEST_CASE("euler halves the endpoint error with h") {
    double prev = 0.0;
    for (int k = 4; k <= 8; ++k) {
        const double h = std::pow(2.0, -k);
        const Trajectory traj = simulate(fig1_model(), vec({1, 2}), 0.0, 1.0, h, Scheme::euler);
        const double err = std::abs(traj.states.back()[1] - fig1_exact_x2(1, 2, 1.0));
        if (prev != 0.0) {
            CHECK(prev / err == doctest::Approx(2.0).epsilon(0.1));
        }
        prev = err;
    }
}

} // TEST_SUITE

TEST_SUITE("dynamics.factorization") {

TEST_CASE("zero field factors to the identity") {
    const SystemModel still = SystemModel::ltv_constant(Matrix::Zero(3, 3));
    const TransitionFactor factor =
        factorize_transition(still, 0.0, 1.0, vec({1, 2, 3}), 100);
    CHECK(factor.p == Matrix::Identity(3, 3));
    CHECK(factor.endpoint == vec({1, 2, 3}));
    // I >= e^0 (I + 0): the lower bound holds with zero slack
    const LowerBoundCheck check = lower_bound_transition(factor, WeightedDigraph(3), 0.0);
    CHECK(check.holds);
    CHECK(check.worst_slack == 0.0);
}

TEST_CASE("factors are nonnegative with unit row sums and replay simulate exactly") {
    SplitRng rng(402);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(2, 5);
        const SystemModel model = SystemModel::ltv_constant(random_metzler(n, rng, 2.0));
        StateVector x0(n);
        for (int i = 0; i < n; ++i) x0[i] = rng.uniform(0.5, 3.0);
        const int steps = 400;
        const TransitionFactor factor = factorize_transition(model, 0.0, 0.5, x0, steps);
        CHECK(factor.p.minCoeff() >= 0.0);
        const StateVector row_sums = factor.p * StateVector::Ones(n);
        CHECK((row_sums.array() - 1.0).abs().maxCoeff() <= 1e-8);

        // identical grid, identical arithmetic: endpoints agree bitwise
        const Trajectory traj =
            simulate(model, x0, 0.0, 0.5, 0.5 / steps, Scheme::euler);
        CHECK(factor.endpoint == traj.states.back());

        // the dense product is the same linear map up to rounding
        CHECK(((factor.p * x0) - factor.endpoint).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, factor.endpoint.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("constant field converges to the matrix exponential") {
    // crude check here; the acceptance suite compares against the
    // scaling-and-squaring oracle at N = 10^6
    const Matrix a = mat2(0, 0, 1, -1);
    const TransitionFactor factor =
        factorize_transition(SystemModel::ltv_constant(a), 0.0, 1.0, vec({1, 2}), 10000);
    Matrix expm(2, 2);
    expm << 1, 0, 1 - std::exp(-1.0), std::exp(-1.0);
    CHECK((factor.p - expm).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("too-coarse factorization is rejected") {
    const SystemModel fast = SystemModel::ltv_constant(mat2(-3, 3, 3, -3));
    CHECK_THROWS_AS((void)factorize_transition(fast, 0.0, 1.0, vec({1, 2}), 2),
                    std::invalid_argument);
}

TEST_CASE("transition lower bound holds on the leader-follower system") {
    const TransitionFactor factor =
        factorize_transition(fig1_model(), 0.0, 1.0, vec({1, 2}), 400000);
    // the interval integral of the coupling has the closed form [[0,0],[1,0]]
    WeightedDigraph accumulated(2);
    accumulated.set_weight(1, 0, 1.0);
    const LowerBoundCheck check = lower_bound_transition(factor, accumulated, 1.0);
    CHECK(check.holds);
    // closed form P = [[1, 0], [1 - e^{-1}, e^{-1}]]: the (2,2) entry binds
    CHECK(check.worst_slack >= -1e-6);
    CHECK(check.worst_slack <= 1e-4);
    CHECK(check.worst_i == 1);
    CHECK(check.worst_j == 1);
}

TEST_CASE("transition lower bound across random switching systems") {
    SplitRng rng(403);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.uniform_int(2, 3);
        std::vector<Matrix> family{random_metzler(n, rng, 1.0), random_metzler(n, rng, 1.0)};
        SwitchingSignal signal;
        signal.edges = {0.0, rng.uniform(0.1, 0.3), 0.5};
        signal.index = {rng.uniform_int(0, 1), rng.uniform_int(0, 1)};
        const SystemModel model = SystemModel::ltv_switching(family, signal);
        StateVector x0(n);
        for (int i = 0; i < n; ++i) x0[i] = rng.uniform(0.5, 2.0);
        const TransitionFactor factor = factorize_transition(model, 0.0, 0.5, x0, 100000);
        const WeightedDigraph accumulated =
            WeightedDigraph::from_offdiagonal(factor.accumulated_offdiag);
        CHECK(lower_bound_transition(factor, accumulated, factor.suggested_lambda()).holds);
    }
}

TEST_CASE("mismatched accumulation is detected") {
    const TransitionFactor factor =
        factorize_transition(fig1_model(), 0.0, 1.0, vec({1, 2}), 1000);
    WeightedDigraph wrong(2);
    wrong.set_weight(0, 1, 5.0);
    CHECK_THROWS_AS((void)lower_bound_transition(factor, wrong, 1.0), std::invalid_argument);
}

} // TEST_SUITE

TEST_SUITE("dynamics.transforms") {

TEST_CASE("internal dynamics transform") {
    const Trajectory traj = simulate(fig1_model(), vec({1, 2}), 0.0, 2.0, 0.01, Scheme::rk4);
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    auto minus_one = [](double) { return -1.0; };

    const Trajectory same = internal_dynamics_transform(zero, zero, traj);
    for (int k = 0; k < traj.samples(); ++k) CHECK(same.states[k] == traj.states[k]);

    // b = 1 subtracts t from every component; spreads match exactly
    const Trajectory drift = internal_dynamics_transform(zero, one, traj);
    for (int k = 0; k < traj.samples(); ++k) {
        CHECK(drift.states[k][0] ==
              doctest::Approx(traj.states[k][0] - traj.times[k]).epsilon(1e-12));
        CHECK(drift.diagnostics[k].spread ==
              doctest::Approx(traj.diagnostics[k].spread).epsilon(1e-12));
    }

    // a = -1 scales the spread by e^{-t}
    const Trajectory damped = internal_dynamics_transform(minus_one, zero, traj);
    for (int k = 0; k < traj.samples(); k += 50) {
        CHECK(damped.diagnostics[k].spread ==
              doctest::Approx(std::exp(-traj.times[k]) * traj.diagnostics[k].spread)
                  .epsilon(1e-9));
    }
}

TEST_CASE("positive shift") {
    const ShiftResult a = shift_to_positive(vec({1, 2}), 1.0);
    CHECK(a.alpha == 1.0);
    CHECK(a.shifted == vec({2, 3}));

    const ShiftResult b = shift_to_positive(vec({-3, 5}), 0.5);
    CHECK(b.alpha == 3.5);
    CHECK(b.shifted == vec({0.5, 8.5}));

    CHECK(shift_to_positive(-1.0, 1.0) == 2.0);
    CHECK_THROWS_AS((void)shift_to_positive(vec({1, 2}), 0.0), std::invalid_argument);
}

TEST_CASE("unshift restores original coordinates") {
    const Trajectory traj = simulate(fig1_model(), vec({2, 3}), 0.0, 1.0, 0.01, Scheme::euler);
    const Trajectory back = unshift_trajectory(traj, 1.0);
    for (int k = 0; k < traj.samples(); ++k) {
        CHECK((back.states[k] - (traj.states[k].array() - 1.0).matrix()).cwiseAbs().maxCoeff() ==
              0.0);
        CHECK(back.diagnostics[k].spread ==
              doctest::Approx(traj.diagnostics[k].spread).epsilon(1e-12));
    }
}

TEST_CASE("transform preserves the consensus verdict scaffolding") {
    // spread goes to zero in x iff it does in y, across the three signals
    const Trajectory traj = simulate(fig1_model(), vec({1, 2}), 0.0, 8.0, 0.01, Scheme::rk4);
    auto decay = [](double) { return -0.3; };
    auto drift = [](double) { return 0.7; };
    const Trajectory y = internal_dynamics_transform(decay, drift, traj);
    CHECK(y.diagnostics.back().spread <= 1e-3 * y.diagnostics.front().spread);
}

} // TEST_SUITE
