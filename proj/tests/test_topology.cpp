#include "conecert/topology.hpp"

#include "conecert/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace conecert;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

WeightedDigraph edge(int n, int i, int j, double w) {
    WeightedDigraph g(n);
    g.set_weight(i, j, w);
    return g;
}

} // namespace

TEST_SUITE("topology.generators") {

TEST_CASE("dwell-time switching respects the dwell time") {
    const auto signal =
        dwell_time_signal({edge(2, 0, 1, 1.0), edge(2, 1, 0, 1.0)}, 0.3, 3.0, 77);
    CHECK(signal.intervals() >= 5);  // horizon / (2 tau_d)
    CHECK(signal.intervals() <= 10); // horizon / tau_d
    for (int i = 0; i < signal.intervals(); ++i) {
        const double len = signal.edges[i + 1] - signal.edges[i];
        CHECK(len >= 0.3);
        CHECK(len <= 0.6 + 1e-12);
    }
    CHECK(signal.end() >= 3.0);
}

TEST_CASE("single-graph family yields a constant signal") {
    const auto signal = dwell_time_signal({edge(2, 0, 1, 1.0)}, 0.5, 2.0, 5);
    for (const int ix : signal.index) CHECK(ix == 0);
}

TEST_CASE("dwell time equal to the horizon gives one interval") {
    const auto signal = dwell_time_signal({edge(2, 0, 1, 1.0), edge(2, 1, 0, 1.0)}, 2.0, 2.0, 9);
    CHECK(signal.intervals() == 1);
}

TEST_CASE("generators are reproducible from the seed") {
    const auto a = chain_random_activation(10, 0.2, 20.0, 42);
    const auto b = chain_random_activation(10, 0.2, 20.0, 42);
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) CHECK(a.edges[i] == b.edges[i]);
    for (int s = 0; s < a.intervals(); ++s) {
        CHECK((a.library[a.index[s]].weights() == b.library[b.index[s]].weights()));
    }
    const auto c = chain_random_activation(10, 0.2, 20.0, 43);
    CHECK(a.edges != c.edges);
}

TEST_CASE("chain activation: sparse, thresholded, chain-only") {
    const double delta = 0.25;
    const auto signal = chain_random_activation(8, delta, 30.0, 4242);
    for (int s = 0; s < signal.intervals(); ++s) {
        const WeightedDigraph& g = signal.library[signal.index[s]];
        int active = 0;
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                const double w = g.weight(i, j);
                if (w == 0.0) continue;
                CHECK(j == i + 1); // only chain links, pointing up the chain
                CHECK(w >= delta);
                CHECK(w <= 2.0 * delta);
                ++active;
            }
        }
        CHECK(active >= 1);
        CHECK(active <= 3);
    }
}

TEST_CASE("two-node chain always activates the single link") {
    const auto signal = chain_random_activation(2, 0.1, 5.0, 1);
    for (int s = 0; s < signal.intervals(); ++s) {
        CHECK(signal.library[signal.index[s]].weight(0, 1) >= 0.1);
    }
}

TEST_CASE("accumulated chain graph carries every link over a long window") {
    const auto signal = chain_random_activation(10, 0.2, 40.0, 42);
    const auto samples = signal.graph_samples();
    const WeightedDigraph acc = accumulate(samples, 0.0, 40.0);
    for (int i = 0; i < 9; ++i) CHECK(acc.weight(i, i + 1) > 0.0);
}

} // TEST_SUITE

TEST_SUITE("topology.bound-verifier") {

TEST_CASE("constant QSC system dominates half its own accumulation") {
    const Matrix a = mat2(0, 0, 1, -1);
    const SystemModel model = SystemModel::ltv_constant(a);
    const Trajectory traj =
        simulate(model, (StateVector(2) << 1.0, 2.0).finished(), 0.0, 4.0, 0.01, Scheme::euler);
    const CheckpointSequence checkpoints = CheckpointSequence::uniform(0.0, 4.0, 1.0);
    WeightedDigraph half(2);
    half.set_weight(1, 0, 0.5);
    const AccumulatedBoundReport report =
        verify_accumulated_lower_bound(model, traj, checkpoints, half);
    CHECK(report.pass);
    CHECK(report.intervals.size() == 4);
    CHECK(report.verdict_label == "verified");
    REQUIRE(report.bound_qsc.has_value());
    CHECK(report.bound_qsc->center == 0);
    for (const auto& interval : report.intervals) {
        CHECK(interval.margin == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(interval.binding_i == 1);
        CHECK(interval.binding_j == 0);
    }
}

TEST_CASE("adversarial single-link signal fails with the binding entry named") {
    // only the (1 listens to 2) link is ever active; a bound asking for the
    // (3 listens to 2) link must fail on it
    WeightedDigraph only(3);
    only.set_weight(0, 1, 1.0);
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = 1.0;
    a(0, 0) = -1.0;
    const SystemModel model = SystemModel::ltv_constant(a);
    const Trajectory traj = simulate(model, (StateVector(3) << 1.0, 2.0, 3.0).finished(), 0.0,
                                     2.0, 0.01, Scheme::euler);
    WeightedDigraph bound(3);
    bound.set_weight(0, 1, 0.5);
    bound.set_weight(2, 1, 0.5);
    const AccumulatedBoundReport report = verify_accumulated_lower_bound(
        model, traj, CheckpointSequence::uniform(0.0, 2.0, 1.0), bound);
    CHECK_FALSE(report.pass);
    const auto& worst = report.intervals[report.worst_interval];
    CHECK(worst.binding_i == 2);
    CHECK(worst.binding_j == 1);
    CHECK(report.worst_margin == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("dwell switching dominates the dwell-weighted family sum") {
    // every mode that accumulates at least tau_d of activation contributes
    // tau_d times its graph to the union
    const double tau_d = 0.4;
    std::vector<WeightedDigraph> family{edge(3, 0, 1, 1.0), edge(3, 1, 2, 0.5),
                                        edge(3, 2, 0, 0.25)};
    const auto signal = dwell_time_signal(family, tau_d, 12.0, 99);
    std::map<int, double> durations;
    for (int s = 0; s < signal.intervals(); ++s) {
        durations[signal.index[s]] += signal.edges[s + 1] - signal.edges[s];
    }
    REQUIRE(durations.size() == family.size()); // every mode appears for this seed
    for (const auto& [ix, total] : durations) CHECK(total >= tau_d);

    const WeightedDigraph acc = accumulate(signal.graph_samples(), 0.0, signal.end());
    WeightedDigraph weighted_sum(3);
    for (const auto& g : family) weighted_sum += tau_d * g;
    CHECK(graph_geq(acc, weighted_sum));
}

TEST_CASE("pointwise form is labeled sampled and passes on an x-independent system") {
    const Matrix a = mat2(0, 0, 1, -1);
    const SystemModel model = SystemModel::ltv_constant(a);
    const Trajectory traj =
        simulate(model, (StateVector(2) << 1.0, 2.0).finished(), 0.0, 2.0, 0.01, Scheme::euler);
    WeightedDigraph half(2);
    half.set_weight(1, 0, 0.5);
    const AccumulatedBoundReport report =
        verify_accumulated_lower_bound(model, traj, CheckpointSequence::uniform(0.0, 2.0, 1.0),
                                       half, BoundForm::pointwise_sampled);
    CHECK(report.pass);
    CHECK(report.verdict_label == "sampled");
}

TEST_CASE("shrinking the bound never flips pass to fail") {
    const Matrix a = mat2(0, 0, 1, -1);
    const SystemModel model = SystemModel::ltv_constant(a);
    const Trajectory traj =
        simulate(model, (StateVector(2) << 1.0, 2.0).finished(), 0.0, 3.0, 0.01, Scheme::euler);
    const CheckpointSequence checkpoints = CheckpointSequence::uniform(0.0, 3.0, 1.0);
    WeightedDigraph bound(2);
    bound.set_weight(1, 0, 0.8);
    REQUIRE(verify_accumulated_lower_bound(model, traj, checkpoints, bound).pass);
    for (const double shrink : {0.5, 0.25, 0.01}) {
        CHECK(verify_accumulated_lower_bound(model, traj, checkpoints, shrink * bound).pass);
    }
}

TEST_CASE("coverage gaps are errors") {
    const SystemModel model = SystemModel::ltv_constant(mat2(0, 0, 1, -1));
    const Trajectory traj =
        simulate(model, (StateVector(2) << 1.0, 2.0).finished(), 0.0, 1.0, 0.01, Scheme::euler);
    CHECK_THROWS_AS((void)verify_accumulated_lower_bound(
                        model, traj, CheckpointSequence::uniform(0.0, 2.0, 1.0),
                        WeightedDigraph(2)),
                    std::invalid_argument);
}

} // TEST_SUITE
