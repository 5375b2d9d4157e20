#include "conecert/scenario.hpp"

#include <doctest.h>

#include <filesystem>

using namespace conecert;

namespace {

const std::filesystem::path kScenarios = CONECERT_SCENARIO_DIR;

const char* const kMinimal = R"(
[scenario]
name = "mini"
seed = 9

[model]
kind = "ltv"
n = 2
A = [[0.0, 0.0], [1.0, -1.0]]

[initial]
x0 = [1.0, 2.0]

[horizon]
t_end = 2.0
)";

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("parses sections, arrays, matrices, comments") {
    const ConfigDoc doc = ConfigDoc::parse_string(R"(
# leading comment
[a]
x = 1.5      # trailing comment
flag = true
name = "hello world"
arr = [1, 2, 3]
m = [[1, 0], [0, 1]]
)");
    CHECK(doc.at("a.x").as_number() == 1.5);
    CHECK(doc.at("a.flag").as_bool());
    CHECK(doc.at("a.name").as_string() == "hello world");
    CHECK(doc.at("a.arr").as_array() == std::vector<double>{1, 2, 3});
    CHECK(doc.at("a.m").as_matrix() == Matrix::Identity(2, 2));
}

TEST_CASE("multi-line matrices gather until brackets balance") {
    const ConfigDoc doc = ConfigDoc::parse_string("[a]\nm = [\n [1, 2],\n [3, 4]\n]\n");
    const Matrix m = doc.at("a.m").as_matrix();
    CHECK(m(0, 1) == 2.0);
    CHECK(m(1, 0) == 3.0);
}

TEST_CASE("errors carry the origin and line number") {
    try {
        (void)ConfigDoc::parse_string("[a]\nx = \n", "cfg");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).rfind("cfg:2:", 0) == 0);
    }
    CHECK_THROWS_AS((void)ConfigDoc::parse_string("[a]\nx = 1\nx = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS((void)ConfigDoc::parse_string("[a]\nx = oops\n"), std::invalid_argument);
}

TEST_CASE("canonical text is sorted and hashing is value sensitive") {
    ConfigDoc doc = ConfigDoc::parse_string("[b]\ny = 2\n[a]\nx = 1\n");
    const std::string canon = doc.canonical_text();
    CHECK(canon == "a.x = 1\nb.y = 2\n");
    const std::uint64_t h0 = doc.hash();
    doc.set("b.y", ConfigValue{3.0});
    CHECK(doc.hash() != h0);
}

TEST_CASE("resolution fills defaults and records them") {
    const Scenario s = Scenario::resolve(ConfigDoc::parse_string(kMinimal));
    CHECK(s.name == "mini");
    CHECK(s.seed == 9);
    CHECK(s.scheme == Scheme::euler);
    CHECK(s.step_h == 0.01);
    CHECK(s.fit_window_fraction == 0.5);
    CHECK(s.x0[1] == 2.0);
    // defaults become part of the hashed document
    CHECK(s.resolved().has("integrator.h"));
    CHECK(s.resolved().has("certification.residual_tol"));
    CHECK(s.hash_hex().size() == 16);
}

TEST_CASE("seeded box initial states are reproducible") {
    const char* const boxed = R"(
[scenario]
name = "boxed"
seed = 31
[model]
kind = "ltv"
n = 3
A = [[0, 0, 0], [1, -1, 0], [0, 1, -1]]
[initial]
box = [0.5, 1.5]
[horizon]
t_end = 1.0
)";
    const Scenario a = Scenario::resolve(ConfigDoc::parse_string(boxed));
    const Scenario b = Scenario::resolve(ConfigDoc::parse_string(boxed));
    CHECK(a.x0 == b.x0);
    CHECK(a.x0.minCoeff() >= 0.5);
    CHECK(a.x0.maxCoeff() <= 1.5);

    ConfigDoc other = ConfigDoc::parse_string(boxed);
    other.set("scenario.seed", ConfigValue{32.0});
    CHECK(Scenario::resolve(other).x0 != a.x0);
}

TEST_CASE("validation failures name the offending key") {
    ConfigDoc missing = ConfigDoc::parse_string("[model]\nkind = \"ltv\"\nn = 2\n");
    CHECK_THROWS_WITH_AS((void)Scenario::resolve(missing),
                         doctest::Contains("horizon.t_end"), std::invalid_argument);

    ConfigDoc bad_kind = ConfigDoc::parse_string(kMinimal);
    bad_kind.set("model.kind", ConfigValue{std::string("nonsense")});
    CHECK_THROWS_AS((void)Scenario::resolve(bad_kind), std::invalid_argument);

    ConfigDoc bad_x0 = ConfigDoc::parse_string(kMinimal);
    bad_x0.set("initial.x0", ConfigValue{std::vector<double>{1.0}});
    CHECK_THROWS_AS((void)Scenario::resolve(bad_x0), std::invalid_argument);
}

TEST_CASE("stochastic scenarios must declare a seed") {
    const char* const no_seed = R"(
[model]
kind = "ltv"
n = 2
A = [[0.0, 0.0], [1.0, -1.0]]
[initial]
box = [0.0, 1.0]
[horizon]
t_end = 1.0
)";
    CHECK_THROWS_WITH_AS((void)Scenario::resolve(ConfigDoc::parse_string(no_seed)),
                         doctest::Contains("scenario.seed"), std::invalid_argument);
}

TEST_CASE("all bundled scenarios resolve") {
    for (const char* name :
         {"fig1.toml", "chain10.toml", "moreau_ltv.toml", "kuramoto_qsc.toml",
          "hk_shrinking_radius.toml"}) {
        const Scenario s = Scenario::resolve(ConfigDoc::parse_file(kScenarios / name));
        CHECK(s.model.size() >= 2);
        CHECK(s.t_end > s.t0);
    }
}

TEST_CASE("swarm scenarios simulate but refuse certification with repulsion") {
    // repulsion outweighs attraction between agents 2 and 3, so that pair's
    // coupling is negative; horizons stay short of the attraction collision
    const char* const swarm = R"(
[scenario]
name = "swarm"
seed = 5
[model]
kind = "animal_group"
n = 3
attraction = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
repulsion = [[0, 0, 0], [0, 0, 1], [0, 1, 0]]
phi_attract = 1.0
phi_repel = 2.0
validation = "permissive"
[initial]
x0 = [0.5, 1.5, 3.0]
[integrator]
h = 0.01
[horizon]
t_end = 0.2
)";
    const Scenario permissive = Scenario::resolve(ConfigDoc::parse_string(swarm));
    CHECK(permissive.model.kind() == ModelKind::animal_group);
    const Trajectory traj =
        simulate(permissive.model, permissive.x0, 0.0, 0.2, 0.01, Scheme::euler);
    CHECK(traj.samples() > 10);
    CHECK(permissive.model.clamped_entries() > 0); // net-negative pair clamped away

    // strict mode (the certification path) rejects repulsion outright
    ConfigDoc strict_doc = ConfigDoc::parse_string(swarm);
    strict_doc.set("model.validation", ConfigValue{std::string("strict")});
    const Scenario strict = Scenario::resolve(strict_doc);
    CHECK_THROWS_AS((void)simulate(strict.model, strict.x0, 0.0, 0.2, 0.01, Scheme::euler),
                    ModelContractError);

    // attraction-only swarms are valid Metzler systems and contract
    ConfigDoc pure_doc = ConfigDoc::parse_string(swarm);
    pure_doc.set("model.repulsion",
                 ConfigValue{std::vector<std::vector<double>>{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}});
    pure_doc.set("model.validation", ConfigValue{std::string("strict")});
    const Scenario pure = Scenario::resolve(pure_doc);
    const Trajectory contracting =
        simulate(pure.model, pure.x0, 0.0, 0.2, 0.01, Scheme::euler);
    CHECK(contracting.spread_final() < contracting.spread_initial());
}

TEST_CASE("phase cycles cover late horizons") {
    const char* const late_phase = R"(
[scenario]
name = "late_phase"
[model]
kind = "ltv"
n = 2
phase = 0.25
family = [
  [0.0, 0.0],
  [1.0, -1.0],
  [-1.0, 1.0],
  [0.0, 0.0]
]
[initial]
x0 = [1.0, 2.0]
[horizon]
t0 = 3.0
t_end = 5.0
)";
    const Scenario s = Scenario::resolve(ConfigDoc::parse_string(late_phase));
    // both modes must still alternate beyond t0; mode 0 couples (2<-1),
    // mode 1 couples (1<-2)
    CHECK(s.model.evaluate(3.1, s.x0).entries()(1, 0) == 1.0);
    CHECK(s.model.evaluate(3.35, s.x0).entries()(0, 1) == 1.0);
    CHECK(s.model.evaluate(4.85, s.x0).entries()(0, 1) == 1.0);
    const Trajectory traj = simulate(s.model, s.x0, s.t0, s.t_end, 0.01, Scheme::euler);
    CHECK(traj.spread_final() < traj.spread_initial());
}

TEST_CASE("generated topologies follow a nonzero start time") {
    const char* const late = R"(
[scenario]
name = "late"
seed = 13
[model]
kind = "kuramoto"
n = 4
[topology]
generator = "chain_random_activation"
delta = 0.3
[initial]
x0 = [0.2, 0.6, 1.1, 1.5]
[integrator]
h = 0.01
[horizon]
t0 = 2.0
t_end = 5.0
)";
    const Scenario s = Scenario::resolve(ConfigDoc::parse_string(late));
    REQUIRE(s.topology_signal.has_value());
    CHECK(s.topology_signal->begin() == 2.0);
    CHECK(s.topology_signal->end() >= 5.0);
    const Trajectory traj = simulate(s.model, s.x0, s.t0, s.t_end, s.step_h, s.scheme);
    CHECK(traj.times.front() == 2.0);
    CHECK(traj.times.back() == 5.0);
    CHECK(traj.spread_final() < traj.spread_initial());
}

TEST_CASE("bound graph construction variants") {
    ConfigDoc doc = ConfigDoc::parse_string(kMinimal);
    doc.set("bound.center", ConfigValue{1.0});
    doc.set("bound.delta", ConfigValue{0.25});
    const Scenario s = Scenario::resolve(doc);
    REQUIRE(s.bound.has_value());
    CHECK(s.bound->weight(1, 0) == 0.25);
    CHECK(s.bound->weight(0, 1) == 0.0);
}

} // TEST_SUITE
