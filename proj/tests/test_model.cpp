#include <doctest.h>

#include "fixtures.hpp"
#include "reskit/model.hpp"

using namespace reskit;

TEST_CASE("labeled sets reject empty and duplicate labels") {
    CHECK_THROWS_AS(LabeledSet({}), RangeError);
    CHECK_THROWS_AS(LabeledSet({"a", "a"}), RangeError);
    const LabeledSet set({"a", "b"});
    CHECK(set.index_of("b") == 1);
    CHECK_THROWS_AS(set.index_of("c"), LabelError);
    CHECK(!set.find("c"));
}

TEST_CASE("stock3 validates with an empty report") {
    const SystemModel model = fixtures::make_stock3();
    const ValidationReport report = model.validate();
    CHECK(report.ok());
}

TEST_CASE("a missing transition entry is reported with its quadruple") {
    std::vector<DynamicsRecord> dynamics = {{0, "a", "u", "w", "a"}};
    // Two states but only one transition record: (0, b, u, w) is missing.
    SystemModel model(TimeGrid(0, 1), {LabeledSet({"a", "b"}), LabeledSet({"a", "b"})},
                      {LabeledSet({"u"})}, {LabeledSet({"w"})}, dynamics);
    const ValidationReport report = model.validate();
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == ValidationIssue::Kind::MissingTransition);
    CHECK(report.issues[0].detail.find("x=b") != std::string::npos);
    CHECK(report.issues[0].detail.find("u=u") != std::string::npos);
    CHECK(report.issues[0].detail.find("w=w") != std::string::npos);
}

TEST_CASE("an empty admissible control set is reported with (t, x)") {
    std::vector<DynamicsRecord> dynamics = {{0, "a", "u", "w", "a"}};
    std::vector<HardConstraintRecord> hard = {{0, "a", {}}};
    SystemModel model(TimeGrid(0, 1), {LabeledSet({"a"}), LabeledSet({"a"})},
                      {LabeledSet({"u"})}, {LabeledSet({"w"})}, dynamics, std::move(hard));
    const ValidationReport report = model.validate();
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == ValidationIssue::Kind::EmptyAdmissibleSet);
    CHECK(report.issues[0].t == 0);
    CHECK(report.issues[0].detail.find("x=a") != std::string::npos);
}

TEST_CASE("unknown labels in dynamics records are reported") {
    std::vector<DynamicsRecord> dynamics = {{0, "a", "u", "w", "a"}, {0, "z", "u", "w", "a"}};
    SystemModel model(TimeGrid(0, 1), {LabeledSet({"a"}), LabeledSet({"a"})},
                      {LabeledSet({"u"})}, {LabeledSet({"w"})}, dynamics);
    const ValidationReport report = model.validate();
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == ValidationIssue::Kind::UnknownLabel);
}

TEST_CASE("stock3 single steps") {
    const SystemModel model = fixtures::make_stock3();

    SUBCASE("ordering one unit from level 1 without demand gives level 2") {
        CHECK(model.step_labels(0, "1", "1", "0") == "2");
    }
    SUBCASE("the cemetery absorbs under every control and uncertainty") {
        for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w)
                CHECK(model.step(1, State::cemetery(), u, w).is_cemetery());
    }
    SUBCASE("violating the hard constraint sends the state to the cemetery") {
        // u = 1 > x = 0
        CHECK(model.step_labels(0, "0", "1", "0") == Label(kCemeteryLabel));
    }
    SUBCASE("unknown labels raise label errors") {
        CHECK_THROWS_AS(model.step_labels(0, "9", "1", "0"), LabelError);
        CHECK_THROWS_AS(model.step_labels(0, "1", "9", "0"), LabelError);
    }
}

TEST_CASE("step is absorbing, closed and deterministic on random micro-models") {
    fixtures::Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const SystemModel model = fixtures::random_micro_model(rng);
        const auto& grid = model.grid();
        State x = State::of(rng.below(model.states_at(grid.start()).size()));
        bool dead = false;
        for (int t = grid.start(); t < grid.final_time(); ++t) {
            const int u = rng.below(model.controls_at(t).size());
            const int w = rng.below(model.uncertainties_at(t).size());
            const State next = model.step(t, x, u, w);
            CHECK(model.step(t, x, u, w) == next); // repeated calls agree
            if (dead) CHECK(next.is_cemetery());
            if (next.is_cemetery()) {
                dead = true;
            } else {
                CHECK(next.index >= 0);
                CHECK(next.index < model.states_at(t + 1).size());
            }
            x = next;
        }
    }
}
