#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "reskit/io.hpp"
#include "reskit/solvers.hpp"

using namespace reskit;
using nlohmann::json;

namespace {

json stock3_json() {
    json dynamics = json::array();
    for (int t = 0; t < 3; ++t)
        for (int x = 0; x <= 3; ++x)
            for (int u = 0; u <= 1; ++u)
                for (int w = 0; w <= 1; ++w)
                    dynamics.push_back({t, x, u, w, std::clamp(x + u - w, 0, 3)});
    json hard = json::array();
    for (int t = 0; t < 3; ++t) hard.push_back({t, 0, {0}});
    return {
        {"times", {{"t0", 0}, {"T", 3}}},
        {"states", {0, 1, 2, 3}},
        {"controls", {0, 1}},
        {"uncertainties", {0, 1}},
        {"dynamics", dynamics},
        {"hard_constraints", hard},
    };
}

} // namespace

TEST_CASE("the model file round-trips the stock3 fixture") {
    const SystemModel model = io::model_from_json(stock3_json());
    CHECK(model.validate().ok());
    CHECK(model.step_labels(0, "1", "1", "0") == "2");
    CHECK(model.step_labels(0, "0", "1", "0") == Label(kCemeteryLabel));
}

TEST_CASE("label sets may vary per time") {
    json doc = stock3_json();
    doc["states"] = json::array({json::array({0, 1, 2, 3}), json::array({0, 1, 2, 3}),
                                 json::array({0, 1, 2, 3}), json::array({0, 1, 2, 3, 4})});
    // The extra final-time state is never reached but must parse and validate.
    const SystemModel model = io::model_from_json(doc);
    CHECK(model.validate().ok());
    CHECK(model.states_at(3).size() == 5);
    CHECK(model.states_at(0).size() == 4);

    SUBCASE("a per-time list of the wrong length is rejected") {
        json bad = stock3_json();
        bad["controls"] = json::array({json::array({0, 1}), json::array({0, 1})});
        CHECK_THROWS_AS(io::model_from_json(bad), ParseError);
    }
}

TEST_CASE("unknown keys are rejected") {
    json doc = stock3_json();
    doc["extra"] = 1;
    CHECK_THROWS_AS(io::model_from_json(doc), ParseError);
    try {
        io::model_from_json(doc);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("extra") != std::string::npos);
    }
}

TEST_CASE("schema violations carry their location") {
    json doc = stock3_json();
    doc["dynamics"][0] = {0, 0, 0}; // wrong arity
    try {
        io::model_from_json(doc);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("dynamics[0]") != std::string::npos);
    }
}

TEST_CASE("regimes resolve labels against the model") {
    const SystemModel model = io::model_from_json(stock3_json());
    json regime = {
        {"type", "robust_recovery"},
        {"constraints", {{"acceptable", {2, 3}}}},
    };
    const auto parsed = io::regime_from_json(regime, model, 0);
    CHECK(std::holds_alternative<RobustRecoveryRegime>(parsed.regime));
    CHECK(std::get<RobustRecoveryRegime>(parsed.regime).scope.size() == 8);

    SUBCASE("a label outside the model is a cross-reference error") {
        json bad = regime;
        bad["constraints"]["acceptable"] = {2, 9};
        try {
            io::regime_from_json(bad, model, 0);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("9") != std::string::npos);
        }
    }
    SUBCASE("the probability level can be overridden") {
        json stochastic = {
            {"type", "stochastic_viability"},
            {"constraints", {{"acceptable", {2, 3}}}},
            {"probability", {{"type", "white_noise"}, {"weights", {{"0", 0.5}, {"1", 0.5}}}}},
            {"beta", 1.0},
        };
        io::RegimeOverrides overrides;
        overrides.beta = 0.25;
        const auto parsed_override = io::regime_from_json(stochastic, model, 0, overrides);
        CHECK(std::get<StochasticViabilityRegime>(parsed_override.regime).level == 0.25);
    }
}

TEST_CASE("scenario files accept comma-separated label lines") {
    const SystemModel model = io::model_from_json(stock3_json());
    const auto scenarios = io::scenarios_from_text("0,0,0\n1,1,1\n\n0,1,0\n", model, 0);
    REQUIRE(scenarios.size() == 3);
    CHECK(scenarios[0] == Scenario{0, 0, 0});
    CHECK(scenarios[1] == Scenario{1, 1, 1});
    CHECK(scenarios[2] == Scenario{0, 1, 0});
    CHECK_THROWS_AS(io::scenarios_from_text("0,2,0\n", model, 0), ParseError);
}

TEST_CASE("saved witness policies reproduce their bundles bit for bit") {
    const SystemModel model = io::model_from_json(stock3_json());
    const ConstraintMap constraints = fixtures::stock3_constraints(model);
    const auto solved = robust_viability_kernel(model, constraints, full_closure(model));
    const Strategy witness = solved.witness;

    const std::string text = io::strategy_to_text(witness, model);
    const Strategy reloaded = io::strategy_from_json(json::parse(text), model);

    const auto all = enumerate_scenarios(model, 0, 3);
    const PathBundle original = make_bundle(model, witness, 0, State::of(2), all);
    const PathBundle restored = make_bundle(model, reloaded, 0, State::of(2), all);
    CHECK(io::bundle_to_csv(original, model) == io::bundle_to_csv(restored, model));

    SUBCASE("adapted policies round-trip too") {
        AdaptedPolicyEnumerator stream(model, all, 0, State::of(2));
        const auto adapted = stream.next();
        REQUIRE(adapted.has_value());
        const std::string adapted_text = io::strategy_to_text(Strategy(*adapted), model);
        const Strategy again = io::strategy_from_json(json::parse(adapted_text), model);
        CHECK(io::strategy_to_text(again, model) == adapted_text);
    }
}

TEST_CASE("risk specifications parse with embedded probability models") {
    const SystemModel model = io::model_from_json(stock3_json());
    const json doc = {
        {"cost",
         {{"type", "recovery_time"},
          {"constraints", {{"acceptable", {2, 3}}}}}},
        {"measure", {{"type", "cvar"},
                     {"probability",
                      {{"type", "white_noise"}, {"weights", {{"0", 0.5}, {"1", 0.5}}}}},
                     {"beta", 0.5}}},
    };
    const ExtendedRiskSpec spec = io::risk_from_json(doc, model, 0, ".");
    CHECK(std::holds_alternative<RecoveryTimeCost>(spec.cost));
    CHECK(std::holds_alternative<CvarMeasure>(spec.measure));
    CHECK(std::get<CvarMeasure>(spec.measure).level == 0.5);

    SUBCASE("CVaR at level one is rejected at parse time") {
        json bad = doc;
        bad["measure"]["beta"] = 1.0;
        CHECK_THROWS_AS(io::risk_from_json(bad, model, 0, "."), ParseError);
    }
}

TEST_CASE("risk parsing rejects reachable recovery sentinels") {
    const SystemModel model = io::model_from_json(stock3_json());
    json doc = {
        {"cost",
         {{"type", "recovery_time"}, {"constraints", {{"acceptable", {2, 3}}}}, {"sentinel", 3}}},
        {"measure", {{"type", "worst_case"}}},
    };
    CHECK_THROWS_AS(io::risk_from_json(doc, model, 0, "."), ParseError);
    doc["cost"]["sentinel"] = 10;
    CHECK_NOTHROW(io::risk_from_json(doc, model, 0, "."));
}

TEST_CASE("acceptable sets may vary per time") {
    const SystemModel model = io::model_from_json(stock3_json());
    json doc = {{"acceptable", {json::array({0, 1, 2, 3}), json::array({2, 3}),
                                json::array({2, 3}), json::array({3})}}};
    const ConstraintMap constraints = io::constraints_from_json(doc, model);
    CHECK(constraints.state_ok(0, State::of(0)));
    CHECK(!constraints.state_ok(1, State::of(0)));
    CHECK(!constraints.state_ok(3, State::of(2)));
    CHECK(constraints.state_ok(3, State::of(3)));
}

TEST_CASE("distributions dump as sorted value,weight rows") {
    std::vector<DiscreteRandomVariable::Atom> atoms = {{3.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}};
    const std::string csv = io::distribution_to_csv(DiscreteRandomVariable(atoms));
    CHECK(csv == "value,weight\n1,0.5\n2,0.25\n3,0.25\n");
}

TEST_CASE("weighted scenario models merge duplicate atoms and check mass") {
    const SystemModel model = io::model_from_json(stock3_json());
    const json doc = {
        {"type", "weighted_scenarios"},
        {"atoms",
         {{{"scenario", {0, 0, 0}}, {"weight", 0.25}},
          {{"scenario", {0, 0, 0}}, {"weight", 0.25}},
          {{"scenario", {1, 1, 1}}, {"weight", 0.5}}}},
    };
    const ProbabilityModel prob = io::probability_from_json(doc, model, 0, ".");
    const auto& weighted = std::get<WeightedScenarios>(prob);
    REQUIRE(weighted.atoms.size() == 2);
    CHECK(weighted.atoms[0].second == 0.5);

    json bad = doc;
    bad["atoms"][2]["weight"] = 0.4;
    CHECK_THROWS_AS(io::probability_from_json(bad, model, 0, "."), ParseError);
}
