#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "reskit/regime.hpp"
#include "reskit/risk.hpp"
#include "reskit/trajectory.hpp"
#include "reskit/util.hpp"

using namespace reskit;

namespace {

constexpr double kTol = 1e-12;

DiscreteRandomVariable make_drv(std::vector<std::pair<double, double>> pairs) {
    std::vector<DiscreteRandomVariable::Atom> atoms;
    for (auto [v, w] : pairs) atoms.push_back({v, w});
    return DiscreteRandomVariable(std::move(atoms));
}

DiscreteRandomVariable random_drv(fixtures::Rng& rng) {
    const int n = 1 + rng.below(8);
    std::vector<DiscreteRandomVariable::Atom> atoms;
    double total = 0.0;
    std::vector<double> raw(n);
    for (int i = 0; i < n; ++i) {
        raw[i] = 1.0 + rng.below(1000);
        total += raw[i];
    }
    for (int i = 0; i < n; ++i)
        atoms.push_back({(rng.below(2001) - 1000) / 100.0, raw[i] / total});
    return DiscreteRandomVariable(std::move(atoms));
}

/// Independent CVaR oracle: minimize eta + E[(Z - eta)+] / (1 - level) over a
/// grid holding every support point.
double cvar_by_minimization(const DiscreteRandomVariable& z, double level) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& candidate : z.atoms()) {
        const double eta = candidate.value;
        KahanSum sum;
        for (const auto& atom : z.atoms())
            sum.add(atom.weight * std::max(atom.value - eta, 0.0));
        best = std::min(best, eta + sum.value() / (1.0 - level));
    }
    return best;
}

} // namespace

TEST_CASE("cost functions over stock3 paths") {
    const SystemModel model = fixtures::make_stock3();
    const ConstraintMap constraints = fixtures::stock3_constraints(model);
    const Strategy order_one = fixtures::constant_policy(model, 1);

    SUBCASE("the exit indicator is zero on a safe path") {
        PathPair path{{State::of(2), State::of(3), State::of(3), State::of(3)}, {1, 1, 1}};
        CHECK(path_cost(CostSpec(IndicatorExitCost{constraints}), path, 0, {}) == 0.0);
    }
    SUBCASE("the exit-count cost matches exit_count") {
        PathPair path{{State::of(1), State::of(2), State::of(1), State::of(2)}, {1, 0, 1}};
        CHECK(path_cost(CostSpec(ExitCountCost{constraints}), path, 0, {}) == 2.0);
    }
    SUBCASE("a zero-stage table with a final reward-of-three cost") {
        TableCost table;
        table.start_epoch = 0;
        table.stage.assign(3, std::vector<std::vector<double>>(4, std::vector<double>(2, 0.0)));
        table.final_cost = {0.0, 0.0, 0.0, 1.0};
        const auto path = closed_loop(model, order_one, 0, 3, State::of(1), Scenario{0, 0, 0});
        CHECK(path_cost(CostSpec(table), path, 0, {}) == 1.0);
    }
    SUBCASE("recovery-time costs use the sentinel when recovery never happens") {
        const auto stuck = closed_loop(model, order_one, 0, 3, State::of(1), Scenario{1, 1, 1});
        CHECK(path_cost(CostSpec(RecoveryTimeCost{constraints, std::nullopt}), stuck, 0, {}) ==
              4.0); // horizon 3 + 1
        CHECK(path_cost(CostSpec(RecoveryTimeCost{constraints, 99.0}), stuck, 0, {}) == 99.0);
        const auto fine = closed_loop(model, order_one, 0, 3, State::of(1), Scenario{0, 0, 0});
        CHECK(path_cost(CostSpec(RecoveryTimeCost{constraints, std::nullopt}), fine, 0, {}) == 1.0);
    }
}

TEST_CASE("risk measures over finite distributions") {
    SUBCASE("CVaR at level zero is the mean") {
        const auto z = make_drv({{1.0, 0.25}, {3.0, 0.5}, {-2.0, 0.25}});
        CHECK(std::abs(cvar(z, 0.0) - expectation(z)) < kTol);
    }
    SUBCASE("the worst tail of a two-point distribution") {
        const auto z = make_drv({{1.0, 0.9}, {10.0, 0.1}});
        CHECK(std::abs(cvar(z, 0.9) - 10.0) < kTol);
        CHECK(std::abs(cvar_by_minimization(z, 0.9) - 10.0) < kTol);
    }
    SUBCASE("level one is rejected") {
        const auto z = make_drv({{1.0, 1.0}});
        CHECK_THROWS_AS(cvar(z, 1.0), RangeError);
    }
    SUBCASE("ambiguity over one model reduces to its inner measure") {
        const auto z = make_drv({{1.0, 0.5}, {3.0, 0.5}});
        AmbiguitySupMeasure singleton;
        singleton.models.push_back(fixtures::stock3_white_noise(fixtures::make_stock3()));
        singleton.inner = AmbiguitySupMeasure::Inner::Expectation;
        CHECK(std::abs(risk_value(RiskMeasureSpec(singleton), z) - expectation(z)) < kTol);
    }
}

TEST_CASE("risk measure properties on random distributions") {
    fixtures::Rng rng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        const auto z = random_drv(rng);

        // Monotonicity: a pointwise-dominating variable never carries less risk.
        std::vector<DiscreteRandomVariable::Atom> raised = z.atoms();
        for (auto& atom : raised) atom.value += rng.below(50) / 10.0;
        const DiscreteRandomVariable z_dom{std::move(raised)};
        CHECK(expectation(z) <= expectation(z_dom) + kTol);
        CHECK(worst_case(z) <= worst_case(z_dom) + kTol);
        for (int i = 0; i < 10; ++i)
            CHECK(cvar(z, i / 10.0) <= cvar(z_dom, i / 10.0) + kTol);

        // Translation equivariance at a random level.
        const double shift = rng.below(100) / 10.0;
        std::vector<DiscreteRandomVariable::Atom> shifted = z.atoms();
        for (auto& atom : shifted) atom.value += shift;
        const DiscreteRandomVariable z_up{std::move(shifted)};
        const double level = rng.below(10) / 10.0;
        CHECK(std::abs(cvar(z_up, level) - (cvar(z, level) + shift)) < kTol);

        // Dominance chain over the level grid.
        double previous = expectation(z);
        CHECK(std::abs(cvar(z, 0.0) - previous) < kTol);
        for (int i = 1; i < 10; ++i) {
            const double current = cvar(z, i / 10.0);
            CHECK(current >= previous - kTol);
            previous = current;
        }
        CHECK(previous <= worst_case(z) + kTol);

        // Once the level passes 1 - (smallest positive weight), CVaR is the max.
        double smallest = 1.0;
        for (const auto& atom : z.atoms())
            if (atom.weight > 0.0) smallest = std::min(smallest, atom.weight);
        const double high = 1.0 - smallest / 2.0;
        CHECK(std::abs(cvar(z, high) - worst_case(z)) < kTol);

        // The sorted-tail value agrees with direct minimization at support points.
        CHECK(std::abs(cvar(z, level) - cvar_by_minimization(z, level)) < kTol);
    }
}

TEST_CASE("extended risk over stock3 bundles") {
    const SystemModel model = fixtures::make_stock3();
    const ConstraintMap constraints = fixtures::stock3_constraints(model);
    const Strategy order_one = fixtures::constant_policy(model, 1);
    const auto all = enumerate_scenarios(model, 0, 3);
    const auto noise = fixtures::stock3_white_noise(model);

    SUBCASE("worst-case exit indicator vanishes on the invariant set") {
        const PathBundle bundle = make_bundle(model, order_one, 0, State::of(2), all);
        const ExtendedRiskSpec spec{IndicatorExitCost{constraints}, WorstCaseMeasure{all}};
        CHECK(extended_risk(spec, bundle) == 0.0);
    }
    SUBCASE("an initial exit makes the expected indicator one") {
        const PathBundle bundle = make_bundle(model, order_one, 0, State::of(1), all);
        const ExtendedRiskSpec spec{IndicatorExitCost{constraints}, ExpectationMeasure{noise}};
        CHECK(std::abs(extended_risk(spec, bundle) - 1.0) < kTol);
    }
    SUBCASE("worst-case recovery time over a singleton scope") {
        const PathBundle bundle = make_bundle(model, order_one, 0, State::of(1), all);
        const ExtendedRiskSpec spec{RecoveryTimeCost{constraints, std::nullopt},
                                    WorstCaseMeasure{{{0, 0, 0}}}};
        CHECK(extended_risk(spec, bundle) == 1.0);
    }
    SUBCASE("a missing support scenario raises an error") {
        const PathBundle bundle = make_bundle(model, order_one, 0, State::of(1), {{0, 0, 0}});
        const ExtendedRiskSpec spec{IndicatorExitCost{constraints}, ExpectationMeasure{noise}};
        CHECK_THROWS_AS(extended_risk(spec, bundle), MissingScenarioError);
    }
}

TEST_CASE("expected exit indicator complements the viability probability") {
    fixtures::Rng rng(271828);
    for (int trial = 0; trial < 50; ++trial) {
        const SystemModel model = fixtures::random_micro_model(rng);
        const ConstraintMap constraints = fixtures::random_constraints(rng, model);
        const auto noise = fixtures::random_white_noise(rng, model);
        const Strategy policy = fixtures::random_policy(rng, model);
        const auto& grid = model.grid();
        const auto scope = enumerate_scenarios(model, grid.start(), grid.final_time());
        const State x = State::of(rng.below(model.states_at(grid.start()).size()));
        const PathBundle bundle = make_bundle(model, policy, grid.start(), x, scope);

        // Route one: the risk module.
        const ExtendedRiskSpec spec{IndicatorExitCost{constraints}, ExpectationMeasure{noise}};
        const double exit_risk = extended_risk(spec, bundle);

        // Route two: the regimes module's success mass.
        KahanSum success;
        for (const auto& scenario :
             probability_support(noise, grid.start(), grid.horizon())) {
            const auto& path = bundle.at(scenario);
            if (path_satisfies(constraints, path.states, path.controls, grid.start(), grid.start()))
                success.add(scenario_weight(noise, grid.start(), scenario));
        }
        CHECK(std::abs(exit_risk - (1.0 - success.value())) < kTol);
    }
}
