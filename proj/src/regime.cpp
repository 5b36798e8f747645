#include "reskit/regime.hpp"

#include <algorithm>
#include <set>

#include "reskit/util.hpp"

namespace reskit {

namespace {

bool visits_cemetery(const PathPair& path) {
    for (const State& x : path.states)
        if (x.is_cemetery()) return true;
    return false;
}

/// Mass of support scenarios whose path passes the given predicate.
template <typename Predicate>
double mass_where(const ProbabilityModel& probability, const PathBundle& bundle, Predicate pred) {
    const int window = bundle.end_time() - bundle.start_time();
    const auto support = probability_support(probability, bundle.start_time(), window);
    KahanSum mass;
    for (const auto& scenario : support) {
        const PathPair& path = bundle.at(scenario);
        if (pred(path)) mass.add(scenario_weight(probability, bundle.start_time(), scenario));
    }
    return mass.value();
}

} // namespace

bool regime_membership(const RegimeSpec& regime, const PathBundle& bundle) {
    const int start = bundle.start_time();

    if (const auto* bounded = std::get_if<BoundedRegime>(&regime)) {
        for (const auto& [scenario, path] : bundle.entries())
            if (!path_satisfies(bounded->region, path.states, path.controls, start, start))
                return false;
        return true;
    }

    if (const auto* viability = std::get_if<DeterministicViabilityRegime>(&regime)) {
        for (const auto& [scenario, path] : bundle.entries())
            if (!path_satisfies(viability->constraints, path.states, path.controls, start, start))
                return false;
        return true;
    }

    if (const auto* robust = std::get_if<RobustRecoveryRegime>(&regime)) {
        for (const auto& scenario : robust->scope) {
            const PathPair& path = bundle.at(scenario);
            if (!recovery_time(robust->constraints, path.states, path.controls, start))
                return false;
        }
        return true;
    }

    if (const auto* stochastic = std::get_if<StochasticViabilityRegime>(&regime)) {
        const double mass =
            mass_where(stochastic->probability, bundle, [&](const PathPair& path) {
                return path_satisfies(stochastic->constraints, path.states, path.controls, start,
                                      start);
            });
        return mass >= stochastic->level - kProbTolerance;
    }

    if (const auto* exit_prob = std::get_if<ExitProbabilityRegime>(&regime)) {
        const double mass = mass_where(exit_prob->probability, bundle, [&](const PathPair& path) {
            return !path_satisfies(exit_prob->region, path.states, path.controls, start, start);
        });
        return mass <= exit_prob->level + kProbTolerance;
    }

    if (const auto* exit_limit = std::get_if<ExitCountLimitRegime>(&regime)) {
        const int window = bundle.end_time() - start;
        const auto support = probability_support(exit_limit->probability, start, window);
        for (const auto& scenario : support) {
            if (scenario_weight(exit_limit->probability, start, scenario) <= 0.0) continue;
            const PathPair& path = bundle.at(scenario);
            if (visits_cemetery(path)) return false;
            if (exit_count(exit_limit->region, path.states, path.controls, start, start) >
                exit_limit->max_exits)
                return false;
        }
        return true;
    }

    if (const auto* risk_bound = std::get_if<RiskBoundRegime>(&regime))
        return extended_risk(risk_bound->risk, bundle) <= risk_bound->bound + kProbTolerance;

    const auto& predicate = std::get<ControlPredicateRegime>(regime);
    for (const auto& [scenario, path] : bundle.entries()) {
        if (visits_cemetery(path)) return false;
        bool seen = false;
        for (size_t k = 0; k < path.controls.size(); ++k) {
            const int offset = start + static_cast<int>(k) - predicate.start_epoch;
            if (offset < 0 || offset >= static_cast<int>(predicate.accepted.size()))
                throw RangeError("bundle window outside the control predicate");
            if (predicate.accepted[static_cast<size_t>(offset)]
                                  [static_cast<size_t>(path.controls[k])]) {
                seen = true;
                break;
            }
        }
        if (!seen) return false;
    }
    return true;
}

std::vector<Scenario> scenario_scope(const RegimeSpec& regime, const SystemModel& model,
                                     int start_time, unsigned long long budget) {
    const int final_time = model.grid().final_time();
    const int window = final_time - start_time;

    if (const auto* robust = std::get_if<RobustRecoveryRegime>(&regime)) {
        std::vector<Scenario> scope = robust->scope;
        std::sort(scope.begin(), scope.end());
        scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
        return scope;
    }
    if (const auto* stochastic = std::get_if<StochasticViabilityRegime>(&regime))
        return probability_support(stochastic->probability, start_time, window, budget);
    if (const auto* exit_prob = std::get_if<ExitProbabilityRegime>(&regime))
        return probability_support(exit_prob->probability, start_time, window, budget);
    if (const auto* exit_limit = std::get_if<ExitCountLimitRegime>(&regime))
        return probability_support(exit_limit->probability, start_time, window, budget);
    if (const auto* risk_bound = std::get_if<RiskBoundRegime>(&regime))
        return risk_scope(risk_bound->risk.measure, model, start_time, budget);
    // Bounded, deterministic viability and control predicates quantify over
    // every scenario.
    return enumerate_scenarios(model, start_time, final_time, budget);
}

std::vector<Scenario> risk_scope(const RiskMeasureSpec& measure, const SystemModel& model,
                                 int start_time, unsigned long long budget) {
    const int final_time = model.grid().final_time();
    const int window = final_time - start_time;

    if (const auto* exp = std::get_if<ExpectationMeasure>(&measure)) {
        if (!exp->probability) throw RangeError("expectation measure needs a probability model");
        return probability_support(*exp->probability, start_time, window, budget);
    }
    if (const auto* worst = std::get_if<WorstCaseMeasure>(&measure)) {
        if (worst->scope.empty()) return enumerate_scenarios(model, start_time, final_time, budget);
        std::vector<Scenario> scope = worst->scope;
        std::sort(scope.begin(), scope.end());
        scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
        return scope;
    }
    if (const auto* cv = std::get_if<CvarMeasure>(&measure)) {
        if (!cv->probability) throw RangeError("CVaR measure needs a probability model");
        return probability_support(*cv->probability, start_time, window, budget);
    }
    const auto& ambiguity = std::get<AmbiguitySupMeasure>(measure);
    std::set<Scenario> merged;
    for (const auto& prob : ambiguity.models) {
        auto support = probability_support(prob, start_time, window, budget);
        merged.insert(support.begin(), support.end());
    }
    return {merged.begin(), merged.end()};
}

const ConstraintMap* regime_constraint_map(const RegimeSpec& regime) {
    if (const auto* r = std::get_if<BoundedRegime>(&regime)) return &r->region;
    if (const auto* r = std::get_if<DeterministicViabilityRegime>(&regime)) return &r->constraints;
    if (const auto* r = std::get_if<RobustRecoveryRegime>(&regime)) return &r->constraints;
    if (const auto* r = std::get_if<StochasticViabilityRegime>(&regime)) return &r->constraints;
    if (const auto* r = std::get_if<ExitProbabilityRegime>(&regime)) return &r->region;
    if (const auto* r = std::get_if<ExitCountLimitRegime>(&regime)) return &r->region;
    return nullptr;
}

Label extended_state_label(const Label& base, bool seen) {
    return base + (seen ? "|1" : "|0");
}

ControlPredicateExtension extend_for_control_predicate(const SystemModel& model,
                                                       const ControlPredicateRegime& regime,
                                                       int start_time) {
    const TimeGrid grid(start_time, model.grid().final_time());
    const int horizon = grid.horizon();

    std::vector<LabeledSet> states;
    std::vector<LabeledSet> controls;
    std::vector<LabeledSet> uncertainties;
    states.reserve(static_cast<size_t>(horizon) + 1);
    for (int t = start_time; t <= grid.final_time(); ++t) {
        std::vector<Label> labels;
        for (const auto& base : model.states_at(t).labels()) {
            labels.push_back(extended_state_label(base, false));
            labels.push_back(extended_state_label(base, true));
        }
        states.emplace_back(std::move(labels));
    }
    for (int t = start_time; t < grid.final_time(); ++t) {
        controls.emplace_back(model.controls_at(t).labels());
        uncertainties.emplace_back(model.uncertainties_at(t).labels());
    }

    const auto accepted_at = [&](int epoch, int u) {
        const int offset = epoch - regime.start_epoch;
        if (offset < 0 || offset >= static_cast<int>(regime.accepted.size()))
            throw RangeError("epoch outside the control predicate");
        return static_cast<bool>(regime.accepted[static_cast<size_t>(offset)][static_cast<size_t>(u)]);
    };

    std::vector<DynamicsRecord> dynamics;
    std::vector<HardConstraintRecord> hard;
    for (int t = start_time; t < grid.final_time(); ++t) {
        const auto& base_states = model.states_at(t);
        const auto& base_controls = model.controls_at(t);
        const auto& base_uncertain = model.uncertainties_at(t);
        for (int x = 0; x < base_states.size(); ++x) {
            for (bool seen : {false, true}) {
                const Label from = extended_state_label(base_states.label(x), seen);
                for (int u = 0; u < base_controls.size(); ++u) {
                    const bool seen_next = seen || accepted_at(t, u);
                    for (int w = 0; w < base_uncertain.size(); ++w) {
                        const State next = model.step(t, State::of(x), u, w);
                        const Label to = next.is_cemetery()
                                             ? Label(kCemeteryLabel)
                                             : extended_state_label(
                                                   model.states_at(t + 1).label(next.index), seen_next);
                        dynamics.push_back({t, from, base_controls.label(u),
                                            base_uncertain.label(w), to});
                    }
                }
                if (model.has_hard_constraints()) {
                    std::vector<Label> allowed;
                    for (int u : model.allowed_controls(t, x)) allowed.push_back(base_controls.label(u));
                    hard.push_back({t, from, std::move(allowed)});
                }
            }
        }
    }

    SystemModel extended(grid, std::move(states), std::move(controls), std::move(uncertainties),
                         dynamics,
                         model.has_hard_constraints()
                             ? std::optional<std::vector<HardConstraintRecord>>(std::move(hard))
                             : std::nullopt);

    // Everything acceptable before T; at T only the "seen" copies.
    std::vector<std::vector<bool>> acceptable(static_cast<size_t>(horizon) + 1);
    for (int k = 0; k <= horizon; ++k) {
        const int t = start_time + k;
        const int n = extended.states_at(t).size();
        acceptable[static_cast<size_t>(k)].assign(static_cast<size_t>(n), true);
    }
    auto& final_mask = acceptable.back();
    const auto& final_states = extended.states_at(grid.final_time());
    for (int x = 0; x < final_states.size(); ++x) {
        const Label& label = final_states.label(x);
        final_mask[static_cast<size_t>(x)] = label.size() >= 2 && label.substr(label.size() - 2) == "|1";
    }
    ConstraintMap final_constraint(start_time, std::move(acceptable));

    return {std::move(extended), std::move(final_constraint)};
}

} // namespace reskit
