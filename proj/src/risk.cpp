#include "reskit/risk.hpp"

#include <algorithm>
#include <cmath>

#include "reskit/util.hpp"

namespace reskit {

DiscreteRandomVariable::DiscreteRandomVariable(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw RangeError("a distribution needs at least one atom");
    KahanSum sum;
    for (const auto& atom : atoms_) {
        if (atom.weight < 0.0) throw RangeError("negative probability weight");
        sum.add(atom.weight);
    }
    if (std::abs(sum.value() - 1.0) > kProbTolerance)
        throw RangeError("distribution weights must sum to one");
}

double path_cost(const CostSpec& spec, const PathPair& path, int path_start,
                 const Scenario& scenario) {
    (void)scenario;
    if (const auto* indicator = std::get_if<IndicatorExitCost>(&spec)) {
        return path_satisfies(indicator->constraints, path.states, path.controls, path_start,
                              path_start)
                   ? 0.0
                   : 1.0;
    }
    if (const auto* exits = std::get_if<ExitCountCost>(&spec)) {
        return static_cast<double>(
            exit_count(exits->constraints, path.states, path.controls, path_start, path_start));
    }
    if (const auto* recovery = std::get_if<RecoveryTimeCost>(&spec)) {
        const auto tau = recovery_time(recovery->constraints, path.states, path.controls, path_start);
        if (tau) return static_cast<double>(*tau - path_start);
        const double sentinel = recovery->infinite_sentinel
                                    ? *recovery->infinite_sentinel
                                    : static_cast<double>(path.controls.size() + 1);
        return sentinel;
    }
    const auto& table = std::get<TableCost>(spec);
    KahanSum total;
    const int epochs = static_cast<int>(path.controls.size());
    for (int k = 0; k < epochs; ++k) {
        const State x = path.states[static_cast<size_t>(k)];
        if (x.is_cemetery()) continue;
        const int offset = path_start + k - table.start_epoch;
        if (offset < 0 || offset >= static_cast<int>(table.stage.size()))
            throw RangeError("path epoch outside the cost table");
        total.add(table.stage[static_cast<size_t>(offset)]
                             .at(static_cast<size_t>(x.index))
                             .at(static_cast<size_t>(path.controls[static_cast<size_t>(k)])));
    }
    const State last = path.states.back();
    if (!last.is_cemetery()) total.add(table.final_cost.at(static_cast<size_t>(last.index)));
    return total.value();
}

double expectation(const DiscreteRandomVariable& z) {
    KahanSum sum;
    for (const auto& atom : z.atoms()) sum.add(atom.value * atom.weight);
    return sum.value();
}

double worst_case(const DiscreteRandomVariable& z) {
    double worst = z.atoms().front().value;
    for (const auto& atom : z.atoms()) worst = std::max(worst, atom.value);
    return worst;
}

double cvar(const DiscreteRandomVariable& z, double level) {
    if (level < 0.0 || level >= 1.0)
        throw RangeError("CVaR level must lie in [0, 1); use worst_case for level 1");
    // Average the worst (1 - level) probability mass, largest values first.
    std::vector<DiscreteRandomVariable::Atom> sorted = z.atoms();
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.value > b.value; });
    const double tail = 1.0 - level;
    double remaining = tail;
    KahanSum acc;
    for (const auto& atom : sorted) {
        if (remaining <= kProbTolerance) break;
        const double take = std::min(atom.weight, remaining);
        acc.add(take * atom.value);
        remaining -= take;
    }
    return acc.value() / tail;
}

double risk_value(const RiskMeasureSpec& spec, const DiscreteRandomVariable& z) {
    if (std::holds_alternative<ExpectationMeasure>(spec)) return expectation(z);
    if (std::holds_alternative<WorstCaseMeasure>(spec)) return worst_case(z);
    if (const auto* cv = std::get_if<CvarMeasure>(&spec)) return cvar(z, cv->level);
    const auto& ambiguity = std::get<AmbiguitySupMeasure>(spec);
    switch (ambiguity.inner) {
    case AmbiguitySupMeasure::Inner::Expectation: return expectation(z);
    case AmbiguitySupMeasure::Inner::WorstCase: return worst_case(z);
    case AmbiguitySupMeasure::Inner::Cvar: return cvar(z, ambiguity.level);
    }
    throw RangeError("unknown inner risk measure");
}

namespace {

double cost_of(const ExtendedRiskSpec& spec, const PathBundle& bundle, const Scenario& scenario) {
    const PathPair& path = bundle.at(scenario); // throws MissingScenarioError on gaps
    return path_cost(spec.cost, path, bundle.start_time(), scenario);
}

DiscreteRandomVariable weighted_costs(const ExtendedRiskSpec& spec, const PathBundle& bundle,
                                      const ProbabilityModel& probability) {
    const int window = bundle.end_time() - bundle.start_time();
    const auto support = probability_support(probability, bundle.start_time(), window);
    if (support.empty()) throw RangeError("probability model has empty support");
    std::vector<DiscreteRandomVariable::Atom> atoms;
    atoms.reserve(support.size());
    for (const auto& scenario : support)
        atoms.push_back({cost_of(spec, bundle, scenario),
                         scenario_weight(probability, bundle.start_time(), scenario)});
    return DiscreteRandomVariable(std::move(atoms));
}

double worst_over(const ExtendedRiskSpec& spec, const PathBundle& bundle,
                  const std::vector<Scenario>& scope) {
    bool first = true;
    double worst = 0.0;
    if (scope.empty()) {
        for (const auto& [scenario, path] : bundle.entries()) {
            const double c = path_cost(spec.cost, path, bundle.start_time(), scenario);
            worst = first ? c : std::max(worst, c);
            first = false;
        }
    } else {
        for (const auto& scenario : scope) {
            const double c = cost_of(spec, bundle, scenario);
            worst = first ? c : std::max(worst, c);
            first = false;
        }
    }
    if (first) throw RangeError("worst-case scope is empty");
    return worst;
}

} // namespace

DiscreteRandomVariable cost_distribution(const ExtendedRiskSpec& spec, const PathBundle& bundle) {
    if (const auto* exp = std::get_if<ExpectationMeasure>(&spec.measure)) {
        if (!exp->probability)
            throw RangeError("expectation over a bundle needs a probability model");
        return weighted_costs(spec, bundle, *exp->probability);
    }
    if (const auto* cv = std::get_if<CvarMeasure>(&spec.measure)) {
        if (!cv->probability) throw RangeError("CVaR over a bundle needs a probability model");
        return weighted_costs(spec, bundle, *cv->probability);
    }
    throw RangeError("the measure carries no single probability model");
}

double extended_risk(const ExtendedRiskSpec& spec, const PathBundle& bundle) {
    if (const auto* exp = std::get_if<ExpectationMeasure>(&spec.measure)) {
        if (!exp->probability)
            throw RangeError("expectation over a bundle needs a probability model");
        return expectation(weighted_costs(spec, bundle, *exp->probability));
    }
    if (const auto* worst = std::get_if<WorstCaseMeasure>(&spec.measure))
        return worst_over(spec, bundle, worst->scope);
    if (const auto* cv = std::get_if<CvarMeasure>(&spec.measure)) {
        if (!cv->probability) throw RangeError("CVaR over a bundle needs a probability model");
        return cvar(weighted_costs(spec, bundle, *cv->probability), cv->level);
    }
    const auto& ambiguity = std::get<AmbiguitySupMeasure>(spec.measure);
    if (ambiguity.models.empty()) throw RangeError("ambiguity set must be nonempty");
    bool first = true;
    double sup = 0.0;
    for (const auto& model : ambiguity.models) {
        double inner;
        switch (ambiguity.inner) {
        case AmbiguitySupMeasure::Inner::Expectation:
            inner = expectation(weighted_costs(spec, bundle, model));
            break;
        case AmbiguitySupMeasure::Inner::Cvar:
            inner = cvar(weighted_costs(spec, bundle, model), ambiguity.level);
            break;
        case AmbiguitySupMeasure::Inner::WorstCase: {
            const int window = bundle.end_time() - bundle.start_time();
            inner = worst_over(spec, bundle,
                               probability_support(model, bundle.start_time(), window));
            break;
        }
        default: throw RangeError("unknown inner risk measure");
        }
        sup = first ? inner : std::max(sup, inner);
        first = false;
    }
    return sup;
}

} // namespace reskit
