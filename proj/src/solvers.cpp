#include "reskit/solvers.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "reskit/util.hpp"

namespace reskit {

KernelTable::KernelTable(int start_time, std::vector<std::vector<bool>> member)
    : start_(start_time), member_(std::move(member)) {
    if (member_.empty()) throw RangeError("kernel table must cover at least one time");
}

bool KernelTable::contains(int time, State x) const {
    if (x.is_cemetery()) return false;
    const int k = time - start_;
    if (k < 0 || k >= num_times()) throw RangeError("time outside the kernel table");
    const auto& mask = member_[static_cast<size_t>(k)];
    if (x.index >= static_cast<int>(mask.size())) throw RangeError("state index outside the kernel");
    return mask[static_cast<size_t>(x.index)];
}

std::vector<int> KernelTable::states_at(int time) const {
    const int k = time - start_;
    if (k < 0 || k >= num_times()) throw RangeError("time outside the kernel table");
    std::vector<int> out;
    const auto& mask = member_[static_cast<size_t>(k)];
    for (size_t x = 0; x < mask.size(); ++x)
        if (mask[x]) out.push_back(static_cast<int>(x));
    return out;
}

double ValueTable::at(int time, State x) const {
    if (x.is_cemetery()) return 0.0;
    const int k = time - start_time;
    if (k < 0 || k >= static_cast<int>(value.size()))
        throw RangeError("time outside the value table");
    return value[static_cast<size_t>(k)].at(static_cast<size_t>(x.index));
}

UncertaintyClosure full_closure(const SystemModel& model) {
    UncertaintyClosure closure(static_cast<size_t>(model.grid().horizon()));
    for (int k = 0; k < model.grid().horizon(); ++k)
        closure[static_cast<size_t>(k)].assign(
            static_cast<size_t>(model.uncertainties_at(model.grid().start() + k).size()), true);
    return closure;
}

std::optional<UncertaintyClosure> rectangular_closure(const SystemModel& model,
                                                      const std::vector<Scenario>& scenarios,
                                                      int start_time) {
    if (scenarios.empty()) return std::nullopt;
    const int window = model.grid().final_time() - start_time;
    std::set<Scenario> unique(scenarios.begin(), scenarios.end());
    for (const auto& scenario : unique)
        if (static_cast<int>(scenario.size()) != window) return std::nullopt;

    std::vector<std::set<int>> projections(static_cast<size_t>(window));
    for (const auto& scenario : unique)
        for (int k = 0; k < window; ++k)
            projections[static_cast<size_t>(k)].insert(scenario[static_cast<size_t>(k)]);

    unsigned long long product = 1;
    for (const auto& proj : projections)
        product = saturating_mul(product, static_cast<unsigned long long>(proj.size()));
    if (product != unique.size()) return std::nullopt;

    // Epochs before start_time keep the full uncertainty sets; the kernel entries
    // at times >= start_time never look at them.
    UncertaintyClosure closure = full_closure(model);
    for (int k = 0; k < window; ++k) {
        const int offset = model.grid().index_of_epoch(start_time + k);
        auto& mask = closure[static_cast<size_t>(offset)];
        std::fill(mask.begin(), mask.end(), false);
        for (int w : projections[static_cast<size_t>(k)]) {
            if (w < 0 || w >= static_cast<int>(mask.size())) return std::nullopt;
            mask[static_cast<size_t>(w)] = true;
        }
    }
    return closure;
}

UncertaintyClosure regime_closure(const RegimeSpec& regime, const SystemModel& model,
                                  int start_time) {
    if (const auto* robust = std::get_if<RobustRecoveryRegime>(&regime)) {
        auto closure = rectangular_closure(model, robust->scope, start_time);
        if (!closure)
            throw UnsupportedModelError(
                "the regime's scenario set is not rectangular; the kernel solvers do not apply");
        return *closure;
    }
    return full_closure(model);
}

namespace {

std::vector<int> admissible_controls(const SystemModel& model, const ConstraintMap& constraints,
                                     int epoch, int x) {
    if (const ControlTable* table = constraints.control_map()) return table->choices(epoch, x);
    std::vector<int> all(static_cast<size_t>(model.controls_at(epoch).size()));
    for (size_t u = 0; u < all.size(); ++u) all[u] = static_cast<int>(u);
    return all;
}

bool robust_step_into(const SystemModel& model, const std::vector<bool>& target, int epoch, int x,
                      int u, const std::vector<bool>& uncertainty_mask) {
    for (size_t w = 0; w < uncertainty_mask.size(); ++w) {
        if (!uncertainty_mask[w]) continue;
        const State next = model.step(epoch, State::of(x), u, static_cast<int>(w));
        if (next.is_cemetery() || !target[static_cast<size_t>(next.index)]) return false;
    }
    return true;
}

} // namespace

KernelResult robust_viability_kernel(const SystemModel& model, const ConstraintMap& constraints,
                                     const UncertaintyClosure& closure) {
    const TimeGrid& grid = model.grid();
    const int horizon = grid.horizon();
    if (static_cast<int>(closure.size()) != horizon)
        throw RangeError("closure must cover every decision epoch");
    if (constraints.start_time() != grid.start() || constraints.num_times() != horizon + 1)
        throw RangeError("constraint map must cover the whole grid");

    std::vector<std::vector<bool>> member(static_cast<size_t>(horizon) + 1);
    std::vector<int> sizes(static_cast<size_t>(horizon));
    for (int k = 0; k < horizon; ++k) sizes[static_cast<size_t>(k)] = model.states_at(grid.start() + k).size();
    MarkovPolicy witness(grid.start(), sizes);

    member[static_cast<size_t>(horizon)] = constraints.acceptable_at(grid.final_time());

    for (int k = horizon - 1; k >= 0; --k) {
        const int t = grid.start() + k;
        const int nx = model.states_at(t).size();
        member[static_cast<size_t>(k)].assign(static_cast<size_t>(nx), false);
        for (int x = 0; x < nx; ++x) {
            // Keep the witness total so it can be simulated from any state.
            const auto& fallback = model.allowed_controls(t, x);
            if (!fallback.empty()) witness.set(t, x, fallback.front());
            if (!constraints.state_ok(t, State::of(x))) continue;
            for (int u : admissible_controls(model, constraints, t, x)) {
                if (robust_step_into(model, member[static_cast<size_t>(k) + 1], t, x, u,
                                     closure[static_cast<size_t>(k)])) {
                    member[static_cast<size_t>(k)][static_cast<size_t>(x)] = true;
                    witness.set(t, x, u);
                    break;
                }
            }
        }
    }
    return {KernelTable(grid.start(), std::move(member)), std::move(witness)};
}

RecoveryResult robust_recovery_sets(const SystemModel& model, const ConstraintMap& constraints,
                                    const UncertaintyClosure& closure) {
    KernelResult viability = robust_viability_kernel(model, constraints, closure);
    const TimeGrid& grid = model.grid();
    const int horizon = grid.horizon();

    std::vector<std::vector<bool>> member = viability.kernel.masks();
    MarkovPolicy witness = viability.witness;

    for (int k = horizon - 1; k >= 0; --k) {
        const int t = grid.start() + k;
        const int nx = model.states_at(t).size();
        for (int x = 0; x < nx; ++x) {
            if (member[static_cast<size_t>(k)][static_cast<size_t>(x)]) continue;
            // Before recovery only the model's hard constraints restrict controls.
            for (int u : model.allowed_controls(t, x)) {
                if (robust_step_into(model, member[static_cast<size_t>(k) + 1], t, x, u,
                                     closure[static_cast<size_t>(k)])) {
                    member[static_cast<size_t>(k)][static_cast<size_t>(x)] = true;
                    witness.set(t, x, u);
                    break;
                }
            }
        }
    }
    return {KernelTable(grid.start(), std::move(member)), std::move(viability.kernel),
            std::move(witness)};
}

StochasticViabilityResult stochastic_viability_values(const SystemModel& model,
                                                      const ConstraintMap& constraints,
                                                      const ProbabilityModel& noise) {
    if (!is_white_noise(noise))
        throw UnsupportedModelError(
            "the stochastic viability solver needs stage-wise independent noise; use the "
            "exhaustive oracle for weighted scenario sets");
    const auto& white = std::get<WhiteNoise>(noise);
    const TimeGrid& grid = model.grid();
    const int horizon = grid.horizon();
    if (constraints.start_time() != grid.start() || constraints.num_times() != horizon + 1)
        throw RangeError("constraint map must cover the whole grid");

    std::vector<std::vector<double>> value(static_cast<size_t>(horizon) + 1);
    std::vector<int> sizes(static_cast<size_t>(horizon));
    for (int k = 0; k < horizon; ++k) sizes[static_cast<size_t>(k)] = model.states_at(grid.start() + k).size();
    MarkovPolicy witness(grid.start(), sizes);

    {
        const int t = grid.final_time();
        const int nx = model.states_at(t).size();
        value[static_cast<size_t>(horizon)].assign(static_cast<size_t>(nx), 0.0);
        for (int x = 0; x < nx; ++x)
            value[static_cast<size_t>(horizon)][static_cast<size_t>(x)] =
                constraints.state_ok(t, State::of(x)) ? 1.0 : 0.0;
    }

    for (int k = horizon - 1; k >= 0; --k) {
        const int t = grid.start() + k;
        const int nx = model.states_at(t).size();
        const int offset = t - white.start_epoch;
        if (offset < 0 || offset >= static_cast<int>(white.weights.size()))
            throw RangeError("white-noise model does not cover every decision epoch");
        const auto& stage = white.weights[static_cast<size_t>(offset)];
        value[static_cast<size_t>(k)].assign(static_cast<size_t>(nx), 0.0);
        for (int x = 0; x < nx; ++x) {
            // The witness stays total: closed-loop paths from a viable state can
            // still visit zero-probability states, where any control does.
            const auto& fallback = model.allowed_controls(t, x);
            if (!fallback.empty()) witness.set(t, x, fallback.front());
            if (!constraints.state_ok(t, State::of(x))) continue;
            double best = -1.0;
            int best_u = -1;
            for (int u : admissible_controls(model, constraints, t, x)) {
                KahanSum sum;
                for (size_t w = 0; w < stage.size(); ++w) {
                    if (stage[w] == 0.0) continue;
                    const State next = model.step(t, State::of(x), u, static_cast<int>(w));
                    if (next.is_cemetery()) continue;
                    sum.add(stage[w] * value[static_cast<size_t>(k) + 1][static_cast<size_t>(next.index)]);
                }
                if (sum.value() > best) {
                    best = sum.value();
                    best_u = u;
                }
            }
            if (best_u >= 0) {
                value[static_cast<size_t>(k)][static_cast<size_t>(x)] = best;
                witness.set(t, x, best_u);
            }
        }
    }
    return {ValueTable{grid.start(), std::move(value)}, std::move(witness)};
}

namespace {

/// Runs the configured exhaustive search; returns the first strategy whose
/// bundle belongs to the regime.
std::optional<Strategy> first_member_strategy(const SystemModel& model, const RegimeSpec& regime,
                                              int t, State x, const std::vector<Scenario>& scope,
                                              const SolverOptions& options) {
    if (options.strategy_class == StrategyClass::Markov) {
        MarkovPolicyEnumerator stream(model, t, model.grid().final_time(), std::nullopt,
                                      options.budget);
        while (auto policy = stream.next()) {
            Strategy strategy = std::move(*policy);
            if (regime_membership(regime, make_bundle(model, strategy, t, x, scope)))
                return strategy;
        }
        return std::nullopt;
    }
    AdaptedPolicyEnumerator stream(model, scope, t, x, options.budget);
    while (auto policy = stream.next()) {
        Strategy strategy = std::move(*policy);
        if (regime_membership(regime, make_bundle(model, strategy, t, x, scope)))
            return strategy;
    }
    return std::nullopt;
}

} // namespace

std::map<Scenario, std::optional<int>> witness_recovery_times(const SystemModel& model,
                                                              const Strategy& strategy,
                                                              const ConstraintMap& constraints,
                                                              int t, State x,
                                                              const std::vector<Scenario>& scope) {
    std::map<Scenario, std::optional<int>> times;
    for (const auto& scenario : scope) {
        const PathPair path = closed_loop(model, strategy, t, model.grid().final_time(), x, scenario);
        times[scenario] = recovery_time(constraints, path.states, path.controls, t);
    }
    return times;
}

ResilienceResult brute_force_resilient(const SystemModel& model, const RegimeSpec& regime, int t,
                                       State x, const SolverOptions& options) {
    const auto scope = scenario_scope(regime, model, t, options.budget);
    ResilienceResult result;
    auto witness = first_member_strategy(model, regime, t, x, scope, options);
    if (!witness) return result;
    result.resilient = true;
    if (const ConstraintMap* constraints = regime_constraint_map(regime))
        result.recovery_times = witness_recovery_times(model, *witness, *constraints, t, x, scope);
    result.witness = std::move(witness);
    return result;
}

ResilientStates resilient_states(const SystemModel& model, const RegimeSpec& regime, int t,
                                 const SolverOptions& options) {
    ResilientStates result;
    result.time = t;
    const int nx = model.states_at(t).size();

    auto from_kernel = [&](const KernelTable& kernel, const MarkovPolicy& witness) {
        for (int x = 0; x < nx; ++x) {
            if (!kernel.contains(t, State::of(x))) continue;
            result.members.push_back(x);
            result.witnesses.emplace(x, witness);
        }
    };

    if (const auto* bounded = std::get_if<BoundedRegime>(&regime)) {
        auto solved = robust_viability_kernel(model, bounded->region, full_closure(model));
        from_kernel(solved.kernel, solved.witness);
        return result;
    }
    if (const auto* viability = std::get_if<DeterministicViabilityRegime>(&regime)) {
        auto solved = robust_viability_kernel(model, viability->constraints, full_closure(model));
        from_kernel(solved.kernel, solved.witness);
        return result;
    }
    if (const auto* robust = std::get_if<RobustRecoveryRegime>(&regime)) {
        if (auto closure = rectangular_closure(model, robust->scope, t)) {
            auto solved = robust_recovery_sets(model, robust->constraints, *closure);
            from_kernel(solved.recovery_sets, solved.witness);
            return result;
        }
        // Non-rectangular scenario sets fall back to the exhaustive oracle.
    } else if (const auto* stochastic = std::get_if<StochasticViabilityRegime>(&regime)) {
        if (is_white_noise(stochastic->probability)) {
            auto solved =
                stochastic_viability_values(model, stochastic->constraints, stochastic->probability);
            for (int x = 0; x < nx; ++x) {
                if (solved.values.at(t, State::of(x)) >= stochastic->level - kProbTolerance) {
                    result.members.push_back(x);
                    result.witnesses.emplace(x, solved.witness);
                }
            }
            return result;
        }
        // Weighted scenario models carry cross-time dependence; use the oracle.
    }

    for (int x = 0; x < nx; ++x) {
        auto outcome = brute_force_resilient(model, regime, t, State::of(x), options);
        if (!outcome.resilient) continue;
        result.members.push_back(x);
        result.witnesses.emplace(x, std::move(*outcome.witness));
    }
    return result;
}

IndicatorResult resilience_indicator(const SystemModel& model, const RegimeSpec& regime,
                                     const ExtendedRiskSpec& risk, int t, State x,
                                     const SolverOptions& options) {
    // The bundle must cover both what membership and what the risk measure read.
    std::set<Scenario> merged;
    for (auto& scenario : scenario_scope(regime, model, t, options.budget))
        merged.insert(std::move(scenario));
    for (auto& scenario : risk_scope(risk.measure, model, t, options.budget))
        merged.insert(std::move(scenario));
    const std::vector<Scenario> scope(merged.begin(), merged.end());

    std::optional<IndicatorResult> best;
    auto consider = [&](Strategy strategy) {
        const PathBundle bundle = make_bundle(model, strategy, t, x, scope);
        if (!regime_membership(regime, bundle)) return;
        const double value = extended_risk(risk, bundle);
        if (!best || value < best->value) best = IndicatorResult{value, std::move(strategy)};
    };

    if (options.strategy_class == StrategyClass::Markov) {
        MarkovPolicyEnumerator stream(model, t, model.grid().final_time(), std::nullopt,
                                      options.budget);
        while (auto policy = stream.next()) consider(std::move(*policy));
    } else {
        AdaptedPolicyEnumerator stream(model, scope, t, x, options.budget);
        while (auto policy = stream.next()) consider(std::move(*policy));
    }

    if (!best) {
        std::ostringstream os;
        os << "no resilient strategy from (t=" << t << ", state index " << x.index << ")";
        throw NoResilientStrategyError(os.str());
    }
    return std::move(*best);
}

} // namespace reskit
