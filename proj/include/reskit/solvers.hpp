#pragma once

#include <map>
#include <optional>
#include <vector>

#include "reskit/regime.hpp"
#include "reskit/risk.hpp"
#include "reskit/strategy.hpp"
#include "reskit/trajectory.hpp"

namespace reskit {

/// Per-time state subsets (kernels, recovery sets). The cemetery is never a
/// member.
class KernelTable {
public:
    KernelTable(int start_time, std::vector<std::vector<bool>> member);

    int start_time() const noexcept { return start_; }
    int num_times() const noexcept { return static_cast<int>(member_.size()); }
    bool contains(int time, State x) const;
    /// Member state indices at a time, ascending.
    std::vector<int> states_at(int time) const;
    const std::vector<std::vector<bool>>& masks() const noexcept { return member_; }

    friend bool operator==(const KernelTable&, const KernelTable&) = default;

private:
    int start_;
    std::vector<std::vector<bool>> member_;
};

/// Per-(time, state) reals; used for maximal constraint-satisfaction
/// probabilities.
struct ValueTable {
    int start_time = 0;
    std::vector<std::vector<double>> value; // [time offset][state]

    double at(int time, State x) const;
};

enum class StrategyClass { Markov, Adapted };

struct SolverOptions {
    unsigned long long budget = kDefaultEnumerationBudget;
    StrategyClass strategy_class = StrategyClass::Adapted;
};

/// Robust viability kernel: from a kernel state, some strategy keeps state and
/// control constraints satisfied at every later time, whatever the per-epoch
/// uncertainties in the closure. The witness policy realizes that on every
/// kernel state.
struct KernelResult {
    KernelTable kernel;
    MarkovPolicy witness;
};

/// Per-epoch uncertainty subsets quantified over by the robust solvers.
using UncertaintyClosure = std::vector<std::vector<bool>>; // [epoch offset][w]

UncertaintyClosure full_closure(const SystemModel& model);

/// Rectangular (per-epoch) projection of a scenario set over the epochs
/// start..T-1; empty when the set is not a product of its projections.
std::optional<UncertaintyClosure> rectangular_closure(const SystemModel& model,
                                                      const std::vector<Scenario>& scenarios,
                                                      int start_time);

/// Per-epoch uncertainty subsets a regime's robust solvers quantify over: the
/// rectangular projection of a robust-recovery scope (an error when the scope
/// is not rectangular) and the full sets otherwise.
UncertaintyClosure regime_closure(const RegimeSpec& regime, const SystemModel& model,
                                  int start_time);

KernelResult robust_viability_kernel(const SystemModel& model, const ConstraintMap& constraints,
                                     const UncertaintyClosure& closure);

/// Reach-and-stay sets: states from which some strategy drives every closure
/// path into constraint satisfaction from some time on (the viability kernel,
/// reached under hard constraints only).
struct RecoveryResult {
    KernelTable recovery_sets;
    KernelTable viability_kernel;
    MarkovPolicy witness;
};

RecoveryResult robust_recovery_sets(const SystemModel& model, const ConstraintMap& constraints,
                                    const UncertaintyClosure& closure);

/// Maximal probability of satisfying state and control constraints from each
/// (time, state), under stage-wise independent noise.
struct StochasticViabilityResult {
    ValueTable values;
    MarkovPolicy witness;
};

StochasticViabilityResult stochastic_viability_values(const SystemModel& model,
                                                      const ConstraintMap& constraints,
                                                      const ProbabilityModel& noise);

/// Outcome of a resilience query at one (time, state).
struct ResilienceResult {
    bool resilient = false;
    std::optional<Strategy> witness;
    /// Recovery time per scope scenario for the witness (regimes that carry
    /// constraints); empty otherwise. Unset entries mean "never recovers".
    std::map<Scenario, std::optional<int>> recovery_times;
    std::optional<double> indicator;
};

/// Ground-truth oracle: exhaustively searches the configured strategy class,
/// builds each closed-loop bundle over the regime's scenario scope, and returns
/// the first strategy whose bundle belongs to the regime.
ResilienceResult brute_force_resilient(const SystemModel& model, const RegimeSpec& regime, int t,
                                       State x, const SolverOptions& options = {});

/// Resilient states at a time, with one witness strategy per member. Uses the
/// kernel or value dynamic programs where the regime class admits them and the
/// exhaustive oracle otherwise.
struct ResilientStates {
    int time = 0;
    std::vector<int> members; // ascending state indices
    std::map<int, Strategy> witnesses;
};

ResilientStates resilient_states(const SystemModel& model, const RegimeSpec& regime, int t,
                                 const SolverOptions& options = {});

/// Minimal extended risk over the enumerated resilient strategies at (t, x),
/// with the first minimizer in enumeration order.
struct IndicatorResult {
    double value = 0.0;
    Strategy minimizer;
};

IndicatorResult resilience_indicator(const SystemModel& model, const RegimeSpec& regime,
                                     const ExtendedRiskSpec& risk, int t, State x,
                                     const SolverOptions& options = {});

/// Recovery times of a strategy's bundle against a constraint map, one entry
/// per scope scenario.
std::map<Scenario, std::optional<int>> witness_recovery_times(const SystemModel& model,
                                                              const Strategy& strategy,
                                                              const ConstraintMap& constraints,
                                                              int t, State x,
                                                              const std::vector<Scenario>& scope);

} // namespace reskit
