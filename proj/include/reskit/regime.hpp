#pragma once

#include <variant>
#include <vector>

#include "reskit/constraint.hpp"
#include "reskit/probability.hpp"
#include "reskit/risk.hpp"
#include "reskit/trajectory.hpp"

namespace reskit {

/// States must stay inside a region at every time from the start on, for every
/// scenario of the bundle.
struct BoundedRegime {
    ConstraintMap region; // states-only constraint map
};

/// State and control constraints hold time by time, for every scenario.
struct DeterministicViabilityRegime {
    ConstraintMap constraints;
};

/// Every designated scenario recovers: constraints hold from some finite,
/// scenario-dependent time on. Before recovery only the model's hard
/// constraints bind.
struct RobustRecoveryRegime {
    ConstraintMap constraints;
    std::vector<Scenario> scope; // nonempty, windows start at the bundle start
};

/// Constraints hold from the start with probability at least `level`.
struct StochasticViabilityRegime {
    ConstraintMap constraints;
    ProbabilityModel probability;
    double level = 1.0;
};

/// The probability of ever leaving the region is at most `level`.
struct ExitProbabilityRegime {
    ConstraintMap region;
    ProbabilityModel probability;
    double level = 0.0;
};

/// Almost surely, the path leaves the region at most `max_exits` times.
struct ExitCountLimitRegime {
    ConstraintMap region;
    int max_exits = 0;
    ProbabilityModel probability;
};

/// The extended risk of the bundle stays below a level.
struct RiskBoundRegime {
    ExtendedRiskSpec risk;
    double bound = 0.0;
};

/// A predicate on the control path must hold on every scenario: some epoch at
/// or after the start uses a control from the accepted set. This is the kind of
/// regime that no per-time control constraint can express.
struct ControlPredicateRegime {
    int start_epoch = 0;
    std::vector<std::vector<bool>> accepted; // [epoch offset][control index]
};

using RegimeSpec =
    std::variant<BoundedRegime, DeterministicViabilityRegime, RobustRecoveryRegime,
                 StochasticViabilityRegime, ExitProbabilityRegime, ExitCountLimitRegime,
                 RiskBoundRegime, ControlPredicateRegime>;

/// Exact membership of a bundle in a recovery regime. Paths that visit the
/// cemetery are acceptable in no regime; probabilistic variants evaluate the
/// finite support exactly, and a support/scope scenario missing from the
/// bundle raises MissingScenarioError.
bool regime_membership(const RegimeSpec& regime, const PathBundle& bundle);

/// Scenarios a bundle must cover so that membership in the regime (and, when
/// given, the risk spec) is decidable: the regime's designated scenarios or
/// probability support, or every scenario for unscoped variants.
std::vector<Scenario> scenario_scope(const RegimeSpec& regime, const SystemModel& model,
                                     int start_time,
                                     unsigned long long budget = kDefaultEnumerationBudget);

/// Scenarios an extended risk spec needs from a bundle starting at start_time.
std::vector<Scenario> risk_scope(const RiskMeasureSpec& measure, const SystemModel& model,
                                 int start_time,
                                 unsigned long long budget = kDefaultEnumerationBudget);

/// The constraint map a regime carries, or nullptr for the risk-bound and
/// control-predicate variants.
const ConstraintMap* regime_constraint_map(const RegimeSpec& regime);

/// Rewrite of a control-predicate regime as plain viability on a model with one
/// extra state component that remembers whether an accepted control was used.
/// Querying the kernel of the extended model at a "not seen yet" state must
/// agree with direct resilience under the predicate regime.
struct ControlPredicateExtension {
    SystemModel model;            // grid truncated to [start_time, T]
    ConstraintMap final_constraint; // everything acceptable until T, "seen" states at T
};

ControlPredicateExtension extend_for_control_predicate(const SystemModel& model,
                                                       const ControlPredicateRegime& regime,
                                                       int start_time);

/// Extended-model state label for (state, seen-flag); used to map kernels back.
Label extended_state_label(const Label& base, bool seen);

} // namespace reskit
