#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "reskit/constraint.hpp"
#include "reskit/probability.hpp"
#include "reskit/trajectory.hpp"

namespace reskit {

/// Finitely supported real random variable: (value, weight) atoms with
/// nonnegative weights of unit mass.
class DiscreteRandomVariable {
public:
    struct Atom {
        double value;
        double weight;
    };

    explicit DiscreteRandomVariable(std::vector<Atom> atoms);
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }

private:
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Cost functions over a single realized path.
// ---------------------------------------------------------------------------

/// 1 when the path ever violates the constraints from its start, else 0.
struct IndicatorExitCost {
    ConstraintMap constraints;
};

/// Number of constraint violations along the path, as a real.
struct ExitCountCost {
    ConstraintMap constraints;
};

/// Recovery delay tau - t. A path that never recovers costs the sentinel,
/// which defaults to (window length + 1) and must exceed any finite delay.
struct RecoveryTimeCost {
    ConstraintMap constraints;
    std::optional<double> infinite_sentinel;
};

/// Explicit stage costs per (epoch, state, control) plus a final-state cost.
/// The cemetery contributes zero at every stage.
struct TableCost {
    int start_epoch = 0;
    std::vector<std::vector<std::vector<double>>> stage; // [epoch offset][state][control]
    std::vector<double> final_cost;                      // [state] at the final time
};

using CostSpec = std::variant<IndicatorExitCost, ExitCountCost, RecoveryTimeCost, TableCost>;

/// Cost of one realized path. The scenario parameter completes the general
/// cost-function signature; none of the built-in variants reads it.
double path_cost(const CostSpec& spec, const PathPair& path, int path_start,
                 const Scenario& scenario);

// ---------------------------------------------------------------------------
// Risk measures over finitely supported random variables.
// ---------------------------------------------------------------------------

struct ExpectationMeasure {
    std::optional<ProbabilityModel> probability; // required for extended risk
};

/// Maximum over designated scenarios; an empty scope means every scenario of
/// the bundle under evaluation.
struct WorstCaseMeasure {
    std::vector<Scenario> scope;
};

/// Average of the worst (1 - level) probability mass; level in [0, 1).
struct CvarMeasure {
    std::optional<ProbabilityModel> probability;
    double level = 0.0;
};

/// Worst case over a finite family of probability models, each evaluated with
/// the inner measure.
struct AmbiguitySupMeasure {
    enum class Inner { Expectation, WorstCase, Cvar };
    AmbiguitySet models;
    Inner inner = Inner::Expectation;
    double level = 0.0; // used when inner == Cvar
};

using RiskMeasureSpec =
    std::variant<ExpectationMeasure, WorstCaseMeasure, CvarMeasure, AmbiguitySupMeasure>;

double expectation(const DiscreteRandomVariable& z);
double worst_case(const DiscreteRandomVariable& z);
/// Exact CVaR of a finite distribution at confidence level in [0, 1), via the
/// sorted-tail formula. Level 1 is rejected (use worst_case).
double cvar(const DiscreteRandomVariable& z, double level);

/// Applies a risk measure to an already-assembled distribution. Probability
/// models inside the spec only matter when a distribution is built from a path
/// bundle, so here ambiguity reduces to its inner measure.
double risk_value(const RiskMeasureSpec& spec, const DiscreteRandomVariable& z);

// ---------------------------------------------------------------------------
// Extended risk measures over path bundles.
// ---------------------------------------------------------------------------

/// A cost function composed with a risk measure: evaluates the cost per
/// scenario of a bundle and aggregates across scenarios.
struct ExtendedRiskSpec {
    CostSpec cost;
    RiskMeasureSpec measure;
};

/// Risk of a path bundle. Probabilistic measures weight scenario costs by the
/// spec's probability model (whose support the bundle must cover); the worst
/// case ranges over its designated scenarios.
double extended_risk(const ExtendedRiskSpec& spec, const PathBundle& bundle);

/// The weighted cost distribution a probabilistic measure aggregates; rejects
/// worst-case and ambiguity measures, which carry no single probability model.
DiscreteRandomVariable cost_distribution(const ExtendedRiskSpec& spec, const PathBundle& bundle);

} // namespace reskit
