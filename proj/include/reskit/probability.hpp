#pragma once

#include <variant>
#include <vector>

#include "reskit/model.hpp"
#include "reskit/util.hpp"

namespace reskit {

/// Stage-wise independent uncertainties: one distribution over W_t per decision
/// epoch, covering the whole grid.
struct WhiteNoise {
    int start_epoch = 0;
    std::vector<std::vector<double>> weights; // [epoch offset][uncertainty index]
};

/// Finitely many scenarios with weights, defined over one fixed window.
struct WeightedScenarios {
    int start_epoch = 0;
    std::vector<std::pair<Scenario, double>> atoms; // sorted by scenario, merged
};

using ProbabilityModel = std::variant<WhiteNoise, WeightedScenarios>;

/// A finite family of probability models held by risk-holders with different
/// beliefs; risk is taken as the worst case over the family.
using AmbiguitySet = std::vector<ProbabilityModel>;

/// Checks nonnegativity and unit mass (absolute tolerance 1e-12); throws
/// RangeError on failure.
void validate_probability(const ProbabilityModel& model);

bool is_white_noise(const ProbabilityModel& model);

/// Probability of one scenario over the window starting at window_start.
double scenario_weight(const ProbabilityModel& model, int window_start, const Scenario& scenario);

/// Positive-probability scenarios over a window, lexicographically ordered.
std::vector<Scenario> probability_support(const ProbabilityModel& model, int window_start,
                                          int window_length,
                                          unsigned long long budget = kDefaultEnumerationBudget);

} // namespace reskit
