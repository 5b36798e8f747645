#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reskit/model.hpp"
#include "reskit/regime.hpp"
#include "reskit/risk.hpp"
#include "reskit/solvers.hpp"
#include "reskit/strategy.hpp"
#include "reskit/trajectory.hpp"

namespace reskit::io {

// ---------------------------------------------------------------------------
// Model files: one JSON document with keys `times`, `states`, `controls`,
// `uncertainties`, `dynamics` and optional `hard_constraints`. Label lists are
// either constant or given per time; unknown keys are rejected.
// ---------------------------------------------------------------------------

SystemModel model_from_json(const nlohmann::json& doc);
SystemModel model_from_text(const std::string& text);
SystemModel load_model(const std::string& path);

// ---------------------------------------------------------------------------
// Scenario files: one scenario per line, comma-separated uncertainty labels.
// ---------------------------------------------------------------------------

std::vector<Scenario> scenarios_from_text(const std::string& text, const SystemModel& model,
                                          int start_epoch);
std::vector<Scenario> load_scenarios(const std::string& path, const SystemModel& model,
                                     int start_epoch);
std::string scenario_to_label_line(const Scenario& scenario, const SystemModel& model,
                                   int start_epoch, const char* separator = ",");

// ---------------------------------------------------------------------------
// Regime, probability and risk files. Labels are resolved against the model;
// unknown labels raise ParseError with the offending field.
// ---------------------------------------------------------------------------

struct RegimeOverrides {
    std::optional<double> beta;
    std::optional<double> alpha;
};

struct ParsedRegime {
    RegimeSpec regime;
    /// Risk specification embedded in the file (`risk` key or the risk_bound
    /// regime variant); feeds the indicator computation.
    std::optional<ExtendedRiskSpec> risk;
};

ParsedRegime regime_from_json(const nlohmann::json& doc, const SystemModel& model, int start_time,
                              const RegimeOverrides& overrides = {},
                              const std::string& base_dir = ".");
ParsedRegime load_regime(const std::string& path, const SystemModel& model, int start_time,
                         const RegimeOverrides& overrides = {});

ConstraintMap constraints_from_json(const nlohmann::json& doc, const SystemModel& model);
ProbabilityModel probability_from_json(const nlohmann::json& doc, const SystemModel& model,
                                       int start_time, const std::string& base_dir);
ExtendedRiskSpec risk_from_json(const nlohmann::json& doc, const SystemModel& model,
                                int start_time, const std::string& base_dir);

// ---------------------------------------------------------------------------
// Policy files: records [t, x, u] (Markov) or [t, x, prefix, u] (adapted).
// ---------------------------------------------------------------------------

Strategy strategy_from_json(const nlohmann::json& doc, const SystemModel& model);
Strategy load_strategy(const std::string& path, const SystemModel& model);
std::string strategy_to_text(const Strategy& strategy, const SystemModel& model);
void save_strategy(const std::string& path, const Strategy& strategy, const SystemModel& model);

// ---------------------------------------------------------------------------
// Result formatting. All real numbers use 12 significant digits so outputs are
// byte-stable across runs.
// ---------------------------------------------------------------------------

std::string bundle_to_csv(const PathBundle& bundle, const SystemModel& model);
std::string kernel_to_text(const KernelTable& kernel, const SystemModel& model);
std::string kernel_to_csv(const KernelTable& kernel, const SystemModel& model);
std::string value_table_to_csv(const ValueTable& values, const SystemModel& model);
std::string recovery_times_to_csv(const std::map<Scenario, std::optional<int>>& times,
                                  const SystemModel& model, int start_epoch);
std::string distribution_to_csv(const DiscreteRandomVariable& distribution);
std::string validation_to_text(const ValidationReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace reskit::io
