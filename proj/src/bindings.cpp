// Python bindings for the core operations: models, strategies, regimes, the
// closed-loop flow, kernels, resilience queries and risk measures. Inputs use
// the same JSON documents as the CLI; labels cross the boundary as strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "reskit/io.hpp"
#include "reskit/solvers.hpp"
#include "reskit/util.hpp"

namespace py = pybind11;
using namespace reskit;
using nlohmann::json;

namespace {

struct PyModel {
    SystemModel model;
};

struct PyStrategy {
    Strategy strategy;
};

struct PyRegime {
    io::ParsedRegime parsed;
    int start_time;
};

Scenario scenario_from_labels(const SystemModel& model, int start,
                              const std::vector<std::string>& labels) {
    Scenario scenario;
    for (size_t k = 0; k < labels.size(); ++k)
        scenario.push_back(
            model.uncertainties_at(start + static_cast<int>(k)).index_of(labels[k]));
    return scenario;
}

std::vector<std::string> scenario_labels(const SystemModel& model, int start,
                                         const Scenario& scenario) {
    std::vector<std::string> labels;
    for (size_t k = 0; k < scenario.size(); ++k)
        labels.push_back(model.uncertainties_at(start + static_cast<int>(k)).label(scenario[k]));
    return labels;
}

std::vector<std::string> path_state_labels(const SystemModel& model, int start,
                                           const std::vector<State>& states) {
    std::vector<std::string> labels;
    for (size_t k = 0; k < states.size(); ++k)
        labels.push_back(model.state_to_label(start + static_cast<int>(k), states[k]));
    return labels;
}

std::vector<std::string> path_control_labels(const SystemModel& model, int start,
                                             const std::vector<int>& controls) {
    std::vector<std::string> labels;
    for (size_t k = 0; k < controls.size(); ++k)
        labels.push_back(model.controls_at(start + static_cast<int>(k)).label(controls[k]));
    return labels;
}

DiscreteRandomVariable drv_from_lists(const std::vector<double>& values,
                                      const std::vector<double>& weights) {
    if (values.size() != weights.size())
        throw RangeError("values and weights must have the same length");
    std::vector<DiscreteRandomVariable::Atom> atoms;
    for (size_t i = 0; i < values.size(); ++i) atoms.push_back({values[i], weights[i]});
    return DiscreteRandomVariable(std::move(atoms));
}

py::dict bundle_to_dict(const SystemModel& model, const PathBundle& bundle) {
    py::list entries;
    for (const auto& [scenario, path] : bundle.entries()) {
        py::dict entry;
        entry["scenario"] = scenario_labels(model, bundle.start_time(), scenario);
        entry["states"] = path_state_labels(model, bundle.start_time(), path.states);
        entry["controls"] = path_control_labels(model, bundle.start_time(), path.controls);
        entries.append(entry);
    }
    py::dict out;
    out["start_time"] = bundle.start_time();
    out["entries"] = entries;
    return out;
}

py::dict kernel_to_dict(const SystemModel& model, const KernelTable& kernel) {
    py::dict out;
    for (int k = 0; k < kernel.num_times(); ++k) {
        const int t = kernel.start_time() + k;
        std::vector<std::string> labels;
        for (int x : kernel.states_at(t)) labels.push_back(model.states_at(t).label(x));
        out[py::int_(t)] = labels;
    }
    return out;
}

SolverOptions options_from(bool markov, unsigned long long budget) {
    SolverOptions options;
    options.budget = budget;
    options.strategy_class = markov ? StrategyClass::Markov : StrategyClass::Adapted;
    return options;
}

} // namespace

PYBIND11_MODULE(_reskit, m) {
    m.doc() = "resilience toolkit for finite control systems under uncertainty";

    py::register_exception<Error>(m, "ReskitError");

    py::class_<PyModel>(m, "Model")
        .def_static(
            "from_json",
            [](const std::string& text) { return PyModel{io::model_from_text(text)}; },
            py::arg("text"))
        .def_static(
            "from_file", [](const std::string& path) { return PyModel{io::load_model(path)}; },
            py::arg("path"))
        .def_property_readonly("t0",
                               [](const PyModel& self) { return self.model.grid().start(); })
        .def_property_readonly(
            "final_time", [](const PyModel& self) { return self.model.grid().final_time(); })
        .def("states",
             [](const PyModel& self, int t) { return self.model.states_at(t).labels(); })
        .def("controls",
             [](const PyModel& self, int t) { return self.model.controls_at(t).labels(); })
        .def("uncertainties",
             [](const PyModel& self, int t) { return self.model.uncertainties_at(t).labels(); })
        .def("validate",
             [](const PyModel& self) {
                 std::vector<std::string> issues;
                 for (const auto& issue : self.model.validate().issues)
                     issues.push_back(issue.detail);
                 return issues;
             })
        .def("step", [](const PyModel& self, int t, const std::string& x, const std::string& u,
                        const std::string& w) { return self.model.step_labels(t, x, u, w); });

    py::class_<PyStrategy>(m, "Strategy")
        .def_static(
            "from_json",
            [](const std::string& text, const PyModel& model) {
                return PyStrategy{io::strategy_from_json(json::parse(text), model.model)};
            },
            py::arg("text"), py::arg("model"))
        .def_static(
            "from_file",
            [](const std::string& path, const PyModel& model) {
                return PyStrategy{io::load_strategy(path, model.model)};
            },
            py::arg("path"), py::arg("model"))
        .def("to_json", [](const PyStrategy& self, const PyModel& model) {
            return io::strategy_to_text(self.strategy, model.model);
        });

    py::class_<PyRegime>(m, "Regime")
        .def_static(
            "from_json",
            [](const std::string& text, const PyModel& model, int start_time) {
                return PyRegime{io::regime_from_json(json::parse(text), model.model, start_time),
                                start_time};
            },
            py::arg("text"), py::arg("model"), py::arg("start_time"))
        .def_static(
            "from_file",
            [](const std::string& path, const PyModel& model, int start_time) {
                return PyRegime{io::load_regime(path, model.model, start_time), start_time};
            },
            py::arg("path"), py::arg("model"), py::arg("start_time"));

    m.def(
        "flow",
        [](const PyModel& model, int s, int t, const std::string& x,
           const std::vector<std::string>& controls, const std::vector<std::string>& scenario) {
            std::vector<int> control_indices;
            for (size_t k = 0; k < controls.size(); ++k)
                control_indices.push_back(
                    model.model.controls_at(s + static_cast<int>(k)).index_of(controls[k]));
            const Scenario w = scenario_from_labels(model.model, s, scenario);
            const auto states =
                flow(model.model, s, t, model.model.state_from_label(s, x), control_indices, w);
            return path_state_labels(model.model, s, states);
        },
        py::arg("model"), py::arg("s"), py::arg("t"), py::arg("state"), py::arg("controls"),
        py::arg("scenario"));

    m.def(
        "closed_loop",
        [](const PyModel& model, const PyStrategy& strategy, int s, int t, const std::string& x,
           const std::vector<std::string>& scenario) {
            const auto path = closed_loop(model.model, strategy.strategy, s, t,
                                          model.model.state_from_label(s, x),
                                          scenario_from_labels(model.model, s, scenario));
            return py::make_tuple(path_state_labels(model.model, s, path.states),
                                  path_control_labels(model.model, s, path.controls));
        },
        py::arg("model"), py::arg("strategy"), py::arg("s"), py::arg("t"), py::arg("state"),
        py::arg("scenario"));

    m.def(
        "bundle",
        [](const PyModel& model, const PyStrategy& strategy, int t, const std::string& x,
           const std::vector<std::vector<std::string>>& scenarios) {
            std::vector<Scenario> scope;
            for (const auto& labels : scenarios)
                scope.push_back(scenario_from_labels(model.model, t, labels));
            const PathBundle bundle = make_bundle(model.model, strategy.strategy, t,
                                                  model.model.state_from_label(t, x), scope);
            return bundle_to_dict(model.model, bundle);
        },
        py::arg("model"), py::arg("strategy"), py::arg("t"), py::arg("state"),
        py::arg("scenarios"));

    m.def(
        "all_scenarios",
        [](const PyModel& model, int first, int last) {
            std::vector<std::vector<std::string>> out;
            for (const auto& scenario : enumerate_scenarios(model.model, first, last))
                out.push_back(scenario_labels(model.model, first, scenario));
            return out;
        },
        py::arg("model"), py::arg("first_epoch"), py::arg("last_epoch"));

    m.def(
        "regime_membership",
        [](const PyModel& model, const PyRegime& regime, const PyStrategy& strategy,
           const std::string& x, unsigned long long budget) {
            const int t = regime.start_time;
            const auto scope = scenario_scope(regime.parsed.regime, model.model, t, budget);
            const PathBundle bundle = make_bundle(model.model, strategy.strategy, t,
                                                  model.model.state_from_label(t, x), scope);
            return regime_membership(regime.parsed.regime, bundle);
        },
        py::arg("model"), py::arg("regime"), py::arg("strategy"), py::arg("state"),
        py::arg("budget") = kDefaultEnumerationBudget);

    m.def(
        "robust_viability_kernel",
        [](const PyModel& model, const PyRegime& regime) {
            const ConstraintMap* constraints = regime_constraint_map(regime.parsed.regime);
            if (!constraints) throw Error("this regime type carries no constraint map");
            const auto result = robust_viability_kernel(
                model.model, *constraints,
                regime_closure(regime.parsed.regime, model.model, regime.start_time));
            py::dict out = kernel_to_dict(model.model, result.kernel);
            return py::make_tuple(out, io::strategy_to_text(Strategy(result.witness), model.model));
        },
        py::arg("model"), py::arg("regime"));

    m.def(
        "robust_recovery_sets",
        [](const PyModel& model, const PyRegime& regime) {
            const ConstraintMap* constraints = regime_constraint_map(regime.parsed.regime);
            if (!constraints) throw Error("this regime type carries no constraint map");
            const auto result = robust_recovery_sets(
                model.model, *constraints,
                regime_closure(regime.parsed.regime, model.model, regime.start_time));
            return py::make_tuple(kernel_to_dict(model.model, result.recovery_sets),
                                  kernel_to_dict(model.model, result.viability_kernel),
                                  io::strategy_to_text(Strategy(result.witness), model.model));
        },
        py::arg("model"), py::arg("regime"));

    m.def(
        "stochastic_viability_values",
        [](const PyModel& model, const PyRegime& regime) {
            const auto* stochastic =
                std::get_if<StochasticViabilityRegime>(&regime.parsed.regime);
            if (!stochastic) throw Error("expected a stochastic_viability regime");
            const auto result = stochastic_viability_values(model.model, stochastic->constraints,
                                                            stochastic->probability);
            py::dict out;
            for (size_t k = 0; k < result.values.value.size(); ++k) {
                const int t = result.values.start_time + static_cast<int>(k);
                py::dict row;
                for (size_t x = 0; x < result.values.value[k].size(); ++x)
                    row[py::str(model.model.states_at(t).label(static_cast<int>(x)))] =
                        result.values.value[k][x];
                out[py::int_(t)] = row;
            }
            return py::make_tuple(out, io::strategy_to_text(Strategy(result.witness), model.model));
        },
        py::arg("model"), py::arg("regime"));

    m.def(
        "resilient_states",
        [](const PyModel& model, const PyRegime& regime, bool markov, unsigned long long budget) {
            const auto result = resilient_states(model.model, regime.parsed.regime,
                                                 regime.start_time, options_from(markov, budget));
            py::dict out;
            std::vector<std::string> members;
            for (int x : result.members)
                members.push_back(model.model.states_at(regime.start_time).label(x));
            out["time"] = regime.start_time;
            out["members"] = members;
            py::dict witnesses;
            for (const auto& [x, strategy] : result.witnesses)
                witnesses[py::str(model.model.states_at(regime.start_time).label(x))] =
                    io::strategy_to_text(strategy, model.model);
            out["witnesses"] = witnesses;
            return out;
        },
        py::arg("model"), py::arg("regime"), py::arg("markov") = false,
        py::arg("budget") = kDefaultEnumerationBudget);

    m.def(
        "brute_force_resilient",
        [](const PyModel& model, const PyRegime& regime, const std::string& x, bool markov,
           unsigned long long budget) {
            const auto result = brute_force_resilient(
                model.model, regime.parsed.regime, regime.start_time,
                model.model.state_from_label(regime.start_time, x), options_from(markov, budget));
            py::dict out;
            out["resilient"] = result.resilient;
            if (result.witness)
                out["witness"] = io::strategy_to_text(*result.witness, model.model);
            py::dict times;
            for (const auto& [scenario, tau] : result.recovery_times) {
                const auto labels = scenario_labels(model.model, regime.start_time, scenario);
                std::string key;
                for (size_t i = 0; i < labels.size(); ++i) key += (i ? "," : "") + labels[i];
                times[py::str(key)] = tau ? py::object(py::int_(*tau)) : py::none();
            }
            out["recovery_times"] = times;
            return out;
        },
        py::arg("model"), py::arg("regime"), py::arg("state"), py::arg("markov") = false,
        py::arg("budget") = kDefaultEnumerationBudget);

    m.def(
        "resilience_indicator",
        [](const PyModel& model, const PyRegime& regime, const std::string& x, bool markov,
           unsigned long long budget) {
            if (!regime.parsed.risk)
                throw Error("the regime document carries no risk specification");
            const auto result = resilience_indicator(
                model.model, regime.parsed.regime, *regime.parsed.risk, regime.start_time,
                model.model.state_from_label(regime.start_time, x), options_from(markov, budget));
            return py::make_tuple(result.value,
                                  io::strategy_to_text(result.minimizer, model.model));
        },
        py::arg("model"), py::arg("regime"), py::arg("state"), py::arg("markov") = false,
        py::arg("budget") = kDefaultEnumerationBudget);

    m.def(
        "evaluate_risk",
        [](const PyModel& model, const PyRegime& regime, const PyStrategy& strategy,
           const std::string& x, unsigned long long budget) {
            if (!regime.parsed.risk)
                throw Error("the regime document carries no risk specification");
            const int t = regime.start_time;
            std::set<Scenario> merged;
            for (auto& s : scenario_scope(regime.parsed.regime, model.model, t, budget))
                merged.insert(std::move(s));
            for (auto& s : risk_scope(regime.parsed.risk->measure, model.model, t, budget))
                merged.insert(std::move(s));
            const std::vector<Scenario> scope(merged.begin(), merged.end());
            const PathBundle bundle = make_bundle(model.model, strategy.strategy, t,
                                                  model.model.state_from_label(t, x), scope);
            return extended_risk(*regime.parsed.risk, bundle);
        },
        py::arg("model"), py::arg("regime"), py::arg("strategy"), py::arg("state"),
        py::arg("budget") = kDefaultEnumerationBudget);

    m.def(
        "expectation",
        [](const std::vector<double>& values, const std::vector<double>& weights) {
            return expectation(drv_from_lists(values, weights));
        },
        py::arg("values"), py::arg("weights"));
    m.def(
        "worst_case",
        [](const std::vector<double>& values, const std::vector<double>& weights) {
            return worst_case(drv_from_lists(values, weights));
        },
        py::arg("values"), py::arg("weights"));
    m.def(
        "cvar",
        [](const std::vector<double>& values, const std::vector<double>& weights, double level) {
            return cvar(drv_from_lists(values, weights), level);
        },
        py::arg("values"), py::arg("weights"), py::arg("level"));
}
