// Command-line front end: parses model/regime/strategy/scenario files,
// dispatches the solvers and emits deterministic, machine-readable results.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "reskit/io.hpp"
#include "reskit/solvers.hpp"
#include "reskit/util.hpp"

namespace fs = std::filesystem;
using namespace reskit;

namespace {

struct RunConfig {
    std::string model_path;
    std::string regime_path;
    std::string strategy_path;
    std::string scenarios_path;
    std::optional<int> time;
    std::optional<std::string> state;
    std::optional<double> beta;
    std::optional<double> alpha;
    unsigned long long budget = kDefaultEnumerationBudget;
    std::optional<std::string> out_dir;
    std::string format = "structured-text";
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string sanitize(const std::string& label) {
    std::string out;
    for (char c : label)
        out.push_back(
            std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_');
    return out;
}

void ensure_out_dir(const RunConfig& config) {
    if (config.out_dir) fs::create_directories(*config.out_dir);
}

std::string out_path(const RunConfig& config, const std::string& name) {
    return (fs::path(*config.out_dir) / name).string();
}

SystemModel load_model_checked(const RunConfig& config) {
    SystemModel model = io::load_model(config.model_path);
    const ValidationReport report = model.validate();
    if (!report.ok())
        throw Error("model file is invalid:\n" + io::validation_to_text(report));
    return model;
}

int start_time_of(const RunConfig& config, const SystemModel& model) {
    const int t = config.time.value_or(model.grid().start());
    if (!model.grid().contains_time(t)) throw Error("start time outside the grid");
    return t;
}

State start_state_of(const RunConfig& config, const SystemModel& model, int t) {
    if (!config.state) throw UsageError("this subcommand needs --state");
    return model.state_from_label(t, *config.state);
}

io::ParsedRegime load_regime_checked(const RunConfig& config, const SystemModel& model, int t) {
    if (config.regime_path.empty()) throw UsageError("this subcommand needs --regime");
    io::RegimeOverrides overrides;
    overrides.beta = config.beta;
    overrides.alpha = config.alpha;
    return io::load_regime(config.regime_path, model, t, overrides);
}

const ConstraintMap& constraints_of(const RegimeSpec& regime) {
    if (const ConstraintMap* map = regime_constraint_map(regime)) return *map;
    throw Error("this regime type carries no constraint map");
}

int run_validate(const RunConfig& config) {
    SystemModel model = io::load_model(config.model_path);
    const ValidationReport report = model.validate();
    std::cout << io::validation_to_text(report);
    return report.ok() ? 0 : 1;
}

int run_simulate(const RunConfig& config) {
    SystemModel model = load_model_checked(config);
    const int t = start_time_of(config, model);
    const State x = start_state_of(config, model, t);
    if (config.strategy_path.empty()) throw UsageError("simulate needs --strategy");
    if (config.scenarios_path.empty()) throw UsageError("simulate needs --scenarios");
    const Strategy strategy = io::load_strategy(config.strategy_path, model);
    const auto scenarios = io::load_scenarios(config.scenarios_path, model, t);
    if (scenarios.empty()) throw UsageError("scenario file is empty; nothing to simulate");
    const PathBundle bundle = make_bundle(model, strategy, t, x, scenarios);
    const std::string csv = io::bundle_to_csv(bundle, model);
    std::cout << csv;
    if (config.out_dir) {
        ensure_out_dir(config);
        io::write_file(out_path(config, "bundle.csv"), csv);
    }
    return 0;
}

int run_kernel(const RunConfig& config) {
    SystemModel model = load_model_checked(config);
    const int t = start_time_of(config, model);
    const auto parsed = load_regime_checked(config, model, t);
    const auto result = robust_viability_kernel(model, constraints_of(parsed.regime),
                                                regime_closure(parsed.regime, model, t));
    std::cout << (config.format == "csv" ? io::kernel_to_csv(result.kernel, model)
                                         : io::kernel_to_text(result.kernel, model));
    if (config.out_dir) {
        ensure_out_dir(config);
        io::save_strategy(out_path(config, "witness_policy.json"), result.witness, model);
    }
    return 0;
}

int run_recover(const RunConfig& config) {
    SystemModel model = load_model_checked(config);
    const int t = start_time_of(config, model);
    const auto parsed = load_regime_checked(config, model, t);
    const ConstraintMap& constraints = constraints_of(parsed.regime);
    const auto result = robust_recovery_sets(model, constraints, regime_closure(parsed.regime, model, t));
    std::cout << (config.format == "csv" ? io::kernel_to_csv(result.recovery_sets, model)
                                         : io::kernel_to_text(result.recovery_sets, model));
    if (config.state) {
        const State x = model.state_from_label(t, *config.state);
        std::vector<Scenario> scope;
        if (const auto* robust = std::get_if<RobustRecoveryRegime>(&parsed.regime)) {
            scope = robust->scope;
        } else {
            scope = enumerate_scenarios(model, t, model.grid().final_time(), config.budget);
        }
        const auto times =
            witness_recovery_times(model, Strategy(result.witness), constraints, t, x, scope);
        std::cout << "\n" << io::recovery_times_to_csv(times, model, t);
    }
    if (config.out_dir) {
        ensure_out_dir(config);
        io::save_strategy(out_path(config, "witness_policy.json"), result.witness, model);
    }
    return 0;
}

int run_viab_prob(const RunConfig& config) {
    SystemModel model = load_model_checked(config);
    const int t = start_time_of(config, model);
    const auto parsed = load_regime_checked(config, model, t);
    const auto* stochastic = std::get_if<StochasticViabilityRegime>(&parsed.regime);
    if (!stochastic) throw Error("viab-prob needs a stochastic_viability regime");
    const auto result =
        stochastic_viability_values(model, stochastic->constraints, stochastic->probability);
    std::cout << io::value_table_to_csv(result.values, model);
    if (config.out_dir) {
        ensure_out_dir(config);
        io::save_strategy(out_path(config, "witness_policy.json"), result.witness, model);
    }
    return 0;
}

int run_resilient(const RunConfig& config) {
    SystemModel model = load_model_checked(config);
    const int t = start_time_of(config, model);
    const auto parsed = load_regime_checked(config, model, t);
    SolverOptions options;
    options.budget = config.budget;
    const auto result = resilient_states(model, parsed.regime, t, options);
    if (config.format == "csv") {
        std::cout << "time,state\n";
        for (int x : result.members)
            std::cout << t << "," << model.states_at(t).label(x) << "\n";
    } else {
        std::cout << "t=" << t << " resilient:";
        for (int x : result.members) std::cout << " " << model.states_at(t).label(x);
        std::cout << "\n";
    }
    if (config.out_dir) {
        ensure_out_dir(config);
        for (int x : result.members) {
            const std::string name =
                "witness_state_" + sanitize(model.states_at(t).label(x)) + ".json";
            io::save_strategy(out_path(config, name), result.witnesses.at(x), model);
        }
    }
    return 0;
}

int run_indicator(const RunConfig& config) {
    SystemModel model = load_model_checked(config);
    const int t = start_time_of(config, model);
    const State x = start_state_of(config, model, t);
    const auto parsed = load_regime_checked(config, model, t);
    if (!parsed.risk)
        throw Error("the regime file carries no risk specification; add a 'risk' key");
    SolverOptions options;
    options.budget = config.budget;
    const auto result = resilience_indicator(model, parsed.regime, *parsed.risk, t, x, options);
    std::cout << "indicator: " << format_real(result.value) << "\n";
    if (config.out_dir) {
        ensure_out_dir(config);
        io::save_strategy(out_path(config, "argmin_policy.json"), result.minimizer, model);
        std::cout << "policy_file: argmin_policy.json\n";
        const bool probabilistic = std::holds_alternative<ExpectationMeasure>(parsed.risk->measure) ||
                                   std::holds_alternative<CvarMeasure>(parsed.risk->measure);
        if (probabilistic) {
            const auto scope = risk_scope(parsed.risk->measure, model, t, config.budget);
            const PathBundle bundle = make_bundle(model, result.minimizer, t, x, scope);
            io::write_file(out_path(config, "cost_distribution.csv"),
                           io::distribution_to_csv(cost_distribution(*parsed.risk, bundle)));
            std::cout << "distribution_file: cost_distribution.csv\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"resilience toolkit for finite control systems under uncertainty"};
    app.require_subcommand(1);

    RunConfig config;
    if (const char* env = std::getenv("RESKIT_BUDGET")) {
        try {
            config.budget = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "invalid RESKIT_BUDGET value '" << env << "'\n";
            return 2;
        }
    }

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", config.model_path, "model file (JSON)")->required();
        cmd->add_option("--regime", config.regime_path, "regime file (JSON)");
        cmd->add_option("--strategy", config.strategy_path, "policy file (JSON)");
        cmd->add_option("--scenarios", config.scenarios_path, "scenario file (CSV lines)");
        cmd->add_option("--time", config.time, "start time (default: t0)");
        cmd->add_option("--state", config.state, "start state label");
        cmd->add_option("--beta", config.beta, "override the regime's probability level")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--alpha", config.alpha, "override the regime's risk bound");
        cmd->add_option("--budget", config.budget, "enumeration budget")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out", config.out_dir, "directory for result files");
        cmd->add_option("--format", config.format, "structured-text or csv")
            ->check(CLI::IsMember({"structured-text", "csv"}));
    };

    CLI::App* validate = app.add_subcommand("validate", "check a model file");
    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop bundle for a strategy");
    CLI::App* kernel = app.add_subcommand("kernel", "robust viability kernel");
    CLI::App* recover = app.add_subcommand("recover", "robust recovery sets and recovery times");
    CLI::App* viab_prob = app.add_subcommand("viab-prob", "stochastic viability value table");
    CLI::App* resilient = app.add_subcommand("resilient", "resilient states and witnesses");
    CLI::App* indicator = app.add_subcommand("indicator", "minimal risk over resilient strategies");
    for (CLI::App* cmd : {validate, simulate, kernel, recover, viab_prob, resilient, indicator})
        add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return run_validate(config);
        if (simulate->parsed()) return run_simulate(config);
        if (kernel->parsed()) return run_kernel(config);
        if (recover->parsed()) return run_recover(config);
        if (viab_prob->parsed()) return run_viab_prob(config);
        if (resilient->parsed()) return run_resilient(config);
        if (indicator->parsed()) return run_indicator(config);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
