#include "reskit/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "reskit/util.hpp"

namespace reskit::io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

void require_object(const json& doc, const std::string& where,
                    std::initializer_list<const char*> required,
                    std::initializer_list<const char*> optional = {}) {
    if (!doc.is_object()) fail(where, "expected an object");
    for (const char* key : required)
        if (!doc.contains(key)) fail(where, std::string("missing key '") + key + "'");
    for (const auto& [key, value] : doc.items()) {
        const auto in = [&](std::initializer_list<const char*> keys) {
            return std::any_of(keys.begin(), keys.end(),
                               [&](const char* k) { return key == k; });
        };
        if (!in(required) && !in(optional)) fail(where, "unknown key '" + key + "'");
    }
}

Label label_from_json(const json& value, const std::string& where) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    fail(where, "labels must be strings or integers");
}

std::vector<Label> label_list(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty()) fail(where, "expected a nonempty label list");
    std::vector<Label> labels;
    labels.reserve(value.size());
    for (const auto& entry : value) labels.push_back(label_from_json(entry, where));
    return labels;
}

/// A label-set field is either one constant list or one list per slot.
std::vector<LabeledSet> label_sets(const json& value, int slots, const std::string& where) {
    if (!value.is_array() || value.empty()) fail(where, "expected a label list");
    std::vector<LabeledSet> sets;
    try {
        if (value.front().is_array()) {
            if (static_cast<int>(value.size()) != slots) {
                std::ostringstream os;
                os << "expected " << slots << " per-time lists, got " << value.size();
                fail(where, os.str());
            }
            for (const auto& entry : value) sets.emplace_back(label_list(entry, where));
        } else {
            const LabeledSet constant(label_list(value, where));
            sets.assign(static_cast<size_t>(slots), constant);
        }
    } catch (const RangeError& e) {
        fail(where, e.what());
    }
    return sets;
}

int int_from_json(const json& value, const std::string& where) {
    if (!value.is_number_integer()) fail(where, "expected an integer");
    return value.get<int>();
}

double number_from_json(const json& value, const std::string& where) {
    if (!value.is_number()) fail(where, "expected a number");
    return value.get<double>();
}

json parse_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(where, e.what());
    }
}

} // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

SystemModel model_from_json(const json& doc) {
    require_object(doc, "model", {"times", "states", "controls", "uncertainties", "dynamics"},
                   {"hard_constraints"});
    require_object(doc.at("times"), "model.times", {"t0", "T"});
    const int t0 = int_from_json(doc.at("times").at("t0"), "model.times.t0");
    const int final_time = int_from_json(doc.at("times").at("T"), "model.times.T");
    if (t0 > final_time) fail("model.times", "t0 must not exceed T");
    const TimeGrid grid(t0, final_time);

    auto states = label_sets(doc.at("states"), grid.num_times(), "model.states");
    auto controls = label_sets(doc.at("controls"), grid.horizon(), "model.controls");
    auto uncertainties = label_sets(doc.at("uncertainties"), grid.horizon(), "model.uncertainties");

    const auto& dyn = doc.at("dynamics");
    if (!dyn.is_array()) fail("model.dynamics", "expected an array of records");
    std::vector<DynamicsRecord> dynamics;
    dynamics.reserve(dyn.size());
    for (size_t i = 0; i < dyn.size(); ++i) {
        std::ostringstream where;
        where << "model.dynamics[" << i << "]";
        const auto& rec = dyn[i];
        if (!rec.is_array() || rec.size() != 5)
            fail(where.str(), "expected [t, x, u, w, x_next]");
        DynamicsRecord record;
        record.t = int_from_json(rec[0], where.str());
        record.x = label_from_json(rec[1], where.str());
        record.u = label_from_json(rec[2], where.str());
        record.w = label_from_json(rec[3], where.str());
        record.next = label_from_json(rec[4], where.str());
        dynamics.push_back(std::move(record));
    }

    std::optional<std::vector<HardConstraintRecord>> hard;
    if (doc.contains("hard_constraints")) {
        const auto& hc = doc.at("hard_constraints");
        if (!hc.is_array()) fail("model.hard_constraints", "expected an array of records");
        hard.emplace();
        for (size_t i = 0; i < hc.size(); ++i) {
            std::ostringstream where;
            where << "model.hard_constraints[" << i << "]";
            const auto& rec = hc[i];
            if (!rec.is_array() || rec.size() != 3 || !rec[2].is_array())
                fail(where.str(), "expected [t, x, [u, ...]]");
            HardConstraintRecord record;
            record.t = int_from_json(rec[0], where.str());
            record.x = label_from_json(rec[1], where.str());
            for (const auto& u : rec[2]) record.allowed.push_back(label_from_json(u, where.str()));
            hard->push_back(std::move(record));
        }
    }

    return SystemModel(grid, std::move(states), std::move(controls), std::move(uncertainties),
                       dynamics, std::move(hard));
}

SystemModel model_from_text(const std::string& text) {
    return model_from_json(parse_text(text, "model"));
}

SystemModel load_model(const std::string& path) {
    return model_from_json(parse_text(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

std::vector<Scenario> scenarios_from_text(const std::string& text, const SystemModel& model,
                                          int start_epoch) {
    std::vector<Scenario> scenarios;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Scenario scenario;
        std::istringstream fields(line);
        std::string field;
        int epoch = start_epoch;
        while (std::getline(fields, field, ',')) {
            std::ostringstream where;
            where << "scenario line " << line_no;
            if (!model.grid().contains_epoch(epoch))
                fail(where.str(), "more labels than decision epochs");
            const auto index = model.uncertainties_at(epoch).find(field);
            if (!index) fail(where.str(), "unknown uncertainty label '" + field + "'");
            scenario.push_back(*index);
            ++epoch;
        }
        scenarios.push_back(std::move(scenario));
    }
    return scenarios;
}

std::vector<Scenario> load_scenarios(const std::string& path, const SystemModel& model,
                                     int start_epoch) {
    return scenarios_from_text(read_file(path), model, start_epoch);
}

std::string scenario_to_label_line(const Scenario& scenario, const SystemModel& model,
                                   int start_epoch, const char* separator) {
    std::ostringstream os;
    for (size_t k = 0; k < scenario.size(); ++k) {
        if (k) os << separator;
        os << model.uncertainties_at(start_epoch + static_cast<int>(k)).label(scenario[k]);
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Constraint maps, probability models, risk specifications
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<bool>> acceptable_masks(const json& value, const SystemModel& model,
                                                const std::string& where) {
    const TimeGrid& grid = model.grid();
    std::vector<std::vector<bool>> masks(static_cast<size_t>(grid.num_times()));
    auto resolve = [&](const json& list, int time, std::vector<bool>& mask) {
        mask.assign(static_cast<size_t>(model.states_at(time).size()), false);
        for (const auto& entry : list) {
            const Label label = label_from_json(entry, where);
            const auto index = model.states_at(time).find(label);
            if (!index) fail(where, "unknown state label '" + label + "'");
            mask[static_cast<size_t>(*index)] = true;
        }
    };
    if (!value.is_array()) fail(where, "expected a label list");
    if (!value.empty() && value.front().is_array()) {
        if (static_cast<int>(value.size()) != grid.num_times())
            fail(where, "per-time acceptable sets must cover t0..T");
        for (int k = 0; k < grid.num_times(); ++k)
            resolve(value[static_cast<size_t>(k)], grid.start() + k, masks[static_cast<size_t>(k)]);
    } else {
        for (int k = 0; k < grid.num_times(); ++k)
            resolve(value, grid.start() + k, masks[static_cast<size_t>(k)]);
    }
    return masks;
}

std::optional<ControlTable> control_map_from_json(const json& value, const SystemModel& model,
                                                  const std::string& where) {
    if (!value.is_array()) fail(where, "expected an array of [t, x, [u, ...]] records");
    const TimeGrid& grid = model.grid();
    std::vector<std::vector<std::vector<int>>> allowed(static_cast<size_t>(grid.horizon()));
    std::vector<std::vector<bool>> seen(static_cast<size_t>(grid.horizon()));
    for (int k = 0; k < grid.horizon(); ++k) {
        const int nx = model.states_at(grid.start() + k).size();
        const int nu = model.controls_at(grid.start() + k).size();
        allowed[static_cast<size_t>(k)].resize(static_cast<size_t>(nx));
        seen[static_cast<size_t>(k)].assign(static_cast<size_t>(nx), false);
        for (int x = 0; x < nx; ++x) {
            auto& list = allowed[static_cast<size_t>(k)][static_cast<size_t>(x)];
            list.resize(static_cast<size_t>(nu));
            for (int u = 0; u < nu; ++u) list[static_cast<size_t>(u)] = u;
        }
    }
    for (size_t i = 0; i < value.size(); ++i) {
        std::ostringstream rec_where;
        rec_where << where << "[" << i << "]";
        const auto& rec = value[i];
        if (!rec.is_array() || rec.size() != 3 || !rec[2].is_array())
            fail(rec_where.str(), "expected [t, x, [u, ...]]");
        const int t = int_from_json(rec[0], rec_where.str());
        if (!grid.contains_epoch(t)) fail(rec_where.str(), "epoch outside the grid");
        const int k = t - grid.start();
        const Label xl = label_from_json(rec[1], rec_where.str());
        const auto x = model.states_at(t).find(xl);
        if (!x) fail(rec_where.str(), "unknown state label '" + xl + "'");
        std::vector<int> list;
        for (const auto& entry : rec[2]) {
            const Label ul = label_from_json(entry, rec_where.str());
            const auto u = model.controls_at(t).find(ul);
            if (!u) fail(rec_where.str(), "unknown control label '" + ul + "'");
            list.push_back(*u);
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        allowed[static_cast<size_t>(k)][static_cast<size_t>(*x)] = std::move(list);
        seen[static_cast<size_t>(k)][static_cast<size_t>(*x)] = true;
    }
    return ControlTable(grid.start(), std::move(allowed));
}

ConstraintMap region_from_json(const json& value, const SystemModel& model,
                               const std::string& where) {
    return ConstraintMap(model.grid().start(), acceptable_masks(value, model, where));
}

} // namespace

ConstraintMap constraints_from_json(const json& doc, const SystemModel& model) {
    require_object(doc, "constraints", {"acceptable"}, {"controls"});
    auto masks = acceptable_masks(doc.at("acceptable"), model, "constraints.acceptable");
    std::optional<ControlTable> controls;
    if (doc.contains("controls"))
        controls = control_map_from_json(doc.at("controls"), model, "constraints.controls");
    return ConstraintMap(model.grid().start(), std::move(masks), std::move(controls));
}

ProbabilityModel probability_from_json(const json& doc, const SystemModel& model, int start_time,
                                       const std::string& base_dir) {
    if (doc.is_string()) {
        const auto path = std::filesystem::path(base_dir) / doc.get<std::string>();
        const json referenced = parse_text(read_file(path.string()), path.string());
        return probability_from_json(referenced, model, start_time,
                                     path.parent_path().string());
    }
    if (!doc.is_object() || !doc.contains("type"))
        fail("probability", "expected an object with a 'type' key or a file path");
    const std::string type = doc.at("type").get<std::string>();

    if (type == "white_noise") {
        require_object(doc, "probability", {"type", "weights"});
        const auto& weights = doc.at("weights");
        const TimeGrid& grid = model.grid();
        WhiteNoise noise;
        noise.start_epoch = grid.start();
        noise.weights.resize(static_cast<size_t>(grid.horizon()));
        auto stage_from = [&](const json& table, int epoch, std::vector<double>& out) {
            if (!table.is_object()) fail("probability.weights", "expected {label: weight} objects");
            out.assign(static_cast<size_t>(model.uncertainties_at(epoch).size()), 0.0);
            for (const auto& [label, weight] : table.items()) {
                const auto index = model.uncertainties_at(epoch).find(label);
                if (!index)
                    fail("probability.weights", "unknown uncertainty label '" + label + "'");
                out[static_cast<size_t>(*index)] =
                    number_from_json(weight, "probability.weights");
            }
        };
        if (weights.is_array()) {
            if (static_cast<int>(weights.size()) != grid.horizon())
                fail("probability.weights", "expected one weight table per decision epoch");
            for (int k = 0; k < grid.horizon(); ++k)
                stage_from(weights[static_cast<size_t>(k)], grid.start() + k,
                           noise.weights[static_cast<size_t>(k)]);
        } else {
            for (int k = 0; k < grid.horizon(); ++k)
                stage_from(weights, grid.start() + k, noise.weights[static_cast<size_t>(k)]);
        }
        ProbabilityModel result = std::move(noise);
        try {
            validate_probability(result);
        } catch (const RangeError& e) {
            fail("probability", e.what());
        }
        return result;
    }

    if (type == "weighted_scenarios") {
        require_object(doc, "probability", {"type", "atoms"});
        const auto& atoms = doc.at("atoms");
        if (!atoms.is_array() || atoms.empty())
            fail("probability.atoms", "expected a nonempty array");
        WeightedScenarios weighted;
        weighted.start_epoch = start_time;
        const int window = model.grid().final_time() - start_time;
        std::map<Scenario, double> merged;
        for (size_t i = 0; i < atoms.size(); ++i) {
            std::ostringstream where;
            where << "probability.atoms[" << i << "]";
            require_object(atoms[i], where.str(), {"scenario", "weight"});
            const auto& labels = atoms[i].at("scenario");
            if (!labels.is_array() || static_cast<int>(labels.size()) != window)
                fail(where.str(), "scenario must cover the epochs from the start time to T-1");
            Scenario scenario;
            for (int k = 0; k < window; ++k) {
                const Label label = label_from_json(labels[static_cast<size_t>(k)], where.str());
                const auto index = model.uncertainties_at(start_time + k).find(label);
                if (!index) fail(where.str(), "unknown uncertainty label '" + label + "'");
                scenario.push_back(*index);
            }
            merged[scenario] += number_from_json(atoms[i].at("weight"), where.str());
        }
        weighted.atoms.assign(merged.begin(), merged.end());
        ProbabilityModel result = std::move(weighted);
        try {
            validate_probability(result);
        } catch (const RangeError& e) {
            fail("probability", e.what());
        }
        return result;
    }

    fail("probability", "unknown type '" + type + "'");
}

namespace {

std::vector<Scenario> scenario_list_from_json(const json& value, const SystemModel& model,
                                              int start_time, const std::string& where) {
    if (!value.is_array() || value.empty()) fail(where, "expected a nonempty scenario array");
    const int window = model.grid().final_time() - start_time;
    std::vector<Scenario> scenarios;
    for (const auto& entry : value) {
        if (!entry.is_array() || static_cast<int>(entry.size()) != window)
            fail(where, "each scenario must cover the epochs from the start time to T-1");
        Scenario scenario;
        for (int k = 0; k < window; ++k) {
            const Label label = label_from_json(entry[static_cast<size_t>(k)], where);
            const auto index = model.uncertainties_at(start_time + k).find(label);
            if (!index) fail(where, "unknown uncertainty label '" + label + "'");
            scenario.push_back(*index);
        }
        scenarios.push_back(std::move(scenario));
    }
    std::sort(scenarios.begin(), scenarios.end());
    scenarios.erase(std::unique(scenarios.begin(), scenarios.end()), scenarios.end());
    return scenarios;
}

std::vector<Scenario> scenarios_field(const json& value, const SystemModel& model, int start_time,
                                      const std::string& base_dir, const std::string& where) {
    if (value.is_string()) {
        const auto path = std::filesystem::path(base_dir) / value.get<std::string>();
        auto scenarios = load_scenarios(path.string(), model, start_time);
        if (scenarios.empty()) fail(where, "scenario file '" + path.string() + "' is empty");
        const int window = model.grid().final_time() - start_time;
        for (const auto& scenario : scenarios)
            if (static_cast<int>(scenario.size()) != window)
                fail(where, "scenario length does not match the decision window");
        std::sort(scenarios.begin(), scenarios.end());
        scenarios.erase(std::unique(scenarios.begin(), scenarios.end()), scenarios.end());
        return scenarios;
    }
    return scenario_list_from_json(value, model, start_time, where);
}

CostSpec cost_from_json(const json& doc, const SystemModel& model, int start_time,
                        const std::string& where) {
    if (!doc.is_object() || !doc.contains("type")) fail(where, "expected an object with 'type'");
    const std::string type = doc.at("type").get<std::string>();
    if (type == "indicator_exit") {
        require_object(doc, where, {"type", "constraints"});
        return IndicatorExitCost{constraints_from_json(doc.at("constraints"), model)};
    }
    if (type == "exit_count") {
        require_object(doc, where, {"type", "constraints"});
        return ExitCountCost{constraints_from_json(doc.at("constraints"), model)};
    }
    if (type == "recovery_time") {
        require_object(doc, where, {"type", "constraints"}, {"sentinel"});
        std::optional<double> sentinel;
        if (doc.contains("sentinel")) {
            sentinel = number_from_json(doc.at("sentinel"), where + ".sentinel");
            // Any finite recovery delay is at most T - start_time.
            if (*sentinel <= model.grid().final_time() - start_time)
                fail(where + ".sentinel", "must exceed the longest possible recovery delay");
        }
        return RecoveryTimeCost{constraints_from_json(doc.at("constraints"), model), sentinel};
    }
    if (type == "table") {
        require_object(doc, where, {"type"}, {"stage", "final"});
        const TimeGrid& grid = model.grid();
        TableCost table;
        table.start_epoch = grid.start();
        table.stage.resize(static_cast<size_t>(grid.horizon()));
        for (int k = 0; k < grid.horizon(); ++k) {
            const int t = grid.start() + k;
            table.stage[static_cast<size_t>(k)].assign(
                static_cast<size_t>(model.states_at(t).size()),
                std::vector<double>(static_cast<size_t>(model.controls_at(t).size()), 0.0));
        }
        table.final_cost.assign(
            static_cast<size_t>(model.states_at(grid.final_time()).size()), 0.0);
        if (doc.contains("stage")) {
            const auto& stage = doc.at("stage");
            if (!stage.is_array()) fail(where + ".stage", "expected [t, x, u, cost] records");
            for (const auto& rec : stage) {
                if (!rec.is_array() || rec.size() != 4)
                    fail(where + ".stage", "expected [t, x, u, cost]");
                const int t = int_from_json(rec[0], where + ".stage");
                if (!grid.contains_epoch(t)) fail(where + ".stage", "epoch outside the grid");
                const Label xl = label_from_json(rec[1], where + ".stage");
                const Label ul = label_from_json(rec[2], where + ".stage");
                const auto x = model.states_at(t).find(xl);
                const auto u = model.controls_at(t).find(ul);
                if (!x) fail(where + ".stage", "unknown state label '" + xl + "'");
                if (!u) fail(where + ".stage", "unknown control label '" + ul + "'");
                table.stage[static_cast<size_t>(t - grid.start())][static_cast<size_t>(*x)]
                           [static_cast<size_t>(*u)] =
                    number_from_json(rec[3], where + ".stage");
            }
        }
        if (doc.contains("final")) {
            const auto& final_costs = doc.at("final");
            if (!final_costs.is_array()) fail(where + ".final", "expected [x, cost] records");
            for (const auto& rec : final_costs) {
                if (!rec.is_array() || rec.size() != 2) fail(where + ".final", "expected [x, cost]");
                const Label xl = label_from_json(rec[0], where + ".final");
                const auto x = model.states_at(grid.final_time()).find(xl);
                if (!x) fail(where + ".final", "unknown state label '" + xl + "'");
                table.final_cost[static_cast<size_t>(*x)] =
                    number_from_json(rec[1], where + ".final");
            }
        }
        return table;
    }
    fail(where, "unknown cost type '" + type + "'");
}

RiskMeasureSpec measure_from_json(const json& doc, const SystemModel& model, int start_time,
                                  const std::string& base_dir, const std::string& where) {
    if (!doc.is_object() || !doc.contains("type")) fail(where, "expected an object with 'type'");
    const std::string type = doc.at("type").get<std::string>();
    if (type == "expectation") {
        require_object(doc, where, {"type", "probability"});
        return ExpectationMeasure{
            probability_from_json(doc.at("probability"), model, start_time, base_dir)};
    }
    if (type == "worst_case") {
        require_object(doc, where, {"type"}, {"scenarios"});
        WorstCaseMeasure worst;
        if (doc.contains("scenarios"))
            worst.scope = scenarios_field(doc.at("scenarios"), model, start_time, base_dir,
                                          where + ".scenarios");
        return worst;
    }
    if (type == "cvar") {
        require_object(doc, where, {"type", "probability", "beta"});
        const double beta = number_from_json(doc.at("beta"), where + ".beta");
        if (beta < 0.0 || beta >= 1.0)
            fail(where + ".beta", "CVaR level must lie in [0, 1)");
        return CvarMeasure{
            probability_from_json(doc.at("probability"), model, start_time, base_dir), beta};
    }
    if (type == "ambiguity_sup") {
        require_object(doc, where, {"type", "models", "inner"}, {"inner_beta"});
        const auto& models = doc.at("models");
        if (!models.is_array() || models.empty())
            fail(where + ".models", "expected a nonempty array of probability models");
        AmbiguitySupMeasure ambiguity;
        for (const auto& entry : models)
            ambiguity.models.push_back(probability_from_json(entry, model, start_time, base_dir));
        const std::string inner = doc.at("inner").get<std::string>();
        if (inner == "expectation") {
            ambiguity.inner = AmbiguitySupMeasure::Inner::Expectation;
        } else if (inner == "worst_case") {
            ambiguity.inner = AmbiguitySupMeasure::Inner::WorstCase;
        } else if (inner == "cvar") {
            ambiguity.inner = AmbiguitySupMeasure::Inner::Cvar;
            if (!doc.contains("inner_beta"))
                fail(where, "inner 'cvar' needs 'inner_beta'");
            ambiguity.level = number_from_json(doc.at("inner_beta"), where + ".inner_beta");
            if (ambiguity.level < 0.0 || ambiguity.level >= 1.0)
                fail(where + ".inner_beta", "CVaR level must lie in [0, 1)");
        } else {
            fail(where + ".inner", "unknown inner measure '" + inner + "'");
        }
        return ambiguity;
    }
    fail(where, "unknown measure type '" + type + "'");
}

} // namespace

ExtendedRiskSpec risk_from_json(const json& doc, const SystemModel& model, int start_time,
                                const std::string& base_dir) {
    require_object(doc, "risk", {"cost", "measure"});
    // Built one at a time: initializing the aggregate from two calls leaks the
    // first member when the second throws (gcc does not unwind it).
    CostSpec cost = cost_from_json(doc.at("cost"), model, start_time, "risk.cost");
    RiskMeasureSpec measure =
        measure_from_json(doc.at("measure"), model, start_time, base_dir, "risk.measure");
    return ExtendedRiskSpec{std::move(cost), std::move(measure)};
}

ParsedRegime regime_from_json(const json& doc, const SystemModel& model, int start_time,
                              const RegimeOverrides& overrides, const std::string& base_dir) {
    if (!doc.is_object() || !doc.contains("type")) fail("regime", "expected an object with 'type'");
    const std::string type = doc.at("type").get<std::string>();

    const auto beta_or = [&](const char* key, double fallback) {
        if (overrides.beta) return *overrides.beta;
        if (doc.contains(key)) return number_from_json(doc.at(key), std::string("regime.") + key);
        return fallback;
    };

    std::optional<RegimeSpec> spec;
    std::optional<ExtendedRiskSpec> risk;

    if (type == "bounded") {
        require_object(doc, "regime", {"type", "region"}, {"risk"});
        spec = BoundedRegime{region_from_json(doc.at("region"), model, "regime.region")};
    } else if (type == "deterministic_viability") {
        require_object(doc, "regime", {"type", "constraints"}, {"risk"});
        spec = DeterministicViabilityRegime{constraints_from_json(doc.at("constraints"), model)};
    } else if (type == "robust_recovery") {
        require_object(doc, "regime", {"type", "constraints"}, {"scenarios", "risk"});
        RobustRecoveryRegime regime{constraints_from_json(doc.at("constraints"), model), {}};
        if (doc.contains("scenarios")) {
            regime.scope = scenarios_field(doc.at("scenarios"), model, start_time, base_dir,
                                           "regime.scenarios");
        } else {
            regime.scope = enumerate_scenarios(model, start_time, model.grid().final_time());
        }
        spec = std::move(regime);
    } else if (type == "stochastic_viability") {
        require_object(doc, "regime", {"type", "constraints", "probability"}, {"beta", "risk"});
        const double beta = beta_or("beta", 1.0);
        if (beta < 0.0 || beta > 1.0) fail("regime.beta", "level must lie in [0, 1]");
        ConstraintMap constraints = constraints_from_json(doc.at("constraints"), model);
        ProbabilityModel probability =
            probability_from_json(doc.at("probability"), model, start_time, base_dir);
        spec = StochasticViabilityRegime{std::move(constraints), std::move(probability), beta};
    } else if (type == "exit_probability") {
        require_object(doc, "regime", {"type", "region", "probability"}, {"beta", "risk"});
        const double beta = beta_or("beta", 0.0);
        if (beta < 0.0 || beta > 1.0) fail("regime.beta", "level must lie in [0, 1]");
        ConstraintMap region = region_from_json(doc.at("region"), model, "regime.region");
        ProbabilityModel probability =
            probability_from_json(doc.at("probability"), model, start_time, base_dir);
        spec = ExitProbabilityRegime{std::move(region), std::move(probability), beta};
    } else if (type == "exit_count_limit") {
        require_object(doc, "regime", {"type", "region", "max_exits", "probability"}, {"risk"});
        const int max_exits = int_from_json(doc.at("max_exits"), "regime.max_exits");
        if (max_exits < 0) fail("regime.max_exits", "must be nonnegative");
        ConstraintMap region = region_from_json(doc.at("region"), model, "regime.region");
        ProbabilityModel probability =
            probability_from_json(doc.at("probability"), model, start_time, base_dir);
        spec = ExitCountLimitRegime{std::move(region), max_exits, std::move(probability)};
    } else if (type == "risk_bound") {
        require_object(doc, "regime", {"type", "risk", "alpha"});
        risk = risk_from_json(doc.at("risk"), model, start_time, base_dir);
        const double alpha = overrides.alpha
                                 ? *overrides.alpha
                                 : number_from_json(doc.at("alpha"), "regime.alpha");
        spec = RiskBoundRegime{*risk, alpha};
    } else if (type == "control_predicate") {
        require_object(doc, "regime", {"type", "exists_control_in"}, {"risk"});
        const auto labels = label_list(doc.at("exists_control_in"), "regime.exists_control_in");
        ControlPredicateRegime regime;
        regime.start_epoch = model.grid().start();
        regime.accepted.resize(static_cast<size_t>(model.grid().horizon()));
        for (int k = 0; k < model.grid().horizon(); ++k) {
            const int t = model.grid().start() + k;
            auto& mask = regime.accepted[static_cast<size_t>(k)];
            mask.assign(static_cast<size_t>(model.controls_at(t).size()), false);
            for (const auto& label : labels) {
                const auto u = model.controls_at(t).find(label);
                if (!u)
                    fail("regime.exists_control_in", "unknown control label '" + label + "'");
                mask[static_cast<size_t>(*u)] = true;
            }
        }
        spec = std::move(regime);
    } else {
        fail("regime", "unknown type '" + type + "'");
    }

    if (doc.contains("risk"))
        risk = risk_from_json(doc.at("risk"), model, start_time, base_dir);
    return ParsedRegime{std::move(*spec), std::move(risk)};
}

ParsedRegime load_regime(const std::string& path, const SystemModel& model, int start_time,
                         const RegimeOverrides& overrides) {
    const json doc = parse_text(read_file(path), path);
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    return regime_from_json(doc, model, start_time, overrides,
                            base_dir.empty() ? "." : base_dir);
}

// ---------------------------------------------------------------------------
// Policy files
// ---------------------------------------------------------------------------

Strategy strategy_from_json(const json& doc, const SystemModel& model) {
    require_object(doc, "policy", {"type", "start", "entries"});
    const std::string type = doc.at("type").get<std::string>();
    const int start = int_from_json(doc.at("start"), "policy.start");
    if (!model.grid().contains_time(start)) fail("policy.start", "start outside the grid");
    const auto& entries = doc.at("entries");
    if (!entries.is_array()) fail("policy.entries", "expected an array of records");

    if (type == "markov") {
        std::vector<int> sizes;
        for (int t = start; t < model.grid().final_time(); ++t)
            sizes.push_back(model.states_at(t).size());
        MarkovPolicy policy(start, sizes);
        for (size_t i = 0; i < entries.size(); ++i) {
            std::ostringstream where;
            where << "policy.entries[" << i << "]";
            const auto& rec = entries[i];
            if (!rec.is_array() || rec.size() != 3) fail(where.str(), "expected [t, x, u]");
            const int t = int_from_json(rec[0], where.str());
            if (!model.grid().contains_epoch(t) || t < start)
                fail(where.str(), "epoch outside the policy window");
            const Label xl = label_from_json(rec[1], where.str());
            const Label ul = label_from_json(rec[2], where.str());
            const auto x = model.states_at(t).find(xl);
            const auto u = model.controls_at(t).find(ul);
            if (!x) fail(where.str(), "unknown state label '" + xl + "'");
            if (!u) fail(where.str(), "unknown control label '" + ul + "'");
            policy.set(t, *x, *u);
        }
        return policy;
    }

    if (type == "adapted") {
        AdaptedPolicy policy(start, model.grid().final_time() - start);
        for (size_t i = 0; i < entries.size(); ++i) {
            std::ostringstream where;
            where << "policy.entries[" << i << "]";
            const auto& rec = entries[i];
            if (!rec.is_array() || rec.size() != 4 || !rec[2].is_array())
                fail(where.str(), "expected [t, x, [w, ...], u]");
            const int t = int_from_json(rec[0], where.str());
            if (!model.grid().contains_epoch(t) || t < start)
                fail(where.str(), "epoch outside the policy window");
            const Label xl = label_from_json(rec[1], where.str());
            const auto x = model.states_at(t).find(xl);
            if (!x) fail(where.str(), "unknown state label '" + xl + "'");
            Scenario prefix;
            const auto& prefix_labels = rec[2];
            if (static_cast<int>(prefix_labels.size()) != t - start)
                fail(where.str(), "prefix must cover the epochs start..t-1");
            for (int k = 0; k < t - start; ++k) {
                const Label wl = label_from_json(prefix_labels[static_cast<size_t>(k)], where.str());
                const auto w = model.uncertainties_at(start + k).find(wl);
                if (!w) fail(where.str(), "unknown uncertainty label '" + wl + "'");
                prefix.push_back(*w);
            }
            const Label ul = label_from_json(rec[3], where.str());
            const auto u = model.controls_at(t).find(ul);
            if (!u) fail(where.str(), "unknown control label '" + ul + "'");
            policy.set(t, *x, std::move(prefix), *u);
        }
        return policy;
    }

    fail("policy.type", "unknown type '" + type + "'");
}

Strategy load_strategy(const std::string& path, const SystemModel& model) {
    return strategy_from_json(parse_text(read_file(path), path), model);
}

std::string strategy_to_text(const Strategy& strategy, const SystemModel& model) {
    ordered_json doc;
    if (const auto* markov = std::get_if<MarkovPolicy>(&strategy)) {
        doc["type"] = "markov";
        doc["start"] = markov->start_epoch();
        auto& entries = doc["entries"] = ordered_json::array();
        for (int k = 0; k < markov->num_epochs(); ++k) {
            const int t = markov->start_epoch() + k;
            for (int x = 0; x < model.states_at(t).size(); ++x) {
                if (!markov->defined_at(t, x)) continue;
                entries.push_back({t, model.states_at(t).label(x),
                                   model.controls_at(t).label(markov->control_at(t, x))});
            }
        }
    } else {
        const auto& adapted = std::get<AdaptedPolicy>(strategy);
        doc["type"] = "adapted";
        doc["start"] = adapted.start_epoch();
        auto& entries = doc["entries"] = ordered_json::array();
        for (int k = 0; k < adapted.num_epochs(); ++k) {
            const int t = adapted.start_epoch() + k;
            for (const auto& [key, u] : adapted.entries_at(t)) {
                ordered_json prefix = ordered_json::array();
                for (int j = 0; j < static_cast<int>(key.second.size()); ++j)
                    prefix.push_back(model.uncertainties_at(adapted.start_epoch() + j)
                                         .label(key.second[static_cast<size_t>(j)]));
                entries.push_back({t, model.states_at(t).label(key.first), prefix,
                                   model.controls_at(t).label(u)});
            }
        }
    }
    return doc.dump(2) + "\n";
}

void save_strategy(const std::string& path, const Strategy& strategy, const SystemModel& model) {
    write_file(path, strategy_to_text(strategy, model));
}

// ---------------------------------------------------------------------------
// Result formatting
// ---------------------------------------------------------------------------

std::string bundle_to_csv(const PathBundle& bundle, const SystemModel& model) {
    std::ostringstream os;
    os << "scenario_id,time,state,control\n";
    int id = 0;
    for (const auto& [scenario, path] : bundle.entries()) {
        for (size_t k = 0; k < path.states.size(); ++k) {
            const int t = bundle.start_time() + static_cast<int>(k);
            os << id << "," << t << "," << model.state_to_label(t, path.states[k]) << ",";
            if (k < path.controls.size()) os << model.controls_at(t).label(path.controls[k]);
            os << "\n";
        }
        ++id;
    }
    return os.str();
}

std::string kernel_to_text(const KernelTable& kernel, const SystemModel& model) {
    std::ostringstream os;
    for (int k = 0; k < kernel.num_times(); ++k) {
        const int t = kernel.start_time() + k;
        os << "t=" << t << ":";
        for (int x : kernel.states_at(t)) os << " " << model.states_at(t).label(x);
        os << "\n";
    }
    return os.str();
}

std::string kernel_to_csv(const KernelTable& kernel, const SystemModel& model) {
    std::ostringstream os;
    os << "time,state\n";
    for (int k = 0; k < kernel.num_times(); ++k) {
        const int t = kernel.start_time() + k;
        for (int x : kernel.states_at(t)) os << t << "," << model.states_at(t).label(x) << "\n";
    }
    return os.str();
}

std::string value_table_to_csv(const ValueTable& values, const SystemModel& model) {
    std::ostringstream os;
    os << "time,state,value\n";
    for (size_t k = 0; k < values.value.size(); ++k) {
        const int t = values.start_time + static_cast<int>(k);
        for (size_t x = 0; x < values.value[k].size(); ++x)
            os << t << "," << model.states_at(t).label(static_cast<int>(x)) << ","
               << format_real(values.value[k][x]) << "\n";
    }
    return os.str();
}

std::string recovery_times_to_csv(const std::map<Scenario, std::optional<int>>& times,
                                  const SystemModel& model, int start_epoch) {
    std::ostringstream os;
    os << "scenario,recovery_time\n";
    for (const auto& [scenario, tau] : times) {
        os << scenario_to_label_line(scenario, model, start_epoch, "|") << ",";
        if (tau) {
            os << *tau;
        } else {
            os << "inf";
        }
        os << "\n";
    }
    return os.str();
}

std::string distribution_to_csv(const DiscreteRandomVariable& distribution) {
    auto atoms = distribution.atoms();
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const auto& a, const auto& b) { return a.value < b.value; });
    std::ostringstream os;
    os << "value,weight\n";
    for (const auto& atom : atoms)
        os << format_real(atom.value) << "," << format_real(atom.weight) << "\n";
    return os.str();
}

std::string validation_to_text(const ValidationReport& report) {
    std::ostringstream os;
    for (const auto& issue : report.issues) os << issue.detail << "\n";
    return os.str();
}

} // namespace reskit::io
