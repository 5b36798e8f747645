#include "reskit/trajectory.hpp"

#include <sstream>

#include "reskit/util.hpp"

namespace reskit {

PathBundle::PathBundle(int start_time, State start_state, std::map<Scenario, PathPair> entries)
    : start_(start_time), start_state_(start_state), entries_(std::move(entries)) {
    if (entries_.empty()) throw RangeError("a path bundle needs at least one scenario");
    const size_t times = entries_.begin()->second.states.size();
    for (const auto& [scenario, path] : entries_) {
        if (path.states.size() != times || path.controls.size() + 1 != times)
            throw RangeError("bundle entries must share one time window");
        if (path.states.front() != start_state_)
            throw RangeError("bundle entries must share the start state");
    }
    end_ = start_ + static_cast<int>(times) - 1;
}

const PathPair& PathBundle::at(const Scenario& scenario) const {
    auto it = entries_.find(scenario);
    if (it == entries_.end()) {
        std::ostringstream os;
        os << "bundle does not cover a required scenario (";
        for (size_t i = 0; i < scenario.size(); ++i) os << (i ? "," : "") << scenario[i];
        os << ")";
        throw MissingScenarioError(os.str());
    }
    return it->second;
}

std::vector<State> flow(const SystemModel& model, int s, int t, State x,
                        std::span<const int> controls, std::span<const int> scenario) {
    if (s > t) return {};
    if (!model.grid().contains_time(s) || !model.grid().contains_time(t))
        throw RangeError("flow window outside the time grid");
    const size_t steps = static_cast<size_t>(t - s);
    if (controls.size() != steps || scenario.size() != steps)
        throw RangeError("controls and scenario must cover exactly the epochs s..t-1");

    std::vector<State> states;
    states.reserve(steps + 1);
    states.push_back(x);
    for (size_t k = 0; k < steps; ++k)
        states.push_back(model.step(s + static_cast<int>(k), states.back(), controls[k], scenario[k]));
    return states;
}

PathPair closed_loop(const SystemModel& model, const Strategy& strategy, int s, int t, State x,
                     std::span<const int> scenario) {
    if (s > t) throw RangeError("closed loop requires s <= t");
    if (!model.grid().contains_time(s) || !model.grid().contains_time(t))
        throw RangeError("closed-loop window outside the time grid");
    const size_t steps = static_cast<size_t>(t - s);
    if (scenario.size() != steps)
        throw RangeError("scenario must cover exactly the epochs s..t-1");

    PathPair path;
    path.states.reserve(steps + 1);
    path.controls.reserve(steps);
    path.states.push_back(x);
    for (size_t k = 0; k < steps; ++k) {
        const int epoch = s + static_cast<int>(k);
        const State current = path.states.back();
        int u = 0;
        if (!current.is_cemetery())
            u = evaluate_policy(strategy, epoch, current, scenario.subspan(0, k));
        path.controls.push_back(u);
        path.states.push_back(model.step(epoch, current, u, scenario[k]));
    }
    return path;
}

PathBundle make_bundle(const SystemModel& model, const Strategy& strategy, int t, State x,
                       const std::vector<Scenario>& scenarios) {
    if (scenarios.empty()) throw RangeError("a path bundle needs at least one scenario");
    const int final_time = model.grid().final_time();
    std::map<Scenario, PathPair> entries;
    for (const auto& scenario : scenarios)
        entries.emplace(scenario, closed_loop(model, strategy, t, final_time, x, scenario));
    return PathBundle(t, x, std::move(entries));
}

std::vector<Scenario> enumerate_scenarios(const SystemModel& model, int first_epoch, int last_epoch,
                                          unsigned long long budget) {
    if (first_epoch > last_epoch) throw RangeError("scenario window must satisfy first <= last");
    unsigned long long count = 1;
    for (int t = first_epoch; t < last_epoch; ++t)
        count = saturating_mul(count, static_cast<unsigned long long>(model.uncertainties_at(t).size()));
    if (count > budget) {
        std::ostringstream os;
        os << "scenario enumeration of size " << count << " exceeds budget " << budget;
        throw BudgetError(os.str(), count);
    }

    std::vector<Scenario> all;
    all.reserve(static_cast<size_t>(count));
    Scenario current(static_cast<size_t>(last_epoch - first_epoch), 0);
    while (true) {
        all.push_back(current);
        int k = last_epoch - first_epoch;
        while (k > 0) {
            --k;
            if (++current[static_cast<size_t>(k)] < model.uncertainties_at(first_epoch + k).size()) break;
            current[static_cast<size_t>(k)] = 0;
            if (k == 0) return all;
        }
        if (last_epoch == first_epoch) return all;
    }
}

} // namespace reskit
