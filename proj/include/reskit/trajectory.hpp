#pragma once

#include <map>
#include <span>
#include <vector>

#include "reskit/model.hpp"
#include "reskit/strategy.hpp"

namespace reskit {

/// Realized state and control sequences of a single run: states cover the
/// window's times, controls its decision epochs (one fewer entry).
struct PathPair {
    std::vector<State> states;
    std::vector<int> controls;

    friend bool operator==(const PathPair&, const PathPair&) = default;
};

/// Closed-loop outputs indexed by scenario, all starting at the same time and
/// state. Entries are kept in lexicographic scenario order, so iteration (and
/// any dump) is deterministic.
class PathBundle {
public:
    PathBundle(int start_time, State start_state, std::map<Scenario, PathPair> entries);

    int start_time() const noexcept { return start_; }
    int end_time() const noexcept { return end_; }
    State start_state() const noexcept { return start_state_; }
    const std::map<Scenario, PathPair>& entries() const noexcept { return entries_; }
    size_t size() const noexcept { return entries_.size(); }

    const PathPair& at(const Scenario& scenario) const;
    bool covers(const Scenario& scenario) const { return entries_.count(scenario) != 0; }

private:
    int start_;
    int end_;
    State start_state_;
    std::map<Scenario, PathPair> entries_;
};

/// Iterates the dynamics from a state at time s under given controls and
/// uncertainties for the epochs s..t-1. Returns the state sequence s..t;
/// empty when s > t.
std::vector<State> flow(const SystemModel& model, int s, int t, State x,
                        std::span<const int> controls, std::span<const int> scenario);

/// Runs the coupled policy/dynamics recursion over epochs s..t-1. At each epoch
/// the policy sees the current state and the uncertainty prefix revealed since
/// s; at the cemetery the policy is not consulted and the first control stands
/// in. The forward recursion makes the solution unique.
PathPair closed_loop(const SystemModel& model, const Strategy& strategy, int s, int t, State x,
                     std::span<const int> scenario);

/// Closed-loop runs from (t, x) for every scenario in the collection, keyed and
/// ordered lexicographically. The collection must be nonempty; every scenario
/// must cover the epochs t..T-1.
PathBundle make_bundle(const SystemModel& model, const Strategy& strategy, int t, State x,
                       const std::vector<Scenario>& scenarios);

/// All scenarios over the epochs first..last-1 in lexicographic order, guarded
/// by the enumeration budget.
std::vector<Scenario> enumerate_scenarios(const SystemModel& model, int first_epoch, int last_epoch,
                                          unsigned long long budget = kDefaultEnumerationBudget);

} // namespace reskit
