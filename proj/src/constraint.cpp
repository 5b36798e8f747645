#include "reskit/constraint.hpp"

#include <algorithm>

namespace reskit {

ConstraintMap::ConstraintMap(int start_time, std::vector<std::vector<bool>> acceptable,
                             std::optional<ControlTable> admissible_controls)
    : start_(start_time), acceptable_(std::move(acceptable)), controls_(std::move(admissible_controls)) {
    if (acceptable_.empty()) throw RangeError("constraint map must cover at least one time");
    if (controls_ && controls_->num_epochs() != num_times() - 1)
        throw RangeError("control map must cover exactly the decision epochs");
}

const std::vector<bool>& ConstraintMap::acceptable_at(int time) const {
    const int k = time - start_;
    if (k < 0 || k >= num_times()) throw RangeError("time outside the constraint map");
    return acceptable_[static_cast<size_t>(k)];
}

bool ConstraintMap::state_ok(int time, State x) const {
    if (x.is_cemetery()) return false;
    const auto& mask = acceptable_at(time);
    if (x.index >= static_cast<int>(mask.size())) throw RangeError("state index outside the constraint map");
    return mask[static_cast<size_t>(x.index)];
}

bool ConstraintMap::control_ok(int epoch, State x, int control_index) const {
    if (!controls_) return true;
    if (x.is_cemetery()) return false;
    return controls_->allows(epoch, x.index, control_index);
}

namespace {

// Last time index carrying a violation, or path_start - 1 when the path is clean.
int last_violation(const ConstraintMap& constraints, const PathStates& states,
                   const PathControls& controls, int path_start) {
    const int end = path_start + static_cast<int>(states.size()) - 1;
    int last = path_start - 1;
    for (int s = path_start; s <= end; ++s) {
        const State x = states[static_cast<size_t>(s - path_start)];
        bool bad = !constraints.state_ok(s, x);
        if (!bad && s < end && !constraints.control_ok(s, x, controls[static_cast<size_t>(s - path_start)]))
            bad = true;
        if (bad) last = s;
    }
    return last;
}

bool visits_cemetery(const PathStates& states) {
    for (const State& x : states)
        if (x.is_cemetery()) return true;
    return false;
}

} // namespace

bool path_satisfies(const ConstraintMap& constraints, const PathStates& states,
                    const PathControls& controls, int path_start, int from) {
    if (states.empty()) throw RangeError("empty state path");
    if (states.size() != controls.size() + 1)
        throw RangeError("state and control paths are misaligned");
    if (visits_cemetery(states)) return false;

    const int end = path_start + static_cast<int>(states.size()) - 1;
    for (int s = std::max(from, path_start); s <= end; ++s) {
        const State x = states[static_cast<size_t>(s - path_start)];
        if (!constraints.state_ok(s, x)) return false;
        if (s < end && !constraints.control_ok(s, x, controls[static_cast<size_t>(s - path_start)]))
            return false;
    }
    return true;
}

std::optional<int> recovery_time(const ConstraintMap& constraints, const PathStates& states,
                                 const PathControls& controls, int path_start) {
    if (states.empty()) throw RangeError("empty state path");
    if (states.size() != controls.size() + 1)
        throw RangeError("state and control paths are misaligned");
    if (visits_cemetery(states)) return std::nullopt;

    const int end = path_start + static_cast<int>(states.size()) - 1;
    const int last = last_violation(constraints, states, controls, path_start);
    if (last < path_start) return path_start;
    if (last >= end) return std::nullopt;
    return last + 1;
}

int exit_count(const ConstraintMap& constraints, const PathStates& states,
               const PathControls& controls, int path_start, int from) {
    if (states.empty()) throw RangeError("empty state path");
    if (states.size() != controls.size() + 1)
        throw RangeError("state and control paths are misaligned");

    const int end = path_start + static_cast<int>(states.size()) - 1;
    int count = 0;
    for (int s = std::max(from, path_start); s <= end; ++s) {
        const State x = states[static_cast<size_t>(s - path_start)];
        bool bad = !constraints.state_ok(s, x);
        if (!bad && s < end && !constraints.control_ok(s, x, controls[static_cast<size_t>(s - path_start)]))
            bad = true;
        if (bad) ++count;
    }
    return count;
}

} // namespace reskit
