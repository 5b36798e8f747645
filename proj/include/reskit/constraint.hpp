#pragma once

#include <optional>
#include <vector>

#include "reskit/model.hpp"

namespace reskit {

/// Acceptable-state sets per time plus an optional admissible-control map per
/// decision epoch, both covering the whole grid. The cemetery is acceptable
/// nowhere.
class ConstraintMap {
public:
    ConstraintMap(int start_time, std::vector<std::vector<bool>> acceptable,
                  std::optional<ControlTable> admissible_controls = std::nullopt);

    int start_time() const noexcept { return start_; }
    int num_times() const noexcept { return static_cast<int>(acceptable_.size()); }
    bool has_control_map() const noexcept { return controls_.has_value(); }
    const ControlTable* control_map() const noexcept { return controls_ ? &*controls_ : nullptr; }

    bool state_ok(int time, State x) const;
    bool control_ok(int epoch, State x, int control_index) const;

    const std::vector<bool>& acceptable_at(int time) const;

private:
    int start_;
    std::vector<std::vector<bool>> acceptable_; // [time offset][state]
    std::optional<ControlTable> controls_;
};

// Aliases keep the predicate signatures readable without pulling in trajectory.
using PathStates = std::vector<State>;
using PathControls = std::vector<int>;

/// True iff states stay acceptable at every time >= from and controls stay
/// admissible at every epoch >= from. A path that visits the cemetery anywhere
/// satisfies nothing.
bool path_satisfies(const ConstraintMap& constraints, const PathStates& states,
                    const PathControls& controls, int path_start, int from);

/// Smallest r >= path_start from which the path satisfies the constraints
/// forever; empty when there is none (the infimum of an empty set).
std::optional<int> recovery_time(const ConstraintMap& constraints, const PathStates& states,
                                 const PathControls& controls, int path_start);

/// Number of time indices >= from at which the state or the control violates
/// the constraints. The cemetery violates at every index.
int exit_count(const ConstraintMap& constraints, const PathStates& states,
               const PathControls& controls, int path_start, int from);

} // namespace reskit
