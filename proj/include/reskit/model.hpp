#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reskit/errors.hpp"

namespace reskit {

/// Labels are stored as text; integer labels from input files are canonicalized
/// to their decimal representation.
using Label = std::string;

/// Reserved label of the absorbing cemetery point. Never a member of any set.
inline constexpr std::string_view kCemeteryLabel = "∂";

/// A state slot at some time: an index into that time's state set, or the cemetery.
struct State {
    static constexpr int kCemetery = -1;
    int index = kCemetery;

    [[nodiscard]] constexpr bool is_cemetery() const noexcept { return index < 0; }
    static constexpr State cemetery() noexcept { return State{}; }
    static constexpr State of(int idx) noexcept { return State{idx}; }
    friend constexpr auto operator<=>(const State&, const State&) = default;
};

/// One uncertainty index per decision epoch of some window.
using Scenario = std::vector<int>;

/// Finite discrete time grid: states live at t0..T, decisions at t0..T-1.
class TimeGrid {
public:
    TimeGrid(int t0, int final_time) : t0_(t0), final_(final_time) {
        if (t0 > final_time)
            throw RangeError("time grid requires t0 <= T");
    }

    int start() const noexcept { return t0_; }
    int final_time() const noexcept { return final_; }
    /// Number of decision epochs (t0..T-1).
    int horizon() const noexcept { return final_ - t0_; }
    int num_times() const noexcept { return horizon() + 1; }

    bool contains_time(int t) const noexcept { return t >= t0_ && t <= final_; }
    bool contains_epoch(int t) const noexcept { return t >= t0_ && t < final_; }

    /// Offset of time t from the grid start; range-checked.
    int index_of_time(int t) const {
        if (!contains_time(t)) throw RangeError("time outside grid");
        return t - t0_;
    }
    int index_of_epoch(int t) const {
        if (!contains_epoch(t)) throw RangeError("epoch outside grid");
        return t - t0_;
    }

private:
    int t0_;
    int final_;
};

/// Ordered set of distinct labels with O(1) label -> index lookup.
class LabeledSet {
public:
    explicit LabeledSet(std::vector<Label> labels);

    int size() const noexcept { return static_cast<int>(labels_.size()); }
    const Label& label(int index) const { return labels_.at(static_cast<size_t>(index)); }
    const std::vector<Label>& labels() const noexcept { return labels_; }

    bool contains(const Label& label) const { return index_.count(label) != 0; }
    std::optional<int> find(const Label& label) const;
    /// Index of a label; throws LabelError when absent.
    int index_of(const Label& label) const;

private:
    std::vector<Label> labels_;
    std::unordered_map<Label, int> index_;
};

/// Allowed-control lists, one sorted list per (epoch, state).
class ControlTable {
public:
    ControlTable(int start_epoch, std::vector<std::vector<std::vector<int>>> allowed)
        : start_(start_epoch), allowed_(std::move(allowed)) {}

    int start_epoch() const noexcept { return start_; }
    int num_epochs() const noexcept { return static_cast<int>(allowed_.size()); }

    const std::vector<int>& choices(int epoch, int state_index) const;
    bool allows(int epoch, int state_index, int control_index) const;

private:
    int start_;
    std::vector<std::vector<std::vector<int>>> allowed_;
};

/// Raw transition record as it appears in a model file: t, x, u, w -> x_next.
struct DynamicsRecord {
    int t = 0;
    Label x, u, w, next;
};

/// Raw hard-constraint record: at epoch t, state x admits exactly these controls.
struct HardConstraintRecord {
    int t = 0;
    Label x;
    std::vector<Label> allowed;
};

/// One defect found while validating a model.
struct ValidationIssue {
    enum class Kind {
        UnknownLabel,
        DuplicateTransition,
        MissingTransition,
        EmptyAdmissibleSet,
        ReservedLabel,
    };
    Kind kind;
    int t = 0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const noexcept { return issues.empty(); }
};

/// Finite controlled system: time grid, per-time label sets, tabulated dynamics
/// with an absorbing cemetery, and optional hard control constraints enforced
/// through the cemetery.
class SystemModel {
public:
    SystemModel(TimeGrid grid,
                std::vector<LabeledSet> states,
                std::vector<LabeledSet> controls,
                std::vector<LabeledSet> uncertainties,
                const std::vector<DynamicsRecord>& dynamics,
                std::optional<std::vector<HardConstraintRecord>> hard_constraints = std::nullopt);

    const TimeGrid& grid() const noexcept { return grid_; }
    const LabeledSet& states_at(int time) const { return states_[grid_.index_of_time(time)]; }
    const LabeledSet& controls_at(int epoch) const { return controls_[grid_.index_of_epoch(epoch)]; }
    const LabeledSet& uncertainties_at(int epoch) const {
        return uncertainties_[grid_.index_of_epoch(epoch)];
    }

    bool has_hard_constraints() const noexcept { return hard_.has_value(); }
    const ControlTable* hard_constraints() const noexcept {
        return hard_ ? &*hard_ : nullptr;
    }
    /// Controls allowed by the hard constraints at (epoch, x); all controls when
    /// the model has no hard-constraint map.
    const std::vector<int>& allowed_controls(int epoch, int state_index) const;

    /// Scans the model for totality violations, empty admissible sets and label
    /// mismatches. The model is usable iff the report is empty.
    ValidationReport validate() const;

    /// One transition. The cemetery absorbs, and a hard-constraint violation
    /// sends the state to the cemetery.
    State step(int epoch, State x, int control_index, int uncertainty_index) const;

    /// Label-based variant of step; accepts and returns the cemetery label.
    Label step_labels(int epoch, const Label& x, const Label& u, const Label& w) const;

    /// Resolves a state label at a time; accepts the cemetery label.
    State state_from_label(int time, const Label& label) const;
    Label state_to_label(int time, State s) const;

private:
    TimeGrid grid_;
    std::vector<LabeledSet> states_;
    std::vector<LabeledSet> controls_;
    std::vector<LabeledSet> uncertainties_;
    // transitions_[k] is a flat (x, u, w) -> next-state table for epoch t0 + k.
    std::vector<std::vector<int>> transitions_;
    std::optional<ControlTable> hard_;
    std::vector<ValidationIssue> construction_issues_;
    std::vector<std::vector<int>> all_controls_; // per epoch: 0..|U_t|-1

    static constexpr int kMissingEntry = -2;

    int flat_index(int epoch_offset, int x, int u, int w) const noexcept;
};

} // namespace reskit
