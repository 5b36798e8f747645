#include "reskit/model.hpp"

#include <algorithm>
#include <sstream>

namespace reskit {

LabeledSet::LabeledSet(std::vector<Label> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw RangeError("label set must be nonempty");
    index_.reserve(labels_.size());
    for (size_t i = 0; i < labels_.size(); ++i) {
        auto [it, inserted] = index_.emplace(labels_[i], static_cast<int>(i));
        if (!inserted) throw RangeError("duplicate label '" + labels_[i] + "' in set");
    }
}

std::optional<int> LabeledSet::find(const Label& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int LabeledSet::index_of(const Label& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw LabelError("unknown label '" + label + "'");
    return it->second;
}

const std::vector<int>& ControlTable::choices(int epoch, int state_index) const {
    const int k = epoch - start_;
    if (k < 0 || k >= num_epochs()) throw RangeError("epoch outside control table");
    return allowed_.at(static_cast<size_t>(k)).at(static_cast<size_t>(state_index));
}

bool ControlTable::allows(int epoch, int state_index, int control_index) const {
    const auto& list = choices(epoch, state_index);
    return std::binary_search(list.begin(), list.end(), control_index);
}

namespace {

std::string quad(const DynamicsRecord& r) {
    std::ostringstream os;
    os << "(t=" << r.t << ", x=" << r.x << ", u=" << r.u << ", w=" << r.w << ")";
    return os.str();
}

} // namespace

SystemModel::SystemModel(TimeGrid grid,
                         std::vector<LabeledSet> states,
                         std::vector<LabeledSet> controls,
                         std::vector<LabeledSet> uncertainties,
                         const std::vector<DynamicsRecord>& dynamics,
                         std::optional<std::vector<HardConstraintRecord>> hard_constraints)
    : grid_(grid),
      states_(std::move(states)),
      controls_(std::move(controls)),
      uncertainties_(std::move(uncertainties)) {
    const int horizon = grid_.horizon();
    if (static_cast<int>(states_.size()) != horizon + 1)
        throw RangeError("expected one state set per time t0..T");
    if (static_cast<int>(controls_.size()) != horizon)
        throw RangeError("expected one control set per decision epoch");
    if (static_cast<int>(uncertainties_.size()) != horizon)
        throw RangeError("expected one uncertainty set per decision epoch");

    const Label cemetery(kCemeteryLabel);
    auto check_reserved = [&](const std::vector<LabeledSet>& sets, const char* which) {
        for (size_t k = 0; k < sets.size(); ++k) {
            if (sets[k].contains(cemetery)) {
                construction_issues_.push_back({ValidationIssue::Kind::ReservedLabel,
                                                grid_.start() + static_cast<int>(k),
                                                std::string(which) + " set contains the reserved cemetery label"});
            }
        }
    };
    check_reserved(states_, "state");
    check_reserved(controls_, "control");
    check_reserved(uncertainties_, "uncertainty");

    transitions_.resize(static_cast<size_t>(horizon));
    all_controls_.resize(static_cast<size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
        const size_t entries = static_cast<size_t>(states_[k].size()) *
                               static_cast<size_t>(controls_[k].size()) *
                               static_cast<size_t>(uncertainties_[k].size());
        transitions_[k].assign(entries, kMissingEntry);
        all_controls_[k].resize(static_cast<size_t>(controls_[k].size()));
        for (int u = 0; u < controls_[k].size(); ++u) all_controls_[k][static_cast<size_t>(u)] = u;
    }

    for (const auto& rec : dynamics) {
        if (!grid_.contains_epoch(rec.t)) {
            construction_issues_.push_back({ValidationIssue::Kind::UnknownLabel, rec.t,
                                            "dynamics record " + quad(rec) + " uses an epoch outside the grid"});
            continue;
        }
        const int k = rec.t - grid_.start();
        const auto x = states_[k].find(rec.x);
        const auto u = controls_[k].find(rec.u);
        const auto w = uncertainties_[k].find(rec.w);
        std::optional<int> next;
        if (rec.next == cemetery) {
            next = State::kCemetery;
        } else {
            next = states_[static_cast<size_t>(k) + 1].find(rec.next);
        }
        if (!x || !u || !w || !next) {
            construction_issues_.push_back({ValidationIssue::Kind::UnknownLabel, rec.t,
                                            "dynamics record " + quad(rec) + " names an unknown label"});
            continue;
        }
        int& slot = transitions_[k][static_cast<size_t>(flat_index(k, *x, *u, *w))];
        if (slot != kMissingEntry) {
            construction_issues_.push_back({ValidationIssue::Kind::DuplicateTransition, rec.t,
                                            "duplicate dynamics record " + quad(rec)});
            continue;
        }
        slot = *next;
    }

    if (hard_constraints) {
        std::vector<std::vector<std::vector<int>>> allowed(static_cast<size_t>(horizon));
        for (int k = 0; k < horizon; ++k)
            allowed[k].resize(static_cast<size_t>(states_[k].size()));
        std::vector<std::vector<bool>> seen(static_cast<size_t>(horizon));
        for (int k = 0; k < horizon; ++k)
            seen[k].assign(static_cast<size_t>(states_[k].size()), false);

        for (const auto& rec : *hard_constraints) {
            if (!grid_.contains_epoch(rec.t)) {
                construction_issues_.push_back({ValidationIssue::Kind::UnknownLabel, rec.t,
                                                "hard-constraint record uses an epoch outside the grid"});
                continue;
            }
            const int k = rec.t - grid_.start();
            const auto x = states_[k].find(rec.x);
            if (!x) {
                construction_issues_.push_back({ValidationIssue::Kind::UnknownLabel, rec.t,
                                                "hard-constraint record names unknown state '" + rec.x + "'"});
                continue;
            }
            std::vector<int> list;
            bool bad = false;
            for (const auto& lbl : rec.allowed) {
                const auto u = controls_[k].find(lbl);
                if (!u) {
                    construction_issues_.push_back({ValidationIssue::Kind::UnknownLabel, rec.t,
                                                    "hard-constraint record names unknown control '" + lbl + "'"});
                    bad = true;
                    break;
                }
                list.push_back(*u);
            }
            if (bad) continue;
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            allowed[k][static_cast<size_t>(*x)] = std::move(list);
            seen[k][static_cast<size_t>(*x)] = true;
        }
        // States without a record keep every control.
        for (int k = 0; k < horizon; ++k)
            for (int x = 0; x < states_[k].size(); ++x)
                if (!seen[k][static_cast<size_t>(x)])
                    allowed[k][static_cast<size_t>(x)] = all_controls_[k];
        hard_.emplace(grid_.start(), std::move(allowed));
    }
}

int SystemModel::flat_index(int epoch_offset, int x, int u, int w) const noexcept {
    const int nu = controls_[epoch_offset].size();
    const int nw = uncertainties_[epoch_offset].size();
    return (x * nu + u) * nw + w;
}

const std::vector<int>& SystemModel::allowed_controls(int epoch, int state_index) const {
    if (hard_) return hard_->choices(epoch, state_index);
    return all_controls_[static_cast<size_t>(grid_.index_of_epoch(epoch))];
}

ValidationReport SystemModel::validate() const {
    ValidationReport report;
    report.issues = construction_issues_;
    for (int k = 0; k < grid_.horizon(); ++k) {
        const int t = grid_.start() + k;
        for (int x = 0; x < states_[k].size(); ++x) {
            for (int u = 0; u < controls_[k].size(); ++u) {
                for (int w = 0; w < uncertainties_[k].size(); ++w) {
                    if (transitions_[k][static_cast<size_t>(flat_index(k, x, u, w))] == kMissingEntry) {
                        std::ostringstream os;
                        os << "missing transition (t=" << t << ", x=" << states_[k].label(x)
                           << ", u=" << controls_[k].label(u) << ", w=" << uncertainties_[k].label(w)
                           << ")";
                        report.issues.push_back({ValidationIssue::Kind::MissingTransition, t, os.str()});
                    }
                }
            }
            if (hard_ && hard_->choices(t, x).empty()) {
                std::ostringstream os;
                os << "empty admissible control set at (t=" << t << ", x=" << states_[k].label(x) << ")";
                report.issues.push_back({ValidationIssue::Kind::EmptyAdmissibleSet, t, os.str()});
            }
        }
    }
    return report;
}

State SystemModel::step(int epoch, State x, int control_index, int uncertainty_index) const {
    const int k = grid_.index_of_epoch(epoch);
    if (x.is_cemetery()) return State::cemetery();
    if (x.index >= states_[k].size())
        throw RangeError("state index outside the state set");
    if (control_index < 0 || control_index >= controls_[k].size())
        throw RangeError("control index outside the control set");
    if (uncertainty_index < 0 || uncertainty_index >= uncertainties_[k].size())
        throw RangeError("uncertainty index outside the uncertainty set");
    if (hard_ && !hard_->allows(epoch, x.index, control_index))
        return State::cemetery();
    const int next = transitions_[k][static_cast<size_t>(flat_index(k, x.index, control_index, uncertainty_index))];
    if (next == kMissingEntry)
        throw ModelError("transition entry missing; run validate()");
    return next == State::kCemetery ? State::cemetery() : State::of(next);
}

Label SystemModel::step_labels(int epoch, const Label& x, const Label& u, const Label& w) const {
    const int k = grid_.index_of_epoch(epoch);
    const State xs = state_from_label(epoch, x);
    const int ui = controls_[k].index_of(u);
    const int wi = uncertainties_[k].index_of(w);
    return state_to_label(epoch + 1, step(epoch, xs, ui, wi));
}

State SystemModel::state_from_label(int time, const Label& label) const {
    if (label == kCemeteryLabel) return State::cemetery();
    return State::of(states_at(time).index_of(label));
}

Label SystemModel::state_to_label(int time, State s) const {
    if (s.is_cemetery()) return Label(kCemeteryLabel);
    return states_at(time).label(s.index);
}

} // namespace reskit
