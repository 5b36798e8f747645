#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "reskit/model.hpp"
#include "reskit/util.hpp"

namespace reskit {

/// State-feedback policy table: one control per (epoch, state) on a window of
/// decision epochs. Entries may be left unset; consulting an unset entry is a
/// strategy-domain error.
class MarkovPolicy {
public:
    MarkovPolicy(int start_epoch, std::vector<int> states_per_epoch);

    int start_epoch() const noexcept { return start_; }
    int num_epochs() const noexcept { return static_cast<int>(choice_.size()); }

    void set(int epoch, int state_index, int control_index);
    bool defined_at(int epoch, int state_index) const;
    int control_at(int epoch, int state_index) const;

    friend bool operator==(const MarkovPolicy&, const MarkovPolicy&) = default;

private:
    static constexpr int kUnset = -1;
    int start_;
    std::vector<std::vector<int>> choice_; // [epoch offset][state] -> control or kUnset
};

/// Adapted policy table keyed on (state, uncertainty prefix). The prefix holds
/// the uncertainties observed on the epochs since the policy window started, so
/// decisions never depend on uncertainties that have not yet been revealed.
class AdaptedPolicy {
public:
    AdaptedPolicy(int start_epoch, int num_epochs);

    int start_epoch() const noexcept { return start_; }
    int num_epochs() const noexcept { return static_cast<int>(table_.size()); }

    void set(int epoch, int state_index, Scenario prefix, int control_index);
    int control_at(int epoch, int state_index, std::span<const int> prefix) const;

    const std::map<std::pair<int, Scenario>, int>& entries_at(int epoch) const;

    friend bool operator==(const AdaptedPolicy&, const AdaptedPolicy&) = default;

private:
    int start_;
    std::vector<std::map<std::pair<int, Scenario>, int>> table_;
};

/// A strategy is a policy per decision epoch of its window, either Markovian or
/// adapted to the revealed uncertainty prefix.
using Strategy = std::variant<MarkovPolicy, AdaptedPolicy>;

/// Control chosen at (epoch, state) given the uncertainty prefix revealed since
/// the strategy window began. Markov policies ignore the prefix.
int evaluate_policy(const Strategy& strategy, int epoch, State x, std::span<const int> prefix);

int strategy_start(const Strategy& strategy);

/// One admissibility defect: the policy picks a control outside the constraint set.
struct AdmissibilityViolation {
    int t = 0;
    int state_index = 0;
    Scenario prefix; // empty for Markov entries
    int control_index = 0;
};

/// Scans every stored policy entry against a per-epoch control constraint map.
/// An absent constraint map allows every control; an empty result means the
/// strategy is admissible.
std::vector<AdmissibilityViolation> check_admissible(const Strategy& strategy,
                                                     const SystemModel& model,
                                                     const ControlTable* constraints);

/// Rewrites a Markov policy as an adapted table over every prefix of the given
/// scenario collection. The closed-loop bundles of both representations match.
AdaptedPolicy markov_to_adapted(const MarkovPolicy& policy, const SystemModel& model,
                                const std::vector<Scenario>& scenarios);

/// Collapses an adapted policy that never actually uses its prefix back to a
/// Markov table; empty when some (epoch, state) has prefix-dependent choices.
std::optional<MarkovPolicy> adapted_to_markov(const AdaptedPolicy& policy);

/// Exhaustive, duplicate-free, lexicographic stream of Markov policies on a
/// window of decision epochs. Choices respect the model's hard-constraint map;
/// `restrict_to` (one state-index list per epoch) narrows the table domain.
class MarkovPolicyEnumerator {
public:
    MarkovPolicyEnumerator(const SystemModel& model, int first_epoch, int last_epoch,
                           std::optional<std::vector<std::vector<int>>> restrict_to = std::nullopt,
                           unsigned long long budget = kDefaultEnumerationBudget);

    /// Exact number of policies in the stream.
    unsigned long long size() const noexcept { return count_; }
    std::optional<MarkovPolicy> next();

private:
    struct Slot {
        int epoch;
        int state_index;
        std::vector<int> choices;
    };
    int first_;
    std::vector<int> states_per_epoch_;
    std::vector<Slot> slots_;
    std::vector<size_t> position_;
    unsigned long long count_;
    bool exhausted_ = false;
    bool started_ = false;

    MarkovPolicy materialize() const;
};

/// Exhaustive stream of adapted policies reachable from a fixed start state:
/// one control choice per node of the scenario-prefix tree. Nodes whose state
/// is the cemetery take no entry (the closed loop never consults them).
class AdaptedPolicyEnumerator {
public:
    AdaptedPolicyEnumerator(const SystemModel& model, const std::vector<Scenario>& scenarios,
                            int start_time, State start_state,
                            unsigned long long budget = kDefaultEnumerationBudget);

    std::optional<AdaptedPolicy> next();

private:
    struct Node {
        int depth;  // decision epoch = start + depth
        int parent; // index into nodes_, -1 for the root
        int edge;   // uncertainty index leading here from the parent
        Scenario prefix;
    };
    const SystemModel* model_;
    int start_;
    State start_state_;
    int window_;
    std::vector<Node> nodes_;          // preorder, so ancestors precede descendants
    std::vector<State> node_state_;    // state under the current partial assignment
    std::vector<std::vector<int>> node_choices_;
    std::vector<size_t> position_;
    bool exhausted_ = false;
    bool started_ = false;

    void refresh_from(size_t node_index);
    bool advance();
    AdaptedPolicy materialize() const;
};

} // namespace reskit
