#include "reskit/strategy.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "reskit/util.hpp"

namespace reskit {

MarkovPolicy::MarkovPolicy(int start_epoch, std::vector<int> states_per_epoch) : start_(start_epoch) {
    choice_.reserve(states_per_epoch.size());
    for (int n : states_per_epoch) {
        if (n < 0) throw RangeError("negative state count");
        choice_.emplace_back(static_cast<size_t>(n), kUnset);
    }
}

void MarkovPolicy::set(int epoch, int state_index, int control_index) {
    const int k = epoch - start_;
    if (k < 0 || k >= num_epochs()) throw RangeError("epoch outside policy window");
    choice_.at(static_cast<size_t>(k)).at(static_cast<size_t>(state_index)) = control_index;
}

bool MarkovPolicy::defined_at(int epoch, int state_index) const {
    const int k = epoch - start_;
    if (k < 0 || k >= num_epochs()) return false;
    const auto& row = choice_[static_cast<size_t>(k)];
    return state_index >= 0 && state_index < static_cast<int>(row.size()) &&
           row[static_cast<size_t>(state_index)] != kUnset;
}

int MarkovPolicy::control_at(int epoch, int state_index) const {
    if (!defined_at(epoch, state_index)) {
        std::ostringstream os;
        os << "markov policy has no entry at (t=" << epoch << ", state index " << state_index << ")";
        throw StrategyDomainError(os.str());
    }
    return choice_[static_cast<size_t>(epoch - start_)][static_cast<size_t>(state_index)];
}

AdaptedPolicy::AdaptedPolicy(int start_epoch, int num_epochs) : start_(start_epoch) {
    if (num_epochs < 0) throw RangeError("negative window length");
    table_.resize(static_cast<size_t>(num_epochs));
}

void AdaptedPolicy::set(int epoch, int state_index, Scenario prefix, int control_index) {
    const int k = epoch - start_;
    if (k < 0 || k >= num_epochs()) throw RangeError("epoch outside policy window");
    if (static_cast<int>(prefix.size()) != k)
        throw RangeError("prefix length must equal epochs elapsed since the window start");
    table_[static_cast<size_t>(k)][{state_index, std::move(prefix)}] = control_index;
}

int AdaptedPolicy::control_at(int epoch, int state_index, std::span<const int> prefix) const {
    const int k = epoch - start_;
    if (k < 0 || k >= num_epochs()) throw RangeError("epoch outside policy window");
    if (static_cast<int>(prefix.size()) != k)
        throw RangeError("prefix length must equal epochs elapsed since the window start");
    const auto& at_epoch = table_[static_cast<size_t>(k)];
    auto it = at_epoch.find({state_index, Scenario(prefix.begin(), prefix.end())});
    if (it == at_epoch.end()) {
        std::ostringstream os;
        os << "adapted policy has no entry at (t=" << epoch << ", state index " << state_index
           << ", prefix length " << prefix.size() << ")";
        throw StrategyDomainError(os.str());
    }
    return it->second;
}

const std::map<std::pair<int, Scenario>, int>& AdaptedPolicy::entries_at(int epoch) const {
    const int k = epoch - start_;
    if (k < 0 || k >= num_epochs()) throw RangeError("epoch outside policy window");
    return table_[static_cast<size_t>(k)];
}

int evaluate_policy(const Strategy& strategy, int epoch, State x, std::span<const int> prefix) {
    if (x.is_cemetery())
        throw StrategyDomainError("policies are not consulted at the cemetery");
    if (const auto* markov = std::get_if<MarkovPolicy>(&strategy))
        return markov->control_at(epoch, x.index);
    return std::get<AdaptedPolicy>(strategy).control_at(epoch, x.index, prefix);
}

int strategy_start(const Strategy& strategy) {
    if (const auto* markov = std::get_if<MarkovPolicy>(&strategy)) return markov->start_epoch();
    return std::get<AdaptedPolicy>(strategy).start_epoch();
}

std::vector<AdmissibilityViolation> check_admissible(const Strategy& strategy,
                                                     const SystemModel& model,
                                                     const ControlTable* constraints) {
    std::vector<AdmissibilityViolation> violations;
    if (constraints == nullptr) return violations;

    if (const auto* markov = std::get_if<MarkovPolicy>(&strategy)) {
        for (int k = 0; k < markov->num_epochs(); ++k) {
            const int t = markov->start_epoch() + k;
            const int nx = model.states_at(t).size();
            for (int x = 0; x < nx; ++x) {
                if (!markov->defined_at(t, x)) continue;
                const int u = markov->control_at(t, x);
                if (!constraints->allows(t, x, u))
                    violations.push_back({t, x, {}, u});
            }
        }
        return violations;
    }

    const auto& adapted = std::get<AdaptedPolicy>(strategy);
    for (int k = 0; k < adapted.num_epochs(); ++k) {
        const int t = adapted.start_epoch() + k;
        for (const auto& [key, u] : adapted.entries_at(t)) {
            if (!constraints->allows(t, key.first, u))
                violations.push_back({t, key.first, key.second, u});
        }
    }
    return violations;
}

AdaptedPolicy markov_to_adapted(const MarkovPolicy& policy, const SystemModel& model,
                                const std::vector<Scenario>& scenarios) {
    AdaptedPolicy adapted(policy.start_epoch(), policy.num_epochs());
    std::set<Scenario> prefixes;
    for (int k = 0; k < policy.num_epochs(); ++k) {
        prefixes.clear();
        for (const auto& scenario : scenarios) {
            if (static_cast<int>(scenario.size()) < k) continue;
            prefixes.insert(Scenario(scenario.begin(), scenario.begin() + k));
        }
        const int t = policy.start_epoch() + k;
        const int nx = model.states_at(t).size();
        for (const auto& prefix : prefixes)
            for (int x = 0; x < nx; ++x)
                if (policy.defined_at(t, x))
                    adapted.set(t, x, prefix, policy.control_at(t, x));
    }
    return adapted;
}

std::optional<MarkovPolicy> adapted_to_markov(const AdaptedPolicy& policy) {
    std::vector<std::map<int, int>> collapsed(static_cast<size_t>(policy.num_epochs()));
    int max_state = -1;
    for (int k = 0; k < policy.num_epochs(); ++k) {
        const int t = policy.start_epoch() + k;
        for (const auto& [key, u] : policy.entries_at(t)) {
            auto [it, inserted] = collapsed[static_cast<size_t>(k)].emplace(key.first, u);
            if (!inserted && it->second != u) return std::nullopt;
            max_state = std::max(max_state, key.first);
        }
    }
    std::vector<int> sizes(static_cast<size_t>(policy.num_epochs()), max_state + 1);
    MarkovPolicy markov(policy.start_epoch(), sizes);
    for (int k = 0; k < policy.num_epochs(); ++k)
        for (const auto& [x, u] : collapsed[static_cast<size_t>(k)])
            markov.set(policy.start_epoch() + k, x, u);
    return markov;
}

MarkovPolicyEnumerator::MarkovPolicyEnumerator(const SystemModel& model, int first_epoch,
                                               int last_epoch,
                                               std::optional<std::vector<std::vector<int>>> restrict_to,
                                               unsigned long long budget)
    : first_(first_epoch) {
    if (first_epoch > last_epoch) throw RangeError("policy window must satisfy first <= last");
    const int window = last_epoch - first_epoch;
    if (restrict_to && static_cast<int>(restrict_to->size()) != window)
        throw RangeError("restrict_to must provide one state list per epoch");

    states_per_epoch_.resize(static_cast<size_t>(window));
    for (int k = 0; k < window; ++k) {
        const int t = first_epoch + k;
        states_per_epoch_[static_cast<size_t>(k)] = model.states_at(t).size();
        std::vector<int> domain;
        if (restrict_to) {
            domain = (*restrict_to)[static_cast<size_t>(k)];
        } else {
            domain.resize(static_cast<size_t>(model.states_at(t).size()));
            for (size_t i = 0; i < domain.size(); ++i) domain[i] = static_cast<int>(i);
        }
        for (int x : domain)
            slots_.push_back({t, x, model.allowed_controls(t, x)});
    }

    count_ = 1;
    for (const auto& slot : slots_)
        count_ = saturating_mul(count_, static_cast<unsigned long long>(slot.choices.size()));
    if (count_ > budget) {
        std::ostringstream os;
        os << "markov policy enumeration of size " << count_ << " exceeds budget " << budget;
        throw BudgetError(os.str(), count_);
    }
    position_.assign(slots_.size(), 0);
    exhausted_ = (count_ == 0);
}

MarkovPolicy MarkovPolicyEnumerator::materialize() const {
    MarkovPolicy policy(first_, states_per_epoch_);
    for (size_t i = 0; i < slots_.size(); ++i)
        policy.set(slots_[i].epoch, slots_[i].state_index, slots_[i].choices[position_[i]]);
    return policy;
}

std::optional<MarkovPolicy> MarkovPolicyEnumerator::next() {
    if (exhausted_) return std::nullopt;
    if (!started_) {
        started_ = true;
        return materialize();
    }
    // Odometer with the rightmost slot moving fastest: lexicographic order.
    size_t i = slots_.size();
    while (i > 0) {
        --i;
        if (++position_[i] < slots_[i].choices.size()) return materialize();
        position_[i] = 0;
    }
    exhausted_ = true;
    return std::nullopt;
}

AdaptedPolicyEnumerator::AdaptedPolicyEnumerator(const SystemModel& model,
                                                 const std::vector<Scenario>& scenarios,
                                                 int start_time, State start_state,
                                                 unsigned long long budget)
    : model_(&model), start_(start_time), start_state_(start_state) {
    window_ = model.grid().final_time() - start_time;
    for (const auto& scenario : scenarios)
        if (static_cast<int>(scenario.size()) != window_)
            throw RangeError("scenario length must match the decision window");

    // Preorder prefix tree of the scenario collection; ancestors precede descendants.
    struct Pending {
        Scenario prefix;
        int parent;
        int edge;
    };
    if (window_ > 0 && !scenarios.empty()) {
        std::vector<Pending> stack;
        stack.push_back({{}, -1, -1});
        while (!stack.empty()) {
            Pending cur = std::move(stack.back());
            stack.pop_back();
            const int depth = static_cast<int>(cur.prefix.size());
            nodes_.push_back({depth, cur.parent, cur.edge, cur.prefix});
            if (depth + 1 > window_ - 1) continue;
            const int self = static_cast<int>(nodes_.size()) - 1;
            std::set<int> extensions;
            for (const auto& scenario : scenarios)
                if (std::equal(cur.prefix.begin(), cur.prefix.end(), scenario.begin()))
                    extensions.insert(scenario[static_cast<size_t>(depth)]);
            // Push in reverse so preorder visits uncertainty indices in increasing order.
            for (auto it = extensions.rbegin(); it != extensions.rend(); ++it) {
                Scenario child = cur.prefix;
                child.push_back(*it);
                stack.push_back({std::move(child), self, *it});
            }
        }
    }

    unsigned long long bound = 1;
    for (const auto& node : nodes_) {
        const int t = start_ + node.depth;
        bound = saturating_mul(bound, static_cast<unsigned long long>(model.controls_at(t).size()));
    }
    if (bound > budget) {
        std::ostringstream os;
        os << "adapted policy enumeration of up to " << bound << " policies exceeds budget " << budget;
        throw BudgetError(os.str(), bound);
    }

    node_state_.assign(nodes_.size(), State::cemetery());
    node_choices_.resize(nodes_.size());
    position_.assign(nodes_.size(), 0);
    if (!nodes_.empty()) refresh_from(0);
    if (nodes_.empty() && window_ > 0)
        exhausted_ = true; // no scenarios given, nothing to enumerate over
}

void AdaptedPolicyEnumerator::refresh_from(size_t node_index) {
    for (size_t i = node_index; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        State x;
        if (node.parent < 0) {
            x = start_state_;
        } else {
            const auto& parent = nodes_[static_cast<size_t>(node.parent)];
            const State px = node_state_[static_cast<size_t>(node.parent)];
            const int pt = start_ + parent.depth;
            const auto& pchoices = node_choices_[static_cast<size_t>(node.parent)];
            const int pu = pchoices.empty() ? 0 : pchoices[position_[static_cast<size_t>(node.parent)]];
            x = px.is_cemetery() ? State::cemetery() : model_->step(pt, px, pu, node.edge);
        }
        node_state_[i] = x;
        const int t = start_ + node.depth;
        if (x.is_cemetery()) {
            node_choices_[i] = {0}; // canonical placeholder, never stored
        } else {
            node_choices_[i] = model_->allowed_controls(t, x.index);
        }
        position_[i] = 0;
    }
}

bool AdaptedPolicyEnumerator::advance() {
    size_t i = nodes_.size();
    while (i > 0) {
        --i;
        if (!node_choices_[i].empty() && position_[i] + 1 < node_choices_[i].size()) {
            ++position_[i];
            if (i + 1 < nodes_.size()) refresh_from(i + 1);
            return true;
        }
        position_[i] = 0;
    }
    return false;
}

AdaptedPolicy AdaptedPolicyEnumerator::materialize() const {
    AdaptedPolicy policy(start_, window_);
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const State x = node_state_[i];
        if (x.is_cemetery()) continue;
        policy.set(start_ + nodes_[i].depth, x.index, nodes_[i].prefix,
                   node_choices_[i][position_[i]]);
    }
    return policy;
}

std::optional<AdaptedPolicy> AdaptedPolicyEnumerator::next() {
    if (exhausted_) return std::nullopt;
    if (window_ == 0) {
        if (started_) return std::nullopt;
        started_ = true;
        return AdaptedPolicy(start_, 0);
    }
    if (!started_) {
        started_ = true;
        bool valid = true;
        for (size_t i = 0; i < nodes_.size(); ++i)
            if (node_choices_[i].empty() && !node_state_[i].is_cemetery()) valid = false;
        if (valid) return materialize();
    }
    while (advance()) {
        bool valid = true;
        for (size_t i = 0; i < nodes_.size(); ++i)
            if (node_choices_[i].empty() && !node_state_[i].is_cemetery()) valid = false;
        if (valid) return materialize();
    }
    exhausted_ = true;
    return std::nullopt;
}

} // namespace reskit
