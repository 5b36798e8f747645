#pragma once

// Shared fixtures for the unit and acceptance suites: the stock3 model (a
// four-level stock with one-step orders and white-noise demand) and randomized
// micro-models small enough for exhaustive oracles.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "reskit/constraint.hpp"
#include "reskit/model.hpp"
#include "reskit/probability.hpp"
#include "reskit/strategy.hpp"

namespace fixtures {

/// xorshift64*; deterministic across platforms, unlike <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dULL;
    }
    /// Uniform in {0, ..., n-1}.
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
    bool coin() { return (next() & 1) != 0; }

private:
    std::uint64_t state_;
};

/// stock3: levels {0..3}, orders {0,1}, demand {0,1}, horizon 3,
/// next = clamp(x + u - w), hard constraint u <= x.
inline reskit::SystemModel make_stock3() {
    using namespace reskit;
    std::vector<Label> levels = {"0", "1", "2", "3"};
    std::vector<Label> binary = {"0", "1"};
    std::vector<DynamicsRecord> dynamics;
    for (int t = 0; t < 3; ++t)
        for (int x = 0; x <= 3; ++x)
            for (int u = 0; u <= 1; ++u)
                for (int w = 0; w <= 1; ++w) {
                    const int next = std::clamp(x + u - w, 0, 3);
                    dynamics.push_back({t, std::to_string(x), std::to_string(u),
                                        std::to_string(w), std::to_string(next)});
                }
    std::vector<HardConstraintRecord> hard;
    for (int t = 0; t < 3; ++t) hard.push_back({t, "0", {"0"}});
    return SystemModel(TimeGrid(0, 3), std::vector<LabeledSet>(4, LabeledSet(levels)),
                       std::vector<LabeledSet>(3, LabeledSet(binary)),
                       std::vector<LabeledSet>(3, LabeledSet(binary)), dynamics, std::move(hard));
}

/// K = {2,3} at every time plus the admissible-control map u <= x.
inline reskit::ConstraintMap stock3_constraints(const reskit::SystemModel& model,
                                                bool with_controls = true) {
    using namespace reskit;
    std::vector<std::vector<bool>> acceptable(4, {false, false, true, true});
    if (!with_controls) return ConstraintMap(model.grid().start(), std::move(acceptable));
    std::vector<std::vector<std::vector<int>>> allowed(3);
    for (int k = 0; k < 3; ++k) {
        allowed[k] = {{0}, {0, 1}, {0, 1}, {0, 1}};
    }
    return ConstraintMap(model.grid().start(), std::move(acceptable),
                         ControlTable(model.grid().start(), std::move(allowed)));
}

inline reskit::ProbabilityModel stock3_white_noise(const reskit::SystemModel& model) {
    reskit::WhiteNoise noise;
    noise.start_epoch = model.grid().start();
    noise.weights.assign(3, {0.5, 0.5});
    return noise;
}

/// Markov policy using one fixed control everywhere.
inline reskit::MarkovPolicy constant_policy(const reskit::SystemModel& model, int control) {
    const auto& grid = model.grid();
    std::vector<int> sizes;
    for (int t = grid.start(); t < grid.final_time(); ++t)
        sizes.push_back(model.states_at(t).size());
    reskit::MarkovPolicy policy(grid.start(), sizes);
    for (int t = grid.start(); t < grid.final_time(); ++t)
        for (int x = 0; x < model.states_at(t).size(); ++x) policy.set(t, x, control);
    return policy;
}

/// Random model with <= 4 states, <= 2 controls, <= 2 uncertainties and horizon
/// <= 3. Transitions occasionally target the cemetery; half the models carry
/// hard control constraints.
inline reskit::SystemModel random_micro_model(Rng& rng) {
    using namespace reskit;
    const int horizon = 1 + rng.below(3);
    const int nx = 1 + rng.below(4);
    const int nu = 1 + rng.below(2);
    const int nw = 1 + rng.below(2);

    auto labels = [](int n) {
        std::vector<Label> out;
        for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
        return out;
    };

    std::vector<DynamicsRecord> dynamics;
    for (int t = 0; t < horizon; ++t)
        for (int x = 0; x < nx; ++x)
            for (int u = 0; u < nu; ++u)
                for (int w = 0; w < nw; ++w) {
                    const int target = rng.below(nx + 1);
                    const Label next =
                        target == nx ? Label(kCemeteryLabel) : std::to_string(target);
                    dynamics.push_back(
                        {t, std::to_string(x), std::to_string(u), std::to_string(w), next});
                }

    std::optional<std::vector<HardConstraintRecord>> hard;
    if (rng.coin()) {
        hard.emplace();
        for (int t = 0; t < horizon; ++t)
            for (int x = 0; x < nx; ++x) {
                std::vector<Label> allowed;
                for (int u = 0; u < nu; ++u)
                    if (rng.coin()) allowed.push_back(std::to_string(u));
                if (allowed.empty()) allowed.push_back(std::to_string(rng.below(nu)));
                hard->push_back({t, std::to_string(x), std::move(allowed)});
            }
    }

    return SystemModel(TimeGrid(0, horizon), std::vector<LabeledSet>(horizon + 1, LabeledSet(labels(nx))),
                       std::vector<LabeledSet>(horizon, LabeledSet(labels(nu))),
                       std::vector<LabeledSet>(horizon, LabeledSet(labels(nw))), dynamics,
                       std::move(hard));
}

/// Random constant acceptable set (possibly empty) with an optional admissible
/// control map.
inline reskit::ConstraintMap random_constraints(Rng& rng, const reskit::SystemModel& model) {
    using namespace reskit;
    const auto& grid = model.grid();
    const int nx = model.states_at(grid.start()).size();
    std::vector<bool> mask(nx, false);
    for (int x = 0; x < nx; ++x) mask[x] = rng.coin();
    std::vector<std::vector<bool>> acceptable(grid.num_times(), mask);

    std::optional<ControlTable> controls;
    if (rng.below(10) < 3) {
        std::vector<std::vector<std::vector<int>>> allowed(grid.horizon());
        for (int k = 0; k < grid.horizon(); ++k) {
            const int nu = model.controls_at(grid.start() + k).size();
            allowed[k].resize(nx);
            for (int x = 0; x < nx; ++x) {
                for (int u = 0; u < nu; ++u)
                    if (rng.coin()) allowed[k][x].push_back(u);
                if (allowed[k][x].empty()) allowed[k][x].push_back(rng.below(nu));
            }
        }
        controls.emplace(grid.start(), std::move(allowed));
    }
    return ConstraintMap(grid.start(), std::move(acceptable), std::move(controls));
}

/// Per-epoch distributions with exact eighth-weights, so probability sums stay
/// representable.
inline reskit::ProbabilityModel random_white_noise(Rng& rng, const reskit::SystemModel& model) {
    reskit::WhiteNoise noise;
    noise.start_epoch = model.grid().start();
    noise.weights.resize(model.grid().horizon());
    for (int k = 0; k < model.grid().horizon(); ++k) {
        const int nw = model.uncertainties_at(model.grid().start() + k).size();
        if (nw == 1) {
            noise.weights[k] = {1.0};
        } else {
            const int eighths = 1 + rng.below(7);
            noise.weights[k] = {eighths / 8.0, (8 - eighths) / 8.0};
        }
    }
    return noise;
}

/// Uniform random Markov policy on the whole grid, respecting hard constraints.
inline reskit::MarkovPolicy random_policy(Rng& rng, const reskit::SystemModel& model) {
    const auto& grid = model.grid();
    std::vector<int> sizes;
    for (int t = grid.start(); t < grid.final_time(); ++t)
        sizes.push_back(model.states_at(t).size());
    reskit::MarkovPolicy policy(grid.start(), sizes);
    for (int t = grid.start(); t < grid.final_time(); ++t)
        for (int x = 0; x < model.states_at(t).size(); ++x) {
            const auto& allowed = model.allowed_controls(t, x);
            policy.set(t, x, allowed[rng.below(static_cast<int>(allowed.size()))]);
        }
    return policy;
}

} // namespace fixtures
