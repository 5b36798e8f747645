#include "reskit/probability.hpp"

#include <cmath>
#include <sstream>

#include "reskit/errors.hpp"

namespace reskit {

void validate_probability(const ProbabilityModel& model) {
    if (const auto* wn = std::get_if<WhiteNoise>(&model)) {
        for (size_t k = 0; k < wn->weights.size(); ++k) {
            KahanSum sum;
            for (double p : wn->weights[k]) {
                if (p < 0.0) throw RangeError("negative probability weight");
                sum.add(p);
            }
            if (std::abs(sum.value() - 1.0) > kProbTolerance) {
                std::ostringstream os;
                os << "white-noise weights at epoch offset " << k << " sum to " << sum.value();
                throw RangeError(os.str());
            }
        }
        return;
    }
    const auto& ws = std::get<WeightedScenarios>(model);
    KahanSum sum;
    for (const auto& [scenario, w] : ws.atoms) {
        if (w < 0.0) throw RangeError("negative probability weight");
        sum.add(w);
    }
    if (std::abs(sum.value() - 1.0) > kProbTolerance)
        throw RangeError("scenario weights must sum to one");
}

bool is_white_noise(const ProbabilityModel& model) {
    return std::holds_alternative<WhiteNoise>(model);
}

double scenario_weight(const ProbabilityModel& model, int window_start, const Scenario& scenario) {
    if (const auto* wn = std::get_if<WhiteNoise>(&model)) {
        double weight = 1.0;
        for (size_t k = 0; k < scenario.size(); ++k) {
            const int offset = window_start - wn->start_epoch + static_cast<int>(k);
            if (offset < 0 || offset >= static_cast<int>(wn->weights.size()))
                throw RangeError("scenario window outside the white-noise model");
            const auto& stage = wn->weights[static_cast<size_t>(offset)];
            if (scenario[k] < 0 || scenario[k] >= static_cast<int>(stage.size()))
                throw RangeError("uncertainty index outside the white-noise model");
            weight *= stage[static_cast<size_t>(scenario[k])];
        }
        return weight;
    }
    const auto& ws = std::get<WeightedScenarios>(model);
    if (window_start != ws.start_epoch)
        throw RangeError("scenario window does not match the weighted-scenario model");
    for (const auto& [atom, w] : ws.atoms)
        if (atom == scenario) return w;
    return 0.0;
}

std::vector<Scenario> probability_support(const ProbabilityModel& model, int window_start,
                                          int window_length, unsigned long long budget) {
    if (const auto* wn = std::get_if<WhiteNoise>(&model)) {
        std::vector<std::vector<int>> positive(static_cast<size_t>(window_length));
        unsigned long long count = 1;
        for (int k = 0; k < window_length; ++k) {
            const int offset = window_start - wn->start_epoch + k;
            if (offset < 0 || offset >= static_cast<int>(wn->weights.size()))
                throw RangeError("scenario window outside the white-noise model");
            const auto& stage = wn->weights[static_cast<size_t>(offset)];
            for (size_t w = 0; w < stage.size(); ++w)
                if (stage[w] > 0.0) positive[static_cast<size_t>(k)].push_back(static_cast<int>(w));
            count = saturating_mul(count, static_cast<unsigned long long>(positive[static_cast<size_t>(k)].size()));
        }
        if (count > budget) {
            std::ostringstream os;
            os << "white-noise support of size " << count << " exceeds budget " << budget;
            throw BudgetError(os.str(), count);
        }
        std::vector<Scenario> support;
        if (count == 0) return support;
        support.reserve(static_cast<size_t>(count));
        std::vector<size_t> pos(static_cast<size_t>(window_length), 0);
        while (true) {
            Scenario scenario(static_cast<size_t>(window_length));
            for (int k = 0; k < window_length; ++k)
                scenario[static_cast<size_t>(k)] = positive[static_cast<size_t>(k)][pos[static_cast<size_t>(k)]];
            support.push_back(std::move(scenario));
            int k = window_length;
            bool advanced = false;
            while (k > 0) {
                --k;
                if (++pos[static_cast<size_t>(k)] < positive[static_cast<size_t>(k)].size()) {
                    advanced = true;
                    break;
                }
                pos[static_cast<size_t>(k)] = 0;
            }
            if (!advanced) break;
        }
        return support;
    }

    const auto& ws = std::get<WeightedScenarios>(model);
    if (window_start != ws.start_epoch)
        throw RangeError("scenario window does not match the weighted-scenario model");
    std::vector<Scenario> support;
    for (const auto& [atom, w] : ws.atoms) {
        if (static_cast<int>(atom.size()) != window_length)
            throw RangeError("weighted scenario has the wrong window length");
        if (w > 0.0) support.push_back(atom);
    }
    return support;
}

} // namespace reskit
