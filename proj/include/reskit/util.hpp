#pragma once

#include <cstdio>
#include <limits>
#include <string>

namespace reskit {

/// Probability comparisons throughout the library use this absolute tolerance.
inline constexpr double kProbTolerance = 1e-12;

/// Default ceiling on exhaustive enumerations (policies, scenarios).
inline constexpr unsigned long long kDefaultEnumerationBudget = 10'000'000ULL;

/// Formats a real with 12 significant digits (stable across runs and platforms).
inline std::string format_real(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return std::string(buf);
}

/// Compensated (Kahan) accumulator for sums of probabilities and weighted values.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - carry_;
        const double t = total_ + y;
        carry_ = (t - total_) - y;
        total_ = t;
    }
    double value() const noexcept { return total_; }

private:
    double total_ = 0.0;
    double carry_ = 0.0;
};

/// Saturating product for enumeration-size accounting.
inline unsigned long long saturating_mul(unsigned long long a, unsigned long long b) noexcept {
    if (a == 0 || b == 0) return 0;
    const auto max = std::numeric_limits<unsigned long long>::max();
    if (a > max / b) return max;
    return a * b;
}

} // namespace reskit
