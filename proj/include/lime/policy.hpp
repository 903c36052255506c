#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lime/multi_user.hpp"

namespace lime {

/// Distance-to-font-size curve: piecewise linear through the breakpoints,
/// flat beyond the first and last, clamped to [min_size, max_size].
class FontPolicy {
public:
    struct Breakpoint {
        double distance_cm;
        double size_pt;
    };

    static constexpr double kDefaultHysteresisPt = 1.5;

    /// Throws ConfigError unless there are at least two breakpoints, both
    /// coordinates strictly increase, and every size lies in
    /// [min_size, max_size].
    FontPolicy(std::vector<Breakpoint> breakpoints, double min_size, double max_size);

    /// {(20, 12), (40, 18), (60, 26), (80, 36)} within [12, 36] pt.
    static FontPolicy standard();

    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
    double min_size() const { return min_size_; }
    double max_size() const { return max_size_; }

private:
    std::vector<Breakpoint> breakpoints_;
    double min_size_;
    double max_size_;
};

struct DisplayDecision {
    double font_size = 0.0;
    CenterPosition source_center;
    bool hysteresis_applied = false;
};

/// Font size for the viewing center; only the distance is used.
double font_size_for(const CenterPosition& center, const FontPolicy& policy);

/// Keeps the previous size while the candidate stays within `band` of it.
/// `center` is recorded as the decision's source.
DisplayDecision apply_hysteresis(const std::optional<DisplayDecision>& previous, double candidate, double band,
                                 const CenterPosition& center = {});

}  // namespace lime
