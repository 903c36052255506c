#include "lime/policy.hpp"

#include <algorithm>
#include <cmath>

#include "lime/errors.hpp"

namespace lime {

FontPolicy::FontPolicy(std::vector<Breakpoint> breakpoints, double min_size, double max_size)
    : breakpoints_(std::move(breakpoints)), min_size_(min_size), max_size_(max_size) {
    if (breakpoints_.size() < 2) throw ConfigError("font policy needs at least two breakpoints");
    if (!(min_size_ <= max_size_)) throw ConfigError("font policy min_size exceeds max_size");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const auto& b = breakpoints_[i];
        if (!std::isfinite(b.distance_cm) || !(b.size_pt >= min_size_ && b.size_pt <= max_size_)) {
            throw ConfigError("font policy breakpoint size outside [min_size, max_size]");
        }
        if (i > 0 && !(b.distance_cm > breakpoints_[i - 1].distance_cm && b.size_pt > breakpoints_[i - 1].size_pt)) {
            throw ConfigError("font policy breakpoints must strictly increase in distance and size");
        }
    }
}

FontPolicy FontPolicy::standard() {
    return FontPolicy({{20.0, 12.0}, {40.0, 18.0}, {60.0, 26.0}, {80.0, 36.0}}, 12.0, 36.0);
}

double font_size_for(const CenterPosition& center, const FontPolicy& policy) {
    const auto& bp = policy.breakpoints();
    const double d = center.distance;
    double size = 0.0;
    if (d <= bp.front().distance_cm) {
        size = bp.front().size_pt;
    } else if (d >= bp.back().distance_cm) {
        size = bp.back().size_pt;
    } else {
        const auto upper = std::upper_bound(bp.begin(), bp.end(), d,
                                            [](double x, const FontPolicy::Breakpoint& b) { return x < b.distance_cm; });
        const auto lower = std::prev(upper);
        const double t = (d - lower->distance_cm) / (upper->distance_cm - lower->distance_cm);
        size = std::lerp(lower->size_pt, upper->size_pt, t);
    }
    return std::clamp(size, policy.min_size(), policy.max_size());
}

DisplayDecision apply_hysteresis(const std::optional<DisplayDecision>& previous, double candidate, double band,
                                 const CenterPosition& center) {
    if (!(band >= 0.0)) throw ConfigError("hysteresis band must be >= 0");
    if (previous && std::abs(candidate - previous->font_size) <= band) {
        return DisplayDecision{previous->font_size, center, true};
    }
    return DisplayDecision{candidate, center, false};
}

}  // namespace lime
