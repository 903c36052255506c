#include "lime/multi_user.hpp"

#include <cmath>
#include <string>

#include "lime/errors.hpp"

namespace lime {

namespace {

// |a - b|^2 = Da^2 + Db^2 - 2 Da Db cos(dtheta), rewritten as
// (Da - Db)^2 + 4 Da Db sin^2(dtheta / 2) to avoid cancellation for nearby
// points.
double law_of_cosines(double da, double ta, double db, double tb) {
    const double radial = da - db;
    const double s = std::sin((ta - tb) / 2.0);
    return std::sqrt(radial * radial + 4.0 * da * db * s * s);
}

}  // namespace

double estimate_bearing(const EyeObservation& obs, const CameraIntrinsics& cam) {
    const double o = obs.midpoint_offset_px;
    if (!(std::abs(o) <= cam.frame_width() / 2.0)) {
        throw DomainError("eye midpoint offset " + std::to_string(o) + " px lies outside the frame");
    }
    return cam.fov_h() * o / cam.frame_width();
}

UserPosition locate_viewer(const EyeObservation& obs, const CameraIntrinsics& cam,
                           const InterpupillaryDistance& ipd) {
    return UserPosition{estimate_distance(obs, cam, ipd), estimate_bearing(obs, cam)};
}

ViewerSet locate_viewers(std::span<const EyeObservation> observations, const CameraIntrinsics& cam,
                         const InterpupillaryDistance& ipd) {
    ViewerSet out;
    out.reserve(observations.size());
    for (const auto& obs : observations) {
        out.push_back(locate_viewer(obs, cam, ipd));
    }
    return out;
}

double pairwise_distance(const UserPosition& a, const UserPosition& b) {
    return law_of_cosines(a.distance, a.bearing, b.distance, b.bearing);
}

double pairwise_distance(const UserPosition& a, const CenterPosition& b) {
    return law_of_cosines(a.distance, a.bearing, b.distance, b.bearing);
}

CenterPosition compute_center(std::span<const UserPosition> viewers) {
    if (viewers.empty()) {
        throw EmptySetError("cannot compute the center of an empty viewer set");
    }
    double sum_p = 0.0;
    double sum_q = 0.0;
    for (const auto& v : viewers) {
        sum_p += v.distance * std::cos(v.bearing);
        sum_q += v.distance * std::sin(v.bearing);
    }
    const auto n = static_cast<double>(viewers.size());
    const double p = sum_p / n;
    const double q = sum_q / n;
    const double distance = std::hypot(p, q);
    if (distance == 0.0) {
        return CenterPosition{0.0, 0.0};
    }
    return CenterPosition{distance, std::atan2(q, p)};
}

double objective_value(std::span<const UserPosition> viewers, const CenterPosition& candidate) {
    double total = 0.0;
    for (const auto& v : viewers) {
        const double d = pairwise_distance(v, candidate);
        total += d * d;
    }
    return total;
}

}  // namespace lime
