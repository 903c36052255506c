#include "lime/camera_geometry.hpp"

#include <cmath>
#include <string>

#include "lime/errors.hpp"

namespace lime {

CameraIntrinsics::CameraIntrinsics(double fov_h, double frame_width)
    : fov_h_(fov_h), frame_width_(frame_width) {
    if (!(fov_h > 0.0 && fov_h < kPi)) {
        throw DomainError("field of view must lie in (0, pi) radians, got " + std::to_string(fov_h));
    }
    if (!(frame_width > 0.0) || !std::isfinite(frame_width)) {
        throw DomainError("frame width must be positive, got " + std::to_string(frame_width));
    }
}

InterpupillaryDistance::InterpupillaryDistance(double cm) : cm_(cm) {
    if (!(cm > 0.0) || !std::isfinite(cm)) {
        throw DomainError("interpupillary distance must be positive, got " + std::to_string(cm));
    }
}

double estimate_distance(const EyeObservation& obs, const CameraIntrinsics& cam,
                         const InterpupillaryDistance& ipd) {
    const double e = obs.eye_distance_px;
    if (!(e > 0.0)) {
        throw DomainError("eye distance must be positive, got " + std::to_string(e));
    }
    const double half_angle = cam.fov_h() * e / (2.0 * cam.frame_width());
    if (!(half_angle < kPi / 2.0)) {
        throw DomainError("eye distance " + std::to_string(e) + " px is too wide for the camera model");
    }
    return ipd.cm() / (2.0 * std::tan(half_angle));
}

double angular_fraction(const EyeObservation& obs, const CameraIntrinsics& cam) {
    const double e = obs.eye_distance_px;
    if (!(e > 0.0 && e <= cam.frame_width())) {
        throw DomainError("eye distance must lie in (0, frame width], got " + std::to_string(e));
    }
    return e / cam.frame_width();
}

double project_eye_distance(double distance_cm, const CameraIntrinsics& cam,
                            const InterpupillaryDistance& ipd) {
    if (!(distance_cm > 0.0)) {
        throw DomainError("viewer distance must be positive, got " + std::to_string(distance_cm));
    }
    const double e = (2.0 * cam.frame_width() / cam.fov_h()) * std::atan(ipd.cm() / (2.0 * distance_cm));
    if (e > cam.frame_width()) {
        throw DomainError("viewer at " + std::to_string(distance_cm) + " cm is too close: eyes exceed the frame");
    }
    return e;
}

}  // namespace lime
